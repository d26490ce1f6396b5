//! On-disk formats: `FR32` float rasters and binary PGM masks.

mod pgm;
mod raster_file;

pub use pgm::{decode_mask, encode_mask, read_mask, write_mask, write_water_map};
pub use raster_file::{decode_raster, encode_raster, read_raster, write_raster, RASTER_MAGIC, RASTER_VERSION};

use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::error::{Error, Result};

/// Malformed file contents. Offsets are byte positions in the file.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic {found:?} at offset {offset}, expected {expected:?}")]
    BadMagic {
        offset: usize,
        expected: String,
        found: String,
    },

    #[error("unsupported version {version} at offset {offset}")]
    UnsupportedVersion { offset: usize, version: u16 },

    #[error("truncated payload: file ends at offset {offset}, expected at least {expected} bytes")]
    TruncatedPayload { offset: usize, expected: usize },

    #[error("truncated header at offset {offset}")]
    TruncatedHeader { offset: usize },

    #[error("malformed header at offset {offset}: {reason}")]
    BadHeader { offset: usize, reason: String },

    #[error("malformed channel label footer at offset {offset}: {reason}")]
    BadFooter { offset: usize, reason: String },

    #[error("non-binary mask value {value} at offset {offset}")]
    NonBinaryValue { offset: usize, value: u8 },
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes through a temporary file in the target directory, then renames it
/// into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
