//! `FR32` raster layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "FR32"
//! 4       2     version (1)
//! 6       2     channel_count (1 or 2)
//! 8       4     width
//! 12      4     height
//! 16      4·c·w·h  channel-planar, row-major f32 values
//! ...     per channel: u8 length + ASCII label ("VV" / "VH")
//! ```

use std::path::Path;

use super::{read_file, write_atomic, FormatError};
use crate::error::{Error, Result};
use crate::raster::{Plane, Polarization, Raster};

pub const RASTER_MAGIC: &[u8; 4] = b"FR32";
pub const RASTER_VERSION: u16 = 1;
const HEADER_LEN: usize = 16;

pub fn encode_raster(raster: &Raster<f32>) -> Vec<u8> {
    let (w, h) = raster.dims();
    let c = raster.channels().len();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * c * w * h + 3 * c);
    out.extend_from_slice(RASTER_MAGIC);
    out.extend_from_slice(&RASTER_VERSION.to_le_bytes());
    out.extend_from_slice(&(c as u16).to_le_bytes());
    out.extend_from_slice(&(w as u32).to_le_bytes());
    out.extend_from_slice(&(h as u32).to_le_bytes());
    for plane in raster.channels() {
        for v in plane.as_slice() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    for label in raster.labels() {
        let s = label.as_str();
        out.push(s.len() as u8);
        out.extend_from_slice(s.as_bytes());
    }
    out
}

fn u16_at(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn parse_footer(bytes: &[u8], mut at: usize, count: usize) -> std::result::Result<Vec<Polarization>, FormatError> {
    let mut labels = Vec::with_capacity(count);
    for _ in 0..count {
        let bad = |offset, reason: String| FormatError::BadFooter { offset, reason };
        let len = *bytes.get(at).ok_or_else(|| bad(at, "missing label length".into()))? as usize;
        let text = bytes
            .get(at + 1..at + 1 + len)
            .ok_or_else(|| bad(at, format!("label of {len} bytes runs past end of file")))?;
        let text = std::str::from_utf8(text)
            .ok()
            .filter(|t| t.is_ascii())
            .ok_or_else(|| bad(at + 1, "label is not ASCII".into()))?;
        labels.push(text.parse().map_err(|e: String| bad(at + 1, e))?);
        at += 1 + len;
    }
    if at != bytes.len() {
        return Err(FormatError::BadFooter {
            offset: at,
            reason: format!("{} trailing bytes", bytes.len() - at),
        });
    }
    Ok(labels)
}

pub fn decode_raster(bytes: &[u8]) -> Result<Raster<f32>> {
    if bytes.len() < 4 || &bytes[..4] != RASTER_MAGIC {
        return Err(FormatError::BadMagic {
            offset: 0,
            expected: "FR32".into(),
            found: String::from_utf8_lossy(&bytes[..bytes.len().min(4)]).into_owned(),
        }
        .into());
    }
    if bytes.len() < HEADER_LEN {
        return Err(FormatError::TruncatedHeader { offset: bytes.len() }.into());
    }
    let version = u16_at(bytes, 4);
    if version != RASTER_VERSION {
        return Err(FormatError::UnsupportedVersion { offset: 4, version }.into());
    }
    let channels = u16_at(bytes, 6) as usize;
    let width = u32_at(bytes, 8) as usize;
    let height = u32_at(bytes, 12) as usize;
    if !(1..=2).contains(&channels) {
        return Err(FormatError::BadHeader {
            offset: 6,
            reason: format!("channel count {channels} not in 1..=2"),
        }
        .into());
    }
    if width == 0 || height == 0 {
        return Err(FormatError::BadHeader {
            offset: 8,
            reason: format!("empty raster {width}x{height}"),
        }
        .into());
    }
    let plane_len = width * height;
    let payload_end = HEADER_LEN + 4 * channels * plane_len;
    let truncated = FormatError::TruncatedPayload {
        offset: bytes.len(),
        expected: payload_end,
    };
    if bytes.len() < payload_end {
        return Err(truncated.into());
    }
    let labels = match parse_footer(bytes, payload_end, channels) {
        Ok(labels) => labels,
        // Every label takes at least two bytes; a file too short to hold the
        // footer is missing payload bytes rather than carrying a bad footer.
        Err(_) if bytes.len() < payload_end + 2 * channels => return Err(truncated.into()),
        Err(e) => return Err(e.into()),
    };
    let planes = bytes[HEADER_LEN..payload_end]
        .chunks_exact(4 * plane_len)
        .map(|chunk| {
            let data = chunk
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
                .collect();
            Plane::new(width, height, data)
        })
        .collect::<Result<Vec<_>>>()?;
    Raster::new(planes, labels).map_err(|e| match e {
        Error::InvalidFrame(reason) => FormatError::BadFooter {
            offset: payload_end,
            reason,
        }
        .into(),
        other => other,
    })
}

pub fn read_raster(path: &Path) -> Result<Raster<f32>> {
    decode_raster(&read_file(path)?)
}

pub fn write_raster(raster: &Raster<f32>, path: &Path) -> Result<()> {
    write_atomic(path, &encode_raster(raster))
}
