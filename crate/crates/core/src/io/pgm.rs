//! Binary masks as 8-bit `P5` PGM: set pixels are 255, others 0.

use std::path::Path;

use super::{read_file, write_atomic, FormatError};
use crate::error::Result;
use crate::raster::{BinaryMap, FloodMask};

pub fn encode_mask(width: usize, height: usize, set: &[bool]) -> Vec<u8> {
    assert_eq!(set.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend(set.iter().map(|&s| if s { 255u8 } else { 0 }));
    out
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl HeaderReader<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.at) {
            if b == b'#' {
                while self.bytes.get(self.at).is_some_and(|&b| b != b'\n') {
                    self.at += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.at += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> std::result::Result<usize, FormatError> {
        self.skip_space_and_comments();
        let start = self.at;
        while self.bytes.get(self.at).is_some_and(u8::is_ascii_digit) {
            self.at += 1;
        }
        if start == self.at {
            return Err(if self.at >= self.bytes.len() {
                FormatError::TruncatedHeader { offset: self.at }
            } else {
                FormatError::BadHeader {
                    offset: start,
                    reason: format!("expected {what}"),
                }
            });
        }
        std::str::from_utf8(&self.bytes[start..self.at])
            .unwrap()
            .parse()
            .map_err(|_| FormatError::BadHeader {
                offset: start,
                reason: format!("{what} out of range"),
            })
    }
}

/// Parses a mask PGM into `(width, height, set pixels)`.
pub fn decode_mask(bytes: &[u8]) -> std::result::Result<(usize, usize, Vec<bool>), FormatError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(FormatError::BadMagic {
            offset: 0,
            expected: "P5".into(),
            found: String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned(),
        });
    }
    let mut header = HeaderReader { bytes, at: 2 };
    let width = header.number("width")?;
    let height = header.number("height")?;
    let maxval_at = header.at;
    let maxval = header.number("maxval")?;
    if maxval != 255 {
        return Err(FormatError::BadHeader {
            offset: maxval_at,
            reason: format!("maxval {maxval}, expected 255"),
        });
    }
    match bytes.get(header.at) {
        Some(b) if b.is_ascii_whitespace() => {}
        Some(_) => {
            return Err(FormatError::BadHeader {
                offset: header.at,
                reason: "expected whitespace after maxval".into(),
            })
        }
        None => return Err(FormatError::TruncatedHeader { offset: header.at }),
    }
    let start = header.at + 1;
    let end = start + width * height;
    if bytes.len() < end {
        return Err(FormatError::TruncatedPayload {
            offset: bytes.len(),
            expected: end,
        });
    }
    if bytes.len() > end {
        return Err(FormatError::BadHeader {
            offset: end,
            reason: format!("{} trailing bytes after payload", bytes.len() - end),
        });
    }
    bytes[start..end]
        .iter()
        .enumerate()
        .map(|(i, &value)| match value {
            0 => Ok(false),
            255 => Ok(true),
            value => Err(FormatError::NonBinaryValue {
                offset: start + i,
                value,
            }),
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(|set| (width, height, set))
}

pub fn write_mask(mask: &FloodMask, path: &Path) -> Result<()> {
    write_atomic(path, &encode_mask(mask.width(), mask.height(), mask.as_slice()))
}

/// Writes water pixels as 255.
pub fn write_water_map(map: &BinaryMap, path: &Path) -> Result<()> {
    write_atomic(path, &encode_mask(map.width(), map.height(), &map.water_mask()))
}

/// Reads a mask file. The frame index is not stored on disk and is set to 0.
pub fn read_mask(path: &Path) -> Result<FloodMask> {
    let (width, height, set) = decode_mask(&read_file(path)?)?;
    FloodMask::new(width, height, set, 0)
}
