//! Binary PPM (P6) and PGM (P5) with maxval 255.

use std::path::{Path, PathBuf};

use crate::codec::ImageBuffer;
use crate::error::{Error, Result};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl Cursor<'_> {
    fn fail(&self, message: impl Into<String>) -> Error {
        Error::Format {
            path: self.path.to_path_buf(),
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.fail(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.fail(format!("{what} out of range")))
    }
}

/// Parses a P5/P6 image held in memory; `path` only labels errors.
pub fn parse_pnm(bytes: &[u8], path: &Path) -> Result<ImageBuffer> {
    let mut c = Cursor {
        bytes,
        pos: 0,
        path,
    };
    let channels = match bytes.get(..2) {
        Some(b"P6") => 3,
        Some(b"P5") => 1,
        _ => return Err(c.fail("bad magic, expected P5 or P6")),
    };
    c.pos = 2;
    let width = c.number("width")?;
    let height = c.number("height")?;
    let maxval = c.number("maxval")?;
    if maxval != 255 {
        return Err(c.fail(format!("maxval {maxval} unsupported, expected 255")));
    }
    if !c.bytes.get(c.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(c.fail("expected whitespace after maxval"));
    }
    c.pos += 1;
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| c.fail("dimensions overflow"))?;
    let have = bytes.len() - c.pos;
    if have < need {
        c.pos = bytes.len();
        return Err(c.fail(format!("truncated payload: {have} of {need} bytes")));
    }
    let samples = bytes[c.pos..c.pos + need].to_vec();
    ImageBuffer::new(width, height, channels, samples).map_err(|e| c.fail(e.to_string()))
}

pub fn read_pnm(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_pnm(&bytes, path)
}

/// Alias kept for the common colour case.
pub fn read_ppm(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    read_pnm(path)
}

pub fn encode_pnm(img: &ImageBuffer) -> Vec<u8> {
    let magic = if img.channels() == 3 { "P6" } else { "P5" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.samples());
    out
}

pub fn write_pnm(path: impl AsRef<Path>, img: &ImageBuffer) -> Result<()> {
    super::write_atomic(path.as_ref(), &encode_pnm(img))
}

pub fn write_ppm(path: impl AsRef<Path>, img: &ImageBuffer) -> Result<()> {
    write_pnm(path, img)
}

/// Image name used in reports: the file stem.
pub fn image_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| PathBuf::from(path).display().to_string())
}
