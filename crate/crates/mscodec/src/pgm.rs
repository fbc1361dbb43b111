//! Binary PGM (P5) reader and writer, maxval 255 only.

use crate::{Error, Image, Result};

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws_and_comments(&mut self) {
        while self.pos < self.data.len() {
            let b = self.data[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn read_uint(&mut self) -> Result<u32> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::PgmHeader("expected integer".into()));
        }
        let s = std::str::from_utf8(&self.data[start..self.pos]).unwrap();
        s.parse::<u32>()
            .map_err(|_| Error::PgmHeader(format!("integer out of range: {s}")))
    }
}

pub fn read_pgm(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::PgmHeader("missing P5 magic".into()));
    }
    let mut cur = Cursor { data: bytes, pos: 2 };
    let width = cur.read_uint()? as usize;
    let height = cur.read_uint()? as usize;
    let maxval = cur.read_uint()?;
    if width == 0 || height == 0 {
        return Err(Error::PgmHeader("zero dimension".into()));
    }
    if maxval != 255 {
        return Err(Error::PgmMaxval(maxval));
    }
    // exactly one whitespace byte separates maxval from pixel data
    if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
        return Err(Error::PgmHeader("missing separator after maxval".into()));
    }
    cur.pos += 1;
    let expected = width * height;
    let rest = &bytes[cur.pos..];
    if rest.len() < expected {
        return Err(Error::PgmTruncated { expected, got: rest.len() });
    }
    let samples = rest[..expected].iter().map(|&b| b as f64).collect();
    Ok(Image::new(width, height, samples))
}

pub fn write_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.samples.iter().map(|&v| v.round().clamp(0.0, 255.0) as u8));
    out
}
