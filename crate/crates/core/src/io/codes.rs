//! Binary code-matrix files.
//!
//! ```text
//! offset  size  field
//!      0     8  magic "FOACODES"
//!      8     4  version (1)
//!     12     4  N, codebooks per channel
//!     16     4  frames
//!     20     4  vocabulary size V (padding code = V)
//!     24     4  pattern id: 0 raw, 1 proposed, 2 sequential-delay,
//!               3 residual-only, 4 spatial-only
//!     28     4  columns (frames for raw files, steps otherwise)
//!     32     -  4N x columns u16 codes, row-major
//! ```
//!
//! All integers are little-endian.

use std::path::Path;

use crate::error::{Error, ParseError, Result};
use crate::pattern::{CodeMatrix, Pattern, ReorgMatrix};

pub const MAGIC: &[u8; 8] = b"FOACODES";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeFile {
    Raw(CodeMatrix),
    Packed(ReorgMatrix),
}

impl CodeFile {
    pub fn pattern(&self) -> Option<Pattern> {
        match self {
            CodeFile::Raw(_) => None,
            CodeFile::Packed(r) => Some(r.pattern()),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let (n, frames, vocab, id, cols, codes) = match self {
            CodeFile::Raw(c) => (c.n_per_channel(), c.frames(), c.vocab_size(), 0, c.frames(), c.codes()),
            CodeFile::Packed(r) => (r.n_per_channel(), r.frames(), r.vocab_size(), r.pattern().id(), r.steps(), r.codes()),
        };
        let mut out = Vec::with_capacity(HEADER_LEN + 2 * codes.len());
        out.extend_from_slice(MAGIC);
        for v in [VERSION, n as u32, frames as u32, vocab as u32, id, cols as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        codes.iter().for_each(|c| out.extend_from_slice(&c.to_le_bytes()));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            if bytes.len() >= 8 && &bytes[..8] != MAGIC {
                return Err(Error::parse(0, ParseError::BadMagic));
            }
            return Err(Error::parse(
                bytes.len() as u64,
                ParseError::Truncated {
                    expected: HEADER_LEN as u64,
                    found: bytes.len() as u64,
                },
            ));
        }
        if &bytes[..8] != MAGIC {
            return Err(Error::parse(0, ParseError::BadMagic));
        }
        let word = |i: usize| {
            let o = 8 + 4 * i;
            u32::from_le_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]])
        };
        let version = word(0);
        if version != VERSION {
            return Err(Error::parse(8, ParseError::UnsupportedVersion(version)));
        }
        let (n, frames, vocab, id, cols) = (word(1) as usize, word(2) as usize, word(3), word(4), word(5) as usize);
        if n == 0 || frames == 0 {
            return Err(Error::parse(12, ParseError::InvalidContent("zero codebooks or frames".into())));
        }
        if vocab == 0 || vocab >= u16::MAX as u32 {
            return Err(Error::parse(20, ParseError::InvalidContent(format!("vocabulary size {vocab}"))));
        }
        let pattern = match id {
            0 => None,
            _ => Some(Pattern::from_id(id).ok_or_else(|| Error::parse(24, ParseError::UnknownPattern(id)))?),
        };
        let expected_cols = pattern.map_or(frames, |p| p.steps(n, frames));
        if cols != expected_cols {
            return Err(Error::parse(
                28,
                ParseError::InvalidContent(format!("{cols} columns, expected {expected_cols}")),
            ));
        }
        let expected = (4 * n * cols * 2) as u64;
        let payload = &bytes[HEADER_LEN..];
        let found = payload.len() as u64;
        if found < expected {
            return Err(Error::parse(bytes.len() as u64, ParseError::Truncated { expected, found }));
        }
        if found > expected {
            return Err(Error::parse(HEADER_LEN as u64 + expected, ParseError::TrailingBytes { expected, found }));
        }
        let codes: Vec<u16> = payload.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect();
        let vocab = vocab as u16;
        match pattern {
            None => {
                if let Some(i) = codes.iter().position(|c| *c >= vocab) {
                    return Err(Error::parse(
                        (HEADER_LEN + 2 * i) as u64,
                        ParseError::InvalidContent(format!("code {} outside vocabulary of {vocab}", codes[i])),
                    ));
                }
                Ok(CodeFile::Raw(CodeMatrix::new(n, frames, vocab, codes)?))
            }
            Some(p) => {
                if let Some(i) = codes.iter().position(|c| *c > vocab) {
                    return Err(Error::parse(
                        (HEADER_LEN + 2 * i) as u64,
                        ParseError::InvalidContent(format!("code {} above padding code {vocab}", codes[i])),
                    ));
                }
                Ok(CodeFile::Packed(ReorgMatrix::from_raw(p, n, frames, vocab, codes)?))
            }
        }
    }
}

pub fn read_codes(path: impl AsRef<Path>) -> Result<CodeFile> {
    let path = path.as_ref();
    std::fs::read(path)
        .map_err(Error::from)
        .and_then(|b| CodeFile::from_bytes(&b))
        .map_err(|e| e.in_file(path))
}

pub fn write_codes(file: &CodeFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, file.to_bytes()).map_err(|e| Error::from(e).in_file(path))
}
