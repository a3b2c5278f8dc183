//! Table-predictor files: one JSON header line followed by a raw code file
//! holding the matrix to reproduce.
//!
//! ```text
//! {"format":"foakit-table-predictor","schema_version":1,"peak_logit":50.0}\n
//! <FOACODES raw matrix>
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::codes::CodeFile;
use crate::error::{Error, ParseError, Result};
use crate::guidance::TablePredictor;

pub const TABLE_FORMAT: &str = "foakit-table-predictor";
const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    schema_version: u32,
    peak_logit: f64,
}

pub fn table_predictor_bytes(predictor: &TablePredictor) -> Vec<u8> {
    let header = Header {
        format: TABLE_FORMAT.into(),
        schema_version: SCHEMA_VERSION,
        peak_logit: predictor.peak_logit(),
    };
    let mut out = serde_json::to_vec(&header).expect("header serializes");
    out.push(b'\n');
    out.extend(CodeFile::Raw(predictor.target().clone()).to_bytes());
    out
}

pub fn table_predictor_from_bytes(bytes: &[u8]) -> Result<TablePredictor> {
    let nl = bytes
        .iter()
        .take(4096)
        .position(|b| *b == b'\n')
        .ok_or_else(|| Error::parse(0, ParseError::MissingHeader))?;
    let header: Header = serde_json::from_slice(&bytes[..nl])
        .map_err(|e| Error::parse(e.column().saturating_sub(1) as u64, ParseError::BadHeader(e.to_string())))?;
    if header.format != TABLE_FORMAT {
        return Err(Error::parse(0, ParseError::BadHeader(format!("format '{}'", header.format))));
    }
    if header.schema_version != SCHEMA_VERSION {
        return Err(Error::parse(0, ParseError::UnsupportedVersion(header.schema_version)));
    }
    let start = (nl + 1) as u64;
    let target = match CodeFile::from_bytes(&bytes[nl + 1..]) {
        Ok(CodeFile::Raw(m)) => m,
        Ok(CodeFile::Packed(_)) => {
            return Err(Error::parse(start + 24, ParseError::InvalidContent("table target must be a raw matrix".into())))
        }
        Err(Error::Parse { offset, kind }) => return Err(Error::parse(start + offset, kind)),
        Err(e) => return Err(e),
    };
    TablePredictor::new(target, header.peak_logit)
}

pub fn read_table_predictor(path: impl AsRef<Path>) -> Result<TablePredictor> {
    let path = path.as_ref();
    std::fs::read(path)
        .map_err(Error::from)
        .and_then(|b| table_predictor_from_bytes(&b))
        .map_err(|e| e.in_file(path))
}
