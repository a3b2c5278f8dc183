//! Dense tensors: one JSON header line, then a little-endian row-major payload.
//!
//! ```text
//! {"dtype":"f32","shape":[4,7,7,16]}\n<payload>
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};

/// Longest header accepted before giving up on finding the newline.
const MAX_HEADER: usize = 64 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    F32,
    U16,
}

impl Dtype {
    pub fn name(&self) -> &'static str {
        match self {
            Dtype::F32 => "f32",
            Dtype::U16 => "u16",
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::U16 => 2,
        }
    }

    fn parse(s: &str) -> Option<Dtype> {
        match s {
            "f32" => Some(Dtype::F32),
            "u16" => Some(Dtype::U16),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TensorData {
    F32(Vec<f32>),
    U16(Vec<u16>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: TensorData,
}

#[derive(Serialize, Deserialize)]
struct Header {
    dtype: String,
    shape: Vec<usize>,
}

fn element_count(shape: &[usize]) -> Option<usize> {
    shape.iter().try_fold(1usize, |acc, d| acc.checked_mul(*d))
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: TensorData) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::InvalidInput(format!("tensor shape {shape:?} has an empty dimension")));
        }
        let len = match &data {
            TensorData::F32(v) => v.len(),
            TensorData::U16(v) => v.len(),
        };
        if element_count(&shape) != Some(len) {
            return Err(Error::DimensionMismatch(format!(
                "{len} elements for tensor shape {shape:?}"
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn f32(shape: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        Self::new(shape, TensorData::F32(data))
    }

    pub fn u16(shape: Vec<usize>, data: Vec<u16>) -> Result<Self> {
        Self::new(shape, TensorData::U16(data))
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dtype(&self) -> Dtype {
        match self.data {
            TensorData::F32(_) => Dtype::F32,
            TensorData::U16(_) => Dtype::U16,
        }
    }

    pub fn data(&self) -> &TensorData {
        &self.data
    }

    pub fn as_f32(&self) -> Option<&[f32]> {
        match &self.data {
            TensorData::F32(v) => Some(v),
            TensorData::U16(_) => None,
        }
    }

    pub fn as_u16(&self) -> Option<&[u16]> {
        match &self.data {
            TensorData::U16(v) => Some(v),
            TensorData::F32(_) => None,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = Header {
            dtype: self.dtype().name().to_string(),
            shape: self.shape.clone(),
        };
        let mut out = serde_json::to_vec(&header).expect("header serializes");
        out.push(b'\n');
        match &self.data {
            TensorData::F32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            TensorData::U16(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let Some(nl) = bytes.iter().take(MAX_HEADER).position(|b| *b == b'\n') else {
            return Err(Error::parse(0, ParseError::MissingHeader));
        };
        let header: Header = serde_json::from_slice(&bytes[..nl])
            .map_err(|e| Error::parse(e.column().saturating_sub(1) as u64, ParseError::BadHeader(e.to_string())))?;
        let dtype = Dtype::parse(&header.dtype).ok_or_else(|| Error::parse(0, ParseError::UnknownDtype(header.dtype.clone())))?;
        if header.shape.is_empty() || header.shape.contains(&0) {
            return Err(Error::parse(0, ParseError::EmptyDimension(header.shape)));
        }
        let start = nl + 1;
        let expected = element_count(&header.shape)
            .and_then(|n| n.checked_mul(dtype.size()))
            .ok_or_else(|| Error::parse(0, ParseError::BadHeader(format!("shape {:?} overflows", header.shape))))?;
        let payload = &bytes[start..];
        if payload.len() < expected {
            return Err(Error::parse(
                bytes.len() as u64,
                ParseError::Truncated {
                    expected: expected as u64,
                    found: payload.len() as u64,
                },
            ));
        }
        if payload.len() > expected {
            return Err(Error::parse(
                (start + expected) as u64,
                ParseError::TrailingBytes {
                    expected: expected as u64,
                    found: payload.len() as u64,
                },
            ));
        }
        let data = match dtype {
            Dtype::F32 => TensorData::F32(
                payload
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                    .collect(),
            ),
            Dtype::U16 => TensorData::U16(payload.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect()),
        };
        Ok(Self {
            shape: header.shape,
            data,
        })
    }
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor> {
    let path = path.as_ref();
    std::fs::read(path)
        .map_err(Error::from)
        .and_then(|b| Tensor::from_bytes(&b))
        .map_err(|e| e.in_file(path))
}

pub fn write_tensor(tensor: &Tensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, tensor.to_bytes()).map_err(|e| Error::from(e).in_file(path))
}
