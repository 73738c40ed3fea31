//! DFT1 tensor files.
//!
//! ```text
//! offset  size        field
//! 0       4           magic "DFT1"
//! 4       1           version (1)
//! 5       1           rank r
//! 6       4*r         dims, u32 little-endian
//! 6+4r    4*prod(dims) f32 little-endian payload, row-major (last dim fastest)
//! ```
//!
//! Rank-3 tensors are laid out as (height, width, channels).

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::fsutil::write_atomic;

pub const MAGIC: &[u8; 4] = b"DFT1";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 6;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported tensor version {0}")]
    Version(u8),
    #[error("truncated tensor: need {expected} bytes, have {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{0} trailing bytes after tensor payload")]
    TrailingBytes(usize),
    #[error("dimension overflow")]
    DimensionOverflow,
    #[error("tensor rank must be at least 1")]
    ZeroRank,
    #[error("dimension {0} is zero")]
    ZeroDim(usize),
    #[error("dims {dims:?} need {expected} values, got {found}")]
    Shape {
        dims: Vec<usize>,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value at flat index {0}")]
    NonFinite(usize),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Dense f32 tensor with row-major layout. Every dim is at least 1 and every
/// value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMapTensor {
    dims: Vec<usize>,
    data: Vec<f32>,
}

fn element_count(dims: &[usize]) -> Result<usize, TensorError> {
    if dims.is_empty() {
        return Err(TensorError::ZeroRank);
    }
    if dims.len() > u8::MAX as usize {
        return Err(TensorError::DimensionOverflow);
    }
    let mut n: usize = 1;
    for (i, &d) in dims.iter().enumerate() {
        if d == 0 {
            return Err(TensorError::ZeroDim(i));
        }
        if d > u32::MAX as usize {
            return Err(TensorError::DimensionOverflow);
        }
        n = n.checked_mul(d).ok_or(TensorError::DimensionOverflow)?;
    }
    n.checked_mul(4).ok_or(TensorError::DimensionOverflow)?;
    Ok(n)
}

impl FeatureMapTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f32>) -> Result<Self, TensorError> {
        let n = element_count(&dims)?;
        if n != data.len() {
            return Err(TensorError::Shape {
                dims,
                expected: n,
                found: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(TensorError::NonFinite(i));
        }
        Ok(FeatureMapTensor { dims, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    /// Applies `f` elementwise; fails if any output is non-finite.
    pub fn map(&self, f: impl Fn(f32) -> f32) -> Result<Self, TensorError> {
        Self::new(self.dims.clone(), self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * (self.dims.len() + self.data.len()));
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(self.dims.len() as u8);
        for &d in &self.dims {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for &v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, TensorError> {
        let need = |expected: usize| {
            if bytes.len() < expected {
                Err(TensorError::Truncated {
                    expected,
                    found: bytes.len(),
                })
            } else {
                Ok(())
            }
        };
        need(MAGIC.len())?;
        if &bytes[..4] != MAGIC {
            return Err(TensorError::BadMagic);
        }
        need(HEADER_LEN)?;
        if bytes[4] != VERSION {
            return Err(TensorError::Version(bytes[4]));
        }
        let rank = bytes[5] as usize;
        let dims_end = HEADER_LEN + 4 * rank;
        need(dims_end)?;
        let dims: Vec<usize> = bytes[HEADER_LEN..dims_end]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as usize)
            .collect();
        let n = element_count(&dims)?;
        let end = n
            .checked_mul(4)
            .and_then(|b| b.checked_add(dims_end))
            .ok_or(TensorError::DimensionOverflow)?;
        need(end)?;
        if bytes.len() > end {
            return Err(TensorError::TrailingBytes(bytes.len() - end));
        }
        let data = bytes[dims_end..end]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::new(dims, data)
    }
}

pub fn read_tensor(path: &Path) -> Result<FeatureMapTensor, TensorError> {
    let bytes = std::fs::read(path).map_err(|source| TensorError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    FeatureMapTensor::decode(&bytes)
}

pub fn write_tensor(t: &FeatureMapTensor, path: &Path) -> Result<(), TensorError> {
    write_atomic(path, &t.encode()).map_err(|source| TensorError::Io {
        path: path.to_path_buf(),
        source,
    })
}
