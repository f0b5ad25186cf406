//! Native instance files: a JSON document whose numeric arrays are base64
//! encoded little-endian `f64` (values) or `u64` (indices).

use std::collections::BTreeMap;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Matrix};

pub const FORMAT: &str = "binopt-instance";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "storage", rename_all = "lowercase")]
pub(crate) enum Array {
    Vector {
        len: usize,
        data: String,
    },
    Dense {
        rows: usize,
        cols: usize,
        data: String,
    },
    Sparse {
        rows: usize,
        cols: usize,
        nnz: usize,
        row: String,
        col: String,
        data: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct InstanceFile {
    pub format: String,
    pub version: u32,
    pub task: super::Task,
    pub params: serde_json::Value,
    pub arrays: BTreeMap<String, Array>,
}

fn encode_f64(v: &[f64]) -> String {
    let bytes: Vec<u8> = v.iter().flat_map(|x| x.to_le_bytes()).collect();
    STANDARD.encode(bytes)
}

fn encode_u64(v: impl Iterator<Item = usize>) -> String {
    let bytes: Vec<u8> = v.flat_map(|x| (x as u64).to_le_bytes()).collect();
    STANDARD.encode(bytes)
}

fn decode_bytes(s: &str, width: usize, expected: usize) -> Result<Vec<[u8; 8]>> {
    let bytes = STANDARD
        .decode(s)
        .map_err(|e| Error::Instance(format!("bad base64 payload: {e}")))?;
    if bytes.len() != width * expected {
        return Err(Error::Instance(format!(
            "payload holds {} bytes, expected {}",
            bytes.len(),
            width * expected
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| c.try_into().expect("chunk of 8"))
        .collect())
}

fn decode_f64(s: &str, expected: usize) -> Result<Vec<f64>> {
    Ok(decode_bytes(s, 8, expected)?
        .into_iter()
        .map(f64::from_le_bytes)
        .collect())
}

fn decode_usize(s: &str, expected: usize) -> Result<Vec<usize>> {
    decode_bytes(s, 8, expected)?
        .into_iter()
        .map(|b| usize::try_from(u64::from_le_bytes(b)).map_err(|e| Error::Instance(e.to_string())))
        .collect()
}

impl Array {
    pub fn vector(v: &[f64]) -> Self {
        Array::Vector {
            len: v.len(),
            data: encode_f64(v),
        }
    }

    pub fn dense(m: &DenseMatrix) -> Self {
        Array::Dense {
            rows: m.rows(),
            cols: m.cols(),
            data: encode_f64(m.data()),
        }
    }

    pub fn matrix(m: &Matrix) -> Self {
        match m {
            Matrix::Dense(d) => Self::dense(d),
            Matrix::Csr(_) => {
                let t = m.triplets();
                Array::Sparse {
                    rows: m.rows(),
                    cols: m.cols(),
                    nnz: t.len(),
                    row: encode_u64(t.iter().map(|e| e.0)),
                    col: encode_u64(t.iter().map(|e| e.1)),
                    data: encode_f64(&t.iter().map(|e| e.2).collect::<Vec<_>>()),
                }
            }
        }
    }

    pub fn to_vector(&self) -> Result<Vec<f64>> {
        match self {
            Array::Vector { len, data } => decode_f64(data, *len),
            _ => Err(Error::Instance("expected a vector array".into())),
        }
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        match self.to_matrix()? {
            Matrix::Dense(d) => Ok(d),
            m => Ok(m.to_dense()),
        }
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        match self {
            Array::Dense { rows, cols, data } => {
                Ok(DenseMatrix::from_row_major(*rows, *cols, decode_f64(data, rows * cols)?)?.into())
            }
            Array::Sparse {
                rows,
                cols,
                nnz,
                row,
                col,
                data,
            } => {
                let values = decode_f64(data, *nnz)?;
                let r = decode_usize(row, *nnz)?;
                let c = decode_usize(col, *nnz)?;
                if r.iter().any(|&i| i >= *rows) || c.iter().any(|&j| j >= *cols) {
                    return Err(Error::Instance("sparse index out of range".into()));
                }
                let t: Vec<_> = r.into_iter().zip(c).zip(values).map(|((i, j), v)| (i, j, v)).collect();
                Ok(Matrix::Csr(crate::linalg::CsrMatrix::from_triplets(*rows, *cols, &t)?))
            }
            Array::Vector { .. } => Err(Error::Instance("expected a matrix array".into())),
        }
    }
}

impl InstanceFile {
    pub fn array(&self, name: &str) -> Result<&Array> {
        self.arrays
            .get(name)
            .ok_or_else(|| Error::Instance(format!("missing array '{name}'")))
    }

    pub fn check_header(&self) -> Result<()> {
        if self.format != FORMAT {
            return Err(Error::Instance(format!(
                "not a {FORMAT} file (format = '{}')",
                self.format
            )));
        }
        if self.version != VERSION {
            return Err(Error::Instance(format!("unsupported version {}", self.version)));
        }
        Ok(())
    }
}
