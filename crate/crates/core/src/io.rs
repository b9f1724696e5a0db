//! JSON file formats and named states.
//!
//! Ket files: `{"dim": d, "amplitudes": [[re, im], ...]}`.
//! Observable files: `{"dim": d, "entries": [[[re, im], ...], ...]}` (row-major).

use serde::{Deserialize, Serialize};

use crate::linalg::{HermitianOperator, Matrix};
use crate::{Complex, Error, Ket, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KetFile {
    pub dim: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl KetFile {
    pub fn to_ket(&self) -> Result<Ket> {
        if self.amplitudes.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.amplitudes.len(),
            });
        }
        Ket::new(
            self.amplitudes
                .iter()
                .map(|[re, im]| Complex::new(*re, *im))
                .collect(),
        )
    }
}

impl From<&Ket> for KetFile {
    fn from(k: &Ket) -> Self {
        KetFile {
            dim: k.dim(),
            amplitudes: k.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl OperatorFile {
    pub fn to_operator(&self) -> Result<HermitianOperator> {
        if self.entries.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.entries.len(),
            });
        }
        let rows = self
            .entries
            .iter()
            .map(|row| row.iter().map(|[re, im]| Complex::new(*re, *im)).collect())
            .collect();
        HermitianOperator::new(Matrix::from_rows(rows)?)
    }
}

impl From<&HermitianOperator> for OperatorFile {
    fn from(op: &HermitianOperator) -> Self {
        OperatorFile {
            dim: op.dim(),
            entries: op
                .matrix()
                .rows()
                .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

pub fn parse_ket_json(text: &str) -> Result<Ket> {
    serde_json::from_str::<KetFile>(text)?.to_ket()
}

pub fn parse_operator_json(text: &str) -> Result<HermitianOperator> {
    serde_json::from_str::<OperatorFile>(text)?.to_operator()
}

/// `z+`, `z-`, `x+`, `x-`, `y+`, `y-`, or a computational basis state `eK` (qubit)
/// or `eK/D` (dimension `D`).
pub fn named_ket(name: &str) -> Option<Ket> {
    match name {
        "z+" | "zplus" => Some(Ket::z_plus()),
        "z-" | "zminus" => Some(Ket::z_minus()),
        "x+" | "xplus" => Some(Ket::x_plus()),
        "x-" | "xminus" => Some(Ket::x_minus()),
        "y+" | "yplus" => Some(Ket::y_plus()),
        "y-" | "yminus" => Some(Ket::y_minus()),
        _ => {
            let rest = name.strip_prefix('e')?;
            let (idx, dim) = match rest.split_once('/') {
                Some((i, d)) => (i.parse().ok()?, d.parse().ok()?),
                None => (rest.parse().ok()?, 2),
            };
            Ket::basis(dim, idx).ok()
        }
    }
}

/// `sigmax`, `sigmay`, `sigmaz` (also `sx`, `sy`, `sz`).
pub fn named_operator(name: &str) -> Option<HermitianOperator> {
    match name {
        "sigmax" | "sx" => Some(HermitianOperator::sigma_x()),
        "sigmay" | "sy" => Some(HermitianOperator::sigma_y()),
        "sigmaz" | "sz" => Some(HermitianOperator::sigma_z()),
        _ => None,
    }
}
