//! JSON encodings: `{"dim": d, "entries": [[re, im], ...]}` for matrices
//! (row-major) and vectors.

use serde::{Deserialize, Serialize};

use super::{OperatorMatrix, StateVector, C64};
use crate::error::{ensure_dim, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

fn pairs(values: &[C64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

fn complexes(pairs: &[[f64; 2]]) -> Vec<C64> {
    pairs.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

impl From<&OperatorMatrix> for MatrixJson {
    fn from(m: &OperatorMatrix) -> Self {
        Self {
            dim: m.dim(),
            entries: pairs(m.entries()),
        }
    }
}

impl TryFrom<&MatrixJson> for OperatorMatrix {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        OperatorMatrix::from_entries(j.dim, complexes(&j.entries))
    }
}

impl From<&StateVector> for VectorJson {
    fn from(v: &StateVector) -> Self {
        Self {
            dim: v.dim(),
            entries: pairs(v.entries()),
        }
    }
}

impl TryFrom<&VectorJson> for StateVector {
    type Error = Error;

    fn try_from(j: &VectorJson) -> Result<Self> {
        ensure_dim(j.dim, j.entries.len())?;
        StateVector::new(complexes(&j.entries))
    }
}

impl Serialize for OperatorMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        OperatorMatrix::try_from(&j).map_err(serde::de::Error::custom)
    }
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = VectorJson::deserialize(d)?;
        StateVector::try_from(&j).map_err(serde::de::Error::custom)
    }
}
