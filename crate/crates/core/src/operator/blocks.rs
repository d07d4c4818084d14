use serde::{Deserialize, Serialize};

use super::{OperatorMatrix, C64};
use crate::error::{ensure_dim, Error, Result};

/// One run of equal diagonal values: `value * I_size`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub value: C64,
    pub size: usize,
}

/// Degeneracy grouping of a diagonal matrix into scalar blocks with pairwise
/// distinct values.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct BlockStructure {
    blocks: Vec<Block>,
}

impl BlockStructure {
    /// Validates sizes and pairwise separation of the block values.
    pub fn new(blocks: Vec<Block>, tol: f64) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Empty("block structure"));
        }
        if blocks.iter().any(|b| b.size == 0) {
            return Err(Error::validation("block sizes must be positive"));
        }
        for (i, a) in blocks.iter().enumerate() {
            for b in &blocks[i + 1..] {
                if (a.value - b.value).norm() <= tol {
                    return Err(Error::validation(format!(
                        "block values {} and {} are not separated by more than {tol:e}",
                        a.value, b.value
                    )));
                }
            }
        }
        Ok(Self { blocks })
    }

    /// Blocks of the given sizes; values are placeholders `0, 1, 2, ...`.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let blocks = sizes
            .iter()
            .enumerate()
            .map(|(i, &size)| Block {
                value: C64::new(i as f64, 0.0),
                size,
            })
            .collect();
        Self::new(blocks, 0.5)
    }

    /// Groups an already ordered list of values into consecutive runs; a value
    /// joins the current run when it lies within `tol` of the run's first
    /// member. The run value is the member mean.
    pub fn group_sorted(values: &[C64], tol: f64) -> Self {
        let mut blocks: Vec<Block> = Vec::new();
        let mut start = 0;
        for i in 1..=values.len() {
            if i == values.len() || (values[i] - values[start]).norm() > tol {
                let run = &values[start..i];
                let mean = run.iter().sum::<C64>() / run.len() as f64;
                blocks.push(Block {
                    value: mean,
                    size: run.len(),
                });
                start = i;
            }
        }
        Self { blocks }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.size).collect()
    }

    pub fn values(&self) -> Vec<C64> {
        self.blocks.iter().map(|b| b.value).collect()
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// `(offset, size)` of each block along the diagonal.
    pub fn ranges(&self) -> Vec<(usize, usize)> {
        let mut offset = 0;
        self.blocks
            .iter()
            .map(|b| {
                let r = (offset, b.size);
                offset += b.size;
                r
            })
            .collect()
    }

    /// Block index of every diagonal position.
    pub fn labels(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(k, b)| std::iter::repeat_n(k, b.size))
            .collect()
    }

    /// Real dimension of the block unitary group `U(p_1) x ... x U(p_m)`.
    pub fn group_dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.size * b.size).sum()
    }

    /// The diagonal matrix `diag(v_1 I_{p_1}, ..., v_m I_{p_m})`.
    pub fn to_matrix(&self) -> OperatorMatrix {
        let values: Vec<C64> = self
            .blocks
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.value, b.size))
            .collect();
        OperatorMatrix::diagonal(&values)
    }

    /// Frobenius norm of the entries of `m` outside the diagonal blocks.
    pub fn off_block_mass(&self, m: &OperatorMatrix) -> Result<f64> {
        ensure_dim(self.dim(), m.dim())?;
        let labels = self.labels();
        let mut acc = 0.0;
        for (i, li) in labels.iter().enumerate() {
            for (j, lj) in labels.iter().enumerate() {
                if li != lj {
                    acc += m[(i, j)].norm_sqr();
                }
            }
        }
        Ok(acc.sqrt())
    }

    /// Copy of `m` with everything outside the diagonal blocks zeroed.
    pub fn block_part(&self, m: &OperatorMatrix) -> Result<OperatorMatrix> {
        ensure_dim(self.dim(), m.dim())?;
        let labels = self.labels();
        Ok(OperatorMatrix::from_fn(m.dim(), |i, j| {
            if labels[i] == labels[j] {
                m[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }
}

/// Eigendecomposition `W = V diag(e^{iφ_j}) V†` of a unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagonalization {
    pub v: OperatorMatrix,
    /// Principal eigenphases in `(-π, π]`, descending.
    pub phases: Vec<f64>,
    /// Degeneracy grouping of the eigenvalues `e^{iφ_j}`.
    pub blocks: BlockStructure,
}

impl Diagonalization {
    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    /// `diag(e^{iφ_j})`.
    pub fn eigenvalue_matrix(&self) -> OperatorMatrix {
        let values: Vec<C64> = self.phases.iter().map(|&p| C64::from_polar(1.0, p)).collect();
        OperatorMatrix::diagonal(&values)
    }

    pub fn reconstruct(&self) -> OperatorMatrix {
        self.v.conjugate(&self.eigenvalue_matrix())
    }
}
