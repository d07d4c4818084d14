//! Dense complex operators on a `d`-dimensional Hilbert space.
//!
//! [`OperatorMatrix`] is the common currency of the crate: Hamiltonians,
//! propagators, density matrices and Lie algebra elements are all square
//! row-major complex matrices carrying a role tag. The tag is only ever set
//! after the corresponding invariant has been checked (or holds by
//! construction), so downstream code can rely on it.

mod blocks;
mod eigen;
mod json;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{ensure_dim, Error, Result};
use crate::tolerance;

pub use blocks::{Block, BlockStructure, Diagonalization};
pub use eigen::{eig_hermitian, eig_unitary, exp_skew_hermitian, expm, expm_hermitian, Eigh};
pub(crate) use eigen::exp_from_eigh;
pub use json::{MatrixJson, VectorJson};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    General,
    Hermitian,
    Unitary,
}

#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    entries: Vec<C64>,
    kind: MatrixKind,
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "OperatorMatrix({}x{}, {:?})", self.dim, self.dim, self.kind)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
            kind: MatrixKind::General,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m.kind = MatrixKind::Unitary;
        m
    }

    /// Builds a general matrix from row-major entries.
    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("matrix dimension must be at least 1"));
        }
        ensure_dim(dim * dim, entries.len())?;
        Ok(Self {
            dim,
            entries,
            kind: MatrixKind::General,
        })
    }

    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            ensure_dim(dim, row.len())?;
            entries.extend_from_slice(row);
        }
        Self::from_entries(dim, entries)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self {
            dim,
            entries,
            kind: MatrixKind::General,
        }
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn real_diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m.kind = MatrixKind::Hermitian;
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let dim = columns.len();
        let mut m = Self::zeros(dim);
        for (j, col) in columns.iter().enumerate() {
            ensure_dim(dim, col.len())?;
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// `self += s * other`, keeping the role tag only if `s` is zero.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        if s != 0.0 {
            self.kind = MatrixKind::General;
            for (x, y) in self.entries.iter_mut().zip(&other.entries) {
                *x += y * s;
            }
        }
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C64]) {
        for (i, &z) in col.iter().enumerate() {
            self[(i, j)] = z;
        }
        self.kind = MatrixKind::General;
    }

    pub(crate) fn with_kind(mut self, kind: MatrixKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn as_general(self) -> Self {
        self.with_kind(MatrixKind::General)
    }

    /// Checks the Hermitian invariant and tags the matrix.
    pub fn into_hermitian(self) -> Result<Self> {
        self.check_hermitian()?;
        Ok(self.with_kind(MatrixKind::Hermitian))
    }

    /// Checks the unitary invariant and tags the matrix.
    pub fn into_unitary(self) -> Result<Self> {
        self.check_unitary()?;
        Ok(self.with_kind(MatrixKind::Unitary))
    }

    /// Symmetrizes to `(A + A†)/2` and tags Hermitian. Intended for results
    /// that are Hermitian up to rounding.
    pub fn hermitian_part(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        m.kind = MatrixKind::Hermitian;
        m
    }

    /// `max_ij |A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `max_ij |A_ij + conj(A_ji)|`.
    pub fn skew_hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] + self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `‖A†A - I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.adjoint().matmul(self);
        (&g - &Self::identity(self.dim)).frobenius_norm()
    }

    pub fn is_hermitian(&self) -> bool {
        self.check_hermitian().is_ok()
    }

    pub fn is_skew_hermitian(&self) -> bool {
        self.skew_hermiticity_defect() <= hermitian_bound(self)
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        let bound = hermitian_bound(self);
        if defect <= bound {
            Ok(())
        } else {
            Err(Error::validation(format!(
                "matrix is not Hermitian: max|A - A†| = {defect:e} exceeds {bound:e} \
                 (1e-10 * max(1, ‖A‖_F))"
            )))
        }
    }

    pub fn check_skew_hermitian(&self) -> Result<()> {
        let defect = self.skew_hermiticity_defect();
        let bound = hermitian_bound(self);
        if defect <= bound {
            Ok(())
        } else {
            Err(Error::validation(format!(
                "matrix is not skew-Hermitian: max|A + A†| = {defect:e} exceeds {bound:e} \
                 (1e-10 * max(1, ‖A‖_F))"
            )))
        }
    }

    pub fn check_unitary(&self) -> Result<()> {
        let defect = self.unitarity_defect();
        let bound = tolerance::UNITARY_PER_DIM * self.dim as f64;
        if defect <= bound {
            Ok(())
        } else {
            Err(Error::validation(format!(
                "matrix is not unitary: ‖A†A - I‖_F = {defect:e} exceeds {bound:e} (1e-9 * dim)"
            )))
        }
    }

    pub fn adjoint(&self) -> Self {
        let kind = self.kind;
        let mut m = Self::from_fn(self.dim, |i, j| self[(j, i)].conj());
        m.kind = kind;
        m
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &self.entries[i * n..(i + 1) * n];
            let out_row = &mut out[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.entries[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        let kind = if self.kind == MatrixKind::Unitary && rhs.kind == MatrixKind::Unitary {
            MatrixKind::Unitary
        } else {
            MatrixKind::General
        };
        Self {
            dim: n,
            entries: out,
            kind,
        }
    }

    /// `A X A†`, returned untagged.
    pub fn conjugate(&self, x: &Self) -> Self {
        self.matmul(x).matmul(&self.adjoint()).as_general()
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        (&self.matmul(rhs) - &rhs.matmul(self)).as_general()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * s).collect(),
            kind: if s.im == 0.0 && self.kind == MatrixKind::Hermitian {
                MatrixKind::Hermitian
            } else {
                MatrixKind::General
            },
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, x.len(), "apply dimension mismatch");
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.entries[i * n..(i + 1) * n]
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let (a, b) = (self.dim, rhs.dim);
        let mut m = Self::zeros(a * b);
        for i in 0..a {
            for j in 0..a {
                let s = self[(i, j)];
                if s == ZERO {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        m[(i * b + k, j * b + l)] = s * rhs[(k, l)];
                    }
                }
            }
        }
        m.kind = if self.kind == rhs.kind {
            self.kind
        } else {
            MatrixKind::General
        };
        m
    }

    /// Sub-matrix on rows/columns `offset..offset + size`.
    pub fn block(&self, offset: usize, size: usize) -> Self {
        Self::from_fn(size, |i, j| self[(offset + i, offset + j)])
    }

    pub fn set_block(&mut self, offset: usize, sub: &Self) {
        for i in 0..sub.dim {
            for j in 0..sub.dim {
                self[(offset + i, offset + j)] = sub[(i, j)];
            }
        }
        self.kind = MatrixKind::General;
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n).entries;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .expect("non-empty range");
            if a[pivot * n + col].norm() <= 1e-14 * scale {
                return Err(Error::validation("matrix is singular"));
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[col * n + col].inv();
            for j in 0..n {
                a[col * n + j] *= p;
                inv[col * n + j] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == ZERO {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[col * n + j], inv[col * n + j]);
                    a[r * n + j] -= f * ac;
                    inv[r * n + j] -= f * ic;
                }
            }
        }
        Self::from_entries(n, inv)
    }
}

fn hermitian_bound(m: &OperatorMatrix) -> f64 {
    tolerance::HERMITIAN_REL * m.frobenius_norm().max(1.0)
}

impl Index<(usize, usize)> for OperatorMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for OperatorMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        let kind = if self.kind == MatrixKind::Hermitian && rhs.kind == MatrixKind::Hermitian {
            MatrixKind::Hermitian
        } else {
            MatrixKind::General
        };
        OperatorMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
            kind,
        }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        let kind = if self.kind == MatrixKind::Hermitian && rhs.kind == MatrixKind::Hermitian {
            MatrixKind::Hermitian
        } else {
            MatrixKind::General
        };
        OperatorMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
            kind,
        }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.matmul(rhs)
    }
}

/// Hilbert–Schmidt inner product `trace(A†B)`.
pub fn hs_inner(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<C64> {
    ensure_dim(a.dim, b.dim)?;
    Ok(a.entries.iter().zip(&b.entries).map(|(x, y)| x.conj() * y).sum())
}

/// Real part of the Hilbert–Schmidt product; the inner product of the real
/// vector space underlying a space of (skew-)Hermitian matrices.
pub fn hs_inner_real(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    debug_assert_eq!(a.dim, b.dim);
    a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

/// Pure state in the computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    entries: Vec<C64>,
}

impl StateVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty("state vector"));
        }
        Ok(Self { entries })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut entries = vec![ZERO; dim];
        entries[index] = ONE;
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::validation("zero vector cannot be normalized"));
        }
        Ok(Self {
            entries: self.entries.iter().map(|z| z / n).collect(),
        })
    }

    pub fn add_scaled(&self, other: &Self, alpha: C64, beta: C64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        }
    }

    pub fn apply(&self, op: &OperatorMatrix) -> Self {
        Self {
            entries: op.apply(&self.entries),
        }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> OperatorMatrix {
        OperatorMatrix::from_fn(self.dim(), |i, j| self.entries[i] * self.entries[j].conj())
            .with_kind(MatrixKind::Hermitian)
    }
}
