//! Control Lie algebra tools.
//!
//! Skew-Hermitian matrices form a real vector space under the inner product
//! `Re tr(A†B)`. [`AlgebraBasis`] holds an orthonormal basis of a subspace of
//! it. Hermitian operators are compared with such a subspace through the
//! multiply-by-`i` convention: `H` is "in" the subspace when `-iH` is.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::operator::{hs_inner_real, OperatorMatrix, StateVector, C64, I};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraBasis {
    pub dim: usize,
    pub elements: Vec<OperatorMatrix>,
}

impl AlgebraBasis {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            elements: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Real dimension of `u(dim)`.
    pub fn ambient_dimension(&self) -> usize {
        self.dim * self.dim
    }

    /// Orthonormal basis of all of `u(d)`: `i E_jj`, `(E_jk - E_kj)/√2`,
    /// `i (E_jk + E_kj)/√2`.
    pub fn full_unitary_algebra(dim: usize) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut elements = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            let mut m = OperatorMatrix::zeros(dim);
            m[(j, j)] = I;
            elements.push(m);
            for k in j + 1..dim {
                let mut re = OperatorMatrix::zeros(dim);
                re[(j, k)] = C64::new(s, 0.0);
                re[(k, j)] = C64::new(-s, 0.0);
                elements.push(re);
                let mut im = OperatorMatrix::zeros(dim);
                im[(j, k)] = C64::new(0.0, s);
                im[(k, j)] = C64::new(0.0, s);
                elements.push(im);
            }
        }
        Self { dim, elements }
    }

    /// Coordinates `Re tr(A_k† X)` of `X` in this basis.
    pub fn coordinates(&self, x: &OperatorMatrix) -> Vec<f64> {
        self.elements.iter().map(|a| hs_inner_real(a, x)).collect()
    }

    /// `Σ c_k A_k`.
    pub fn combine(&self, coords: &[f64]) -> OperatorMatrix {
        let mut acc = OperatorMatrix::zeros(self.dim);
        for (a, &c) in self.elements.iter().zip(coords) {
            if c != 0.0 {
                acc = &acc + &a.scale_real(c);
            }
        }
        acc
    }

    /// Orthogonal projection of a skew-Hermitian `X` onto the span.
    pub fn project_skew(&self, x: &OperatorMatrix) -> OperatorMatrix {
        self.combine(&self.coordinates(x))
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((hs_inner_real(a, b) - target).abs());
            }
        }
        worst
    }

    /// Appends the normalized residual of `candidate` after two rounds of
    /// modified Gram–Schmidt, if it exceeds `tol * scale`.
    fn try_insert(&mut self, candidate: &OperatorMatrix, tol: f64, scale: f64) -> bool {
        let mut residual = candidate.clone();
        self.orthogonalize(&mut residual, 0);
        self.accept(residual, tol, scale)
    }

    /// Two rounds of modified Gram–Schmidt against elements `from..`.
    fn orthogonalize(&self, x: &mut OperatorMatrix, from: usize) {
        for _ in 0..2 {
            for a in &self.elements[from..] {
                let c = hs_inner_real(a, x);
                x.axpy(-c, a);
            }
        }
    }

    fn accept(&mut self, residual: OperatorMatrix, tol: f64, scale: f64) -> bool {
        let norm = residual.frobenius_norm();
        if norm > tol * scale {
            // Clean the rounding-level Hermitian component.
            let skew = (&residual - &residual.adjoint()).scale_real(0.5 / norm).as_general();
            self.elements.push(skew);
            true
        } else {
            false
        }
    }
}

/// Number of basis elements whose commutators are orthogonalized together.
const CLOSURE_BATCH: usize = 16;

/// Smallest real Lie algebra containing the skew-Hermitian `generators`.
///
/// Generators are orthonormalized first, in input order. The algebra is
/// spanned by left-nested commutators `[g_1, [g_2, [..., g_k]]]`, so it is
/// the smallest subspace containing the generators and closed under
/// `ad_g` for each generator `g`. Every accepted direction keeps the nested
/// commutator it came from (scaled to unit norm); further commutators are
/// taken of those rather than of the orthonormalized basis, so projection
/// rounding never compounds through the nesting. A commutator is accepted
/// when its residual against the basis exceeds `rank_tol` times its norm
/// (floored at the unit norm of the operands). Candidates are processed in
/// generation order; the loop ends once every accepted direction has been
/// commutated with every generator.
pub fn lie_closure(generators: &[OperatorMatrix], rank_tol: f64) -> Result<AlgebraBasis> {
    let first = generators.first().ok_or(Error::Empty("generator list"))?;
    if !(rank_tol > 0.0) {
        return Err(Error::validation("rank_tol must be positive"));
    }
    let dim = first.dim();
    for g in generators {
        ensure_dim(dim, g.dim())?;
        g.check_skew_hermitian()?;
    }

    let mut basis = AlgebraBasis::empty(dim);
    let mut raw: Vec<OperatorMatrix> = Vec::new();
    for g in generators {
        let norm = g.frobenius_norm();
        if norm > 0.0 && basis.try_insert(g, rank_tol, norm) {
            raw.push(g.scale_real(1.0 / norm));
        }
    }
    let n_gen = raw.len();
    let max_dim = dim * dim;
    let mut j = 1;
    while j < raw.len() && basis.len() < max_dim {
        let end = (j + CLOSURE_BATCH).min(raw.len());
        let pairs: Vec<(usize, usize)> = (j..end).flat_map(|x| (0..n_gen.min(x)).map(move |a| (a, x))).collect();
        let candidates: Vec<OperatorMatrix> = pairs.par_iter().map(|&(a, x)| raw[a].commutator(&raw[x])).collect();

        // Project the whole batch against the current basis while each basis
        // element is hot in cache, then finish serially in generation order.
        let settled = basis.len();
        let mut residuals = candidates.clone();
        for _ in 0..2 {
            for a in &basis.elements {
                for r in residuals.iter_mut() {
                    let c = hs_inner_real(a, r);
                    r.axpy(-c, a);
                }
            }
        }
        for (c, mut r) in candidates.into_iter().zip(residuals) {
            let norm = c.frobenius_norm();
            // Operands are unit norm, so a commutator at rounding level is a
            // vanishing commutator, not a new direction.
            let scale = norm.max(1.0);
            if norm <= rank_tol * scale {
                continue;
            }
            basis.orthogonalize(&mut r, settled);
            if basis.accept(r, rank_tol, scale) {
                raw.push(c.scale_real(1.0 / norm));
                if basis.len() == max_dim {
                    break;
                }
            }
        }
        j = end;
    }
    Ok(basis)
}

/// Maximal subspace of `span(basis)` whose members have `v` as an
/// eigenvector: the null space of `c ↦ (I - vv†)(Σ c_k A_k) v`.
pub fn eigenvector_stabilizer_subspace(basis: &AlgebraBasis, v: &StateVector) -> Result<AlgebraBasis> {
    ensure_dim(basis.dim, v.dim())?;
    let v = v.normalized()?;
    let m = basis.len();
    if m == 0 {
        return Ok(AlgebraBasis::empty(basis.dim));
    }
    let proj_out = |w: Vec<C64>| -> Vec<C64> {
        let overlap: C64 = v.entries().iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
        w.iter().zip(v.entries()).map(|(wi, vi)| wi - overlap * vi).collect()
    };
    // Columns of the real 2d x m map, one per basis element.
    let columns: Vec<Vec<f64>> = basis
        .elements
        .iter()
        .map(|a| {
            proj_out(a.apply(v.entries()))
                .iter()
                .flat_map(|z| [z.re, z.im])
                .collect()
        })
        .collect();
    let rows = 2 * basis.dim;
    let row_vectors: Vec<Vec<f64>> = (0..rows).map(|r| columns.iter().map(|c| c[r]).collect()).collect();

    // Orthonormal basis of the row space; the null space is its complement.
    let scale = row_vectors.iter().map(|r| norm(r)).fold(0.0, f64::max);
    let mut span: Vec<Vec<f64>> = Vec::new();
    for r in &row_vectors {
        let mut res = r.clone();
        orthogonalize(&mut res, &span);
        let n = norm(&res);
        if n > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            span.push(res.iter().map(|x| x / n).collect());
        }
    }
    let null_dim = m - span.len();
    let mut null: Vec<Vec<f64>> = Vec::with_capacity(null_dim);
    while null.len() < null_dim {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for k in 0..m {
            let mut e = vec![0.0; m];
            e[k] = 1.0;
            orthogonalize(&mut e, &span);
            orthogonalize(&mut e, &null);
            let n = norm(&e);
            if best.as_ref().is_none_or(|(b, _)| n > *b) {
                best = Some((n, e));
            }
        }
        let (n, e) = best.expect("m > 0");
        null.push(e.iter().map(|x| x / n).collect());
    }

    let elements = null
        .iter()
        .map(|c| {
            let a = basis.combine(c);
            (&a - &a.adjoint()).scale_real(0.5).as_general()
        })
        .collect();
    Ok(AlgebraBasis {
        dim: basis.dim,
        elements,
    })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn orthogonalize(x: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in against {
            let c: f64 = q.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi -= c * qi;
            }
        }
    }
}

/// Projection of a Hermitian `H` onto `i·span(subspace)` in the real
/// Hilbert–Schmidt geometry.
pub fn hs_project(h: &OperatorMatrix, subspace: &AlgebraBasis) -> Result<OperatorMatrix> {
    ensure_dim(subspace.dim, h.dim())?;
    h.check_hermitian()?;
    Ok(project_hermitian_unchecked(h, subspace))
}

pub(crate) fn project_hermitian_unchecked(h: &OperatorMatrix, subspace: &AlgebraBasis) -> OperatorMatrix {
    // -iH is skew-Hermitian; project it and map back with i.
    let skew = h.scale(-I);
    subspace.project_skew(&skew).scale(I).hermitian_part()
}

/// `‖H - P(H)‖_F`.
pub fn distance_to_span(h: &OperatorMatrix, subspace: &AlgebraBasis) -> Result<f64> {
    Ok((h - &hs_project(h, subspace)?).frobenius_norm())
}
