//! Hermitian and unitary eigendecompositions and the exponentials built on
//! them.
//!
//! Everything here reduces to one primitive, a cyclic complex Jacobi
//! eigensolver for Hermitian matrices. Normal matrices (unitaries) are
//! diagonalized through their Hermitian and anti-Hermitian parts, so no
//! general Schur decomposition is needed.

use std::f64::consts::PI;

use super::{BlockStructure, Diagonalization, MatrixKind, OperatorMatrix, C64, I, ZERO};
use crate::error::{Error, Result};
use crate::tolerance;

/// Eigenvalues (descending) and orthonormal eigenvectors (columns of `vectors`).
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: OperatorMatrix,
}

impl Eigh {
    pub fn reconstruct(&self) -> OperatorMatrix {
        self.vectors
            .conjugate(&OperatorMatrix::real_diagonal(&self.values))
            .with_kind(MatrixKind::Hermitian)
    }
}

/// Diagonalizes a Hermitian matrix, `A = V diag(λ) V†`, with `λ` sorted
/// descending (ties keep the solver's column order).
pub fn eig_hermitian(a: &OperatorMatrix) -> Result<Eigh> {
    a.check_hermitian()?;
    jacobi(a)
}

fn jacobi(a: &OperatorMatrix) -> Result<Eigh> {
    let n = a.dim();
    let mut m: Vec<C64> = a.entries().to_vec();
    // Exact Hermitian start: mirror the upper triangle.
    for i in 0..n {
        m[i * n + i] = C64::new(m[i * n + i].re, 0.0);
        for j in i + 1..n {
            let z = (m[i * n + j] + m[j * n + i].conj()) * 0.5;
            m[i * n + j] = z;
            m[j * n + i] = z.conj();
        }
    }
    let mut v = OperatorMatrix::identity(n).entries;

    let norm = a.frobenius_norm();
    let threshold = tolerance::JACOBI_REL * norm;
    let off = |m: &[C64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = norm == 0.0 || off(&m) <= threshold;
    let mut sweeps = 0;
    while !converged && sweeps < tolerance::JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, n, p, q);
            }
        }
        converged = off(&m) <= threshold;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            residual: off(&m),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].re.total_cmp(&m[i * n + i].re));
    let values = order.iter().map(|&i| m[i * n + i].re).collect();
    let vectors = OperatorMatrix::from_fn(n, |r, c| v[r * n + order[c]]).with_kind(MatrixKind::Unitary);
    Ok(Eigh { values, vectors })
}

/// One Jacobi rotation annihilating `m[p][q]`: a phase on column `q` makes the
/// pivot real, then a real Givens rotation zeroes it.
fn rotate(m: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize) {
    let g = m[p * n + q];
    let abs = g.norm();
    if abs == 0.0 {
        return;
    }
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    // Skip pivots already negligible against the diagonal.
    if abs < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[p * n + q] = ZERO;
        m[q * n + p] = ZERO;
        return;
    }
    let phase = g / abs;
    let tau = (aqq - app) / (2.0 * abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ph_conj = phase.conj();

    // G = [[c, s], [-s e^{-iα}, c e^{-iα}]] on (p, q); A <- G† A G, V <- V G.
    let gpp = C64::new(c, 0.0);
    let gpq = C64::new(s, 0.0);
    let gqp = -ph_conj * s;
    let gqq = ph_conj * c;

    for k in 0..n {
        let (akp, akq) = (m[k * n + p], m[k * n + q]);
        m[k * n + p] = akp * gpp + akq * gqp;
        m[k * n + q] = akp * gpq + akq * gqq;
        let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
        v[k * n + p] = vkp * gpp + vkq * gqp;
        v[k * n + q] = vkp * gpq + vkq * gqq;
    }
    for k in 0..n {
        let (apk, aqk) = (m[p * n + k], m[q * n + k]);
        m[p * n + k] = gpp.conj() * apk + gqp.conj() * aqk;
        m[q * n + k] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    m[p * n + q] = ZERO;
    m[q * n + p] = ZERO;
    m[p * n + p] = C64::new(m[p * n + p].re, 0.0);
    m[q * n + q] = C64::new(m[q * n + q].re, 0.0);
}

/// Diagonalizes a unitary, `W = V diag(e^{iφ_j}) V†`.
///
/// The Hermitian part `(W + W†)/2` is diagonalized first; its eigenspaces are
/// `W`-invariant. Clusters of close eigenvalues are refined with the
/// anti-Hermitian part `(W - W†)/2i` projected onto the cluster, and clusters
/// that survive both passes (eigenvalues close in the complex plane) are
/// resolved by the anti-Hermitian part of `e^{-iφ₀} W` with `φ₀` the cluster's
/// mean phase, whose spectrum separates nearby phases linearly.
///
/// Phases are principal, in `(-π, π]`; phases within grouping tolerance of
/// `-π` are reported as `π`. Output is sorted by phase descending (ties keep
/// column order) and grouped into blocks of coincident eigenvalues.
pub fn eig_unitary(w: &OperatorMatrix) -> Result<Diagonalization> {
    w.check_unitary()?;
    let n = w.dim();
    let wd = w.adjoint();
    let herm = (w + &wd).scale_real(0.5).with_kind(MatrixKind::Hermitian);
    let anti = (w - &wd).scale(C64::new(0.0, -0.5)).with_kind(MatrixKind::Hermitian);

    let first = jacobi(&herm)?;
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(n);
    for cluster in clusters(&first.values) {
        let basis: Vec<Vec<C64>> = cluster.iter().map(|&j| first.vectors.column(j)).collect();
        if basis.len() == 1 {
            columns.extend(basis);
            continue;
        }
        let second = refine(&basis, &anti)?;
        for sub in clusters(&second.0) {
            let sub_basis: Vec<Vec<C64>> = sub.iter().map(|&j| second.1[j].clone()).collect();
            if sub_basis.len() == 1 {
                columns.extend(sub_basis);
                continue;
            }
            let center: C64 = sub_basis.iter().map(|b| rayleigh(w, b)).sum();
            let rot = C64::from_polar(1.0, -center.arg());
            let rotated = (&w.scale(rot) - &wd.scale(rot.conj()))
                .scale(C64::new(0.0, -0.5))
                .with_kind(MatrixKind::Hermitian);
            let third = refine(&sub_basis, &rotated)?;
            columns.extend(third.1);
        }
    }

    let norm = w.frobenius_norm().max(1.0);
    let group_tol = tolerance::GROUPING_REL * norm;
    let mut phases: Vec<f64> = columns.iter().map(|c| rayleigh(w, c).arg()).collect();
    for p in phases.iter_mut() {
        // e^{iφ} within grouping tolerance of -1 from below the cut.
        if *p < 0.0 && (C64::from_polar(1.0, *p) - C64::from_polar(1.0, PI)).norm() <= group_tol {
            *p = PI;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| phases[j].total_cmp(&phases[i]));
    let phases: Vec<f64> = order.iter().map(|&i| phases[i]).collect();
    let ordered: Vec<Vec<C64>> = order.iter().map(|&i| columns[i].clone()).collect();
    let v = OperatorMatrix::from_columns(&ordered)?.with_kind(MatrixKind::Unitary);
    let eigenvalues: Vec<C64> = phases.iter().map(|&p| C64::from_polar(1.0, p)).collect();
    let blocks = BlockStructure::group_sorted(&eigenvalues, group_tol);
    Ok(Diagonalization { v, phases, blocks })
}

/// `v† A v` for a unit vector.
fn rayleigh(a: &OperatorMatrix, v: &[C64]) -> C64 {
    v.iter().zip(a.apply(v)).map(|(x, y)| x.conj() * y).sum()
}

/// Index runs of a descending list whose consecutive gaps are below the
/// cluster threshold.
fn clusters(values: &[f64]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &x) in values.iter().enumerate() {
        match out.last_mut() {
            Some(run) if values[*run.last().unwrap()] - x <= tolerance::UNITARY_CLUSTER_GAP => {
                run.push(i)
            }
            _ => out.push(vec![i]),
        }
    }
    out
}

/// Diagonalizes `B† A B` for the orthonormal columns `basis` and returns the
/// eigenvalues with the lifted eigenvectors `B y`.
fn refine(basis: &[Vec<C64>], a: &OperatorMatrix) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let k = basis.len();
    let images: Vec<Vec<C64>> = basis.iter().map(|b| a.apply(b)).collect();
    let projected = OperatorMatrix::from_fn(k, |i, j| {
        basis[i].iter().zip(&images[j]).map(|(x, y)| x.conj() * y).sum()
    })
    .hermitian_part();
    let eig = jacobi(&projected)?;
    let n = basis[0].len();
    let lifted = (0..k)
        .map(|c| {
            let mut col = vec![ZERO; n];
            for (r, b) in basis.iter().enumerate() {
                let y = eig.vectors[(r, c)];
                for (o, &x) in col.iter_mut().zip(b) {
                    *o += x * y;
                }
            }
            col
        })
        .collect();
    Ok((eig.values, lifted))
}

/// `exp(S)` for skew-Hermitian `S`, through the eigendecomposition of `iS`.
pub fn exp_skew_hermitian(s: &OperatorMatrix) -> Result<OperatorMatrix> {
    s.check_skew_hermitian()?;
    let h = s.scale(I).hermitian_part();
    // S = -i H, so exp(S) = V diag(e^{-iλ}) V†.
    Ok(exp_from_eigh(&jacobi(&h)?, 1.0))
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn expm_hermitian(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    let eig = eig_hermitian(h)?;
    Ok(exp_from_eigh(&eig, t))
}

/// `exp(A)` for a general square matrix by scaling and squaring a truncated
/// Taylor series. Used for non-normal logarithms, where no eigenbasis is
/// orthonormal.
pub fn expm(a: &OperatorMatrix) -> OperatorMatrix {
    let n = a.dim();
    let norm = a.frobenius_norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));
    let mut result = OperatorMatrix::identity(n).as_general();
    let mut term = OperatorMatrix::identity(n).as_general();
    for k in 1..=30 {
        term = term.matmul(&scaled).scale_real(1.0 / k as f64);
        result = &result + &term;
        if term.frobenius_norm() <= f64::EPSILON * result.frobenius_norm() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result.as_general()
}

pub(crate) fn exp_from_eigh(eig: &Eigh, t: f64) -> OperatorMatrix {
    let phases: Vec<C64> = eig.values.iter().map(|&l| C64::from_polar(1.0, -l * t)).collect();
    eig.vectors
        .conjugate(&OperatorMatrix::diagonal(&phases))
        .with_kind(MatrixKind::Unitary)
}
