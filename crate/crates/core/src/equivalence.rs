//! The set of Hamiltonians equivalent to a desired one on a fixed state.
//!
//! Evolution is split into natural evolution under `H_int` for `η t0 / 2`,
//! a controlled segment of length `τ = (1 - η) t0`, and another `η t0 / 2`
//! of natural evolution. The controlled segment must carry
//! `ρ₋ = U_int ρ_i U_int†` to `ρ₊ = U_int† ρ_f U_int`, where
//! `ρ_f = U_d ρ_i U_d†` and `U_d = exp(-i t0 H_d)`.
//!
//! With `U₋` diagonalizing `ρ₋` to `D` and `U₊ = U_int† U_d U_int† U₋`
//! diagonalizing `ρ₊` to the same `D`, the unitaries doing the job are
//! exactly `U₊ · U(p_1, …, p_m) · U₋†`, where `U(p_1, …, p_m)` is the group
//! of block-diagonal unitaries conforming to the degeneracy blocks of `D`.
//!
//! Every Hamiltonian for such a `W` is
//! `(1/τ) V X diag(-φ_j + 2π k_j) X⁻¹ V†` for a diagonalization
//! `W = V diag(e^{iφ_j}) V†`, integers `k_j` and `X` in the centralizer of
//! `diag(e^{iφ_j})`. It is Hermitian iff `X†X` commutes with
//! `diag(-φ_j + 2π k_j)`.
//!
//! Note on dimension counting: the block group for a pure state has real
//! dimension `1 + (d - 1)²` (a `U(1)` factor and a `U(d - 1)` factor). A count
//! of `(d - 1)²` corresponds to dropping the global phase.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::operator::{
    eig_hermitian, eig_unitary, expm_hermitian, BlockStructure, Diagonalization, MatrixKind, OperatorMatrix,
    C64,
};
use crate::tolerance;

#[derive(Clone, Debug)]
pub struct Problem {
    pub rho_i: OperatorMatrix,
    pub h_d: OperatorMatrix,
    pub h_int: OperatorMatrix,
    pub t0: f64,
    pub eta: f64,
}

impl Problem {
    pub fn new(rho_i: OperatorMatrix, h_d: OperatorMatrix, h_int: OperatorMatrix, t0: f64, eta: f64) -> Result<Self> {
        let p = Self {
            rho_i,
            h_d,
            h_int,
            t0,
            eta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.rho_i.dim()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        ensure_dim(d, self.h_d.dim())?;
        ensure_dim(d, self.h_int.dim())?;
        self.h_d.check_hermitian()?;
        self.h_int.check_hermitian()?;
        self.rho_i.check_hermitian()?;
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::validation("t0 must be positive"));
        }
        if !(0.0..1.0).contains(&self.eta) {
            return Err(Error::validation("eta must lie in [0, 1)"));
        }
        let trace = self.rho_i.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > tolerance::DENSITY {
            return Err(Error::validation(format!("density matrix trace {trace} is not 1")));
        }
        let min_eig = eig_hermitian(&self.rho_i)?.values.last().copied().unwrap_or(0.0);
        if min_eig < -tolerance::DENSITY {
            return Err(Error::validation(format!(
                "density matrix is not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(())
    }

    /// Length of the controlled segment, `(1 - η) t0`.
    pub fn control_time(&self) -> f64 {
        (1.0 - self.eta) * self.t0
    }

    /// Length of each natural-evolution segment, `η t0 / 2`.
    pub fn free_time(&self) -> f64 {
        0.5 * self.eta * self.t0
    }
}

#[derive(Clone, Debug)]
pub struct EquivalenceFrame {
    pub u_int: OperatorMatrix,
    pub u_d: OperatorMatrix,
    pub u_minus: OperatorMatrix,
    pub u_plus: OperatorMatrix,
    /// Eigenvalues of `ρ₋` (descending) grouped into blocks.
    pub d: BlockStructure,
    pub rho_minus: OperatorMatrix,
    pub rho_plus: OperatorMatrix,
    /// `(1 - η) t0`.
    pub control_time: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameExport {
    #[serde(rename = "U_int")]
    pub u_int: OperatorMatrix,
    #[serde(rename = "U_minus")]
    pub u_minus: OperatorMatrix,
    #[serde(rename = "U_plus")]
    pub u_plus: OperatorMatrix,
    #[serde(rename = "D_values")]
    pub d_values: Vec<f64>,
    #[serde(rename = "D_sizes")]
    pub d_sizes: Vec<usize>,
}

impl EquivalenceFrame {
    pub fn dim(&self) -> usize {
        self.u_int.dim()
    }

    pub fn export(&self) -> FrameExport {
        FrameExport {
            u_int: self.u_int.clone(),
            u_minus: self.u_minus.clone(),
            u_plus: self.u_plus.clone(),
            d_values: self.d.values().iter().map(|z| z.re).collect(),
            d_sizes: self.d.sizes(),
        }
    }

    /// `U₊† W U₋`; block-diagonal exactly when `W` maps `ρ₋` to `ρ₊`.
    pub fn block_coordinates(&self, w: &OperatorMatrix) -> OperatorMatrix {
        self.u_plus.adjoint().matmul(w).matmul(&self.u_minus).as_general()
    }

    /// Off-block Frobenius mass of `U₊† W U₋`.
    pub fn membership_defect(&self, w: &OperatorMatrix) -> Result<f64> {
        ensure_dim(self.dim(), w.dim())?;
        self.d.off_block_mass(&self.block_coordinates(w))
    }

    pub fn membership_tolerance(&self) -> f64 {
        tolerance::MEMBERSHIP_PER_SQRT_DIM * (self.dim() as f64).sqrt()
    }

    pub fn contains(&self, w: &OperatorMatrix) -> Result<bool> {
        Ok(self.membership_defect(w)? <= self.membership_tolerance())
    }

    /// `‖W ρ₋ W† - ρ₊‖_F`.
    pub fn mapping_error(&self, w: &OperatorMatrix) -> f64 {
        (&w.conjugate(&self.rho_minus) - &self.rho_plus).frobenius_norm()
    }
}

/// Computes `U_int`, `U_d`, `ρ₋`, `ρ₊`, `U₋`, `U₊` and the blocks of `D`.
pub fn build_frame(p: &Problem) -> Result<EquivalenceFrame> {
    p.validate()?;
    let u_int = expm_hermitian(&p.h_int, p.free_time())?;
    let u_d = expm_hermitian(&p.h_d, p.t0)?;
    let rho_f = u_d.conjugate(&p.rho_i);
    let rho_minus = u_int.conjugate(&p.rho_i).hermitian_part();
    let rho_plus = u_int.adjoint().conjugate(&rho_f).hermitian_part();

    let eig = eig_hermitian(&rho_minus)?;
    let tol = tolerance::GROUPING_REL * rho_minus.frobenius_norm().max(1.0);
    let values: Vec<C64> = eig.values.iter().map(|&x| C64::new(x, 0.0)).collect();
    let d = BlockStructure::group_sorted(&values, tol);
    let u_minus = eig.vectors;
    let u_plus = u_int
        .adjoint()
        .matmul(&u_d)
        .matmul(&u_int.adjoint())
        .matmul(&u_minus)
        .with_kind(MatrixKind::Unitary);

    Ok(EquivalenceFrame {
        u_int,
        u_d,
        u_minus,
        u_plus,
        d,
        rho_minus,
        rho_plus,
        control_time: p.control_time(),
    })
}

/// Checks that `u_block` is unitary and block-diagonal with respect to `blocks`.
pub fn check_block_unitary(u_block: &OperatorMatrix, blocks: &BlockStructure) -> Result<()> {
    ensure_dim(blocks.dim(), u_block.dim())?;
    u_block.check_unitary()?;
    let mass = blocks.off_block_mass(u_block)?;
    let tol = tolerance::MEMBERSHIP_PER_SQRT_DIM * (u_block.dim() as f64).sqrt();
    if mass > tol {
        return Err(Error::validation(format!(
            "matrix does not conform to block sizes {:?}: off-block mass {mass:e} exceeds {tol:e}",
            blocks.sizes()
        )));
    }
    Ok(())
}

/// `W = U₊ U_block U₋†`.
pub fn gu_element(frame: &EquivalenceFrame, u_block: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_block_unitary(u_block, &frame.d)?;
    Ok(frame
        .u_plus
        .matmul(u_block)
        .matmul(&frame.u_minus.adjoint())
        .with_kind(MatrixKind::Unitary))
}

/// One point of the equivalence set together with the freedoms producing it.
#[derive(Clone, Debug)]
pub struct GHCandidate {
    /// `U₊† W U₋`.
    pub block_unitary: OperatorMatrix,
    pub diag_choice: Diagonalization,
    pub k: Vec<i64>,
    pub x_t: OperatorMatrix,
    pub h: OperatorMatrix,
    pub hermitian: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateJson {
    #[serde(rename = "H")]
    pub h: OperatorMatrix,
    pub hermitian: bool,
    pub k: Vec<i64>,
    pub cost: f64,
}

impl GHCandidate {
    pub fn to_json(&self, cost: f64) -> CandidateJson {
        CandidateJson {
            h: self.h.clone(),
            hermitian: self.hermitian,
            k: self.k.clone(),
            cost,
        }
    }
}

fn require_member(frame: &EquivalenceFrame, w: &OperatorMatrix) -> Result<()> {
    w.check_unitary()?;
    let defect = frame.membership_defect(w)?;
    if defect > frame.membership_tolerance() {
        return Err(Error::validation(format!(
            "unitary does not map rho_minus to rho_plus: off-block mass {defect:e}"
        )));
    }
    Ok(())
}

/// The member of the equivalence set with `k = 0`, `X_T = I` and the
/// solver-chosen diagonalization: `H = (1/τ) V diag(-φ_j) V†`.
pub fn principal_hamiltonian(frame: &EquivalenceFrame, w: &OperatorMatrix) -> Result<GHCandidate> {
    require_member(frame, w)?;
    let diag = eig_unitary(w)?;
    Ok(principal_from_diagonalization(frame, w, diag))
}

pub(crate) fn principal_from_diagonalization(
    frame: &EquivalenceFrame,
    w: &OperatorMatrix,
    diag: Diagonalization,
) -> GHCandidate {
    let n = diag.dim();
    let h = principal_log_hamiltonian(&diag, frame.control_time);
    GHCandidate {
        block_unitary: frame.block_coordinates(w),
        diag_choice: diag,
        k: vec![0; n],
        x_t: OperatorMatrix::identity(n),
        h,
        hermitian: true,
    }
}

/// `(1/τ) V diag(-φ_j) V†`.
pub(crate) fn principal_log_hamiltonian(diag: &Diagonalization, tau: f64) -> OperatorMatrix {
    let values: Vec<f64> = diag.phases.iter().map(|&p| -p / tau).collect();
    diag.v.conjugate(&OperatorMatrix::real_diagonal(&values)).hermitian_part()
}

/// General member `(1/τ) V X diag(-φ_j + 2π k_j) X⁻¹ V†` for the supplied
/// freedoms. The Hermitian flag comes from the commutator criterion
/// `[X†X, diag(-φ_j + 2π k_j)] = 0`.
pub fn gh_element(
    frame: &EquivalenceFrame,
    w: &OperatorMatrix,
    diag_choice: &Diagonalization,
    k: &[i64],
    x_t: &OperatorMatrix,
) -> Result<GHCandidate> {
    require_member(frame, w)?;
    let n = frame.dim();
    ensure_dim(n, diag_choice.dim())?;
    ensure_dim(n, k.len())?;
    ensure_dim(n, x_t.dim())?;
    let recon = (&diag_choice.reconstruct() - w).frobenius_norm();
    if recon > 1e-9 {
        return Err(Error::validation(format!(
            "diagonalization does not reconstruct the unitary (error {recon:e})"
        )));
    }
    let (h, hermitian) = logarithm_branch(diag_choice, k, x_t, frame.control_time)?;
    Ok(GHCandidate {
        block_unitary: frame.block_coordinates(w),
        diag_choice: diag_choice.clone(),
        k: k.to_vec(),
        x_t: x_t.clone(),
        h,
        hermitian,
    })
}

/// The branch matrix `(1/τ) V X diag(-φ_j + 2π k_j) X⁻¹ V†` and its
/// Hermitian flag.
pub fn logarithm_branch(
    diag: &Diagonalization,
    k: &[i64],
    x_t: &OperatorMatrix,
    tau: f64,
) -> Result<(OperatorMatrix, bool)> {
    let n = diag.dim();
    ensure_dim(n, k.len())?;
    ensure_dim(n, x_t.dim())?;
    if !(tau > 0.0) {
        return Err(Error::validation("control time must be positive"));
    }
    let t = diag.eigenvalue_matrix();
    let comm = (&x_t.matmul(&t) - &t.matmul(x_t)).frobenius_norm();
    if comm > 1e-9 * x_t.frobenius_norm().max(1.0) {
        return Err(Error::validation(format!(
            "X_T is not in the centralizer of T: ‖XT - TX‖_F = {comm:e}"
        )));
    }
    let x_inv = x_t.inverse()?;
    let lambda: Vec<f64> = diag
        .phases
        .iter()
        .zip(k)
        .map(|(&phi, &kj)| -phi + 2.0 * PI * kj as f64)
        .collect();
    let lam = OperatorMatrix::real_diagonal(&lambda);
    let gram = x_t.adjoint().matmul(x_t);
    let crit = gram.commutator(&lam).frobenius_norm();
    let hermitian = crit <= 1e-9 * (gram.frobenius_norm() * lam.frobenius_norm()).max(1.0);

    let a = diag
        .v
        .matmul(x_t)
        .matmul(&lam)
        .matmul(&x_inv)
        .matmul(&diag.v.adjoint())
        .scale_real(1.0 / tau);
    let h = if hermitian { a.hermitian_part() } else { a.as_general() };
    Ok((h, hermitian))
}

/// Another element of the diagonalization set: `(V W P, P† T P)`.
///
/// `permutation[j]` is the old column placed at position `j`. The returned
/// blocks are the runs of consecutive coincident eigenvalues in the new
/// order, so equal values may reappear in non-adjacent runs.
pub fn enumerate_du(diag_choice: &Diagonalization, w_block: &OperatorMatrix, permutation: &[usize]) -> Result<Diagonalization> {
    let n = diag_choice.dim();
    check_block_unitary(w_block, &diag_choice.blocks)?;
    ensure_dim(n, permutation.len())?;
    let mut seen = vec![false; n];
    for &p in permutation {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::validation("not a permutation"));
        }
    }
    let vw = diag_choice.v.matmul(w_block);
    let columns: Vec<Vec<_>> = permutation.iter().map(|&p| vw.column(p)).collect();
    let v = OperatorMatrix::from_columns(&columns)?.with_kind(MatrixKind::Unitary);
    let phases: Vec<f64> = permutation.iter().map(|&p| diag_choice.phases[p]).collect();
    let values: Vec<C64> = phases.iter().map(|&p| C64::from_polar(1.0, p)).collect();
    let blocks = BlockStructure::group_sorted(&values, tolerance::GROUPING_REL * (n as f64).sqrt().max(1.0));
    Ok(Diagonalization { v, phases, blocks })
}

pub fn permutation_matrix(permutation: &[usize]) -> OperatorMatrix {
    let n = permutation.len();
    let mut p = OperatorMatrix::zeros(n);
    for (j, &i) in permutation.iter().enumerate() {
        p[(i, j)] = C64::new(1.0, 0.0);
    }
    p.with_kind(MatrixKind::Unitary)
}
