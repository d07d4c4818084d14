//! Search of the equivalence set for a Hamiltonian inside the control algebra.
//!
//! The search runs over the block-unitary freedom only; the branch integers,
//! centralizer factor and diagonalization stay at their defaults (principal
//! logarithm). A point is a block unitary `B`; local coordinates `θ` move it
//! to `B exp(S(θ))`, where `S(θ)` is the block skew-Hermitian matrix with
//! coordinates `θ` in a fixed orthonormal basis. Every accepted step
//! re-centres the coordinates at the new point, so iterates never leave the
//! group.
//!
//! The objective is `‖H - P(H)‖_F`, the distance of the principal
//! Hamiltonian to `i·span(subspace)`. When a stabilized vector is supplied
//! for a pure initial state, a phase-coherence residual is added so that
//! superpositions of the initial state and the stabilized vector evolve as
//! they would under the desired Hamiltonian (see [`PhaseLock`]).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::equivalence::{
    build_frame, principal_from_diagonalization, principal_log_hamiltonian, EquivalenceFrame, GHCandidate, Problem,
};
use crate::error::{ensure_dim, Error, Result};
use crate::lie::{eigenvector_stabilizer_subspace, lie_closure, project_hermitian_unchecked, AlgebraBasis};
use crate::operator::{
    eig_hermitian, eig_unitary, exp_skew_hermitian, expm_hermitian, BlockStructure, MatrixKind, OperatorMatrix, StateVector, C64, I,
};
use crate::tolerance;

/// Phases closer than this to `±π` are inside the branch-cut band.
pub const BRANCH_BAND: f64 = 1e-3;

/// A descent stops early once this many consecutive accepted steps each
/// lower the objective by less than `STALL_REL` of its value.
const STALL_STEPS: usize = 10;
const STALL_REL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Steepest descent on the squared objective with Armijo backtracking.
    GradientDescent,
    /// Damped Gauss–Newton on the residual vector, finite-difference Jacobian.
    LevenbergMarquardt,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Central finite-difference step.
    pub grad_step: f64,
    /// Initial step length (gradient descent) or trust radius (Levenberg–Marquardt).
    pub init_step: f64,
    /// Absolute convergence threshold on the cost (and phase residual).
    pub cost_tol: f64,
    pub restarts: usize,
    /// Standard deviation of the random tangent coordinates for restarts after the first.
    pub restart_scale: f64,
    pub seed: u64,
    pub method: Method,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            grad_step: 1e-5,
            init_step: 1.0,
            cost_tol: 1e-8,
            restarts: 8,
            restart_scale: 0.1,
            seed: 42,
            method: Method::LevenbergMarquardt,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.grad_step, self.init_step, self.cost_tol, self.restart_scale];
        if self.max_iters == 0 || self.restarts == 0 || positive.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::validation(
                "optimizer settings must be positive and restarts at least 1",
            ));
        }
        Ok(())
    }
}

/// Orthonormal coordinates on the block skew-Hermitian matrices: per block
/// `i E_jj`, then `(E_jk - E_kj)/√2` and `i (E_jk + E_kj)/√2` for `j < k`.
#[derive(Clone, Debug)]
pub struct BlockTangent {
    blocks: BlockStructure,
}

impl BlockTangent {
    pub fn new(blocks: BlockStructure) -> Self {
        Self { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.group_dimension()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn blocks(&self) -> &BlockStructure {
        &self.blocks
    }

    /// Skew-Hermitian `p x p` matrix for one block's coordinates.
    fn block_skew(p: usize, theta: &[f64]) -> OperatorMatrix {
        let mut s = OperatorMatrix::zeros(p);
        let mut it = theta.iter();
        for j in 0..p {
            s[(j, j)] = C64::new(0.0, *it.next().expect("coordinate count"));
            for k in j + 1..p {
                let re = it.next().expect("coordinate count") * FRAC_1_SQRT_2;
                let im = it.next().expect("coordinate count") * FRAC_1_SQRT_2;
                s[(j, k)] = C64::new(re, im);
                s[(k, j)] = C64::new(-re, im);
            }
        }
        s
    }

    /// `S(θ)`.
    pub fn skew(&self, theta: &[f64]) -> Result<OperatorMatrix> {
        ensure_dim(self.len(), theta.len())?;
        let mut s = OperatorMatrix::zeros(self.blocks.dim());
        let mut start = 0;
        for (offset, p) in self.blocks.ranges() {
            s.set_block(offset, &Self::block_skew(p, &theta[start..start + p * p]));
            start += p * p;
        }
        Ok(s)
    }

    /// Coordinates of a block skew-Hermitian matrix.
    pub fn coordinates(&self, s: &OperatorMatrix) -> Result<Vec<f64>> {
        ensure_dim(self.blocks.dim(), s.dim())?;
        let mut out = Vec::with_capacity(self.len());
        for (o, p) in self.blocks.ranges() {
            for j in 0..p {
                out.push(s[(o + j, o + j)].im);
                for k in j + 1..p {
                    let (a, b) = (s[(o + j, o + k)], s[(o + k, o + j)]);
                    out.push((a.re - b.re) * FRAC_1_SQRT_2);
                    out.push((a.im + b.im) * FRAC_1_SQRT_2);
                }
            }
        }
        Ok(out)
    }

    /// `exp(S(θ))`, exponentiated block by block so the result is exactly
    /// block-diagonal.
    pub fn exp(&self, theta: &[f64]) -> Result<OperatorMatrix> {
        ensure_dim(self.len(), theta.len())?;
        let mut u = OperatorMatrix::zeros(self.blocks.dim());
        let mut start = 0;
        for (offset, p) in self.blocks.ranges() {
            let coords = &theta[start..start + p * p];
            if p == 1 {
                u[(offset, offset)] = C64::from_polar(1.0, coords[0]);
            } else {
                u.set_block(offset, &exp_skew_hermitian(&Self::block_skew(p, coords))?);
            }
            start += p * p;
        }
        Ok(u.with_kind(MatrixKind::Unitary))
    }
}

/// Phase-coherence data for a pure initial state `ψ` and a stabilized vector
/// `v` that is also an eigenvector of the desired propagator.
///
/// With `W` the controlled propagator, the overlaps
/// `a = ⟨U_int† U_d ψ | W U_int ψ⟩` and `b = ⟨U_int† U_d v | W U_int v⟩` are
/// the phases the full schedule picks up relative to the desired evolution.
/// Superpositions `(ψ + v)/√2` are transferred with fidelity `|a + b|²/4`,
/// so the residual is `a - b`.
#[derive(Clone, Debug)]
pub struct PhaseLock {
    psi_in: Vec<C64>,
    psi_target: Vec<C64>,
    v_in: Vec<C64>,
    v_target: Vec<C64>,
}

impl PhaseLock {
    /// Returns `None` when the initial state is mixed, `v` is not orthogonal
    /// to it, or `v` is not an eigenvector of `U_d`.
    pub fn new(problem: &Problem, frame: &EquivalenceFrame, v: &StateVector) -> Result<Option<Self>> {
        let eig = eig_hermitian(&problem.rho_i)?;
        if (eig.values[0] - 1.0).abs() > tolerance::DENSITY {
            return Ok(None);
        }
        let psi = StateVector::new(eig.vectors.column(0))?;
        let v = v.normalized()?;
        if psi.inner(&v).norm() > 1e-9 {
            return Ok(None);
        }
        let ud_v = v.apply(&frame.u_d);
        if (1.0 - v.inner(&ud_v).norm()) > 1e-9 {
            return Ok(None);
        }
        let back = frame.u_int.adjoint().matmul(&frame.u_d);
        Ok(Some(Self {
            psi_in: frame.u_int.apply(psi.entries()),
            psi_target: back.apply(psi.entries()),
            v_in: frame.u_int.apply(v.entries()),
            v_target: back.apply(v.entries()),
        }))
    }

    fn overlaps(&self, w: &OperatorMatrix) -> (C64, C64) {
        let dot = |x: &[C64], y: Vec<C64>| -> C64 { x.iter().zip(&y).map(|(a, b)| a.conj() * b).sum() };
        (
            dot(&self.psi_target, w.apply(&self.psi_in)),
            dot(&self.v_target, w.apply(&self.v_in)),
        )
    }

    /// `|a - b|`.
    pub fn error(&self, w: &OperatorMatrix) -> f64 {
        let (a, b) = self.overlaps(w);
        (a - b).norm()
    }
}

/// The objective at one point.
#[derive(Clone, Debug)]
pub struct Evaluation {
    /// `‖H - P(H)‖_F`.
    pub cost: f64,
    /// `|a - b|` when a phase lock is active, else 0.
    pub phase_error: f64,
    /// Distance of the closest eigenphase of `W` to `±π`.
    pub branch_margin: f64,
    /// Residual vector; its squared norm is `cost² + phase_error²`.
    pub residual: Vec<f64>,
    pub block_unitary: OperatorMatrix,
    pub w: OperatorMatrix,
    pub h: OperatorMatrix,
}

impl Evaluation {
    pub fn objective(&self) -> f64 {
        self.cost * self.cost + self.phase_error * self.phase_error
    }

    pub fn in_branch_band(&self) -> bool {
        self.branch_margin < BRANCH_BAND
    }
}

/// Distance objective over the block-unitary coset.
#[derive(Clone, Debug)]
pub struct Landscape<'a> {
    pub frame: &'a EquivalenceFrame,
    pub subspace: &'a AlgebraBasis,
    pub tangent: BlockTangent,
    pub phase_lock: Option<PhaseLock>,
}

impl<'a> Landscape<'a> {
    pub fn new(frame: &'a EquivalenceFrame, subspace: &'a AlgebraBasis) -> Result<Self> {
        ensure_dim(frame.dim(), subspace.dim)?;
        Ok(Self {
            frame,
            subspace,
            tangent: BlockTangent::new(frame.d.clone()),
            phase_lock: None,
        })
    }

    pub fn with_phase_lock(mut self, lock: Option<PhaseLock>) -> Self {
        self.phase_lock = lock;
        self
    }

    /// Evaluates at `base · exp(S(θ))`.
    pub fn evaluate(&self, base: &OperatorMatrix, theta: &[f64]) -> Result<Evaluation> {
        let step = self.tangent.exp(theta)?;
        let block_unitary = base.matmul(&step).with_kind(MatrixKind::Unitary);
        self.evaluate_at(block_unitary)
    }

    pub fn evaluate_at(&self, block_unitary: OperatorMatrix) -> Result<Evaluation> {
        let w = self
            .frame
            .u_plus
            .matmul(&block_unitary)
            .matmul(&self.frame.u_minus.adjoint())
            .with_kind(MatrixKind::Unitary);
        let diag = eig_unitary(&w)?;
        let branch_margin = diag.phases.iter().map(|p| PI - p.abs()).fold(f64::INFINITY, f64::min);
        let h = principal_log_hamiltonian(&diag, self.frame.control_time);
        let off = &h - &project_hermitian_unchecked(&h, self.subspace);

        let n = off.dim();
        let mut residual = Vec::with_capacity(n * n + 2);
        for i in 0..n {
            residual.push(off[(i, i)].re);
            for j in i + 1..n {
                let z = (off[(i, j)] + off[(j, i)].conj()) * FRAC_1_SQRT_2;
                residual.push(z.re);
                residual.push(z.im);
            }
        }
        let cost = residual.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut phase_error = 0.0;
        if let Some(lock) = &self.phase_lock {
            let (a, b) = lock.overlaps(&w);
            let z = a - b;
            residual.push(z.re);
            residual.push(z.im);
            phase_error = z.norm();
        }
        Ok(Evaluation {
            cost,
            phase_error,
            branch_margin,
            residual,
            block_unitary,
            w,
            h,
        })
    }

    /// Central-difference gradient of the squared objective at `base`.
    pub fn gradient(&self, base: &OperatorMatrix, step: f64) -> Result<Vec<f64>> {
        let n = self.tangent.len();
        let mut theta = vec![0.0; n];
        let mut grad = Vec::with_capacity(n);
        for k in 0..n {
            theta[k] = step;
            let plus = self.evaluate(base, &theta)?.objective();
            theta[k] = -step;
            let minus = self.evaluate(base, &theta)?.objective();
            theta[k] = 0.0;
            grad.push((plus - minus) / (2.0 * step));
        }
        Ok(grad)
    }

    /// Central-difference Jacobian of the residual vector, one column per
    /// coordinate.
    pub fn jacobian(&self, base: &OperatorMatrix, step: f64) -> Result<Vec<Vec<f64>>> {
        let n = self.tangent.len();
        let mut theta = vec![0.0; n];
        let mut cols = Vec::with_capacity(n);
        for k in 0..n {
            theta[k] = step;
            let plus = self.evaluate(base, &theta)?.residual;
            theta[k] = -step;
            let minus = self.evaluate(base, &theta)?.residual;
            theta[k] = 0.0;
            cols.push(plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * step)).collect());
        }
        Ok(cols)
    }
}

/// `‖H - P(H)‖_F` for the principal Hamiltonian of `U₊ · base · exp(S(θ)) · U₋†`.
pub fn cost(frame: &EquivalenceFrame, subspace: &AlgebraBasis, base: &OperatorMatrix, theta: &[f64]) -> Result<f64> {
    Ok(Landscape::new(frame, subspace)?.evaluate(base, theta)?.cost)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub cost: f64,
    pub objective: f64,
}

/// Physical checks on the candidate, computed from the full schedule
/// propagator `U_int exp(-i τ H) U_int`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    /// `‖W ρ₋ W† - ρ₊‖_F` for `W = exp(-i τ H)`.
    pub mapping_error: f64,
    /// `|⟨U_d ψ | U ψ⟩|²` for a pure initial state `ψ`.
    pub transfer_fidelity: Option<f64>,
    /// Component of `U v` orthogonal to `v`.
    pub stabilized_leakage: Option<f64>,
    /// `|⟨U_d s | U s⟩|²` for `s = (ψ + v)/√2`.
    pub superposition_fidelity: Option<f64>,
}

impl Verification {
    pub fn compute(problem: &Problem, frame: &EquivalenceFrame, h: &OperatorMatrix, v: Option<&StateVector>) -> Result<Self> {
        let w = expm_hermitian(h, frame.control_time)?;
        let mapping_error = frame.mapping_error(&w);
        let u = frame.u_int.matmul(&w).matmul(&frame.u_int);
        let fidelity = |s: &StateVector| s.apply(&frame.u_d).inner(&s.apply(&u)).norm_sqr();

        let eig = eig_hermitian(&problem.rho_i)?;
        let psi = ((eig.values[0] - 1.0).abs() <= tolerance::DENSITY)
            .then(|| StateVector::new(eig.vectors.column(0)))
            .transpose()?;
        let v = v.map(|v| v.normalized()).transpose()?;
        let stabilized_leakage = v.as_ref().map(|v| {
            let uv = v.apply(&u);
            let along = v.inner(&uv);
            uv.add_scaled(v, C64::new(1.0, 0.0), -along).norm()
        });
        let superposition_fidelity = match (&psi, &v) {
            (Some(psi), Some(v)) => {
                let s = psi.add_scaled(v, C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0));
                Some(fidelity(&s.normalized()?))
            }
            _ => None,
        };
        Ok(Self {
            mapping_error,
            transfer_fidelity: psi.as_ref().map(fidelity),
            stabilized_leakage,
            superposition_fidelity,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    pub candidate: GHCandidate,
    pub cost: f64,
    pub phase_error: f64,
    pub iterations: usize,
    pub restart_index: usize,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
    /// Real dimension of the control algebra.
    pub algebra_dim: usize,
    /// Real dimension of the subspace the cost projects onto.
    pub subspace_dim: usize,
    pub verification: Verification,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSummary {
    pub cost: f64,
    pub phase_error: f64,
    pub converged: bool,
    pub iterations: usize,
    pub restart_index: usize,
    pub algebra_dim: usize,
    pub subspace_dim: usize,
    pub h_norm: f64,
    pub verification: Verification,
    pub trace: Vec<TracePoint>,
}

impl SynthesisResult {
    pub fn summary(&self) -> SynthesisSummary {
        SynthesisSummary {
            cost: self.cost,
            phase_error: self.phase_error,
            converged: self.converged,
            iterations: self.iterations,
            restart_index: self.restart_index,
            algebra_dim: self.algebra_dim,
            subspace_dim: self.subspace_dim,
            h_norm: self.candidate.h.frobenius_norm(),
            verification: self.verification,
            trace: self.trace.clone(),
        }
    }
}

/// Outcome of one descent run.
#[derive(Clone, Debug)]
pub struct Descent {
    pub best: Evaluation,
    pub iterations: usize,
    pub trace: Vec<TracePoint>,
}

impl<'a> Landscape<'a> {
    fn converged(&self, e: &Evaluation, tol: f64) -> bool {
        e.cost <= tol && e.phase_error <= tol
    }

    fn acceptable(&self, current: &Evaluation, trial: &Evaluation) -> bool {
        // Steps may leave the branch-cut band but never enter it or move deeper.
        !(trial.in_branch_band() && trial.branch_margin < current.branch_margin)
    }

    /// Runs the configured descent from `start`.
    pub fn descend(&self, start: OperatorMatrix, cfg: &OptimizerConfig) -> Result<Descent> {
        match cfg.method {
            Method::GradientDescent => self.gradient_descent(start, cfg),
            Method::LevenbergMarquardt => self.levenberg_marquardt(start, cfg),
        }
    }

    fn gradient_descent(&self, start: OperatorMatrix, cfg: &OptimizerConfig) -> Result<Descent> {
        let mut current = self.evaluate_at(start)?;
        let mut trace = vec![point(0, &current)];
        let mut step = cfg.init_step;
        let mut iterations = 0;
        let mut stall = 0;
        while iterations < cfg.max_iters && !self.converged(&current, cfg.cost_tol) {
            let grad = self.gradient(&current.block_unitary, cfg.grad_step)?;
            let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
            if gnorm2 == 0.0 {
                break;
            }
            let mut accepted = None;
            for _ in 0..60 {
                let theta: Vec<f64> = grad.iter().map(|g| -step * g).collect();
                let trial = self.evaluate(&current.block_unitary, &theta)?;
                let f0 = current.objective();
                if self.acceptable(&current, &trial) && trial.objective() <= f0 - 1e-4 * step * gnorm2 {
                    accepted = Some(trial);
                    break;
                }
                step *= 0.5;
            }
            let Some(next) = accepted else { break };
            stall = stalled(stall, &current, &next);
            current = next;
            iterations += 1;
            trace.push(point(iterations, &current));
            step *= 2.0;
            if stall >= STALL_STEPS {
                break;
            }
        }
        Ok(Descent {
            best: current,
            iterations,
            trace,
        })
    }

    fn levenberg_marquardt(&self, start: OperatorMatrix, cfg: &OptimizerConfig) -> Result<Descent> {
        let n = self.tangent.len();
        let mut current = self.evaluate_at(start)?;
        let mut trace = vec![point(0, &current)];
        let mut damping = 1e-3;
        let mut iterations = 0;
        let mut stall = 0;
        while iterations < cfg.max_iters && !self.converged(&current, cfg.cost_tol) {
            let jac = self.jacobian(&current.block_unitary, cfg.grad_step)?;
            let r = &current.residual;
            let mut gram = vec![0.0; n * n];
            let mut rhs = vec![0.0; n];
            for a in 0..n {
                rhs[a] = -dot(&jac[a], r);
                for b in a..n {
                    let v = dot(&jac[a], &jac[b]);
                    gram[a * n + b] = v;
                    gram[b * n + a] = v;
                }
            }
            let scale = (0..n).map(|a| gram[a * n + a]).fold(0.0, f64::max).max(f64::MIN_POSITIVE);

            let mut accepted = None;
            for _ in 0..40 {
                let mut sys = gram.clone();
                for a in 0..n {
                    sys[a * n + a] += damping * scale;
                }
                let Some(mut delta) = solve_spd(&sys, &rhs, n) else {
                    damping *= 10.0;
                    continue;
                };
                let norm = dot(&delta, &delta).sqrt();
                if norm > cfg.init_step {
                    delta.iter_mut().for_each(|d| *d *= cfg.init_step / norm);
                }
                let trial = self.evaluate(&current.block_unitary, &delta)?;
                if self.acceptable(&current, &trial) && trial.objective() < current.objective() {
                    accepted = Some(trial);
                    damping = (damping / 3.0).max(1e-15);
                    break;
                }
                damping *= 4.0;
            }
            let Some(next) = accepted else { break };
            stall = stalled(stall, &current, &next);
            current = next;
            iterations += 1;
            trace.push(point(iterations, &current));
            if stall >= STALL_STEPS {
                break;
            }
        }
        Ok(Descent {
            best: current,
            iterations,
            trace,
        })
    }
}

fn stalled(count: usize, current: &Evaluation, next: &Evaluation) -> usize {
    if current.objective() - next.objective() < STALL_REL * current.objective() {
        count + 1
    } else {
        0
    }
}

fn point(iteration: usize, e: &Evaluation) -> TracePoint {
    TracePoint {
        iteration,
        cost: e.cost,
        objective: e.objective(),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cholesky solve of a symmetric positive definite system; `None` when the
/// factorization breaks down.
fn solve_spd(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
        y[i] = (b[i] - s) / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i * n + i];
    }
    Some(x)
}

/// Control algebra generated by `-i H_int` and `-i H_c` for every control.
pub fn control_algebra(problem: &Problem, controls: &[OperatorMatrix]) -> Result<AlgebraBasis> {
    if controls.is_empty() {
        return Err(Error::Empty("control list"));
    }
    let mut generators = vec![problem.h_int.scale(-I)];
    for c in controls {
        ensure_dim(problem.dim(), c.dim())?;
        c.check_hermitian()?;
        generators.push(c.scale(-I));
    }
    lie_closure(&generators, tolerance::RANK_TOL)
}

/// Full pipeline: closure, optional stabilizer subspace, multi-start descent.
pub fn synthesize(
    problem: &Problem,
    controls: &[OperatorMatrix],
    stabilized_vector: Option<&StateVector>,
    cfg: &OptimizerConfig,
) -> Result<SynthesisResult> {
    cfg.validate()?;
    let frame = build_frame(problem)?;
    let algebra = control_algebra(problem, controls)?;
    let subspace = match stabilized_vector {
        Some(v) => {
            let s = eigenvector_stabilizer_subspace(&algebra, v)?;
            if s.is_empty() {
                return Err(Error::Infeasible(
                    "no element of the control algebra has the stabilized vector as an eigenvector".into(),
                ));
            }
            s
        }
        None => algebra.clone(),
    };
    let lock = match stabilized_vector {
        Some(v) => PhaseLock::new(problem, &frame, v)?,
        None => None,
    };
    let landscape = Landscape::new(&frame, &subspace)?.with_phase_lock(lock);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut best: Option<(Descent, usize)> = None;
    for restart in 0..cfg.restarts {
        let start = if restart == 0 {
            OperatorMatrix::identity(frame.dim())
        } else {
            let theta: Vec<f64> = (0..landscape.tangent.len())
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    cfg.restart_scale * z
                })
                .collect();
            landscape.tangent.exp(&theta)?
        };
        let run = landscape.descend(start, cfg)?;
        let done = landscape.converged(&run.best, cfg.cost_tol);
        let better = best
            .as_ref()
            .is_none_or(|(b, _)| run.best.objective() < b.best.objective());
        if better {
            best = Some((run, restart));
        }
        if done {
            break;
        }
    }
    let (run, restart_index) = best.expect("at least one restart");
    let converged = landscape.converged(&run.best, cfg.cost_tol);
    let diag = eig_unitary(&run.best.w)?;
    let candidate = principal_from_diagonalization(&frame, &run.best.w, diag);
    let verification = Verification::compute(problem, &frame, &candidate.h, stabilized_vector)?;
    Ok(SynthesisResult {
        verification,
        cost: run.best.cost,
        phase_error: run.best.phase_error,
        candidate,
        iterations: run.iterations,
        restart_index,
        converged,
        trace: run.trace,
        algebra_dim: algebra.len(),
        subspace_dim: subspace.len(),
    })
}
