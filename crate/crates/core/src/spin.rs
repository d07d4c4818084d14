//! Spin-chain operators: site Paulis, the dipolar internal Hamiltonian,
//! global rotation controls and the engineered-coupling XY chain.
//!
//! Conventions: spin up is `|0⟩` with `Z|0⟩ = +|0⟩`; site 1 is the leftmost
//! tensor factor, i.e. the most significant bit of the basis index.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{OperatorMatrix, StateVector, I, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_qubits: usize,
    /// Dipolar prefactor: `J_kl = coupling_scale / |k - l|^3`.
    pub coupling_scale: f64,
    /// Transfer rate: perfect transfer happens at `t = π / lambda`.
    pub lambda: f64,
}

impl ChainSpec {
    pub const MIN_QUBITS: usize = 2;
    pub const MAX_QUBITS: usize = 8;

    pub fn new(n_qubits: usize, coupling_scale: f64, lambda: f64) -> Result<Self> {
        let spec = Self {
            n_qubits,
            coupling_scale,
            lambda,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `chain4`, `chain5`, `chain6`: unit coupling scale and unit rate.
    pub fn preset(name: &str) -> Result<Self> {
        let n = match name {
            "chain4" => 4,
            "chain5" => 5,
            "chain6" => 6,
            other => return Err(Error::validation(format!("unknown preset '{other}'"))),
        };
        Self::new(n, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(Self::MIN_QUBITS..=Self::MAX_QUBITS).contains(&self.n_qubits) {
            return Err(Error::validation(format!(
                "chain length {} outside [{}, {}]",
                self.n_qubits,
                Self::MIN_QUBITS,
                Self::MAX_QUBITS
            )));
        }
        if !(self.coupling_scale > 0.0 && self.coupling_scale.is_finite()) {
            return Err(Error::validation("coupling_scale must be positive"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::validation("lambda must be positive"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Dipolar coupling between sites `k` and `l` (1-based).
    pub fn dipolar_coupling(&self, k: usize, l: usize) -> f64 {
        let r = k.abs_diff(l) as f64;
        self.coupling_scale / (r * r * r)
    }

    /// Engineered XY coupling `C_k = (λ/2) sqrt(k (n - k))` for the bond `(k, k+1)`.
    pub fn christandl_coupling(&self, k: usize) -> f64 {
        let n = self.n_qubits as f64;
        let k = k as f64;
        0.5 * self.lambda * (k * (n - k)).sqrt()
    }

    /// Time at which the XY chain transfers site 1 to site n.
    pub fn transfer_time(&self) -> f64 {
        std::f64::consts::PI / self.lambda
    }
}

pub fn pauli(axis: Axis) -> OperatorMatrix {
    let m = match axis {
        Axis::X => [[ZERO, ONE], [ONE, ZERO]],
        Axis::Y => [[ZERO, -I], [I, ZERO]],
        Axis::Z => [[ONE, ZERO], [ZERO, -ONE]],
    };
    OperatorMatrix::from_fn(2, |i, j| m[i][j]).into_hermitian().expect("Pauli matrices are Hermitian")
}

/// `σ_axis` acting on `site` (1-based) of an `n`-qubit register.
pub fn pauli_on(axis: Axis, site: usize, n: usize) -> Result<OperatorMatrix> {
    if n == 0 || site == 0 || site > n {
        return Err(Error::validation(format!("site {site} out of range 1..={n}")));
    }
    let factors: Vec<OperatorMatrix> = (1..=n)
        .map(|k| if k == site { pauli(axis) } else { OperatorMatrix::identity(2) })
        .collect();
    Ok(kron_all(&factors))
}

/// Product of Paulis on distinct sites, e.g. `X_k X_l`.
pub fn pauli_string(terms: &[(Axis, usize)], n: usize) -> Result<OperatorMatrix> {
    let mut factors: Vec<OperatorMatrix> = (0..n).map(|_| OperatorMatrix::identity(2)).collect();
    for &(axis, site) in terms {
        if site == 0 || site > n {
            return Err(Error::validation(format!("site {site} out of range 1..={n}")));
        }
        factors[site - 1] = factors[site - 1].matmul(&pauli(axis));
    }
    Ok(kron_all(&factors))
}

fn kron_all(factors: &[OperatorMatrix]) -> OperatorMatrix {
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = acc.kron(f);
    }
    acc.hermitian_part()
}

fn two_site(n: usize, k: usize, l: usize, coeffs: [f64; 3]) -> OperatorMatrix {
    let mut h = OperatorMatrix::zeros(1 << n);
    for (axis, c) in [Axis::X, Axis::Y, Axis::Z].into_iter().zip(coeffs) {
        if c != 0.0 {
            let term = pauli_string(&[(axis, k), (axis, l)], n).expect("sites validated by caller");
            h = &h + &term.scale_real(c);
        }
    }
    h
}

/// `Σ_{k<l} J_kl (X_k X_l + Y_k Y_l - 2 Z_k Z_l)`.
pub fn dipolar_hamiltonian(spec: &ChainSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    let n = spec.n_qubits;
    let mut h = OperatorMatrix::zeros(spec.dim());
    for k in 1..=n {
        for l in k + 1..=n {
            let j = spec.dipolar_coupling(k, l);
            h = &h + &two_site(n, k, l, [j, j, -2.0 * j]);
        }
    }
    Ok(h.hermitian_part())
}

/// `Σ_k σ_axis^(k)`.
pub fn global_control(axis: Axis, n: usize) -> Result<OperatorMatrix> {
    if n == 0 {
        return Err(Error::validation("register must have at least one qubit"));
    }
    let mut h = OperatorMatrix::zeros(1 << n);
    for k in 1..=n {
        h = &h + &pauli_on(axis, k, n)?;
    }
    Ok(h.hermitian_part())
}

/// Nearest-neighbour XY chain `Σ_k C_k (X_k X_{k+1} + Y_k Y_{k+1}) / 2` with
/// `C_k = (λ/2) sqrt(k (n - k))`.
///
/// In the single-excitation sector this hops with amplitude `C_k`, which is
/// `λ` times the `x` component of a spin `(n - 1)/2`, so a single excitation
/// moves from site 1 to site n at `t = π/λ`.
pub fn xy_christandl(spec: &ChainSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    let n = spec.n_qubits;
    let mut h = OperatorMatrix::zeros(spec.dim());
    for k in 1..n {
        let c = 0.5 * spec.christandl_coupling(k);
        h = &h + &two_site(n, k, k + 1, [c, c, 0.0]);
    }
    Ok(h.hermitian_part())
}

/// Computational basis state for a spin pattern (site 1 first).
pub fn basis_state(pattern: &[Spin]) -> Result<StateVector> {
    if pattern.is_empty() {
        return Err(Error::Empty("spin pattern"));
    }
    let index = pattern
        .iter()
        .fold(0usize, |acc, s| (acc << 1) | usize::from(*s == Spin::Down));
    Ok(StateVector::basis(1 << pattern.len(), index))
}

/// `|↑↓…↓⟩`, `|↓…↓↑⟩` and `|↓…↓⟩` on `n` sites.
pub fn first_excited(n: usize) -> Result<StateVector> {
    let mut p = vec![Spin::Down; n];
    if let Some(first) = p.first_mut() {
        *first = Spin::Up;
    }
    basis_state(&p)
}

pub fn last_excited(n: usize) -> Result<StateVector> {
    let mut p = vec![Spin::Down; n];
    if let Some(last) = p.last_mut() {
        *last = Spin::Up;
    }
    basis_state(&p)
}

pub fn all_down(n: usize) -> Result<StateVector> {
    basis_state(&vec![Spin::Down; n])
}

/// Total magnetization `Σ_k Z_k`.
pub fn total_z(n: usize) -> Result<OperatorMatrix> {
    let mut h = OperatorMatrix::zeros(1 << n);
    for k in 1..=n {
        h = &h + &pauli_on(Axis::Z, k, n)?;
    }
    Ok(h)
}
