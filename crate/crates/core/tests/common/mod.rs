#![allow(dead_code)]

use std::f64::consts::PI;

use eqham::equivalence::Problem;
use eqham::operator::{OperatorMatrix, StateVector, C64};
use eqham::spin::{dipolar_hamiltonian, first_excited, global_control, xy_christandl, Axis, ChainSpec};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(rng: &mut impl Rng, n: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(n, |_, _| gaussian(rng))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> OperatorMatrix {
    let a = random_matrix(rng, n);
    (&a + &a.adjoint()).scale_real(0.5).hermitian_part()
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> StateVector {
    StateVector::new((0..n).map(|_| gaussian(rng)).collect())
        .unwrap()
        .normalized()
        .unwrap()
}

/// Haar-distributed unitary: Gram–Schmidt on a complex Gaussian matrix.
pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> OperatorMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let c: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    OperatorMatrix::from_columns(&cols).unwrap().into_unitary().unwrap()
}

/// Block-diagonal Haar unitary for the given block sizes.
pub fn haar_block_unitary(rng: &mut impl Rng, sizes: &[usize]) -> OperatorMatrix {
    let n: usize = sizes.iter().sum();
    let mut u = OperatorMatrix::zeros(n);
    let mut offset = 0;
    for &p in sizes {
        u.set_block(offset, &haar_unitary(rng, p));
        offset += p;
    }
    u.into_unitary().unwrap()
}

/// Invertible block-diagonal matrix (Gaussian blocks shifted away from singular).
pub fn random_block_invertible(rng: &mut impl Rng, sizes: &[usize]) -> OperatorMatrix {
    let n: usize = sizes.iter().sum();
    let mut x = OperatorMatrix::zeros(n);
    let mut offset = 0;
    for &p in sizes {
        let mut b = random_matrix(rng, p);
        for i in 0..p {
            b[(i, i)] += C64::new(3.0, 0.0);
        }
        x.set_block(offset, &b);
        offset += p;
    }
    x
}

pub fn frob(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    (a - b).frobenius_norm()
}

pub fn chain(n: usize) -> ChainSpec {
    ChainSpec::new(n, 1.0, 1.0).unwrap()
}

pub fn controls(n: usize) -> Vec<OperatorMatrix> {
    vec![global_control(Axis::X, n).unwrap(), global_control(Axis::Y, n).unwrap()]
}

/// Transfer problem on an `n`-site chain: `|↑↓…↓⟩` evolved under the XY chain
/// for `t0 = π`, with dipolar natural evolution.
pub fn transfer_problem(n: usize, eta: f64) -> Problem {
    let spec = chain(n);
    Problem::new(
        first_excited(n).unwrap().projector(),
        xy_christandl(&spec).unwrap(),
        dipolar_hamiltonian(&spec).unwrap(),
        PI,
        eta,
    )
    .unwrap()
}

/// Eigenvalues of a Hermitian matrix from its characteristic polynomial:
/// Faddeev–LeVerrier coefficients, then Durand–Kerner roots, sorted descending.
pub fn charpoly_eigenvalues(h: &OperatorMatrix) -> Vec<f64> {
    let n = h.dim();
    // p(λ) = λⁿ + c_1 λⁿ⁻¹ + … + c_n
    let mut coeffs = vec![C64::new(1.0, 0.0)];
    let mut m = OperatorMatrix::zeros(n);
    for k in 1..=n {
        let mut next = h.matmul(&m);
        for i in 0..n {
            next[(i, i)] += coeffs[k - 1];
        }
        m = next;
        let c = -h.matmul(&m).trace() / k as f64;
        coeffs.push(c);
    }
    let eval = |z: C64| coeffs.iter().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c);
    let seed = C64::new(0.4, 0.9);
    let radius = 1.0 + coeffs.iter().skip(1).map(|c| c.norm()).fold(0.0, f64::max);
    let mut roots: Vec<C64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    let mut values: Vec<f64> = roots.iter().map(|r| r.re).collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    values
}
