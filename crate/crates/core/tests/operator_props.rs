mod common;

use std::f64::consts::PI;

use common::*;
use eqham::operator::{
    eig_hermitian, eig_unitary, exp_skew_hermitian, expm, hs_inner, BlockStructure, OperatorMatrix, C64,
};
use eqham::spin::{pauli, Axis};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Determinant by Gaussian elimination with partial pivoting.
fn determinant(a: &OperatorMatrix) -> C64 {
    let n = a.dim();
    let mut m: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| m[x][col].norm().partial_cmp(&m[y][col].norm()).unwrap()).unwrap();
        if m[pivot][col].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                let sub = f * m[col][k];
                m[row][k] -= sub;
            }
        }
    }
    det
}

#[test]
fn jacobi_matches_characteristic_polynomial_roots() {
    for seed in 0..20 {
        let h = random_hermitian(&mut rng(seed), 4);
        let eig = eig_hermitian(&h).unwrap();
        let oracle = charpoly_eigenvalues(&h);
        for (a, b) in eig.values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "seed {seed}: {a} vs {b}");
        }
        assert!(frob(&eig.reconstruct(), &h) < 1e-10);
    }
}

#[test]
fn identity_and_pauli_z_spectra() {
    let e = eig_hermitian(&OperatorMatrix::identity(2).into_hermitian().unwrap()).unwrap();
    assert_eq!(e.values, vec![1.0, 1.0]);
    let z = eig_hermitian(&pauli(Axis::Z)).unwrap();
    assert_eq!(z.values, vec![1.0, -1.0]);
    assert!(frob(&z.reconstruct(), &pauli(Axis::Z)) < 1e-15);
}

#[test]
fn hs_inner_on_paulis() {
    let (x, y) = (pauli(Axis::X), pauli(Axis::Y));
    assert_eq!(hs_inner(&x, &x).unwrap(), C64::new(2.0, 0.0));
    assert_eq!(hs_inner(&x, &y).unwrap(), C64::new(0.0, 0.0));
    assert!(hs_inner(&x, &OperatorMatrix::identity(3)).is_err());
}

#[test]
fn unitary_phases_of_hermitian_exponential() {
    for seed in 0..20 {
        let mut r = rng(100 + seed);
        let h = random_hermitian(&mut r, 5);
        let scale = 0.9 * PI / eig_hermitian(&h).unwrap().values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let h = h.scale_real(scale).hermitian_part();
        let w = exp_skew_hermitian(&h.scale(C64::new(0.0, -1.0))).unwrap();
        let d = eig_unitary(&w).unwrap();
        let mut expected: Vec<f64> = eig_hermitian(&h).unwrap().values.iter().map(|v| -v).collect();
        expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in d.phases.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-8, "seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn unitary_special_cases() {
    let d = eig_unitary(&OperatorMatrix::identity(4)).unwrap();
    assert_eq!(d.phases, vec![0.0; 4]);
    assert_eq!(d.blocks.sizes(), vec![4]);

    let w = OperatorMatrix::diagonal(&[C64::new(0.0, 1.0), C64::new(0.0, -1.0)]).into_unitary().unwrap();
    let d = eig_unitary(&w).unwrap();
    assert!((d.phases[0] - PI / 2.0).abs() < 1e-15 && (d.phases[1] + PI / 2.0).abs() < 1e-15);
    assert_eq!(d.blocks.sizes(), vec![1, 1]);

    let minus = OperatorMatrix::diagonal(&[C64::new(-1.0, 0.0), C64::new(1.0, 0.0)]).into_unitary().unwrap();
    assert_eq!(eig_unitary(&minus).unwrap().phases[0], PI);

    assert!(eig_unitary(&OperatorMatrix::real_diagonal(&[2.0, 1.0])).is_err());
}

#[test]
fn skew_exponential_examples_and_taylor_oracle() {
    assert!(frob(&exp_skew_hermitian(&OperatorMatrix::zeros(3)).unwrap(), &OperatorMatrix::identity(3)) < 1e-15);
    let s = pauli(Axis::X).scale(C64::new(0.0, -PI / 2.0));
    let minus_ix = pauli(Axis::X).scale(C64::new(0.0, -1.0));
    assert!(frob(&exp_skew_hermitian(&s).unwrap(), &minus_ix) < 1e-15);
    assert!(exp_skew_hermitian(&pauli(Axis::X)).is_err());

    for seed in 0..20 {
        let s = random_hermitian(&mut rng(200 + seed), 6).scale(C64::new(0.0, 1.0));
        let u = exp_skew_hermitian(&s).unwrap();
        assert!(u.unitarity_defect() < 1e-12);
        assert!(frob(&u, &expm(&s)) < 1e-9);
        assert!((determinant(&u).norm() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn block_stabilizer_property_both_directions() {
    let sizes = [1usize, 2, 3];
    for seed in 0..100 {
        let mut r = rng(300 + seed);
        let values: Vec<f64> = vec![0.3, -1.1, -1.1, 2.0, 2.0, 2.0];
        let t = OperatorMatrix::real_diagonal(&values);
        let blocks = BlockStructure::from_sizes(&sizes).unwrap();
        let (x, block_diagonal) = if seed % 2 == 0 {
            (random_block_invertible(&mut r, &sizes), true)
        } else {
            (random_matrix(&mut r, 6), false)
        };
        let commutes = frob(&x.matmul(&t).matmul(&x.inverse().unwrap()), &t);
        let off = blocks.off_block_mass(&x).unwrap();
        if block_diagonal {
            assert!(commutes <= 1e-9 && off <= 1e-9);
        } else {
            assert!(commutes > 1e-6 && off > 1e-6);
        }
    }
}

#[test]
fn grouping_merges_only_close_values() {
    let values: Vec<C64> = [1.0, 1.0 + 1e-12, 0.5, 0.0, -1e-11].iter().map(|&x| C64::new(x, 0.0)).collect();
    let b = BlockStructure::group_sorted(&values, 1e-8);
    assert_eq!(b.sizes(), vec![2, 1, 2]);
    assert_eq!(b.group_dimension(), 9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hermitian_reconstruction(seed in any::<u64>(), n in 1usize..9) {
        let h = random_hermitian(&mut rng(seed), n);
        let eig = eig_hermitian(&h).unwrap();
        prop_assert!(frob(&eig.reconstruct(), &h) <= 1e-10 * h.frobenius_norm().max(1.0));
        prop_assert!(eig.vectors.unitarity_defect() < 1e-9 * n as f64);
        prop_assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn unitary_reconstruction(seed in any::<u64>(), n in 1usize..9) {
        let w = haar_unitary(&mut rng(seed), n);
        let d = eig_unitary(&w).unwrap();
        prop_assert!(frob(&d.reconstruct(), &w) < 1e-9);
        prop_assert!(d.phases.iter().all(|&p| p > -PI && p <= PI));
        prop_assert!(d.phases.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(d.blocks.dim(), n);
    }

    #[test]
    fn degenerate_unitary_reconstruction(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = haar_unitary(&mut r, 6);
        let phases = [2.0, 2.0, 2.0, -0.5, -0.5, PI];
        let t = OperatorMatrix::diagonal(&phases.iter().map(|&p| C64::from_polar(1.0, p)).collect::<Vec<_>>());
        let w = v.conjugate(&t).into_unitary().unwrap();
        let d = eig_unitary(&w).unwrap();
        prop_assert!(frob(&d.reconstruct(), &w) < 1e-9);
        prop_assert_eq!(d.blocks.sizes(), vec![1, 3, 2]);
    }

    #[test]
    fn hs_inner_conjugate_symmetry(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let (a, b) = (random_matrix(&mut r, n), random_matrix(&mut r, n));
        let ab = hs_inner(&a, &b).unwrap();
        let ba = hs_inner(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-12 * (1.0 + ab.norm()));
        let aa = hs_inner(&a, &a).unwrap();
        prop_assert!(aa.im.abs() < 1e-12 && (aa.re.sqrt() - a.frobenius_norm()).abs() < 1e-10);
    }
}
