mod common;

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::Instant;

use common::*;
use eqham::cli::{cmd_fidelity, cmd_solve, OptimizerArgs, SystemArgs};
use eqham::equivalence::{build_frame, gh_element, gu_element, logarithm_branch, principal_hamiltonian, Problem};
use eqham::lie::{distance_to_span, eigenvector_stabilizer_subspace};
use eqham::operator::{expm, expm_hermitian, BlockStructure, Diagonalization, OperatorMatrix, C64};
use eqham::spin::{all_down, first_excited, last_excited, xy_christandl, ChainSpec};
use eqham::synthesis::{control_algebra, SynthesisSummary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn chain4_problem() -> Problem {
    transfer_problem(4, 0.95)
}

fn closure_dimension() -> Outcome {
    let start = Instant::now();
    let p = chain4_problem();
    let algebra = control_algebra(&p, &controls(4)).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        algebra.len() == 96 && algebra.ambient_dimension() == 256 && elapsed < 60.0,
        format!("dim {} of {} in {:.2} s", algebra.len(), algebra.ambient_dimension(), elapsed),
    )
}

fn non_membership() -> Outcome {
    let p = chain4_problem();
    let algebra = control_algebra(&p, &controls(4)).unwrap();
    let rel = distance_to_span(&p.h_d, &algebra).unwrap() / p.h_d.frobenius_norm();
    outcome(rel > 1e-6, format!("relative distance {rel:.6}"))
}

fn stabilizing_subspace() -> Outcome {
    let p = chain4_problem();
    let algebra = control_algebra(&p, &controls(4)).unwrap();
    let sub = eigenvector_stabilizer_subspace(&algebra, &all_down(4).unwrap()).unwrap();
    outcome(sub.len() >= 9, format!("dim {}", sub.len()))
}

fn perfect_transfer() -> Outcome {
    let mut worst: f64 = 1.0;
    let mut at4 = 0.0;
    for n in 2..=6 {
        let spec = ChainSpec::new(n, 1.0, 1.0).unwrap();
        let u = expm_hermitian(&xy_christandl(&spec).unwrap(), spec.transfer_time()).unwrap();
        let f = last_excited(n).unwrap().inner(&first_excited(n).unwrap().apply(&u)).norm_sqr();
        worst = worst.min(f);
        if n == 4 {
            at4 = f;
        }
    }
    outcome(
        at4 >= 1.0 - 1e-10 && worst >= 1.0 - 1e-10,
        format!("n=4 fidelity {at4:.15}, worst over n=2..6 {worst:.15}"),
    )
}

fn gh_soundness() -> Outcome {
    let p = chain4_problem();
    let frame = build_frame(&p).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let w = gu_element(&frame, &haar_block_unitary(&mut r, &frame.d.sizes())).unwrap();
        let c = principal_hamiltonian(&frame, &w).unwrap();
        let evolved = expm_hermitian(&c.h, p.control_time()).unwrap().conjugate(&frame.rho_minus);
        worst = worst.max(frob(&evolved, &frame.rho_plus));
    }
    outcome(worst <= 1e-8, format!("worst mapping error {worst:.3e} over 100 samples"))
}

fn stabilizer_oracle() -> Outcome {
    let sizes = [1usize, 2, 3];
    let blocks = BlockStructure::from_sizes(&sizes).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(6);
    let mut agree = 0;
    for trial in 0..200 {
        let mut vals = vec![gaussian(&mut r).re; 1];
        let v2 = gaussian(&mut r).re + 3.0;
        let v3 = gaussian(&mut r).re - 3.0;
        vals.extend([v2, v2, v3, v3, v3]);
        let t = OperatorMatrix::real_diagonal(&vals);
        let x = if trial % 2 == 0 {
            random_block_invertible(&mut r, &sizes)
        } else {
            random_matrix(&mut r, 6)
        };
        let defect = frob(&x.matmul(&t).matmul(&x.inverse().unwrap()), &t);
        let off = blocks.off_block_mass(&x).unwrap();
        let ok = if trial % 2 == 0 {
            defect <= 1e-9 && off <= 1e-9
        } else {
            defect > 1e-6 && off > 1e-6
        };
        agree += usize::from(ok);
    }
    outcome(agree == 200, format!("{agree}/200 agree"))
}

fn counterexample() -> Outcome {
    let rho = OperatorMatrix::real_diagonal(&[0.5, 0.5]);
    let zero = OperatorMatrix::zeros(2).into_hermitian().unwrap();
    let frame = build_frame(&Problem::new(rho, zero.clone(), zero, 1.0, 0.0).unwrap()).unwrap();
    let diag = Diagonalization {
        v: OperatorMatrix::identity(2),
        phases: vec![0.0, 0.0],
        blocks: BlockStructure::from_sizes(&[2]).unwrap(),
    };
    let x = OperatorMatrix::from_rows(&[
        &[C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
        &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    ])
    .unwrap();
    let c = gh_element(&frame, &OperatorMatrix::identity(2), &diag, &[-1, 0], &x).unwrap();
    let a = c.h.scale(C64::new(0.0, -1.0));
    let expected = OperatorMatrix::from_rows(&[
        &[C64::new(0.0, 2.0 * PI), C64::new(0.0, -2.0 * PI)],
        &[C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
    ])
    .unwrap();
    let err_a = frob(&a, &expected);
    let err_exp = frob(&expm(&a), &OperatorMatrix::identity(2));
    outcome(
        err_a <= 1e-12 && err_exp <= 1e-12 && !c.hermitian,
        format!("|A - A_ref| {err_a:.1e}, |exp(A) - I| {err_exp:.1e}, hermitian {}", c.hermitian),
    )
}

fn hermiticity_criterion() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let sizes = [3usize, 1, 2];
    let phases = [1.0, 1.0, 1.0, -0.7, 2.2, 2.2];
    let tau = 0.9;
    let (mut agree, mut hermitian) = (0, 0);
    for trial in 0..500 {
        let v = haar_unitary(&mut r, 6);
        let diag = Diagonalization {
            v: v.clone(),
            phases: phases.to_vec(),
            blocks: BlockStructure::from_sizes(&sizes).unwrap(),
        };
        let k: Vec<i64> = (0..6).map(|_| r.gen_range(-1..=1)).collect();
        let x = if trial % 2 == 0 {
            haar_block_unitary(&mut r, &sizes)
        } else {
            random_block_invertible(&mut r, &sizes)
        };
        let (_, flag) = logarithm_branch(&diag, &k, &x, tau).unwrap();
        let lam: Vec<f64> = phases.iter().zip(&k).map(|(&p, &kj)| -p + 2.0 * PI * kj as f64).collect();
        let a = v
            .matmul(&x)
            .matmul(&OperatorMatrix::real_diagonal(&lam))
            .matmul(&x.inverse().unwrap())
            .matmul(&v.adjoint())
            .scale_real(1.0 / tau);
        let direct = a.hermiticity_defect() <= 1e-8 * a.frobenius_norm().max(1.0);
        agree += usize::from(flag == direct);
        hermitian += usize::from(direct);
    }
    outcome(agree == 500, format!("{agree}/500 agree ({hermitian} Hermitian)"))
}

fn read_csv(path: &Path) -> Vec<(f64, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let (t, f) = l.split_once(',').unwrap();
            (t.parse().unwrap(), f.parse().unwrap())
        })
        .collect()
}

fn chain4_args(out: &Path) -> (SystemArgs, OptimizerArgs) {
    (
        SystemArgs {
            preset: "chain4".into(),
            eta: 0.95,
            t0: Some(PI),
            lambda: 1.0,
            out: out.to_path_buf(),
        },
        OptimizerArgs {
            seed: 42,
            restarts: 8,
            max_iters: 2000,
            cost_tol: 1e-8,
            restart_scale: 0.1,
        },
    )
}

fn end_to_end(out: &Path) -> Outcome {
    let start = Instant::now();
    let (sys, opt) = chain4_args(out);
    let code = match cmd_solve(&sys, &opt) {
        Ok(c) => c,
        Err(f) => return outcome(false, format!("solve failed: {}", f.message)),
    };
    let summary: SynthesisSummary = serde_json::from_str(&fs::read_to_string(out.join("result.json")).unwrap()).unwrap();
    let report = match cmd_fidelity(&sys, &out.join("hamiltonian.json"), 401) {
        Ok(r) => r,
        Err(f) => return outcome(false, format!("fidelity failed: {}", f.message)),
    };
    let flat = read_csv(&out.join("fidelity_stabilized.csv"));
    let flat_dev = flat.iter().map(|p| (1.0 - p.1).abs()).fold(0.0, f64::max);
    let transfer = read_csv(&out.join("fidelity_synthesized.csv")).last().unwrap().1;
    let superposition = summary.verification.superposition_fidelity.unwrap_or(0.0);
    let cost_ok = summary.converged && summary.cost <= 1e-6 * summary.h_norm;
    let pass = code == 0
        && cost_ok
        && transfer >= 1.0 - 1e-6
        && report.synthesized_final >= 1.0 - 1e-6
        && flat_dev <= 1e-6
        && superposition >= 1.0 - 1e-6;
    outcome(
        pass,
        format!(
            "cost {:.2e} (|H| {:.3}), restart {}, transfer {:.12}, flatline deviation {:.1e}, superposition {:.12}, {:.1} s",
            summary.cost,
            summary.h_norm,
            summary.restart_index,
            transfer,
            flat_dev,
            superposition,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn determinism(first: &Path, second: &Path) -> Outcome {
    let (sys, opt) = chain4_args(second);
    if let Err(f) = cmd_solve(&sys, &opt) {
        return outcome(false, format!("solve failed: {}", f.message));
    }
    let a = fs::read(first.join("result.json")).unwrap();
    let b = fs::read(second.join("result.json")).unwrap();
    outcome(a == b, format!("result.json {} bytes, identical {}", a.len(), a == b))
}

fn main() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let results = vec![
        closure_dimension(),
        non_membership(),
        stabilizing_subspace(),
        perfect_transfer(),
        gh_soundness(),
        stabilizer_oracle(),
        counterexample(),
        hermiticity_criterion(),
        end_to_end(first.path()),
        determinism(first.path(), second.path()),
    ];
    for (i, o) in results.iter().enumerate() {
        println!("criterion {}: {} {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, o)| !o.pass).map(|(i, _)| i + 1).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
