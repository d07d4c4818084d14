//! Piecewise-constant evolution and fidelity curves.
//!
//! Each segment is propagated exactly through the eigendecomposition of its
//! Hamiltonian, so partial segments cost one exponential of the cached
//! spectrum.

use std::io::Write;

use crate::equivalence::Problem;
use crate::error::{ensure_dim, Error, Result};
use crate::operator::{eig_hermitian, exp_from_eigh, Eigh, OperatorMatrix, StateVector};

/// Ordered `(H, duration)` segments.
#[derive(Clone, Debug)]
pub struct Schedule {
    segments: Vec<Segment>,
}

#[derive(Clone, Debug)]
struct Segment {
    h: OperatorMatrix,
    duration: f64,
    eig: Eigh,
}

impl Schedule {
    pub fn new(segments: Vec<(OperatorMatrix, f64)>) -> Result<Self> {
        let dim = segments.first().ok_or(Error::Empty("schedule"))?.0.dim();
        let segments = segments
            .into_iter()
            .map(|(h, duration)| {
                ensure_dim(dim, h.dim())?;
                if !(duration >= 0.0 && duration.is_finite()) {
                    return Err(Error::validation(format!("segment duration {duration} must be finite and non-negative")));
                }
                let eig = eig_hermitian(&h)?;
                Ok(Segment { h, duration, eig })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { segments })
    }

    /// Natural evolution for `η t0 / 2`, the controlled Hamiltonian for
    /// `(1 - η) t0`, then natural evolution again. With `η = 0` only the
    /// controlled segment remains.
    pub fn controlled(problem: &Problem, h_calc: &OperatorMatrix) -> Result<Self> {
        problem.validate()?;
        ensure_dim(problem.dim(), h_calc.dim())?;
        if problem.eta == 0.0 {
            return Self::new(vec![(h_calc.clone(), problem.t0)]);
        }
        let free = problem.free_time();
        Self::new(vec![
            (problem.h_int.clone(), free),
            (h_calc.clone(), problem.control_time()),
            (problem.h_int.clone(), free),
        ])
    }

    pub fn dim(&self) -> usize {
        self.segments[0].h.dim()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = (&OperatorMatrix, f64)> {
        self.segments.iter().map(|s| (&s.h, s.duration))
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Propagator from 0 to `t`.
    pub fn propagator(&self, t: f64) -> Result<OperatorMatrix> {
        let mut u = OperatorMatrix::identity(self.dim());
        for (seg, dt) in self.pieces(t)? {
            u = exp_from_eigh(&seg.eig, dt).matmul(&u);
        }
        Ok(u)
    }

    /// State at time `t`.
    pub fn evolve(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        ensure_dim(self.dim(), psi0.dim())?;
        if (psi0.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::validation(format!("initial state has norm {} (expected 1)", psi0.norm())));
        }
        let mut psi = psi0.clone();
        for (seg, dt) in self.pieces(t)? {
            psi = psi.apply(&exp_from_eigh(&seg.eig, dt));
        }
        Ok(psi)
    }

    /// `|⟨target|ψ(t)⟩|²` at `n_points` uniform samples of `[0, total]`.
    pub fn fidelity_curve(&self, psi0: &StateVector, target: &StateVector, n_points: usize) -> Result<Vec<(f64, f64)>> {
        if n_points < 2 {
            return Err(Error::validation("a fidelity curve needs at least 2 samples"));
        }
        ensure_dim(self.dim(), target.dim())?;
        let target = target.normalized()?;
        let total = self.total_duration();
        (0..n_points)
            .map(|i| {
                let t = if i + 1 == n_points {
                    total
                } else {
                    total * i as f64 / (n_points - 1) as f64
                };
                let f = target.inner(&self.evolve(psi0, t)?).norm_sqr();
                Ok((t, f.clamp(0.0, 1.0)))
            })
            .collect()
    }

    /// Segments (with elapsed durations) covering `[0, t]`.
    fn pieces(&self, t: f64) -> Result<Vec<(&Segment, f64)>> {
        let total = self.total_duration();
        if !(t >= 0.0 && t <= total + 1e-12 * total.max(1.0)) {
            return Err(Error::validation(format!("time {t} outside [0, {total}]")));
        }
        let mut left = t.min(total);
        let mut out = Vec::new();
        for seg in &self.segments {
            if left <= 0.0 {
                break;
            }
            let dt = left.min(seg.duration);
            out.push((seg, dt));
            left -= dt;
        }
        Ok(out)
    }
}

/// Writes `t,fidelity` rows with 15 significant digits.
pub fn write_csv(mut out: impl Write, curve: &[(f64, f64)]) -> Result<()> {
    writeln!(out, "t,fidelity")?;
    for (t, f) in curve {
        writeln!(out, "{},{}", sig15(*t), sig15(*f))?;
    }
    Ok(())
}

fn sig15(x: f64) -> String {
    format!("{x:.14e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{first_excited, last_excited, xy_christandl, ChainSpec};
    use crate::operator::expm_hermitian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> OperatorMatrix {
        let a = OperatorMatrix::from_fn(n, |_, _| crate::C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&a + &a.adjoint()).scale_real(0.5).into_hermitian().unwrap()
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
        StateVector::new((0..n).map(|_| crate::C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .unwrap()
            .normalized()
            .unwrap()
    }

    fn distance(a: &StateVector, b: &StateVector) -> f64 {
        a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn time_zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = Schedule::new(vec![(random_hermitian(&mut rng, 4), 2.0)]).unwrap();
        let psi = random_state(&mut rng, 4);
        assert!(distance(&s.evolve(&psi, 0.0).unwrap(), &psi) < 1e-15);
    }

    #[test]
    fn norm_is_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = Schedule::new(vec![(random_hermitian(&mut rng, 8), 3.0)]).unwrap();
        let psi = random_state(&mut rng, 8);
        for i in 0..50 {
            let t = 3.0 * i as f64 / 49.0;
            assert!((s.evolve(&psi, t).unwrap().norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn split_segment_matches_single_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(&mut rng, 6);
        let psi = random_state(&mut rng, 6);
        let direct = psi.apply(&expm_hermitian(&h, 2.5).unwrap());
        for cut in [0.1, 1.0, 2.4] {
            let s = Schedule::new(vec![(h.clone(), cut), (h.clone(), 2.5 - cut)]).unwrap();
            assert!(distance(&s.evolve(&psi, 2.5).unwrap(), &direct) < 1e-10);
        }
    }

    #[test]
    fn evolution_matches_product_of_segments() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (a, b) = (random_hermitian(&mut rng, 4), random_hermitian(&mut rng, 4));
        let psi = random_state(&mut rng, 4);
        let s = Schedule::new(vec![(a.clone(), 0.3), (b.clone(), 0.9), (a.clone(), 0.3)]).unwrap();
        let u = expm_hermitian(&a, 0.3)
            .unwrap()
            .matmul(&expm_hermitian(&b, 0.9).unwrap())
            .matmul(&expm_hermitian(&a, 0.3).unwrap());
        assert!(distance(&s.evolve(&psi, 1.5).unwrap(), &psi.apply(&u)) < 1e-9);
        assert!((&s.propagator(1.5).unwrap() - &u).frobenius_norm() < 1e-9);
    }

    #[test]
    fn out_of_range_time_is_rejected() {
        let s = Schedule::new(vec![(OperatorMatrix::identity(2).into_hermitian().unwrap(), 1.0)]).unwrap();
        let psi = StateVector::basis(2, 0);
        assert!(s.evolve(&psi, -0.1).is_err());
        assert!(s.evolve(&psi, 1.1).is_err());
        assert!(s.fidelity_curve(&psi, &psi, 1).is_err());
        assert!(Schedule::new(vec![]).is_err());
    }

    #[test]
    fn christandl_chain_transfers_end_to_end() {
        for n in 2..=6 {
            let spec = ChainSpec::new(n, 1.0, 1.0).unwrap();
            let s = Schedule::new(vec![(xy_christandl(&spec).unwrap(), spec.transfer_time())]).unwrap();
            let curve = s.fidelity_curve(&first_excited(n).unwrap(), &last_excited(n).unwrap(), 41).unwrap();
            assert!(curve[0].1.abs() < 1e-15);
            assert!((curve[40].1 - 1.0).abs() < 1e-10, "n = {n}: {}", curve[40].1);
            assert!(curve.iter().all(|&(_, f)| (0.0..=1.0).contains(&f)));
            assert_eq!(curve[40].0, spec.transfer_time());
        }
    }

    #[test]
    fn csv_has_header_and_fifteen_digits() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[(0.0, 1.0), (std::f64::consts::PI, 1.0 / 3.0)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,fidelity");
        assert_eq!(lines[2], "3.14159265358979e0,3.33333333333333e-1");
        let parsed: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
        assert!((parsed - std::f64::consts::PI).abs() < 1e-14);
    }
}
