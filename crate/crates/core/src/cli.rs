//! Command-line front end.
//!
//! Exit codes: 0 success, 1 internal failure, 2 bad preset or invalid input
//! file, 3 synthesis did not converge (artifacts are still written), 4 the
//! requested stabilizer subspace is empty.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::dynamics::{write_csv, Schedule};
use crate::equivalence::{build_frame, CandidateJson, Problem};
use crate::error::Error;
use crate::lie::{distance_to_span, eigenvector_stabilizer_subspace, AlgebraBasis};
use crate::operator::{eig_hermitian, OperatorMatrix, StateVector};
use crate::spin::{
    all_down, dipolar_hamiltonian, first_excited, global_control, pauli, xy_christandl, Axis, ChainSpec,
};
use crate::synthesis::{control_algebra, synthesize, OptimizerConfig};
use crate::tolerance;

pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_UNCONVERGED: u8 = 3;
pub const EXIT_INFEASIBLE: u8 = 4;

/// Stored and recomputed costs must agree this closely.
const ROUND_TRIP_TOL: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(name = "eqham", version, about = "Equivalent Hamiltonian synthesis for controlled quantum systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimension of the control Lie algebra and the distance of H_d from it.
    Closure(SystemArgs),
    /// Subspace of the control algebra that keeps the stabilized vector an eigenvector.
    Subspace(SystemArgs),
    /// Search the equivalence set for a Hamiltonian in the control algebra.
    Solve {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Fidelity curves for a synthesized Hamiltonian, H_d and H_int.
    Fidelity {
        #[command(flatten)]
        system: SystemArgs,
        /// Candidate written by `solve` (defaults to <out>/hamiltonian.json).
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
        /// Samples per curve.
        #[arg(long, default_value_t = 401)]
        samples: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    /// Preset name (chain4, chain5, chain6, qubit1) or path to a system JSON file.
    #[arg(long, default_value = "chain4")]
    pub preset: String,
    /// Fraction of the total time spent in natural evolution.
    #[arg(long, default_value_t = 0.95)]
    pub eta: f64,
    /// Total time; defaults to the transfer time π/λ for chain presets and π otherwise.
    #[arg(long)]
    pub t0: Option<f64>,
    /// XY coupling scale of the chain presets.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub cost_tol: f64,
    /// Spread of the random starting points used after the first restart.
    #[arg(long, default_value_t = 0.1)]
    pub restart_scale: f64,
}

impl OptimizerArgs {
    pub fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            seed: self.seed,
            restarts: self.restarts,
            max_iters: self.max_iters,
            cost_tol: self.cost_tol,
            restart_scale: self.restart_scale,
            ..OptimizerConfig::default()
        }
    }
}

/// Custom problem file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemFile {
    #[serde(rename = "H_int")]
    pub h_int: OperatorMatrix,
    pub controls: Vec<OperatorMatrix>,
    #[serde(rename = "H_d")]
    pub h_d: OperatorMatrix,
    pub rho_i: OperatorMatrix,
    pub stabilized_vector: Option<StateVector>,
}

/// A fully specified control problem.
#[derive(Clone, Debug)]
pub struct System {
    pub name: String,
    pub h_int: OperatorMatrix,
    pub controls: Vec<OperatorMatrix>,
    pub h_d: OperatorMatrix,
    pub rho_i: OperatorMatrix,
    pub stabilized_vector: Option<StateVector>,
    pub default_t0: f64,
}

impl System {
    pub fn preset(name: &str, lambda: f64) -> crate::Result<Self> {
        if name == "qubit1" {
            let x = pauli(Axis::X);
            return Ok(Self {
                name: name.into(),
                h_int: x.clone(),
                controls: vec![x.clone()],
                h_d: x,
                rho_i: StateVector::basis(2, 0).projector(),
                stabilized_vector: None,
                default_t0: std::f64::consts::PI,
            });
        }
        let base = ChainSpec::preset(name)?;
        let spec = ChainSpec::new(base.n_qubits, base.coupling_scale, lambda)?;
        let n = spec.n_qubits;
        Ok(Self {
            name: name.into(),
            h_int: dipolar_hamiltonian(&spec)?,
            controls: vec![global_control(Axis::X, n)?, global_control(Axis::Y, n)?],
            h_d: xy_christandl(&spec)?,
            rho_i: first_excited(n)?.projector(),
            stabilized_vector: Some(all_down(n)?),
            default_t0: spec.transfer_time(),
        })
    }

    pub fn from_file(path: &Path) -> crate::Result<Self> {
        let file: SystemFile = serde_json::from_str(&fs::read_to_string(path)?)?;
        let h_int = file.h_int.into_hermitian()?;
        let h_d = file.h_d.into_hermitian()?;
        let controls = file
            .controls
            .into_iter()
            .map(|c| c.into_hermitian())
            .collect::<crate::Result<Vec<_>>>()?;
        if controls.is_empty() {
            return Err(Error::Empty("control list"));
        }
        Ok(Self {
            name: path.display().to_string(),
            h_int,
            controls,
            h_d,
            rho_i: file.rho_i.into_hermitian()?,
            stabilized_vector: file.stabilized_vector,
            default_t0: std::f64::consts::PI,
        })
    }

    pub fn problem(&self, eta: f64, t0: Option<f64>) -> crate::Result<Problem> {
        Problem::new(
            self.rho_i.clone(),
            self.h_d.clone(),
            self.h_int.clone(),
            t0.unwrap_or(self.default_t0),
            eta,
        )
    }

    /// The pure initial state, if `ρ_i` has rank one.
    pub fn initial_state(&self) -> crate::Result<Option<StateVector>> {
        let eig = eig_hermitian(&self.rho_i)?;
        if (eig.values[0] - 1.0).abs() > tolerance::DENSITY {
            return Ok(None);
        }
        Ok(Some(StateVector::new(eig.vectors.column(0))?))
    }
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Infeasible(_) => EXIT_INFEASIBLE,
            Error::Validation(_) | Error::DimensionMismatch { .. } | Error::Empty(_) | Error::Json(_) => EXIT_INPUT,
            Error::Io(_) | Error::NoConvergence { .. } => EXIT_INTERNAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub algebra_dim: usize,
    pub ambient_dim: usize,
    pub hxy_distance: f64,
    pub hxy_relative_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceReport {
    pub algebra_dim: usize,
    pub subspace_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub synthesized_final: f64,
    pub hxy_final: f64,
    pub hint_final: f64,
    pub stabilized_min: Option<f64>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Runs one command; returns the exit code on completion.
pub fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Closure(sys) => {
            let report = cmd_closure(sys)?;
            println!("algebra_dim {}", report.algebra_dim);
            println!("ambient_dim {}", report.ambient_dim);
            println!("hxy_distance {:e} (relative {:e})", report.hxy_distance, report.hxy_relative_distance);
            Ok(0)
        }
        Command::Subspace(sys) => {
            let report = cmd_subspace(sys)?;
            println!("algebra_dim {}", report.algebra_dim);
            println!("subspace_dim {}", report.subspace_dim);
            Ok(0)
        }
        Command::Solve { system, optimizer } => cmd_solve(system, optimizer),
        Command::Fidelity {
            system,
            hamiltonian,
            samples,
        } => {
            let path = hamiltonian.clone().unwrap_or_else(|| system.out.join("hamiltonian.json"));
            let report = cmd_fidelity(system, &path, *samples)?;
            println!("synthesized F(t0) {:.12}", report.synthesized_final);
            println!("H_d F(t0) {:.12}", report.hxy_final);
            println!("H_int F(t0) {:.12}", report.hint_final);
            if let Some(m) = report.stabilized_min {
                println!("stabilized vector min F {:.12}", m);
            }
            Ok(0)
        }
    }
}

fn load_system(args: &SystemArgs) -> Result<System, Failure> {
    let path = Path::new(&args.preset);
    if path.is_file() {
        return System::from_file(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())));
    }
    System::preset(&args.preset, args.lambda).map_err(|e| Failure::input(format!("preset {:?}: {e}", args.preset)))
}

fn load_problem(args: &SystemArgs) -> Result<(System, Problem), Failure> {
    let system = load_system(args)?;
    let problem = system.problem(args.eta, args.t0).map_err(Failure::input)?;
    Ok((system, problem))
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(Error::from)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    fs::write(&path, text).map_err(Error::from)?;
    Ok(path)
}

pub fn cmd_closure(args: &SystemArgs) -> Result<ClosureReport, Failure> {
    let (system, problem) = load_problem(args)?;
    let algebra = control_algebra(&problem, &system.controls)?;
    let distance = distance_to_span(&system.h_d, &algebra)?;
    let norm = system.h_d.frobenius_norm();
    let report = ClosureReport {
        algebra_dim: algebra.len(),
        ambient_dim: algebra.ambient_dimension(),
        hxy_distance: distance,
        hxy_relative_distance: if norm > 0.0 { distance / norm } else { 0.0 },
    };
    write_json(&args.out, "closure.json", &report)?;
    Ok(report)
}

fn stabilizer(system: &System, algebra: &AlgebraBasis) -> Result<AlgebraBasis, Failure> {
    let v = system
        .stabilized_vector
        .as_ref()
        .ok_or_else(|| Failure::input("the system has no stabilized vector"))?;
    Ok(eigenvector_stabilizer_subspace(algebra, v)?)
}

pub fn cmd_subspace(args: &SystemArgs) -> Result<SubspaceReport, Failure> {
    let (system, problem) = load_problem(args)?;
    let algebra = control_algebra(&problem, &system.controls)?;
    let subspace = stabilizer(&system, &algebra)?;
    write_json(&args.out, "subspace.json", &subspace)?;
    let report = SubspaceReport {
        algebra_dim: algebra.len(),
        subspace_dim: subspace.len(),
    };
    write_json(&args.out, "subspace_report.json", &report)?;
    if subspace.is_empty() {
        return Err(Error::Infeasible("the stabilizer subspace is empty".into()).into());
    }
    Ok(report)
}

/// Writes `frame.json`, `hamiltonian.json` and `result.json`.
pub fn cmd_solve(args: &SystemArgs, opt: &OptimizerArgs) -> Result<u8, Failure> {
    let (system, problem) = load_problem(args)?;
    let cfg = opt.config();
    cfg.validate().map_err(Failure::input)?;
    let frame = build_frame(&problem)?;
    let result = synthesize(&problem, &system.controls, system.stabilized_vector.as_ref(), &cfg)?;

    write_json(&args.out, "frame.json", &frame.export())?;
    let h_path = write_json(&args.out, "hamiltonian.json", &result.candidate.to_json(result.cost))?;
    write_json(&args.out, "result.json", &result.summary())?;

    let stored = read_candidate(&h_path)?;
    let recomputed = candidate_cost(&system, &problem, &stored.h)?;
    if (recomputed - stored.cost).abs() > ROUND_TRIP_TOL {
        return Err(Failure {
            code: EXIT_INTERNAL,
            message: format!("stored cost {:e} does not match recomputed {:e}", stored.cost, recomputed),
        });
    }

    let v = &result.verification;
    println!(
        "cost {:e} phase_error {:e} iterations {} restart {}",
        result.cost, result.phase_error, result.iterations, result.restart_index
    );
    println!("algebra_dim {} subspace_dim {}", result.algebra_dim, result.subspace_dim);
    if let Some(f) = v.transfer_fidelity {
        println!("transfer fidelity {:.12}", f);
    }
    if let Some(f) = v.superposition_fidelity {
        println!("superposition fidelity {:.12}", f);
    }
    if result.converged {
        Ok(0)
    } else {
        eprintln!("synthesis did not converge to cost {:e}", cfg.cost_tol);
        Ok(EXIT_UNCONVERGED)
    }
}

fn read_candidate(path: &Path) -> Result<CandidateJson, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let c: CandidateJson = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(c)
}

/// `‖H - P(H)‖_F` against the subspace `synthesize` optimizes over.
fn candidate_cost(system: &System, problem: &Problem, h: &OperatorMatrix) -> Result<f64, Failure> {
    let algebra = control_algebra(problem, &system.controls)?;
    let subspace = match &system.stabilized_vector {
        Some(_) => stabilizer(system, &algebra)?,
        None => algebra,
    };
    let h = h.clone().into_hermitian().map_err(Failure::input)?;
    distance_to_span(&h, &subspace).map_err(Failure::input)
}

/// Writes `fidelity_synthesized.csv`, `fidelity_hxy.csv`, `fidelity_hint.csv`
/// and, with a stabilized vector, `fidelity_stabilized.csv`.
pub fn cmd_fidelity(args: &SystemArgs, hamiltonian: &Path, samples: usize) -> Result<FidelityReport, Failure> {
    let (system, problem) = load_problem(args)?;
    let stored = read_candidate(hamiltonian)?;
    if stored.h.dim() != problem.dim() {
        return Err(Failure::input(format!(
            "{}: dimension {} does not match the system ({})",
            hamiltonian.display(),
            stored.h.dim(),
            problem.dim()
        )));
    }
    let recomputed = candidate_cost(&system, &problem, &stored.h)?;
    if (recomputed - stored.cost).abs() > ROUND_TRIP_TOL {
        return Err(Failure::input(format!(
            "{}: stored cost {:e} does not match recomputed {:e}",
            hamiltonian.display(),
            stored.cost,
            recomputed
        )));
    }
    let psi = system
        .initial_state()?
        .ok_or_else(|| Failure::input("fidelity curves need a pure initial state"))?;
    let frame = build_frame(&problem)?;
    let target = psi.apply(&frame.u_d);
    let h_calc = stored.h.into_hermitian().map_err(Failure::input)?;

    let controlled = Schedule::controlled(&problem, &h_calc)?;
    let desired = Schedule::new(vec![(problem.h_d.clone(), problem.t0)])?;
    let natural = Schedule::new(vec![(problem.h_int.clone(), problem.t0)])?;

    let mut finals = Vec::new();
    for (name, schedule) in [
        ("fidelity_synthesized.csv", &controlled),
        ("fidelity_hxy.csv", &desired),
        ("fidelity_hint.csv", &natural),
    ] {
        let curve = schedule.fidelity_curve(&psi, &target, samples)?;
        write_curve(&args.out, name, &curve)?;
        finals.push(curve.last().map(|p| p.1).unwrap_or(0.0));
    }
    let stabilized_min = match &system.stabilized_vector {
        Some(v) => {
            let v = v.normalized()?;
            let curve = controlled.fidelity_curve(&v, &v, samples)?;
            write_curve(&args.out, "fidelity_stabilized.csv", &curve)?;
            Some(curve.iter().map(|p| p.1).fold(f64::INFINITY, f64::min))
        }
        None => None,
    };
    let report = FidelityReport {
        synthesized_final: finals[0],
        hxy_final: finals[1],
        hint_final: finals[2],
        stabilized_min,
    };
    write_json(&args.out, "fidelity_report.json", &report)?;
    Ok(report)
}

fn write_curve(dir: &Path, name: &str, curve: &[(f64, f64)]) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(Error::from)?;
    let file = fs::File::create(dir.join(name)).map_err(Error::from)?;
    write_csv(std::io::BufWriter::new(file), curve)?;
    Ok(())
}
