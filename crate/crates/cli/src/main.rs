//! `cweight` command-line front end.

mod report;
mod sample;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cweight::hermitian::ComplexMatrix;
use cweight::mmcs::{self, MMCS_WEIGHT_TOL};
use cweight::qubit::{self, BlochVector};
use cweight::states::{self, DensityMatrix, EnsembleKind, DEFAULT_COHERENCE_RANK_TOL};
use cweight::weight::{self, SolverConfig};
use cweight::{Error, C64};
use serde_json::json;

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "cweight", version, about = "Coherence weight of quantum states")]
struct Cli {
    /// Largest certified duality gap accepted from the solver.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Seed for sampling and constructions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (CSV for `sample`, state file for `mmcs construct`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coherence weight, optimal decomposition and certificate of a state file.
    Weight { state: PathBuf },
    /// Closed-form qubit weight with a solver cross-check.
    Qubit(QubitArgs),
    /// Sample an ensemble and write one CSV row per state.
    Sample(SampleArgs),
    /// Monte Carlo census of qubits on and off the line C_w = C_l1.
    VolumeRatio {
        #[arg(long)]
        count: usize,
    },
    /// Mixed maximally coherent states.
    Mmcs {
        #[command(subcommand)]
        command: MmcsCommand,
    },
}

#[derive(Args, Debug)]
struct QubitArgs {
    #[arg(long, conflicts_with = "bloch")]
    rho00: Option<f64>,
    #[arg(long, conflicts_with = "bloch")]
    rho11: Option<f64>,
    #[arg(long, conflicts_with = "bloch", allow_hyphen_values = true)]
    re01: Option<f64>,
    #[arg(long, conflicts_with = "bloch", allow_hyphen_values = true)]
    im01: Option<f64>,
    #[arg(long, num_args = 3, value_names = ["U1", "U2", "U3"], allow_hyphen_values = true)]
    bloch: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub(crate) struct SampleArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value = "ginibre_mixed")]
    pub ensemble: EnsembleKind,
}

#[derive(Subcommand, Debug)]
enum MmcsCommand {
    /// Spectral classification plus solver weight of a state file.
    Check { state: PathBuf },
    /// Build a state from one of the weight-one families and verify it.
    Construct {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        dim: Option<usize>,
        /// Comma-separated block sizes for the reversible family, e.g. "2,2".
        #[arg(long)]
        blocks: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Theorem2,
    Reversible,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn verification(message: impl Into<String>) -> Self {
        Self { code: 4, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SolverStall { .. } => 3,
            Error::InfeasibleWitness(_) | Error::PrimalInfeasible { .. } | Error::DualInfeasible(_) => 4,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    let cfg = SolverConfig { certified_gap_tol: cli.tol, ..SolverConfig::default() };
    cfg.validate()?;
    match &cli.command {
        Command::Weight { state } => cmd_weight(cli, &cfg, state),
        Command::Qubit(args) => cmd_qubit(cli, &cfg, args),
        Command::Sample(args) => sample::cmd_sample(cli.seed, cli.out.as_deref(), &cfg, args),
        Command::VolumeRatio { count } => cmd_volume_ratio(cli, *count),
        Command::Mmcs { command: MmcsCommand::Check { state } } => cmd_mmcs_check(cli, &cfg, state),
        Command::Mmcs { command: MmcsCommand::Construct { family, dim, blocks } } => {
            cmd_mmcs_construct(cli, &cfg, *family, *dim, blocks.as_deref())
        }
    }
}

fn cmd_weight(cli: &Cli, cfg: &SolverConfig, path: &Path) -> CmdResult {
    let rho = states::read_state(path)?;
    let sol = weight::solve(&rho, cfg)?;
    let dec = &sol.decomposition;
    let boundary = weight::boundary_diagnostics(dec).ok();

    let mut r = Report::new();
    r.line("dim", rho.dim());
    r.num("coherence_weight", dec.weight);
    r.line("lambda", fmt_vec(&dec.lambda));
    r.num("dual_bound", sol.witness.bound);
    r.num("gap", dec.gap);
    match &boundary {
        Some(b) => {
            r.num("rho_r_min_eigenvalue", b.rho_r_min_eig);
            r.num("rho_f_min_diagonal", b.rho_f_min_diag);
            r.num("collinearity_residual", b.collinearity_residual);
        }
        None => r.line("boundary", "not applicable (weight is 0 or 1)"),
    }
    let value = json!({
        "dim": rho.dim(),
        "coherence_weight": dec.weight,
        "lambda": dec.lambda,
        "dual_bound": sol.witness.bound,
        "gap": dec.gap,
        "boundary": boundary,
    });
    r.emit(cli.json, &value);
    Ok(())
}

fn qubit_from_args(args: &QubitArgs) -> Result<DensityMatrix, Failure> {
    if let Some(b) = &args.bloch {
        let u = BlochVector::new(b[0], b[1], b[2])?;
        return Ok(qubit::bloch_to_state(&u)?);
    }
    let (rho00, rho11) = match (args.rho00, args.rho11) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, 1.0 - a),
        (None, Some(b)) => (1.0 - b, b),
        (None, None) => return Err(Failure::input("give --bloch or at least one of --rho00/--rho11")),
    };
    let off = C64::new(args.re01.unwrap_or(0.0), args.im01.unwrap_or(0.0));
    let m = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => C64::new(rho00, 0.0),
        (1, 1) => C64::new(rho11, 0.0),
        (0, 1) => off,
        _ => off.conj(),
    });
    Ok(DensityMatrix::new(m)?)
}

fn cmd_qubit(cli: &Cli, cfg: &SolverConfig, args: &QubitArgs) -> CmdResult {
    let rho = qubit_from_args(args)?;
    let q = qubit::qubit_weight_detail(&rho)?;
    let cl1 = rho.l1_coherence();
    let mixedness = 2.0 * (1.0 - rho.purity());
    let solver = weight::coherence_weight(&rho, cfg)?;
    let delta = (solver.weight - q.weight).abs();
    let branch = match q.branch {
        qubit::QubitBranch::Balanced => 1,
        qubit::QubitBranch::Unbalanced => 2,
    };

    let mut r = Report::new();
    r.num("rho00", q.rho00);
    r.num("rho11", q.rho11);
    r.num("abs_rho01", q.abs_rho01);
    r.num("det", q.det);
    r.line("branch", branch);
    r.num("coherence_weight", q.weight);
    r.num("l1_coherence", cl1);
    r.num("mixedness", mixedness);
    r.num("solver_weight", solver.weight);
    r.num("solver_delta", delta);
    let value = json!({
        "rho00": q.rho00,
        "rho11": q.rho11,
        "abs_rho01": q.abs_rho01,
        "det": q.det,
        "branch": branch,
        "coherence_weight": q.weight,
        "l1_coherence": cl1,
        "mixedness": mixedness,
        "solver_weight": solver.weight,
        "solver_delta": delta,
    });
    r.emit(cli.json, &value);
    if delta > 1e-6 {
        return Err(Failure::verification(format!("solver disagrees with the closed form by {delta:e}")));
    }
    Ok(())
}

fn cmd_volume_ratio(cli: &Cli, count: usize) -> CmdResult {
    let c = qubit::volume_ratio(count, cli.seed)?;
    let analytic = qubit::analytic_cone_ratio();
    let mut r = Report::new();
    r.line("count", count);
    r.line("strict", c.strict);
    r.line("equal", c.equal);
    r.num("ratio", c.ratio);
    r.num("analytic_ratio", analytic);
    let value = json!({
        "count": count,
        "seed": cli.seed,
        "strict": c.strict,
        "equal": c.equal,
        "ratio": c.ratio,
        "analytic_ratio": analytic,
    });
    r.emit(cli.json, &value);
    Ok(())
}

fn mmcs_report(rho: &DensityMatrix, cfg: &SolverConfig) -> Result<(Report, serde_json::Value, f64), Failure> {
    let verdict = mmcs::classify(rho, cfg.rank_tol, DEFAULT_COHERENCE_RANK_TOL)?;
    let w = weight::coherence_weight(rho, cfg)?;
    let is_mmcs = w.weight >= 1.0 - MMCS_WEIGHT_TOL;
    let mut r = Report::new();
    r.line("dim", rho.dim());
    r.line("rank", verdict.rank);
    r.line("rank_deficient", verdict.is_rank_deficient);
    r.line("max_kernel_coherence_rank", verdict.max_kernel_coherence_rank);
    r.line("theorem2_applies", verdict.theorem2_applies);
    r.line("qutrit_classification", json!(verdict.qutrit_classification).as_str().unwrap_or_default());
    r.num("participation_ratio", verdict.participation_ratio);
    r.num("min_eigenvalue", verdict.min_eigenvalue);
    r.num("coherence_weight", w.weight);
    r.num("gap", w.gap);
    r.line("mmcs", is_mmcs);
    let value = json!({ "verdict": verdict, "coherence_weight": w.weight, "gap": w.gap, "mmcs": is_mmcs });
    Ok((r, value, w.weight))
}

fn cmd_mmcs_check(cli: &Cli, cfg: &SolverConfig, path: &Path) -> CmdResult {
    let rho = states::read_state(path)?;
    let (r, value, _) = mmcs_report(&rho, cfg)?;
    r.emit(cli.json, &value);
    Ok(())
}

fn parse_blocks(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| Failure::input(format!("bad block size {p:?}"))))
        .collect()
}

fn cmd_mmcs_construct(
    cli: &Cli,
    cfg: &SolverConfig,
    family: Family,
    dim: Option<usize>,
    blocks: Option<&str>,
) -> CmdResult {
    let spec = match family {
        Family::Theorem2 => {
            let dim = dim.ok_or_else(|| Failure::input("--dim is required for the theorem2 family"))?;
            mmcs::random_theorem2_spec(dim, cli.seed)?
        }
        Family::Reversible => {
            let sizes = match (blocks, dim) {
                (Some(b), _) => parse_blocks(b)?,
                (None, Some(d)) if d >= 2 => {
                    // Pairs, with one triple absorbing an odd dimension.
                    let mut v = vec![2; d / 2];
                    if d % 2 == 1 {
                        *v.last_mut().unwrap() = 3;
                    }
                    v
                }
                _ => return Err(Failure::input("give --blocks or --dim >= 2 for the reversible family")),
            };
            if let Some(d) = dim {
                let total: usize = sizes.iter().sum();
                if total != d {
                    return Err(Failure::input(format!("blocks sum to {total}, not --dim {d}")));
                }
            }
            mmcs::random_reversible_spec(&sizes, cli.seed)?
        }
    };
    let rho = mmcs::construct(&spec, cli.seed)?;
    let (r, value, w) = mmcs_report(&rho, cfg)?;
    if w < 1.0 - MMCS_WEIGHT_TOL {
        r.emit(cli.json, &value);
        return Err(Failure::verification(format!("constructed state has weight {w}, below 1")));
    }
    match &cli.out {
        Some(path) => write_atomic(path, states::state_to_json(&rho).as_bytes())?,
        None if !cli.json => println!("{}", states::state_to_json(&rho)),
        None => {}
    }
    if cli.json && cli.out.is_none() {
        let mut v = value;
        v["state"] = serde_json::from_str(&states::state_to_json(&rho)).expect("state JSON is valid");
        println!("{}", serde_json::to_string_pretty(&v).expect("report serializes"));
    } else {
        r.emit(cli.json, &value);
    }
    Ok(())
}

/// Writes `bytes` to `path`, removing the file if anything fails.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let result = fs::File::create(path).and_then(|mut f| {
        f.write_all(bytes)?;
        f.sync_all()
    });
    result.map_err(|e| {
        let _ = fs::remove_file(path);
        Failure::input(format!("cannot write {}: {e}", path.display()))
    })
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.9e}")).collect();
    format!("[{}]", parts.join(", "))
}
