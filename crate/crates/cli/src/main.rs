use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use edr_cli::model::{load_model, observable_arg, parse_angle, state_arg};
use edr_cli::report::{relation_table, report_csv, sweep_csv, violations, ReportDocument};
use edr_cli::CliError;
use edr_core::relations::{evaluate_all, RelationId, RelationInputs, Scenario, DEFAULT_TOLERANCE};
use edr_core::spinlab::{sweep, SweepConfig};
use edr_core::suite::{run_all, SuiteConfig};

const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "edr", version, about = "Evaluate error–disturbance and joint-measurement relations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Errors, standard deviations and commutator bounds of a model.
    Compute(ComputeArgs),
    /// Evaluate relations on a model; exit 1 if a valid relation fails.
    Verify(VerifyArgs),
    /// Sweep the spin model over θ and write CSV.
    Sweep(SweepArgs),
    /// Print the spin model's θ grid and circle residuals.
    SpinDemo(SpinDemoArgs),
    /// Run the acceptance criteria.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct ComputeArgs {
    model: PathBuf,
    /// Replace A (I, X, Y, Z or a JSON matrix).
    #[arg(long)]
    a: Option<String>,
    /// Replace B (I, X, Y, Z or a JSON matrix).
    #[arg(long)]
    b: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the fully explicit model file here.
    #[arg(long)]
    emit_model: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    model: PathBuf,
    /// Comma-separated relation ids, or `all`.
    #[arg(long, default_value = "all")]
    relations: String,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE, allow_hyphen_values = true)]
    tolerance: f64,
    /// CSV report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    theta_min: String,
    #[arg(long, default_value = "pi/4", allow_hyphen_values = true)]
    theta_max: String,
    #[arg(long, default_value_t = 101)]
    steps: usize,
    /// State preset or JSON matrix.
    #[arg(long, default_value = "maximally_mixed")]
    rho: String,
    /// Comma-separated relation ids, `all`, or empty for the base columns only.
    #[arg(long, default_value = "")]
    relations: String,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE, allow_hyphen_values = true)]
    tolerance: f64,
    /// CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpinDemoArgs {
    #[arg(long, default_value_t = 9)]
    steps: usize,
    #[arg(long, default_value = "maximally_mixed")]
    rho: String,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Random draws for the universality, bridge and pure-state checks.
    #[arg(long)]
    draws: Option<u64>,
    /// Write the outcomes as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_relations(s: &str) -> Result<Vec<RelationId>, CliError> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("all") {
        return Ok(RelationId::ALL.to_vec());
    }
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(CliError::from))
        .collect()
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn angle(flag: &str, s: &str) -> Result<f64, CliError> {
    parse_angle(s).ok_or_else(|| CliError::Usage(format!("--{flag}: cannot read angle `{s}`")))
}

fn compute(args: ComputeArgs) -> Result<u8, CliError> {
    let mut m = load_model(&args.model)?;
    if let Some(a) = &args.a {
        m.a = observable_arg("a", a)?;
    }
    if let Some(b) = &args.b {
        m.b = observable_arg("b", b)?;
    }
    let inputs = RelationInputs::compute(Scenario::Process(&m.process), &m.a, &m.b, &m.rho)?;
    let doc = ReportDocument::new(&inputs, Vec::new()).to_json();
    match &args.out {
        Some(p) => write_file(p, &doc)?,
        None => println!("{doc}"),
    }
    if let Some(p) = &args.emit_model {
        write_file(p, &m.to_json())?;
    }
    Ok(0)
}

fn verify(args: VerifyArgs) -> Result<u8, CliError> {
    let ids = parse_relations(&args.relations)?;
    let m = load_model(&args.model)?;
    let inputs = RelationInputs::compute(Scenario::Process(&m.process), &m.a, &m.b, &m.rho)?;
    let evals = evaluate_all(&ids, &inputs, args.tolerance)?;
    print!("{}", relation_table(&evals));
    if let Some(p) = &args.out {
        write_file(p, &report_csv(&inputs, &evals))?;
    }
    let bad = violations(&evals);
    if let Some(p) = &args.json {
        write_file(p, &ReportDocument::new(&inputs, evals).to_json())?;
    }
    if bad.is_empty() {
        Ok(0)
    } else {
        let names: Vec<_> = bad.iter().map(|id| id.name()).collect();
        eprintln!("violated: {}", names.join(", "));
        Ok(EXIT_VIOLATION)
    }
}

fn run_sweep(args: SweepArgs) -> Result<u8, CliError> {
    let ids = parse_relations(&args.relations)?;
    let cfg = SweepConfig {
        theta_min: angle("theta-min", &args.theta_min)?,
        theta_max: angle("theta-max", &args.theta_max)?,
        steps: args.steps,
        state: state_arg("rho", &args.rho, Some(2))?,
        relations: ids.clone(),
        tolerance: args.tolerance,
    };
    let result = sweep(&cfg)?;
    let csv = sweep_csv(&result, &ids);
    match &args.out {
        Some(p) => write_file(p, &csv)?,
        None => print!("{csv}"),
    }
    let failed = result.points.iter().any(|p| !violations(&p.evaluations).is_empty());
    Ok(if failed { EXIT_VIOLATION } else { 0 })
}

fn spin_demo(args: SpinDemoArgs) -> Result<u8, CliError> {
    let cfg = SweepConfig {
        steps: args.steps,
        state: state_arg("rho", &args.rho, Some(2))?,
        relations: Vec::new(),
        ..SweepConfig::default()
    };
    let result = sweep(&cfg)?;
    println!("{:>10} {:>12} {:>12} {:>14}", "theta", "eps^2", "eta^2", "circle resid");
    for p in &result.points {
        println!("{:>10.6} {:>12.9} {:>12.9} {:>14.3e}", p.theta, p.eps_sq, p.eta_sq, p.circle_residual);
    }
    println!("max |circle residual| = {:.3e}", result.max_abs_circle_residual);
    Ok(0)
}

fn suite(args: SuiteArgs) -> Result<u8, CliError> {
    let mut cfg = SuiteConfig::default();
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(d) = args.draws {
        if d == 0 {
            return Err(CliError::Usage("--draws must be at least 1".into()));
        }
        cfg.universality_draws = d;
        cfg.bridge_draws = d;
        cfg.pure_draws = d;
    }
    let outcomes = run_all(&cfg)?;
    for o in &outcomes {
        println!("{o}");
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    if let Some(p) = &args.out {
        let json = serde_json::to_string_pretty(&outcomes).expect("outcomes serialize");
        write_file(p, &json)?;
    }
    Ok(if passed == outcomes.len() { 0 } else { EXIT_VIOLATION })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Verify(a) => verify(a),
        Command::Sweep(a) => run_sweep(a),
        Command::SpinDemo(a) => spin_demo(a),
        Command::Suite(a) => suite(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
