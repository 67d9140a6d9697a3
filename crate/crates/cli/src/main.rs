use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use adi_core::harness::{emit_csv, run_convergence, run_stability_suite, Experiment, ExperimentConfig};
use adi_core::report::CsvTable;
use clap::{Parser, Subcommand};

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

/// Convergence studies and stability checks for ADI-type integrators
#[derive(Parser, Debug)]
#[command(name = "adi-harness", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat `key = value` manifest; flags given on the command line win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Comma-separated methods (amfw1, amfw1-mod, douglas) or `all`
    #[arg(long, global = true)]
    method: Option<String>,

    /// Spatial dimension m (2, 3 or 4)
    #[arg(long, global = true)]
    dim: Option<String>,

    /// 0: homogeneous boundary data, 1: time-dependent boundary data
    #[arg(long, global = true)]
    kappa: Option<String>,

    /// Diffusion coefficients: const or var3d
    #[arg(long, global = true)]
    coeffs: Option<String>,

    /// Coarsest refinement level j (N = 2^j - 1, tau = 2^-j)
    #[arg(long, global = true)]
    jmin: Option<String>,

    /// Finest refinement level j
    #[arg(long, global = true)]
    jmax: Option<String>,

    #[arg(long, global = true)]
    theta: Option<String>,

    /// Final time t*
    #[arg(long, global = true)]
    tfinal: Option<String>,

    /// CSV output path; stdout when omitted
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Seed for the randomized suites
    #[arg(long, global = true)]
    seed: Option<String>,

    /// Allow refinement levels beyond the desk-scale defaults
    #[arg(long, global = true)]
    full: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Observed orders on the manufactured problems
    Converge,
    /// Power-bound uniformity of D^-1 R^n
    Stability,
    /// Randomized sweep of the resolvent bounds
    Resolvent,
    /// Douglas sector stability and the sector inequality chain
    Sector,
    /// Closed-form spectrum of the 1D Laplacian
    Eigen,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::Converge => Experiment::Converge,
            Command::Stability => Experiment::Stability,
            Command::Resolvent => Experiment::Resolvent,
            Command::Sector => Experiment::Sector,
            Command::Eigen => Experiment::Eigen,
        }
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, String> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.apply_manifest(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let flags = [
        ("method", &cli.method),
        ("dim", &cli.dim),
        ("kappa", &cli.kappa),
        ("coeffs", &cli.coeffs),
        ("jmin", &cli.jmin),
        ("jmax", &cli.jmax),
        ("theta", &cli.theta),
        ("tfinal", &cli.tfinal),
        ("seed", &cli.seed),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v).map_err(|e| format!("--{key}: {e}"))?;
        }
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if cli.full {
        cfg.full_range = true;
    }
    cfg.experiment = cli.command.experiment();
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn write_table(table: &CsvTable, cfg: &ExperimentConfig) -> Result<(), String> {
    match &cfg.out {
        Some(path) => table.write_to(path).map_err(|e| e.to_string()),
        None => std::io::stdout()
            .write_all(table.to_csv_string().as_bytes())
            .map_err(|e| e.to_string()),
    }
}

fn run(cfg: &ExperimentConfig) -> Result<bool, String> {
    if cfg.experiment == Experiment::Converge {
        let report = run_convergence(cfg).map_err(|e| e.to_string())?;
        eprint!("{report}");
        match &cfg.out {
            Some(path) => emit_csv(&report, path).map_err(|e| e.to_string())?,
            None => write_table(&report.to_table(), cfg)?,
        }
        return Ok(true);
    }
    let outcome = run_stability_suite(cfg).map_err(|e| e.to_string())?;
    write_table(&outcome.table, cfg)?;
    eprintln!("{}: {}", cfg.experiment.name(), if outcome.passed { "pass" } else { "FAIL" });
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
