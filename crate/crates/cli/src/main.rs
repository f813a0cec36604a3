//! `gsqg`: single runs, viscosity sweeps, scenario presets, oracle self-tests and
//! report export.
//!
//! Exit codes: 0 success, 1 I/O or internal failure (or a failed self-test),
//! 2 configuration error, 3 numerical abort (CFL violation or blow-up).

mod export;
mod run;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gsqg_core::experiments::{checks, run_sweep, SweepConfig};
use gsqg_core::selftest;

#[derive(Parser)]
#[command(name = "gsqg", version, about = "Pseudo-spectral gSQG solver and vanishing-viscosity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and write its diagnostic series and final snapshot.
    Run(run::RunArgs),
    /// Run a viscosity sweep from a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `[output] dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a bundled sweep preset and its verdicts: smooth-compact, counterexample,
    /// global-existence or supercritical-probe.
    Scenario {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle suites.
    Selftest,
    /// Flatten a sweep report into CSV tables, or convert a binary snapshot to CSV.
    Export(export::ExportArgs),
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Abort(gsqg_core::Error),
    Failed(String),
}

impl From<gsqg_core::Error> for CliError {
    fn from(e: gsqg_core::Error) -> Self {
        use gsqg_core::Error as E;
        match e {
            e if e.is_numerical_abort() => CliError::Abort(e),
            E::Io(e) => CliError::Failed(e.to_string()),
            E::Json(e) => CliError::Failed(e.to_string()),
            E::Format { .. } => CliError::Failed(e.to_string()),
            E::Config(msg) => CliError::Config(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

fn init_threads() {
    if let Some(n) = std::env::var("GSQG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // Ignored if a pool already exists.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Runs the sweep, stamps and writes everything under `out`, and prints the verdict summary.
pub fn sweep_to_dir(cfg: &SweepConfig, out: &std::path::Path) -> CliResult<gsqg_core::SweepReport> {
    let mut sweep = run_sweep(cfg)?;
    sweep.report.generated_at = Some(timestamp());
    sweep.persist(out)?;
    for m in &sweep.report.per_nu {
        let d = m.d.map_or("-".to_string(), |d| format!("{d:.6e}"));
        let flags = if m.flags.is_empty() { String::new() } else { format!("  [{}]", m.flags.join(", ")) };
        println!("nu = {:<10} M = {:<6} D = {d}{flags}", m.nu, m.grid_size);
    }
    let eq = checks::frequency_equivalence_check(&sweep.report);
    println!("frequency equivalence: {:?}", eq.verdict);
    Ok(sweep.report)
}

fn selftest_cmd() -> CliResult {
    let suites = selftest::run_all()?;
    let mut failed = 0;
    for s in &suites {
        let status = if s.passed() { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<20} worst = {:.3e}  tol = {:.0e}  cases = {:<4} {:.2}s",
            s.name, s.worst, s.tolerance, s.cases, s.seconds
        );
        if !s.passed() {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} self-test suite(s) failed")));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Run(args) => run::run(args),
        Command::Sweep { config, out } => {
            let cfg = SweepConfig::load(&config)?;
            let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            sweep_to_dir(&cfg, &dir).map(|_| ())
        }
        Command::Scenario { name, out } => scenario::run(&name, out),
        Command::Selftest => selftest_cmd(),
        Command::Export(args) => export::export(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Abort(e)) => {
            eprintln!("numerical abort: {e}");
            ExitCode::from(3)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
