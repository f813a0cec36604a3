//! `gsqg export`: flat CSV tables from a sweep report, or a binary snapshot as CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args};

use gsqg_core::experiments::{Keyed, SweepReport};
use gsqg_core::Snapshot;

use crate::{CliError, CliResult};

#[derive(Args, Debug)]
#[group(skip)]
#[command(group(ArgGroup::new("source").required(true).args(["report", "snapshot"])))]
pub struct ExportArgs {
    /// Sweep report (`report.json`); writes dissipation, tails, phi and cauchy tables.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Binary snapshot; writes its coefficient table.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    /// Output directory (report) or file (snapshot).
    #[arg(long)]
    pub out: PathBuf,
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:e}"),
        _ => String::new(),
    }
}

/// Long-format `nu,<key>,<value>` rows from one keyed column per member.
fn long_table(report: &SweepReport, key: &str, value: &str, pick: impl Fn(&gsqg_core::experiments::MemberReport) -> &Keyed) -> String {
    let mut out = format!("nu,{key},{value}\n");
    for m in &report.per_nu {
        for (k, v) in &pick(m).0 {
            let _ = writeln!(out, "{:e},{:e},{}", m.nu, k, cell(Some(*v)));
        }
    }
    out
}

pub fn report_tables(report: &SweepReport) -> Vec<(&'static str, String)> {
    let mut diss = String::from("nu,M,engine,D,D_nu,max_residual_ham,max_residual_l2,flags\n");
    for m in &report.per_nu {
        let engine = serde_json::to_value(m.engine)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        let _ = writeln!(
            diss,
            "{:e},{},{},{},{},{},{},{}",
            m.nu,
            m.grid_size,
            engine,
            cell(m.d),
            cell(m.d_self),
            cell(m.max_residual_ham),
            cell(m.max_residual_l2),
            m.flags.join(";")
        );
    }
    let mut cauchy = String::from("nu_i,nu_j,distance\n");
    for c in &report.cauchy {
        let _ = writeln!(cauchy, "{:e},{:e},{}", c.nu_i, c.nu_j, cell(Some(c.distance)));
    }
    vec![
        ("dissipation.csv", diss),
        ("dissipation_delta.csv", long_table(report, "delta", "D_delta", |m| &m.d_delta)),
        ("higher_order.csv", long_table(report, "delta", "H", |m| &m.h)),
        ("tails.csv", long_table(report, "lambda", "tail", |m| &m.tails)),
        ("phi.csv", long_table(report, "N", "phi", |m| &m.phi)),
        ("cauchy.csv", cauchy),
    ]
}

fn export_report(path: &Path, out: &Path) -> CliResult {
    let text = fs::read_to_string(path)?;
    let report = SweepReport::from_json(&text)?;
    fs::create_dir_all(out)?;
    for (name, body) in report_tables(&report) {
        fs::write(out.join(name), body)?;
    }
    Ok(())
}

pub fn export(args: ExportArgs) -> CliResult {
    match (&args.report, &args.snapshot) {
        (Some(r), None) => export_report(r, &args.out),
        (None, Some(s)) => {
            let snap = Snapshot::load_binary(s)?;
            let mut buf = Vec::new();
            snap.write_csv(&mut buf)?;
            fs::write(&args.out, buf)?;
            Ok(())
        }
        _ => Err(CliError::Config("give exactly one of --report and --snapshot".into())),
    }
}
