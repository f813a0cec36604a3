//! `gsqg scenario NAME`: a bundled sweep plus its verdicts.

use std::fs;
use std::path::PathBuf;

use gsqg_core::experiments::Scenario;

use crate::{sweep_to_dir, CliError, CliResult};

pub fn run(name: &str, out: Option<PathBuf>) -> CliResult {
    let scenario: Scenario = name.parse()?;
    let cfg = scenario.config();
    let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
    let report = sweep_to_dir(&cfg, &dir)?;
    let verdicts = scenario.verdicts(&report)?;
    let text = serde_json::to_string_pretty(&verdicts).map_err(|e| CliError::Failed(e.to_string()))?;
    fs::write(dir.join("verdicts.json"), text.clone() + "\n")?;
    println!("{text}");
    Ok(())
}
