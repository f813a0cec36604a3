//! `gsqg run`: one trajectory from a TOML config or inline flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use gsqg_core::experiments::config::{InitialKind, InitialSection, ProblemSection};
use gsqg_core::experiments::{InitialRecipe, RadialBump};
use gsqg_core::manufactured::ManufacturedSolution;
use gsqg_core::{
    run as integrate, DealiasPolicy, DiagnosticSample, DiagnosticSeries, Error, ForcingEntry, ForcingSpec,
    SimParams, Snapshot, SpectralField, TimeProfile, TrajectoryState,
};

use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Linear, unforced run checked mode by mode against `exp(-nu |n|^{2 gamma} t)`.
    PureDissipation,
    /// Forced run with a known exact solution; reports the error at every sample.
    Manufactured,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Run config (TOML with `[problem]`, `[run]`, `[initial]`, `[forcing]`, `[output]`).
    #[arg(long, conflicts_with_all = ["alpha", "gamma", "nu", "grid", "dt", "t_end", "init", "force"])]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Grid size per direction.
    #[arg(long = "M", id = "grid")]
    pub grid: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time.
    #[arg(long = "T", id = "t_end")]
    pub t_end: Option<f64>,
    /// Initial datum: `mode:n1,n2,re,im` (repeatable), `rough:amplitude,kmax[,seed[,exponent]]`
    /// or `bump:amplitude[,length]`.
    #[arg(long)]
    pub init: Vec<String>,
    /// Forced pair: `n1,n2,re,im[,constant | sin:omega:phase | ramp:tau | exp:rate]` (repeatable).
    #[arg(long)]
    pub force: Vec<String>,
    /// Record a sample every `stride` steps.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Switch off the transport term.
    #[arg(long)]
    pub linear: bool,
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub nu: f64,
    #[serde(rename = "M")]
    pub grid_size: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    #[serde(default = "one")]
    pub stride: usize,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunOutput {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSection,
    pub run: RunSection,
    #[serde(default)]
    pub initial: Option<InitialSection>,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub output: RunOutput,
}

fn one() -> usize {
    1
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn numbers(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| config_err(format!("{what}: cannot parse `{v}`"))))
        .collect()
}

fn integer(v: f64, what: &str) -> CliResult<i64> {
    if v.fract() == 0.0 && v.is_finite() {
        Ok(v as i64)
    } else {
        Err(config_err(format!("{what}: `{v}` is not an integer")))
    }
}

/// Turns the `--init` flags into the same section a config file would carry.
fn parse_init(specs: &[String]) -> CliResult<Option<InitialSection>> {
    if specs.is_empty() {
        return Ok(None);
    }
    let mut modes = Vec::new();
    let mut other: Option<InitialSection> = None;
    for spec in specs {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| config_err(format!("--init `{spec}`: expected kind:values")))?;
        match kind {
            "mode" => {
                let v = numbers(rest, "--init mode")?;
                if v.len() != 4 {
                    return Err(config_err("--init mode takes n1,n2,re,im"));
                }
                let mut t = toml::Table::new();
                t.insert(
                    "n".into(),
                    toml::Value::Array(vec![
                        toml::Value::Integer(integer(v[0], "--init mode")?),
                        toml::Value::Integer(integer(v[1], "--init mode")?),
                    ]),
                );
                t.insert("re".into(), toml::Value::Float(v[2]));
                t.insert("im".into(), toml::Value::Float(v[3]));
                modes.push(toml::Value::Table(t));
            }
            "rough" => {
                let v = numbers(rest, "--init rough")?;
                if !(2..=4).contains(&v.len()) {
                    return Err(config_err("--init rough takes amplitude,kmax[,seed[,exponent]]"));
                }
                let mut t = toml::Table::new();
                t.insert("amplitude".into(), toml::Value::Float(v[0]));
                t.insert("kmax".into(), toml::Value::Float(v[1]));
                if let Some(&e) = v.get(3) {
                    t.insert("exponent".into(), toml::Value::Float(e));
                }
                let seed = v.get(2).map(|&s| integer(s, "--init rough seed")).transpose()?.unwrap_or(0);
                other = Some(InitialSection {
                    kind: InitialKind::Rough,
                    parameters: toml::Value::Table(t),
                    seed: u64::try_from(seed).map_err(|_| config_err("--init rough: negative seed"))?,
                });
            }
            "bump" => {
                let v = numbers(rest, "--init bump")?;
                if !(1..=2).contains(&v.len()) {
                    return Err(config_err("--init bump takes amplitude[,length]"));
                }
                let mut t = toml::Table::new();
                t.insert("amplitude".into(), toml::Value::Float(v[0]));
                if let Some(&l) = v.get(1) {
                    t.insert("length".into(), toml::Value::Float(l));
                }
                other = Some(InitialSection {
                    kind: InitialKind::Bump,
                    parameters: toml::Value::Table(t),
                    seed: 0,
                });
            }
            _ => return Err(config_err(format!("--init: unknown kind `{kind}`"))),
        }
    }
    match (modes.is_empty(), other) {
        (false, None) => {
            let mut t = toml::Table::new();
            t.insert("modes".into(), toml::Value::Array(modes));
            Ok(Some(InitialSection {
                kind: InitialKind::Modes,
                parameters: toml::Value::Table(t),
                seed: 0,
            }))
        }
        (true, Some(s)) if specs.len() == 1 => Ok(Some(s)),
        _ => Err(config_err("--init: give either mode entries or a single rough/bump datum")),
    }
}

fn parse_force(spec: &str) -> CliResult<ForcingEntry> {
    let mut parts = spec.splitn(5, ',');
    let mut next = |what: &str| -> CliResult<f64> {
        let v = parts.next().ok_or_else(|| config_err(format!("--force `{spec}`: missing {what}")))?;
        v.trim().parse().map_err(|_| config_err(format!("--force `{spec}`: bad {what}")))
    };
    let n1 = integer(next("n1")?, "--force")?;
    let n2 = integer(next("n2")?, "--force")?;
    let re = next("re")?;
    let im = next("im")?;
    let profile = match parts.next().map(str::trim) {
        None | Some("constant") => TimeProfile::Constant,
        Some(p) => {
            let fields: Vec<&str> = p.split(':').collect();
            let arg = |i: usize| -> CliResult<f64> {
                fields
                    .get(i)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| config_err(format!("--force profile `{p}`: bad argument {i}")))
            };
            match fields[0] {
                "sin" => TimeProfile::Sinusoidal { omega: arg(1)?, phase: arg(2)? },
                "ramp" => TimeProfile::Ramp { tau: arg(1)? },
                "exp" => TimeProfile::Exponential { rate: arg(1)? },
                other => return Err(config_err(format!("--force: unknown profile `{other}`"))),
            }
        }
    };
    Ok(ForcingEntry {
        n: [n1, n2],
        re,
        im,
        profile,
    })
}

fn from_flags(args: &RunArgs) -> CliResult<RunConfig> {
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| config_err(format!("missing --{flag} (or use --config)")));
    let problem = ProblemSection {
        alpha: need(args.alpha, "alpha")?,
        gamma: need(args.gamma, "gamma")?,
        nonlinear: true,
        cutoff_fraction: 2.0 / 3.0,
    };
    let run = RunSection {
        nu: need(args.nu, "nu")?,
        grid_size: args.grid.ok_or_else(|| config_err("missing --M (or use --config)"))?,
        dt: need(args.dt, "dt")?,
        t_end: need(args.t_end, "T")?,
        stride: 1,
    };
    let forcing = ForcingSpec::new(args.force.iter().map(|s| parse_force(s)).collect::<CliResult<_>>()?);
    Ok(RunConfig {
        problem,
        run,
        initial: parse_init(&args.init)?,
        forcing,
        output: RunOutput::default(),
    })
}

pub fn load_config(args: &RunArgs) -> CliResult<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            toml::from_str::<RunConfig>(&text).map_err(|e| config_err(e.to_string()))?
        }
        None => from_flags(args)?,
    };
    if let Some(s) = args.stride {
        cfg.run.stride = s;
    }
    if args.linear {
        cfg.problem.nonlinear = false;
    }
    Ok(cfg)
}

fn default_modes() -> InitialSection {
    let text = r#"
kind = "modes"
parameters = { modes = [
  { n = [1, 0], re = 0.5, im = 0.0 },
  { n = [2, 1], re = 0.0, im = 0.3 },
  { n = [3, -2], re = 0.2, im = -0.1 },
] }
"#;
    toml::from_str(text).expect("built-in datum")
}

/// What a preset adds to a plain run: the datum, the force and a reference solution.
struct Plan {
    theta0: SpectralField,
    forcing: ForcingSpec,
    reference: Option<Box<dyn Fn(f64) -> gsqg_core::Result<SpectralField>>>,
}

fn plan(cfg: &mut RunConfig, preset: Option<Preset>, policy: &DealiasPolicy) -> CliResult<Plan> {
    let (a, g, nu, m) = (cfg.problem.alpha, cfg.problem.gamma, cfg.run.nu, cfg.run.grid_size);
    match preset {
        Some(Preset::Manufactured) => {
            if !cfg.forcing.entries.is_empty() || cfg.initial.is_some() {
                return Err(config_err("the manufactured preset fixes the datum and the force"));
            }
            cfg.problem.nonlinear = true;
            let ms = ManufacturedSolution::new(a, g, nu, m);
            Ok(Plan {
                theta0: ms.exact(0.0)?,
                forcing: ms.forcing(policy)?,
                reference: Some(Box::new(move |t| ms.exact(t))),
            })
        }
        Some(Preset::PureDissipation) => {
            if !cfg.forcing.entries.is_empty() {
                return Err(config_err("the pure-dissipation preset is unforced"));
            }
            cfg.problem.nonlinear = false;
            let section = cfg.initial.clone().unwrap_or_else(default_modes);
            let theta0 = datum(&section, a, g, nu, m)?;
            let start = theta0.clone();
            Ok(Plan {
                theta0,
                forcing: ForcingSpec::zero(),
                reference: Some(Box::new(move |t| {
                    Ok(start.apply_real_multiplier(|n| (-nu * n.laplacian_power(g) * t).exp()))
                })),
            })
        }
        None => {
            let section = cfg
                .initial
                .clone()
                .ok_or_else(|| config_err("no initial datum: give --init or an [initial] section"))?;
            Ok(Plan {
                theta0: datum(&section, a, g, nu, m)?,
                forcing: cfg.forcing.clone(),
                reference: None,
            })
        }
    }
}

fn datum(section: &InitialSection, alpha: f64, gamma: f64, nu: f64, m: usize) -> CliResult<SpectralField> {
    let recipe = InitialRecipe::from_section(section, alpha)?;
    let bump = match &recipe {
        InitialRecipe::Bump(p) => Some(RadialBump::for_sweep(p, alpha, gamma, nu)),
        _ => None,
    };
    Ok(recipe.field(m, nu, bump.as_ref())?)
}

fn write_abort(dir: &Path, err: &Error, last: Option<&DiagnosticSample>) -> CliResult {
    let detail = match err {
        Error::CflViolation { t, dt, limit } => json!({"kind": "cfl_violation", "t": t, "dt": dt, "limit": limit}),
        Error::BlowUp { t, step, max_abs } => {
            json!({"kind": "blow_up", "t": t, "step": step, "max_abs": if max_abs.is_finite() { json!(max_abs) } else { json!(null) }})
        }
        _ => json!({"kind": "other"}),
    };
    let record = json!({
        "error": detail,
        "message": err.to_string(),
        "last_sample_t": last.map(|s| s.t),
    });
    fs::write(dir.join("abort.json"), serde_json::to_string_pretty(&record).map_err(|e| CliError::Failed(e.to_string()))? + "\n")?;
    Ok(())
}

pub fn run(args: RunArgs) -> CliResult {
    let mut cfg = load_config(&args)?;
    let policy = DealiasPolicy::new(cfg.problem.cutoff_fraction);
    let plan = plan(&mut cfg, args.preset, &policy)?;
    let (p, r) = (&cfg.problem, &cfg.run);
    let mut params = SimParams::new(p.alpha, p.gamma, r.nu, r.grid_size, r.dt, r.t_end).with_stride(r.stride);
    params.dealias = policy;
    params.nonlinear = p.nonlinear;
    params.validate()?;
    plan.forcing.validate(r.grid_size, &policy)?;

    let dir = args
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out/run"));
    fs::create_dir_all(&dir)?;

    let mut partial = DiagnosticSeries::new(params.alpha, params.gamma, params.nu);
    let mut final_field = plan.theta0.clone();
    let mut final_t = 0.0;
    let mut max_error: Option<f64> = None;
    let mut reference_err = None;
    let result = {
        let mut obs = |s: &TrajectoryState, sample: &DiagnosticSample| {
            partial.push(sample.clone());
            final_field = s.field.clone();
            final_t = s.t;
            if let Some(reference) = &plan.reference {
                match reference(s.t) {
                    Ok(exact) => {
                        let scale = exact.max_abs_coefficient().max(f64::MIN_POSITIVE);
                        let e = (&s.field - &exact).max_abs_coefficient() / scale;
                        max_error = Some(max_error.map_or(e, |m: f64| m.max(e)));
                    }
                    Err(e) => reference_err = Some(e),
                }
            }
        };
        integrate(&plan.theta0, &params, &plan.forcing, &mut [&mut obs])
    };
    if let Some(e) = reference_err {
        return Err(e.into());
    }
    let series = match result {
        Ok(s) => s,
        Err(e) if e.is_numerical_abort() => {
            fs::write(dir.join("series.csv"), partial.to_csv())?;
            write_abort(&dir, &e, partial.last())?;
            return Err(CliError::Abort(e));
        }
        Err(e) => return Err(e.into()),
    };

    if params.step_count() == 0 {
        // Nothing was integrated: the series file carries the header only.
        fs::write(dir.join("series.csv"), DiagnosticSeries::new(p.alpha, p.gamma, r.nu).to_csv())?;
    } else {
        fs::write(dir.join("series.csv"), series.to_csv())?;
    }
    Snapshot::new(final_field, p.alpha, p.gamma, r.nu, final_t).save(&dir.join("final.bin"), &dir.join("final.csv"))?;

    let ham = gsqg_core::hamiltonian_balance_residual(&series).max_abs();
    let l2 = gsqg_core::l2_balance_residual(&series).max_abs();
    let last = series.last().expect("initial sample");
    let summary = json!({
        "alpha": p.alpha,
        "gamma": p.gamma,
        "nu": r.nu,
        "M": r.grid_size,
        "dt": params.effective_dt(),
        "steps": params.step_count(),
        "T": r.t_end,
        "samples": series.len(),
        "final": {"t": last.t, "l2": last.l2, "h_minus_alpha": last.h_minus_alpha},
        "max_residual_ham": ham,
        "max_residual_l2": l2,
        "max_error": max_error,
        "out": dir,
    });
    println!("{}", serde_json::to_string_pretty(&summary).map_err(|e| CliError::Failed(e.to_string()))?);
    Ok(())
}
