//! Viscosity sweeps: one run per `nu`, reduced into a [`SweepReport`].

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::diagnostics::{
    hamiltonian_balance_residual, l2_balance_residual, lp_monotonicity_check, trapezoid, DiagnosticSample,
    DiagnosticSeries,
};
use crate::error::{Error, Result};
use crate::integrator::{run, SimParams, TrajectoryState, CFL_NUMBER};
use crate::nonlinearity::TransportKernel;
use crate::snapshot::Snapshot;
use crate::spectral::{SpectralField, Wavenumber};

use super::config::SweepConfig;
use super::counterexample::{LatticeEvaluator, LatticeRequest, RadialBump};
use super::initial::InitialRecipe;
use super::report::{CauchyEntry, EngineUsed, Keyed, MemberReport, SweepReport};

/// Fraction of the CFL limit used for the initial step estimate.
const CFL_SAFETY: f64 = 0.5;

/// Step halvings attempted after a CFL violation before the member is abandoned.
const MAX_REFINEMENTS: usize = 4;

/// Everything a sweep produced, before it is written out.
#[derive(Clone, Debug)]
pub struct SweepRun {
    pub report: SweepReport,
    pub series: Vec<Option<DiagnosticSeries>>,
    /// Initial and final fields of grid members.
    pub snapshots: Vec<Option<(Snapshot, Snapshot)>>,
}

impl SweepRun {
    /// Writes `report.json`, one series CSV per member and the grid members'
    /// initial/final snapshots (binary and CSV) into `dir`.
    pub fn persist(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (i, s) in self.series.iter().enumerate() {
            if let Some(s) = s {
                fs::write(dir.join(series_name(i)), s.to_csv())?;
            }
        }
        for (i, snap) in self.snapshots.iter().enumerate() {
            if let Some((first, last)) = snap {
                first.save(
                    &dir.join(format!("nu_{i:02}_initial.bin")),
                    &dir.join(format!("nu_{i:02}_initial.csv")),
                )?;
                last.save(
                    &dir.join(format!("nu_{i:02}_final.bin")),
                    &dir.join(format!("nu_{i:02}_final.csv")),
                )?;
            }
        }
        self.report.write(&dir.join("report.json"))
    }
}

fn series_name(i: usize) -> String {
    format!("nu_{i:02}.csv")
}

/// Per-sample record kept for the cross-member reductions.
#[derive(Clone, Debug, Default)]
struct Trace {
    /// `|theta_{>c}|^2_{H^-alpha}`, indexed `[sample][cutoff]`.
    tails: Vec<Vec<f64>>,
    /// Coefficients on the shared band, per sample.
    band: Vec<Vec<Complex64>>,
    /// `|theta|^2_{H^-alpha}` outside the shared band, per sample.
    outside: Vec<f64>,
}

struct Member {
    report: MemberReport,
    series: Option<DiagnosticSeries>,
    snapshots: Option<(Snapshot, Snapshot)>,
    trace: Option<Trace>,
}

/// Shared `H^-alpha` band used for Cauchy distances between grid members.
struct Band {
    modes: Vec<Wavenumber>,
    weights: Vec<f64>,
    radius: f64,
}

impl Band {
    fn new(radius: f64, alpha: f64) -> Self {
        let k = radius.floor() as i64;
        let mut modes = Vec::new();
        for n1 in 0..=k {
            for n2 in -k..=k {
                let n = Wavenumber::new(n1, n2);
                if n.is_lex_positive() && n.modulus() <= radius {
                    modes.push(n);
                }
            }
        }
        // Each stored mode stands for the pair (n, -n).
        let weights = modes.iter().map(|n| 2.0 * n.laplacian_power(-alpha)).collect();
        Band { modes, weights, radius }
    }
}

/// Runs every member of the sweep (in parallel) and assembles the report.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepRun> {
    cfg.validate()?;
    let recipe = cfg.recipe()?;
    let bump = cfg.bump()?;
    let lattice = cfg.uses_lattice();
    let alpha = cfg.problem.alpha;

    let band = (!lattice).then(|| {
        let radius = cfg
            .sweep
            .nus
            .iter()
            .map(|&nu| cfg.dealias().radius(cfg.grid_size(nu).0))
            .fold(f64::INFINITY, f64::min);
        Band::new(radius, alpha)
    });

    let members: Vec<Member> = if let Some(band) = &band {
        cfg.sweep
            .nus
            .par_iter()
            .enumerate()
            .map(|(i, &nu)| grid_member(cfg, &recipe, bump.as_ref(), band, i, nu))
            .collect::<Result<_>>()?
    } else {
        let bump = bump.expect("lattice engine requires a bump datum");
        cfg.sweep
            .nus
            .par_iter()
            .enumerate()
            .map(|(i, &nu)| lattice_member(cfg, &bump, i, nu))
            .collect::<Result<_>>()?
    };

    let times = cfg.sample_times();
    let mut phi = Keyed::default();
    for &n in &cfg.sweep.ns {
        let worst = members
            .iter()
            .filter_map(|m| m.report.phi.get(n))
            .fold(f64::NAN, f64::max);
        phi.push(n, worst);
    }

    let mut cauchy = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let (a, b) = (&members[i], &members[j]);
            if !(a.report.completed() && b.report.completed()) {
                continue;
            }
            let d2 = if let Some(band) = &band {
                // Exact on the shared band; outside it the two tails are added as if
                // orthogonal (exact when every member uses the same grid).
                let (ta, tb) = (a.trace.as_ref().expect("trace"), b.trace.as_ref().expect("trace"));
                let integrand: Vec<f64> = (0..times.len())
                    .map(|k| {
                        let low: f64 = ta.band[k]
                            .iter()
                            .zip(&tb.band[k])
                            .zip(&band.weights)
                            .map(|((x, y), w)| w * (x - y).norm_sqr())
                            .sum();
                        low + ta.outside[k] + tb.outside[k]
                    })
                    .collect();
                trapezoid(&times, &integrand)
            } else {
                let e = LatticeEvaluator::new(bump.expect("bump"));
                let ni = a.report.sobolev_integrals.get(-alpha).unwrap_or(0.0);
                let nj = b.report.sobolev_integrals.get(-alpha).unwrap_or(0.0);
                ni + nj - 2.0 * e.cross_integral(a.report.nu, b.report.nu, cfg.sweep.t_end)
            };
            cauchy.push(CauchyEntry {
                nu_i: a.report.nu,
                nu_j: b.report.nu,
                distance: d2.max(0.0).sqrt(),
            });
        }
    }

    let mut per_nu = Vec::with_capacity(members.len());
    let mut series = Vec::with_capacity(members.len());
    let mut snapshots = Vec::with_capacity(members.len());
    for m in members {
        per_nu.push(m.report);
        series.push(m.series);
        snapshots.push(m.snapshots);
    }
    Ok(SweepRun {
        report: SweepReport {
            generated_at: None,
            config: cfg.clone(),
            per_nu,
            phi,
            cauchy,
        },
        series,
        snapshots,
    })
}

fn empty_member(cfg: &SweepConfig, nu: f64, engine: EngineUsed, grid_size: usize) -> MemberReport {
    MemberReport {
        nu,
        engine,
        grid_size,
        dt: None,
        steps: None,
        critical_frequency: cfg.critical_frequency(nu),
        d: None,
        d_self: None,
        d_delta: Keyed::default(),
        h: Keyed::default(),
        tails: Keyed::default(),
        unresolved_lambdas: Vec::new(),
        phi: Keyed::default(),
        sobolev_integrals: Keyed::default(),
        initial_hamiltonian: None,
        max_residual_ham: None,
        max_residual_l2: None,
        lp_violation: Keyed::default(),
        flags: Vec::new(),
        series: None,
    }
}

fn scaling_indices(cfg: &SweepConfig) -> [f64; 3] {
    let (a, g) = (cfg.problem.alpha, cfg.problem.gamma);
    [-a, g - a, g]
}

fn lattice_member(cfg: &SweepConfig, bump: &RadialBump, index: usize, nu: f64) -> Result<Member> {
    let eval = LatticeEvaluator::new(*bump);
    let n_nu = cfg.critical_frequency(nu);
    let times = cfg.sample_times();
    let deltas: Vec<f64> = cfg.sweep.deltas.iter().map(|&d| times[cfg.snap_index(d)]).collect();
    let mut cutoffs: Vec<f64> = cfg.sweep.lambdas.iter().map(|l| l * n_nu).collect();
    cutoffs.extend(&cfg.sweep.ns);
    let sobolev = scaling_indices(cfg).to_vec();
    let req = LatticeRequest {
        t_end: cfg.sweep.t_end,
        samples: cfg.sweep.samples,
        deltas: deltas.clone(),
        cutoffs,
        sobolev: sobolev.clone(),
    };
    let out = eval.evaluate(nu, &req)?;
    let nl = cfg.sweep.lambdas.len();
    let mut r = empty_member(cfg, nu, EngineUsed::Lattice, out.extent as usize);
    r.d = Some(out.d);
    r.d_self = Some(out.d_self);
    r.d_delta = deltas.iter().copied().zip(out.d_delta.iter().copied()).collect();
    r.h = std::iter::once(0.0)
        .chain(deltas.iter().copied())
        .zip(out.h.iter().copied())
        .collect();
    r.tails = cfg.sweep.lambdas.iter().copied().zip(out.tails[..nl].iter().copied()).collect();
    r.phi = cfg.sweep.ns.iter().copied().zip(out.tails[nl..].iter().copied()).collect();
    r.sobolev_integrals = sobolev.iter().copied().zip(out.sobolev_integrals.iter().copied()).collect();
    let h0 = out.series.samples[0].h_minus_alpha;
    r.initial_hamiltonian = Some(h0 * h0);
    r.max_residual_ham = Some(hamiltonian_balance_residual(&out.series).max_abs());
    r.max_residual_l2 = Some(l2_balance_residual(&out.series).max_abs());
    r.series = Some(series_name(index));
    Ok(Member {
        report: r,
        series: Some(out.series),
        snapshots: None,
        trace: None,
    })
}

/// `dt` aligned to the sample interval, from the CFL estimate at `theta0`.
fn initial_step(cfg: &SweepConfig, params: &SimParams, theta0: &SpectralField) -> Result<usize> {
    let interval = cfg.sweep.t_end / cfg.sweep.samples as f64;
    let mut dt = cfg.sweep.dt.unwrap_or(interval).min(interval);
    if params.nonlinear {
        let mut kernel = TransportKernel::new(params.grid_size, params.alpha, &params.dealias)?;
        kernel.evaluate(theta0)?;
        let speed = kernel.last_max_speed();
        if speed > 0.0 {
            let limit = CFL_NUMBER / (params.dealias.max_component(params.grid_size) * speed);
            dt = dt.min(CFL_SAFETY * limit);
        }
    }
    Ok((interval / dt - 1e-9).ceil().max(1.0) as usize)
}

fn grid_member(
    cfg: &SweepConfig,
    recipe: &InitialRecipe,
    bump: Option<&RadialBump>,
    band: &Band,
    index: usize,
    nu: f64,
) -> Result<Member> {
    let (alpha, gamma) = (cfg.problem.alpha, cfg.problem.gamma);
    let (m, capped) = cfg.grid_size(nu);
    let mut report = empty_member(cfg, nu, EngineUsed::Grid, m);
    if capped {
        report.flags.push("under_resolved".into());
    }
    let theta0 = recipe.field(m, nu, bump)?;
    let policy = cfg.dealias();
    let n_nu = cfg.critical_frequency(nu);
    let radius = policy.radius(m);
    let mut cutoffs: Vec<f64> = cfg.sweep.lambdas.iter().map(|l| l * n_nu).collect();
    for (&l, &c) in cfg.sweep.lambdas.iter().zip(&cutoffs) {
        if c >= radius {
            report.unresolved_lambdas.push(l);
        }
    }
    cutoffs.extend(&cfg.sweep.ns);

    let mut params = SimParams::new(alpha, gamma, nu, m, 1.0, cfg.sweep.t_end);
    params.dealias = policy;
    params.nonlinear = cfg.problem.nonlinear;
    let mut per_sample = initial_step(cfg, &params, &theta0)?;

    let mut attempt = 0;
    let (series, trace, last) = loop {
        params.dt = cfg.sweep.t_end / (cfg.sweep.samples * per_sample) as f64;
        params.sample_stride = per_sample;
        let mut trace = Trace::default();
        let mut last = None;
        let mut observer = |state: &TrajectoryState, _: &DiagnosticSample| {
            record_trace(&mut trace, &state.field, &cutoffs, band, alpha);
            last = Some(state.field.clone());
        };
        match run(&theta0, &params, &cfg.forcing, &mut [&mut observer]) {
            Ok(series) => break (series, trace, last.expect("at least one sample")),
            Err(Error::CflViolation { .. }) if attempt < MAX_REFINEMENTS => {
                attempt += 1;
                per_sample *= 2;
                report.flags.push(format!("dt_refined_{attempt}"));
            }
            Err(e) if e.is_numerical_abort() => {
                report.flags.push(match e {
                    Error::BlowUp { .. } => "blow_up".into(),
                    _ => "cfl_abort".into(),
                });
                report.flags.push(e.to_string());
                return Ok(Member {
                    report,
                    series: None,
                    snapshots: None,
                    trace: None,
                });
            }
            Err(e) => return Err(e),
        }
    };

    report.dt = Some(params.effective_dt());
    report.steps = Some(params.step_count());
    let times = series.times();
    let s_end = series.last().expect("nonempty series");
    let d = s_end.cum_diss_ham;
    report.d = Some(d);
    for &delta in &cfg.sweep.deltas {
        let k = cfg.snap_index(delta);
        report.d_delta.push(times[k], series.samples[k].cum_diss_ham);
    }
    let h_scale = nu.powf((alpha + gamma) / gamma) / nu;
    report.h.push(0.0, h_scale * s_end.cum_diss_l2);
    for &delta in &cfg.sweep.deltas {
        let k = cfg.snap_index(delta);
        report.h.push(times[k], h_scale * (s_end.cum_diss_l2 - series.samples[k].cum_diss_l2));
    }
    let nl = cfg.sweep.lambdas.len();
    for (j, &c) in cutoffs.iter().enumerate() {
        let column: Vec<f64> = trace.tails.iter().map(|row| row[j]).collect();
        let integral = trapezoid(&times, &column);
        if j < nl {
            report.tails.push(cfg.sweep.lambdas[j], integral);
        } else {
            report.phi.push(c, integral);
        }
    }
    let ham_sq: Vec<f64> = series.samples.iter().map(|s| s.h_minus_alpha.powi(2)).collect();
    let [s_ham, s_diss, s_top] = scaling_indices(cfg);
    report.sobolev_integrals.push(s_ham, trapezoid(&times, &ham_sq));
    report.sobolev_integrals.push(s_diss, d / nu);
    report.sobolev_integrals.push(s_top, s_end.cum_diss_l2 / nu);
    report.initial_hamiltonian = Some(series.samples[0].h_minus_alpha.powi(2));
    report.max_residual_ham = Some(hamiltonian_balance_residual(&series).max_abs());
    report.max_residual_l2 = Some(l2_balance_residual(&series).max_abs());
    for v in lp_monotonicity_check(&series, &cfg.forcing, m)? {
        let rel = if v.initial_norm > 0.0 { v.violation / v.initial_norm } else { v.violation };
        report.lp_violation.push(v.p, rel);
    }
    report.series = Some(series_name(index));
    let t_end = cfg.sweep.t_end;
    let snapshots = (
        Snapshot::new(theta0, alpha, gamma, nu, 0.0),
        Snapshot::new(last, alpha, gamma, nu, t_end),
    );
    Ok(Member {
        report,
        series: Some(series),
        snapshots: Some(snapshots),
        trace: Some(trace),
    })
}

fn record_trace(trace: &mut Trace, field: &SpectralField, cutoffs: &[f64], band: &Band, alpha: f64) {
    let c2: Vec<f64> = cutoffs.iter().map(|c| c * c).collect();
    let mut tails = vec![0.0; cutoffs.len()];
    let mut outside = 0.0;
    let r2 = band.radius * band.radius;
    for (n, c) in field.modes() {
        let q = n.modulus_sq();
        let e = n.laplacian_power(-alpha) * c.norm_sqr();
        for (t, &cut) in tails.iter_mut().zip(&c2) {
            if q > cut {
                *t += e;
            }
        }
        if q > r2 {
            outside += e;
        }
    }
    trace.tails.push(tails);
    trace.outside.push(outside);
    trace.band.push(band.modes.iter().map(|&n| field.coefficient(n)).collect());
}
