//! Verdicts computed from a finished [`SweepReport`].
//!
//! All verdicts are finite-sweep evidence: they compare the first and last
//! viscosities (or fit a trend) against the thresholds recorded in the config.

use serde::{Deserialize, Serialize};

use crate::diagnostics::least_squares_slope;
use crate::error::{Error, Result};

use super::config::SweepConfig;
use super::report::{MemberReport, SweepReport};
use super::sweep::{run_sweep, SweepRun};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HigherOrderVerdict {
    pub delta: f64,
    /// `max_nu H(nu, delta)`.
    pub max_h: f64,
    /// Least-squares slope of `log H` against `log nu`.
    pub slope: f64,
    pub pass: bool,
}

/// Fits `log H(nu, delta)` against `log nu` for any `delta` in `[0, T)` recorded in the report.
pub fn higher_order_trend(report: &SweepReport, delta: f64) -> Result<(f64, f64)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut max_h = f64::NEG_INFINITY;
    for m in report.completed() {
        let h = m
            .h
            .get(delta)
            .ok_or_else(|| Error::InvalidParams(format!("H not recorded for delta = {delta}")))?;
        max_h = max_h.max(h);
        xs.push(m.nu.ln());
        ys.push(h.ln());
    }
    if xs.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: xs.len() });
    }
    Ok((max_h, least_squares_slope(&xs, &ys)))
}

/// `H(nu, delta) = nu^{(alpha+gamma)/gamma} int_delta^T |theta|^2_{H^gamma}` stays bounded:
/// PASS when the maximum is finite and `H` does not grow as `nu -> 0` beyond the
/// slope tolerance (fitted slope in `log nu` at least `-tolerance`).
pub fn higher_order_bound_check(report: &SweepReport, delta: f64) -> Result<HigherOrderVerdict> {
    let t_end = report.config.sweep.t_end;
    if !(delta > 0.0 && delta < t_end) {
        return Err(Error::InvalidParams(format!("delta = {delta} not in (0, {t_end})")));
    }
    let delta = report.config.sample_times()[report.config.snap_index(delta)];
    let (max_h, slope) = higher_order_trend(report, delta)?;
    let tol = report.config.sweep.slope_tolerance;
    Ok(HigherOrderVerdict {
        delta,
        max_h,
        slope,
        pass: max_h.is_finite() && slope >= -tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstantDissipationTable {
    /// `(delta, sup_nu D_delta(nu))`, delta decreasing.
    pub rows: Vec<(f64, f64)>,
    /// `D(nu_max)`.
    pub reference: f64,
    pub monotone: bool,
    /// Last row over the reference.
    pub last_fraction: f64,
    pub pass: bool,
}

pub fn no_instant_dissipation_check(report: &SweepReport) -> Result<InstantDissipationTable> {
    let first = report
        .completed()
        .next()
        .ok_or(Error::TooFewSamples { need: 1, got: 0 })?;
    let reference = first.d.expect("completed member");
    let mut deltas: Vec<f64> = first.d_delta.keys().collect();
    deltas.sort_by(|a, b| b.total_cmp(a));
    let rows: Vec<(f64, f64)> = deltas
        .iter()
        .map(|&d| {
            let sup = report
                .completed()
                .filter_map(|m| m.d_delta.get(d))
                .fold(0.0, f64::max);
            (d, sup)
        })
        .collect();
    let monotone = rows.windows(2).all(|w| w[1].1 <= w[0].1);
    let last_fraction = rows.last().map_or(0.0, |r| r.1 / reference);
    let pass = monotone && last_fraction <= report.config.sweep.instant_fraction;
    Ok(InstantDissipationTable {
        rows,
        reference,
        monotone,
        last_fraction,
        pass,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceCurve {
    pub lambda: f64,
    pub nus: Vec<f64>,
    pub tails: Vec<f64>,
    pub dissipation: Vec<f64>,
    pub tail_vanishes: bool,
    /// False when some member's cutoff `lambda N_nu` lies beyond its grid.
    pub resolved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub curves: Vec<EquivalenceCurve>,
    pub dissipation_vanishes: bool,
    pub verdict: Verdict,
}

/// Final value at most `fraction` of the initial one.
fn vanishes(values: &[f64], fraction: f64) -> bool {
    match (values.first(), values.last()) {
        (Some(&a), Some(&b)) => b <= fraction * a,
        _ => false,
    }
}

/// Pairs `tail(nu, lambda)` with `D(nu)`; CONSISTENT when, for every resolved
/// lambda, the tail vanishes exactly when `D` does.
pub fn frequency_equivalence_check(report: &SweepReport) -> EquivalenceReport {
    let frac = report.config.sweep.vanish_fraction;
    let members: Vec<&MemberReport> = report.completed().collect();
    let nus: Vec<f64> = members.iter().map(|m| m.nu).collect();
    let dissipation: Vec<f64> = members.iter().map(|m| m.d.expect("completed")).collect();
    let d_vanishes = vanishes(&dissipation, frac);
    let curves: Vec<EquivalenceCurve> = report
        .config
        .sweep
        .lambdas
        .iter()
        .map(|&lambda| {
            let tails: Vec<f64> = members.iter().map(|m| m.tails.get(lambda).unwrap_or(f64::NAN)).collect();
            EquivalenceCurve {
                lambda,
                nus: nus.clone(),
                tail_vanishes: vanishes(&tails, frac),
                tails,
                dissipation: dissipation.clone(),
                resolved: members.iter().all(|m| !m.unresolved_lambdas.contains(&lambda)),
            }
        })
        .collect();
    let consistent = curves
        .iter()
        .filter(|c| c.resolved)
        .all(|c| c.tail_vanishes == d_vanishes);
    EquivalenceReport {
        curves,
        dissipation_vanishes: d_vanishes,
        verdict: if consistent { Verdict::Consistent } else { Verdict::Inconsistent },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalExistenceReport {
    /// `(nu_i, nu_{i+1}, distance)` for consecutive members.
    pub consecutive_distances: Vec<(f64, f64, f64)>,
    pub distances_decreasing: bool,
    /// `max_t |Hamiltonian residual|` of the finest run over `|theta_0|^2_{H^-alpha}`.
    pub finest_hamiltonian_residual: f64,
    /// Worst `L^{p_alpha}` violation over `|theta_0|_{p_alpha}` across the sweep.
    pub lp_alpha_violation: f64,
    /// `(N, Phi(N))`, N increasing.
    pub phi: Vec<(f64, f64)>,
    pub phi_decreasing: bool,
}

/// Runs the sweep (which must have `gamma = 1`) and reduces it to the four
/// convergence indicators.
pub fn global_existence_experiment(cfg: &SweepConfig) -> Result<(SweepRun, GlobalExistenceReport)> {
    if cfg.problem.gamma != 1.0 {
        return Err(Error::Config("the global-existence experiment fixes gamma = 1".into()));
    }
    if !(cfg.problem.alpha < 1.0) {
        return Err(Error::Config("the global-existence experiment needs alpha in (0, 1)".into()));
    }
    let run = run_sweep(cfg)?;
    let g = summarize_global_existence(&run.report)?;
    Ok((run, g))
}

pub fn summarize_global_existence(report: &SweepReport) -> Result<GlobalExistenceReport> {
    let members: Vec<&MemberReport> = report.completed().collect();
    let finest = *members.last().ok_or(Error::TooFewSamples { need: 1, got: 0 })?;
    let consecutive: Vec<(f64, f64, f64)> = members
        .windows(2)
        .map(|w| {
            let d = report.cauchy_distance(w[0].nu, w[1].nu).unwrap_or(f64::NAN);
            (w[0].nu, w[1].nu, d)
        })
        .collect();
    let distances_decreasing = consecutive.windows(2).all(|w| w[1].2 < w[0].2);
    let h0 = finest.initial_hamiltonian.unwrap_or(f64::NAN);
    let p_alpha = crate::spectral::critical_exponent(report.config.problem.alpha);
    let lp_alpha_violation = members
        .iter()
        .filter_map(|m| m.lp_violation.get(p_alpha))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut phi: Vec<(f64, f64)> = report.phi.0.clone();
    phi.sort_by(|a, b| a.0.total_cmp(&b.0));
    let phi_decreasing = phi.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(GlobalExistenceReport {
        consecutive_distances: consecutive,
        distances_decreasing,
        finest_hamiltonian_residual: finest.max_residual_ham.unwrap_or(f64::NAN) / h0,
        lp_alpha_violation,
        phi,
        phi_decreasing,
    })
}
