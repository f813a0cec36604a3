//! Bundled sweep presets and the verdicts read off their reports.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::least_squares_slope;
use crate::error::{Error, Result};

use super::checks::{
    frequency_equivalence_check, higher_order_bound_check, higher_order_trend, no_instant_dissipation_check,
    summarize_global_existence, EquivalenceReport, GlobalExistenceReport, HigherOrderVerdict, InstantDissipationTable,
};
use super::config::SweepConfig;
use super::report::{Keyed, SweepReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Smooth band-limited datum, SQG transport, critical dissipation.
    SmoothCompact,
    /// Self-similar fractional heat family with concentrating data.
    Counterexample,
    /// `gamma = 1` vanishing viscosity from a rough datum.
    GlobalExistence,
    /// Parameters outside the higher-order-bound regime; members may be flagged.
    SupercriticalProbe,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::SmoothCompact,
        Scenario::Counterexample,
        Scenario::GlobalExistence,
        Scenario::SupercriticalProbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::SmoothCompact => "smooth-compact",
            Scenario::Counterexample => "counterexample",
            Scenario::GlobalExistence => "global-existence",
            Scenario::SupercriticalProbe => "supercritical-probe",
        }
    }

    pub fn toml(self) -> &'static str {
        match self {
            Scenario::SmoothCompact => include_str!("../../scenarios/smooth-compact.toml"),
            Scenario::Counterexample => include_str!("../../scenarios/counterexample.toml"),
            Scenario::GlobalExistence => include_str!("../../scenarios/global-existence.toml"),
            Scenario::SupercriticalProbe => include_str!("../../scenarios/supercritical-probe.toml"),
        }
    }

    pub fn config(self) -> SweepConfig {
        SweepConfig::from_toml(self.toml()).expect("bundled scenario config is valid")
    }

    pub fn verdicts(self, report: &SweepReport) -> Result<ScenarioVerdicts> {
        match self {
            Scenario::SmoothCompact => smooth_compact(report),
            Scenario::Counterexample => counterexample(report),
            Scenario::GlobalExistence => Ok(ScenarioVerdicts::GlobalExistence(summarize_global_existence(report)?)),
            Scenario::SupercriticalProbe => Ok(ScenarioVerdicts::SupercriticalProbe {
                flagged: report
                    .per_nu
                    .iter()
                    .filter(|m| !m.flags.is_empty())
                    .map(|m| (m.nu, m.flags.clone()))
                    .collect(),
                dissipation: report.completed().map(|m| (m.nu, m.d.unwrap_or(f64::NAN))).collect(),
                equivalence: frequency_equivalence_check(report),
            }),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "kebab-case")]
pub enum ScenarioVerdicts {
    SmoothCompact {
        /// `D(nu_final) / D(nu_initial)`.
        dissipation_ratio: f64,
        dissipation_decreasing: bool,
        /// `tail(nu_final, lambda) / tail(nu_initial, lambda)`, keyed by lambda.
        tail_ratios: Keyed,
        higher_order: HigherOrderVerdict,
        instant: InstantDissipationTable,
        equivalence: EquivalenceReport,
    },
    Counterexample {
        /// `max D_nu / min D_nu - 1` over the sweep.
        self_dissipation_spread: f64,
        /// `D(nu_final) / D(nu_initial)`.
        dissipation_ratio: f64,
        /// Fitted slope of `log (int_0^T |theta^nu|^2_{H^s} / int_0^{T/nu} |Theta|^2_{H^s})`
        /// against `log nu`, keyed by s; `Theta` is the unit-viscosity member on the plane.
        norm_exponents: Keyed,
        /// Same fit without dividing out the plane integral.
        raw_norm_exponents: Keyed,
        /// Worst relative gap of the rescaling identity over the sweep, keyed by s.
        scaling_identity_error: Keyed,
        /// Fitted slope of `log (H(nu, 0) / int_0^{T/nu} |Theta|^2_{H^gamma})` against `log nu`.
        unrestricted_h_slope: f64,
        /// Fitted slope of `log H(nu, 0)` against `log nu`.
        raw_unrestricted_h_slope: f64,
        equivalence: EquivalenceReport,
    },
    GlobalExistence(GlobalExistenceReport),
    SupercriticalProbe {
        flagged: Vec<(f64, Vec<String>)>,
        dissipation: Vec<(f64, f64)>,
        equivalence: EquivalenceReport,
    },
}

fn dissipation(report: &SweepReport) -> Vec<f64> {
    report.completed().map(|m| m.d.expect("completed")).collect()
}

fn ratio_last_first(v: &[f64]) -> f64 {
    match (v.first(), v.last()) {
        (Some(a), Some(b)) => b / a,
        _ => f64::NAN,
    }
}

fn smooth_compact(report: &SweepReport) -> Result<ScenarioVerdicts> {
    let d = dissipation(report);
    let members: Vec<_> = report.completed().collect();
    let tail_ratios = report
        .config
        .sweep
        .lambdas
        .iter()
        .map(|&l| {
            let tails: Vec<f64> = members.iter().map(|m| m.tails.get(l).unwrap_or(f64::NAN)).collect();
            (l, ratio_last_first(&tails))
        })
        .collect();
    Ok(ScenarioVerdicts::SmoothCompact {
        dissipation_ratio: ratio_last_first(&d),
        dissipation_decreasing: d.windows(2).all(|w| w[1] < w[0]),
        tail_ratios,
        higher_order: higher_order_bound_check(report, 0.1 * report.config.sweep.t_end)?,
        instant: no_instant_dissipation_check(report)?,
        equivalence: frequency_equivalence_check(report),
    })
}

fn counterexample(report: &SweepReport) -> Result<ScenarioVerdicts> {
    let bump = report
        .config
        .bump()?
        .ok_or_else(|| Error::Config("the counterexample verdicts need a bump datum".into()))?;
    let t_end = report.config.sweep.t_end;
    let members: Vec<_> = report.completed().collect();
    let selfd: Vec<f64> = members.iter().filter_map(|m| m.d_self).collect();
    if selfd.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: selfd.len() });
    }
    let hi = selfd.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = selfd.iter().copied().fold(f64::INFINITY, f64::min);
    let xs: Vec<f64> = members.iter().map(|m| m.nu.ln()).collect();
    let indices: Vec<f64> = members[0].sobolev_integrals.keys().collect();
    let mut norm_exponents = Keyed::default();
    let mut raw_norm_exponents = Keyed::default();
    let mut scaling_identity_error = Keyed::default();
    for &s in &indices {
        let mut raw = Vec::new();
        let mut scaled = Vec::new();
        let mut worst = 0.0f64;
        for m in &members {
            let v = m.sobolev_integrals.get(s).unwrap_or(f64::NAN);
            let plane = bump.plane_norm_integral(s, t_end / m.nu);
            raw.push(v.ln());
            scaled.push((v / plane).ln());
            worst = worst.max((v / bump.rescaled_norm_integral(m.nu, s, t_end) - 1.0).abs());
        }
        raw_norm_exponents.push(s, least_squares_slope(&xs, &raw));
        norm_exponents.push(s, least_squares_slope(&xs, &scaled));
        scaling_identity_error.push(s, worst);
    }
    let gamma = report.config.problem.gamma;
    let (_, raw_h) = higher_order_trend(report, 0.0)?;
    let h_scaled: Vec<f64> = members
        .iter()
        .map(|m| (m.h.get(0.0).unwrap_or(f64::NAN) / bump.plane_norm_integral(gamma, t_end / m.nu)).ln())
        .collect();
    Ok(ScenarioVerdicts::Counterexample {
        self_dissipation_spread: hi / lo - 1.0,
        dissipation_ratio: ratio_last_first(&dissipation(report)),
        norm_exponents,
        raw_norm_exponents,
        scaling_identity_error,
        unrestricted_h_slope: least_squares_slope(&xs, &h_scaled),
        raw_unrestricted_h_slope: raw_h,
        equivalence: frequency_equivalence_check(report),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_config_parses_and_validates() {
        for s in Scenario::ALL {
            let cfg = s.config();
            cfg.validate().unwrap();
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert!("laminar".parse::<Scenario>().is_err());
    }
}
