//! Sweep configuration, read from TOML.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;
use crate::nonlinearity::DealiasPolicy;

use super::counterexample::RadialBump;
use super::initial::InitialRecipe;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub problem: ProblemSection,
    pub sweep: SweepSection,
    pub initial: InitialSection,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub alpha: f64,
    pub gamma: f64,
    #[serde(default = "yes")]
    pub nonlinear: bool,
    #[serde(default = "default_cutoff")]
    pub cutoff_fraction: f64,
}

/// How each viscosity member is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Lattice for linear, unforced bump families; grid otherwise.
    #[default]
    Auto,
    /// Pseudo-spectral integration on the `M(nu)` grid.
    Grid,
    /// Closed-form per-mode evolution on the integer lattice (linear, unforced only).
    Lattice,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub nus: Vec<f64>,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub deltas: Vec<f64>,
    pub lambdas: Vec<f64>,
    #[serde(rename = "Ns")]
    pub ns: Vec<f64>,
    #[serde(rename = "M_cap")]
    pub m_cap: usize,
    #[serde(rename = "M_min", default = "default_m_min")]
    pub m_min: usize,
    /// Number of sample intervals on `[0, T]`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Upper bound on the step; the CFL estimate may choose a smaller one.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub engine: Engine,
    /// Fraction of the initial-`nu` value under which a quantity counts as vanishing.
    #[serde(default = "default_fraction")]
    pub vanish_fraction: f64,
    /// Allowed `sup_nu D_delta / D(nu_max)` at the smallest `delta`.
    #[serde(default = "default_fraction")]
    pub instant_fraction: f64,
    /// Slope tolerance of the higher-order bound trend.
    #[serde(default = "default_slope_tol")]
    pub slope_tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    Modes,
    Bump,
    Rough,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub kind: InitialKind,
    #[serde(default = "empty_table")]
    pub parameters: toml::Value,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: default_dir() }
    }
}

fn yes() -> bool {
    true
}
fn default_cutoff() -> f64 {
    2.0 / 3.0
}
fn default_m_min() -> usize {
    32
}
fn default_samples() -> usize {
    100
}
fn default_fraction() -> f64 {
    0.05
}
fn default_slope_tol() -> f64 {
    0.2
}
fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn empty_table() -> toml::Value {
    toml::Value::Table(Default::default())
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn dealias(&self) -> DealiasPolicy {
        DealiasPolicy::new(self.problem.cutoff_fraction)
    }

    pub fn recipe(&self) -> Result<InitialRecipe> {
        InitialRecipe::from_section(&self.initial, self.problem.alpha)
    }

    /// Bump geometry shared by the members, for bump data.
    pub fn bump(&self) -> Result<Option<RadialBump>> {
        Ok(match self.recipe()? {
            InitialRecipe::Bump(p) => Some(RadialBump::for_sweep(
                &p,
                self.problem.alpha,
                self.problem.gamma,
                *self.sweep.nus.first().ok_or_else(|| Error::Config("sweep.nus is empty".into()))?,
            )),
            _ => None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let p = &self.problem;
        if !(p.alpha > 0.0 && p.alpha <= 1.0) {
            return bad(format!("problem.alpha = {} not in (0, 1]", p.alpha));
        }
        if !(p.gamma > 0.0 && p.gamma.is_finite()) {
            return bad(format!("problem.gamma = {} must be positive", p.gamma));
        }
        let s = &self.sweep;
        if s.nus.is_empty() {
            return bad("sweep.nus is empty".into());
        }
        if s.nus.iter().any(|&nu| !(nu > 0.0 && nu < 1.0)) {
            return bad("every viscosity must lie in (0, 1)".into());
        }
        if s.nus.windows(2).any(|w| w[1] >= w[0]) {
            return bad("sweep.nus must be strictly decreasing".into());
        }
        if !(s.t_end > 0.0 && s.t_end.is_finite()) {
            return bad("sweep.T must be positive".into());
        }
        if s.deltas.iter().any(|&d| !(d > 0.0 && d < s.t_end)) {
            return bad("every delta must lie in (0, T)".into());
        }
        if s.lambdas.iter().chain(&s.ns).any(|&v| !(v > 0.0 && v.is_finite())) {
            return bad("lambdas and Ns must be positive".into());
        }
        if s.samples == 0 {
            return bad("sweep.samples must be at least 1".into());
        }
        if s.m_cap < 8 || !s.m_cap.is_power_of_two() || !s.m_min.is_power_of_two() {
            return bad("M_cap and M_min must be powers of two, M_cap >= 8".into());
        }
        if let Some(dt) = s.dt {
            if !(dt > 0.0) {
                return bad("sweep.dt must be positive".into());
            }
        }
        for f in [s.vanish_fraction, s.instant_fraction] {
            if !(f > 0.0 && f < 1.0) {
                return bad("threshold fractions must lie in (0, 1)".into());
            }
        }
        if !(p.cutoff_fraction > 0.0 && p.cutoff_fraction <= 1.0) {
            return bad("cutoff_fraction must lie in (0, 1]".into());
        }
        if self.sweep.engine == Engine::Lattice && !self.lattice_eligible() {
            return bad("the lattice engine needs nonlinear = false, zero forcing and a bump datum".into());
        }
        self.recipe()?;
        Ok(())
    }

    pub fn lattice_eligible(&self) -> bool {
        !self.problem.nonlinear && self.forcing.is_zero() && self.initial.kind == InitialKind::Bump
    }

    pub fn uses_lattice(&self) -> bool {
        match self.sweep.engine {
            Engine::Lattice => true,
            Engine::Grid => false,
            Engine::Auto => self.lattice_eligible(),
        }
    }

    /// Dissipative frequency `N_nu = nu^{-1/(2 gamma)}`.
    pub fn critical_frequency(&self, nu: f64) -> f64 {
        nu.powf(-1.0 / (2.0 * self.problem.gamma))
    }

    /// Smallest power of two with `radius(M) >= 2 N_nu`, at least `M_min`, capped at `M_cap`.
    /// The flag is true when the cap binds.
    pub fn grid_size(&self, nu: f64) -> (usize, bool) {
        let need = 2.0 * self.critical_frequency(nu);
        let policy = self.dealias();
        let mut m = self.sweep.m_min.max(8);
        while policy.radius(m) < need && m < self.sweep.m_cap {
            m *= 2;
        }
        let m = m.min(self.sweep.m_cap);
        (m, policy.radius(m) < need)
    }

    /// Sample times `k T / samples`.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = self.sweep.samples;
        (0..=n).map(|k| self.sweep.t_end * k as f64 / n as f64).collect()
    }

    /// Index of the sample time nearest to `t`.
    pub fn snap_index(&self, t: f64) -> usize {
        let n = self.sweep.samples as f64;
        ((t / self.sweep.t_end * n).round() as usize).min(self.sweep.samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = r#"
        [problem]
        alpha = 0.5
        gamma = 0.5

        [sweep]
        nus = [0.2, 0.1]
        T = 0.5
        deltas = [0.1]
        lambdas = [1.0]
        Ns = [2.0, 4.0]
        M_cap = 64

        [initial]
        kind = "modes"
        parameters = { modes = [{ n = [1, 0], re = 0.2, im = 0.0 }] }

        [output]
        dir = "toy"
    "#;

    #[test]
    fn parses_and_defaults() {
        let c = SweepConfig::from_toml(TOY).unwrap();
        assert_eq!(c.sweep.samples, 100);
        assert!(c.problem.nonlinear);
        assert!(c.forcing.is_zero());
        assert!(!c.uses_lattice());
        assert_eq!(c.output.dir, PathBuf::from("toy"));
    }

    #[test]
    fn rejects_bad_sweeps() {
        let inc = TOY.replace("nus = [0.2, 0.1]", "nus = [0.1, 0.2]");
        assert!(matches!(SweepConfig::from_toml(&inc), Err(Error::Config(_))));
        let big = TOY.replace("nus = [0.2, 0.1]", "nus = [1.5]");
        assert!(SweepConfig::from_toml(&big).is_err());
        let delta = TOY.replace("deltas = [0.1]", "deltas = [0.7]");
        assert!(SweepConfig::from_toml(&delta).is_err());
        let typo = TOY.replace("M_cap", "Mcap");
        assert!(SweepConfig::from_toml(&typo).is_err());
    }

    #[test]
    fn grid_rule() {
        let c = SweepConfig::from_toml(TOY).unwrap();
        // N = 1/nu for gamma = 1/2; radius(M) = M/3 must reach 2N.
        assert_eq!(c.grid_size(0.2), (32, false));
        assert_eq!(c.grid_size(0.05), (64, true));
        assert_eq!(c.snap_index(0.1), 20);
    }
}
