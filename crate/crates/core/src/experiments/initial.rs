//! Initial-data recipes shared by every member of a sweep.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{SpectralField, Wavenumber};

use super::config::{InitialKind, InitialSection};
use super::counterexample::RadialBump;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub n: [i64; 2],
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModesParams {
    modes: Vec<ModeEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpParams {
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Base length `l`; for self-similar families the default fits the coarsest member.
    #[serde(default)]
    pub length: Option<f64>,
    /// Rescale the datum with `nu` as `nu^{-(1+alpha)/gamma} theta_0(x / nu^{1/gamma})`.
    #[serde(default)]
    pub self_similar: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoughParamsToml {
    amplitude: f64,
    #[serde(default)]
    exponent: Option<f64>,
    kmax: f64,
    #[serde(default = "one")]
    kmin: f64,
}

/// `|thetahat(n)| = amplitude |n|^{-exponent}` on `kmin <= |n| <= kmax`, with phases
/// drawn per wavevector from a ChaCha stream keyed by `(seed, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoughParams {
    pub amplitude: f64,
    pub exponent: f64,
    pub kmin: f64,
    pub kmax: f64,
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialRecipe {
    Modes(Vec<(Wavenumber, Complex64)>),
    Bump(BumpParams),
    Rough(RoughParams),
}

impl InitialRecipe {
    pub fn from_section(s: &InitialSection, alpha: f64) -> Result<Self> {
        let cfg = |e: toml::de::Error| Error::Config(format!("initial.parameters: {e}"));
        match s.kind {
            InitialKind::Modes => {
                let p: ModesParams = s.parameters.clone().try_into().map_err(cfg)?;
                if p.modes.is_empty() {
                    return Err(Error::Config("initial.parameters.modes is empty".into()));
                }
                Ok(InitialRecipe::Modes(
                    p.modes
                        .iter()
                        .map(|e| (Wavenumber::new(e.n[0], e.n[1]), Complex64::new(e.re, e.im)))
                        .collect(),
                ))
            }
            InitialKind::Bump => {
                let p: BumpParams = s.parameters.clone().try_into().map_err(cfg)?;
                if let Some(l) = p.length {
                    if !(l > 0.0) {
                        return Err(Error::Config("bump length must be positive".into()));
                    }
                }
                Ok(InitialRecipe::Bump(p))
            }
            InitialKind::Rough => {
                let p: RoughParamsToml = s.parameters.clone().try_into().map_err(cfg)?;
                if !(p.kmax >= p.kmin && p.kmin >= 1.0) {
                    return Err(Error::Config("rough datum needs 1 <= kmin <= kmax".into()));
                }
                Ok(InitialRecipe::Rough(RoughParams {
                    amplitude: p.amplitude,
                    exponent: p.exponent.unwrap_or(1.0 + alpha + 0.05),
                    kmin: p.kmin,
                    kmax: p.kmax,
                    seed: s.seed,
                }))
            }
        }
    }

    /// Largest `|n|` carried by the datum, when bounded.
    pub fn band_limit(&self) -> Option<f64> {
        match self {
            InitialRecipe::Modes(m) => Some(m.iter().map(|(n, _)| n.modulus()).fold(0.0, f64::max)),
            InitialRecipe::Bump(_) => None,
            InitialRecipe::Rough(r) => Some(r.kmax),
        }
    }

    /// The datum for member `nu` on an `m x m` grid. `bump` supplies the resolved
    /// bump geometry (see [`RadialBump::for_sweep`]).
    pub fn field(&self, m: usize, nu: f64, bump: Option<&RadialBump>) -> Result<SpectralField> {
        match self {
            InitialRecipe::Modes(modes) => SpectralField::from_modes(m, modes),
            InitialRecipe::Rough(r) => rough_field(m, r),
            InitialRecipe::Bump(_) => {
                let b = bump.ok_or_else(|| Error::InvalidParams("bump geometry missing".into()))?;
                b.member_field(nu, m)
            }
        }
    }
}

fn rough_field(m: usize, r: &RoughParams) -> Result<SpectralField> {
    let k = r.kmax.floor() as i64;
    if k >= (m / 2) as i64 {
        return Err(Error::InvalidParams(format!("rough datum band {} does not fit M = {m}", r.kmax)));
    }
    let mut modes = Vec::new();
    for n1 in 0..=k {
        for n2 in -k..=k {
            let n = Wavenumber::new(n1, n2);
            let mag = n.modulus();
            if !n.is_lex_positive() || mag < r.kmin || mag > r.kmax {
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
            rng.set_stream(((n1 as u64) << 32) | (n2 as i32 as u32 as u64));
            let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            modes.push((n, Complex64::from_polar(r.amplitude * mag.powf(-r.exponent), phase)));
        }
    }
    SpectralField::from_modes(m, &modes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rough(seed: u64) -> RoughParams {
        RoughParams {
            amplitude: 0.5,
            exponent: 1.55,
            kmin: 1.0,
            kmax: 10.0,
            seed,
        }
    }

    #[test]
    fn rough_is_deterministic_and_grid_independent() {
        let a = rough_field(32, &rough(7)).unwrap();
        let b = rough_field(64, &rough(7)).unwrap();
        assert_eq!(a, rough_field(32, &rough(7)).unwrap());
        for (n, c) in a.modes() {
            assert_eq!(b.coefficient(n), c);
        }
        assert_ne!(a, rough_field(32, &rough(8)).unwrap());
        let n = Wavenumber::new(3, -4);
        assert!((a.coefficient(n).norm() - 0.5 * 5f64.powf(-1.55)).abs() < 1e-15);
        assert!(a.coefficient(Wavenumber::new(8, 8)).norm() == 0.0);
        assert!(rough_field(16, &rough(7)).is_err());
    }
}
