//! Finite-mode, time-dependent body forces with zero spatial mean.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::DealiasPolicy;
use crate::spectral::{SpectralField, Wavenumber};

/// Closed-form amplitude profile `a(t)` multiplying a complex amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "lowercase")]
pub enum TimeProfile {
    Constant,
    /// `sin(omega t + phase)`.
    Sinusoidal { omega: f64, phase: f64 },
    /// `1 - exp(-t / tau)`.
    Ramp { tau: f64 },
    /// `exp(-rate t)`.
    Exponential { rate: f64 },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Sinusoidal { omega, phase } => (omega * t + phase).sin(),
            TimeProfile::Ramp { tau } => 1.0 - (-t / tau).exp(),
            TimeProfile::Exponential { rate } => (-rate * t).exp(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForcingEntry {
    /// Wavevector; the conjugate at `-n` is implied.
    pub n: [i64; 2],
    pub re: f64,
    pub im: f64,
    #[serde(flatten)]
    pub profile: TimeProfile,
}

impl ForcingEntry {
    pub fn new(n: Wavenumber, amplitude: Complex64, profile: TimeProfile) -> Self {
        ForcingEntry {
            n: [n.n1, n.n2],
            re: amplitude.re,
            im: amplitude.im,
            profile,
        }
    }

    pub fn wavenumber(&self) -> Wavenumber {
        Wavenumber::new(self.n[0], self.n[1])
    }

    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// A list of Hermitian-paired forced modes; the empty list is the zero force.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ForcingSpec {
    #[serde(default)]
    pub entries: Vec<ForcingEntry>,
}

impl ForcingSpec {
    pub fn zero() -> Self {
        ForcingSpec::default()
    }

    pub fn new(entries: Vec<ForcingEntry>) -> Self {
        ForcingSpec { entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.re == 0.0 && e.im == 0.0)
    }

    /// Zero mean and band-limited strictly inside the dealiasing radius.
    pub fn validate(&self, m: usize, policy: &DealiasPolicy) -> Result<()> {
        for e in &self.entries {
            let n = e.wavenumber();
            if n.is_zero() {
                return Err(Error::InvalidParams("forcing on the mean mode".into()));
            }
            if !policy.keeps(n, m) {
                return Err(Error::InvalidParams(format!(
                    "forced mode ({}, {}) lies outside the dealiasing radius {}",
                    n.n1,
                    n.n2,
                    policy.radius(m)
                )));
            }
            if let TimeProfile::Ramp { tau } = e.profile {
                if tau <= 0.0 {
                    return Err(Error::InvalidParams("ramp time scale must be positive".into()));
                }
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, t: f64, m: usize) -> Result<SpectralField> {
        let modes: Vec<_> = self
            .entries
            .iter()
            .map(|e| (e.wavenumber(), e.amplitude() * e.profile.value(t)))
            .collect();
        SpectralField::from_modes(m, &modes)
    }

    pub fn modes(&self) -> impl Iterator<Item = &ForcingEntry> {
        self.entries.iter()
    }
}
