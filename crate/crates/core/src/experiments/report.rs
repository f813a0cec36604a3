//! The sweep report and its JSON form.

use std::fmt;
use std::path::Path;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Result;

use super::config::SweepConfig;

/// Real-keyed values, serialized as a JSON object with keys in insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Keyed(pub Vec<(f64, f64)>);

impl Keyed {
    pub fn get(&self, key: f64) -> Option<f64> {
        self.0
            .iter()
            .find(|(k, _)| *k == key || (k - key).abs() <= 1e-12 * k.abs())
            .map(|&(_, v)| v)
    }

    pub fn keys(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().map(|&(k, _)| k)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().map(|&(_, v)| v)
    }

    pub fn push(&mut self, k: f64, v: f64) {
        self.0.push((k, v));
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(f64, f64)> for Keyed {
    fn from_iter<I: IntoIterator<Item = (f64, f64)>>(iter: I) -> Self {
        Keyed(iter.into_iter().collect())
    }
}

impl Serialize for Keyed {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            // JSON has no NaN or infinity; non-finite values become null.
            let v = if v.is_finite() { Some(*v) } else { None };
            map.serialize_entry(&k.to_string(), &v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Keyed {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Keyed;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object with numeric keys")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Keyed, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, Option<f64>>()? {
                    let key = k
                        .parse::<f64>()
                        .map_err(|_| serde::de::Error::custom(format!("non-numeric key {k:?}")))?;
                    out.push((key, v.unwrap_or(f64::NAN)));
                }
                Ok(Keyed(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineUsed {
    Grid,
    Lattice,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberReport {
    pub nu: f64,
    pub engine: EngineUsed,
    /// Grid size (grid engine) or lattice extent `max |n_i|` (lattice engine).
    #[serde(rename = "M")]
    pub grid_size: usize,
    pub dt: Option<f64>,
    pub steps: Option<u64>,
    /// `N_nu = nu^{-1/(2 gamma)}`.
    pub critical_frequency: f64,
    #[serde(rename = "D")]
    pub d: Option<f64>,
    /// `nu int_0^nu |theta|^2_{H^{gamma-alpha}}`; lattice engine only.
    #[serde(rename = "D_nu")]
    pub d_self: Option<f64>,
    #[serde(rename = "D_delta")]
    pub d_delta: Keyed,
    /// Keyed by delta; the `0` entry is the unrestricted integral.
    #[serde(rename = "H")]
    pub h: Keyed,
    /// Keyed by lambda.
    pub tails: Keyed,
    pub unresolved_lambdas: Vec<f64>,
    /// `int_0^T |theta_{>N}|^2_{H^-alpha}`, keyed by N.
    pub phi: Keyed,
    /// `int_0^T |theta|^2_{H^s}`, keyed by s.
    pub sobolev_integrals: Keyed,
    pub initial_hamiltonian: Option<f64>,
    pub max_residual_ham: Option<f64>,
    pub max_residual_l2: Option<f64>,
    /// Worst `L^p` monotonicity violation relative to `|theta_0|_p`, keyed by p.
    pub lp_violation: Keyed,
    pub flags: Vec<String>,
    /// Series CSV file name inside the output directory.
    pub series: Option<String>,
}

impl MemberReport {
    pub fn completed(&self) -> bool {
        self.d.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyEntry {
    pub nu_i: f64,
    pub nu_j: f64,
    /// `|theta^{nu_i} - theta^{nu_j}|_{L^2([0,T]; H^-alpha)}`.
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub config: SweepConfig,
    pub per_nu: Vec<MemberReport>,
    /// `Phi(N) = max_nu int_0^T |theta_{>N}|^2_{H^-alpha}`, keyed by N.
    pub phi: Keyed,
    pub cauchy: Vec<CauchyEntry>,
}

impl SweepReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn completed(&self) -> impl Iterator<Item = &MemberReport> {
        self.per_nu.iter().filter(|m| m.completed())
    }

    pub fn cauchy_distance(&self, nu_i: f64, nu_j: f64) -> Option<f64> {
        self.cauchy
            .iter()
            .find(|c| (c.nu_i == nu_i && c.nu_j == nu_j) || (c.nu_i == nu_j && c.nu_j == nu_i))
            .map(|c| c.distance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyed_json_round_trip() {
        let k: Keyed = vec![(0.5, 1.0), (2.0, 3.5), (f64::INFINITY, 0.25)].into_iter().collect();
        let text = serde_json::to_string(&k).unwrap();
        assert_eq!(text, r#"{"0.5":1.0,"2":3.5,"inf":0.25}"#);
        let back: Keyed = serde_json::from_str(&text).unwrap();
        assert_eq!(back, k);
        assert_eq!(back.get(2.0), Some(3.5));
        let nan: Keyed = vec![(1.0, f64::NAN)].into_iter().collect();
        assert_eq!(serde_json::to_string(&nan).unwrap(), r#"{"1":null}"#);
    }
}
