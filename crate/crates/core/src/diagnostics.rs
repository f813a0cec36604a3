//! Per-run norms, the two energy balances, `L^p` monotonicity and decay envelopes.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;
use crate::integrator::{SimParams, TrajectoryState};
use crate::spectral::{critical_exponent, SpectralField};

/// CSV column order of a [`DiagnosticSeries`].
pub const CSV_COLUMNS: [&str; 14] = [
    "t",
    "h_minus_alpha",
    "l2",
    "h_gamma_minus_alpha",
    "h_gamma",
    "lp_alpha",
    "l1",
    "linf",
    "pair_ham",
    "pair_l2",
    "cum_diss_ham",
    "cum_diss_l2",
    "res_ham",
    "res_l2",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSample {
    pub t: f64,
    pub h_minus_alpha: f64,
    pub l2: f64,
    pub h_gamma_minus_alpha: f64,
    pub h_gamma: f64,
    pub lp_alpha: f64,
    pub l1: f64,
    pub linf: f64,
    /// `<f, theta>_{H^{-alpha}}` at `t`.
    pub pair_ham: f64,
    /// `<f, theta>_{L^2}` at `t`.
    pub pair_l2: f64,
    pub cum_diss_ham: f64,
    pub cum_diss_l2: f64,
    pub cum_pair_ham: f64,
    pub cum_pair_l2: f64,
}

impl DiagnosticSample {
    /// Measures `state` given the force `f` evaluated at `state.t`.
    pub fn measure(state: &TrajectoryState, params: &SimParams, f: &SpectralField) -> Result<Self> {
        let theta = &state.field;
        let (a, g) = (params.alpha, params.gamma);
        let grid = theta.to_physical();
        Ok(DiagnosticSample {
            t: state.t,
            h_minus_alpha: theta.sobolev_norm(-a),
            l2: theta.sobolev_norm(0.0),
            h_gamma_minus_alpha: theta.sobolev_norm(g - a),
            h_gamma: theta.sobolev_norm(g),
            lp_alpha: grid.lp_norm(critical_exponent(a))?,
            l1: grid.lp_norm(1.0)?,
            linf: grid.lp_norm(f64::INFINITY)?,
            pair_ham: f.inner_product_hs(theta, -a)?,
            pair_l2: f.inner_product_hs(theta, 0.0)?,
            cum_diss_ham: state.integrals.diss_ham,
            cum_diss_l2: state.integrals.diss_l2,
            cum_pair_ham: state.integrals.pair_ham,
            cum_pair_l2: state.integrals.pair_l2,
        })
    }

    /// `L^p` norm recorded for `p` in `{1, p_alpha, 2, inf}`.
    pub fn lp(&self, which: LpExponent) -> f64 {
        match which {
            LpExponent::One => self.l1,
            LpExponent::Critical => self.lp_alpha,
            LpExponent::Two => self.l2,
            LpExponent::Infinity => self.linf,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpExponent {
    One,
    Critical,
    Two,
    Infinity,
}

impl LpExponent {
    pub const ALL: [LpExponent; 4] = [LpExponent::One, LpExponent::Critical, LpExponent::Two, LpExponent::Infinity];

    pub fn value(self, alpha: f64) -> f64 {
        match self {
            LpExponent::One => 1.0,
            LpExponent::Critical => critical_exponent(alpha),
            LpExponent::Two => 2.0,
            LpExponent::Infinity => f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSeries {
    pub alpha: f64,
    pub gamma: f64,
    pub nu: f64,
    pub samples: Vec<DiagnosticSample>,
}

impl DiagnosticSeries {
    pub fn new(alpha: f64, gamma: f64, nu: f64) -> Self {
        DiagnosticSeries {
            alpha,
            gamma,
            nu,
            samples: Vec::new(),
        }
    }

    pub fn push(&mut self, s: DiagnosticSample) {
        self.samples.push(s);
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn first(&self) -> Option<&DiagnosticSample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&DiagnosticSample> {
        self.samples.last()
    }

    fn res_ham(&self, s: &DiagnosticSample) -> f64 {
        let h0 = self.samples[0].h_minus_alpha;
        0.5 * s.h_minus_alpha * s.h_minus_alpha + s.cum_diss_ham - 0.5 * h0 * h0 - s.cum_pair_ham
    }

    fn res_l2(&self, s: &DiagnosticSample) -> f64 {
        let l0 = self.samples[0].l2;
        0.5 * s.l2 * s.l2 + s.cum_diss_l2 - 0.5 * l0 * l0 - s.cum_pair_l2
    }

    /// Strictly increasing times and finite, nonnegative norms.
    pub fn check_invariants(&self) -> Result<()> {
        for w in self.samples.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::InvalidParams(format!("sample times not increasing at t = {}", w[1].t)));
            }
        }
        for s in &self.samples {
            let norms = [s.h_minus_alpha, s.l2, s.h_gamma_minus_alpha, s.h_gamma, s.lp_alpha, s.l1, s.linf];
            if norms.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidParams(format!("invalid norm at t = {}", s.t)));
            }
        }
        Ok(())
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{}", CSV_COLUMNS.join(","))?;
        for s in &self.samples {
            let row = [
                s.t,
                s.h_minus_alpha,
                s.l2,
                s.h_gamma_minus_alpha,
                s.h_gamma,
                s.lp_alpha,
                s.l1,
                s.linf,
                s.pair_ham,
                s.pair_l2,
                s.cum_diss_ham,
                s.cum_diss_l2,
                self.res_ham(s),
                self.res_l2(s),
            ];
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the CSV form. The cumulative pairing integrals are recovered from the
    /// residual columns, so `from_csv(to_csv(s))` reproduces `s` up to rounding.
    pub fn from_csv(r: impl BufRead, alpha: f64, gamma: f64, nu: f64) -> Result<Self> {
        let bad = |reason: String| Error::Format {
            path: "<diagnostics csv>".into(),
            reason,
        };
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))??;
        let names: Vec<&str> = header.trim().split(',').collect();
        if names != CSV_COLUMNS {
            return Err(bad(format!("unexpected header: {header}")));
        }
        let mut series = DiagnosticSeries::new(alpha, gamma, nu);
        let mut rows = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| bad(format!("{c}: {e}"))))
                .collect::<Result<_>>()?;
            if v.len() != CSV_COLUMNS.len() {
                return Err(bad(format!("row has {} cells", v.len())));
            }
            rows.push(v);
        }
        let (h0, l0) = match rows.first() {
            Some(r) => (r[1], r[2]),
            None => return Ok(series),
        };
        for v in rows {
            series.push(DiagnosticSample {
                t: v[0],
                h_minus_alpha: v[1],
                l2: v[2],
                h_gamma_minus_alpha: v[3],
                h_gamma: v[4],
                lp_alpha: v[5],
                l1: v[6],
                linf: v[7],
                pair_ham: v[8],
                pair_l2: v[9],
                cum_diss_ham: v[10],
                cum_diss_l2: v[11],
                cum_pair_ham: 0.5 * v[1] * v[1] + v[10] - 0.5 * h0 * h0 - v[12],
                cum_pair_l2: 0.5 * v[2] * v[2] + v[11] - 0.5 * l0 * l0 - v[13],
            });
        }
        Ok(series)
    }
}

/// A balance residual as a function of the sample times after the first.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ResidualSeries {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BalanceResidual {
    pub hamiltonian: ResidualSeries,
    pub l2: ResidualSeries,
}

impl BalanceResidual {
    pub fn of(series: &DiagnosticSeries) -> Self {
        BalanceResidual {
            hamiltonian: hamiltonian_balance_residual(series),
            l2: l2_balance_residual(series),
        }
    }
}

fn residual_series(series: &DiagnosticSeries, f: impl Fn(&DiagnosticSample) -> f64) -> ResidualSeries {
    let rest = series.samples.get(1..).unwrap_or(&[]);
    ResidualSeries {
        times: rest.iter().map(|s| s.t).collect(),
        values: rest.iter().map(f).collect(),
    }
}

/// `1/2 |theta(t)|^2_{H^-alpha} + nu int |theta|^2_{H^{gamma-alpha}} - 1/2 |theta_0|^2_{H^-alpha} - int <f,theta>_{H^-alpha}`.
pub fn hamiltonian_balance_residual(series: &DiagnosticSeries) -> ResidualSeries {
    residual_series(series, |s| series.res_ham(s))
}

/// `1/2 |theta(t)|^2 + nu int |theta|^2_{H^gamma} - 1/2 |theta_0|^2 - int <f,theta>`.
pub fn l2_balance_residual(series: &DiagnosticSeries) -> ResidualSeries {
    residual_series(series, |s| series.res_l2(s))
}

/// Cumulative composite trapezoid integral; `out[0] = 0`.
pub fn cumulative_trapezoid(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    for k in 0..t.len() {
        if k > 0 {
            acc += 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
        }
        out.push(acc);
    }
    out
}

/// Composite trapezoid integral over all of `t`.
pub fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    cumulative_trapezoid(t, y).last().copied().unwrap_or(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpViolation {
    pub exponent: LpExponent,
    pub p: f64,
    /// `max_t (|theta(t)|_p - |theta_0|_p - int_0^t |f|_p)`.
    pub violation: f64,
    pub initial_norm: f64,
    /// Bound on the trapezoid error in `int |f|_p`, from a per-interval midpoint comparison.
    pub quadrature_allowance: f64,
}

impl LpViolation {
    /// `1e-6 |theta_0|_p` plus the quadrature allowance.
    pub fn tolerance(&self) -> f64 {
        1e-6 * self.initial_norm + self.quadrature_allowance
    }

    pub fn holds(&self) -> bool {
        self.violation <= self.tolerance()
    }
}

/// Worst violation of `|theta(t)|_p <= |theta_0|_p + int_0^t |f|_p` for `p` in `{1, p_alpha, 2, inf}`.
pub fn lp_monotonicity_check(
    series: &DiagnosticSeries,
    forcing: &ForcingSpec,
    grid_size: usize,
) -> Result<Vec<LpViolation>> {
    let s0 = *series.first().ok_or(Error::TooFewSamples { need: 1, got: 0 })?;
    let times = series.times();
    let mut out = Vec::with_capacity(4);
    for which in LpExponent::ALL {
        let p = which.value(series.alpha);
        let (f_int, allowance) = if forcing.is_zero() {
            (vec![0.0; times.len()], 0.0)
        } else {
            let norm_at = |t: f64| -> Result<f64> { forcing.evaluate(t, grid_size)?.lp_norm(p) };
            let fp = times.iter().map(|&t| norm_at(t)).collect::<Result<Vec<_>>>()?;
            let mut allowance = 0.0;
            for k in 1..times.len() {
                let h = times[k] - times[k - 1];
                let mid = norm_at(0.5 * (times[k] + times[k - 1]))?;
                allowance += (0.5 * h * (fp[k] + fp[k - 1]) - h * mid).abs();
            }
            (cumulative_trapezoid(&times, &fp), allowance)
        };
        let violation = series
            .samples
            .iter()
            .zip(&f_int)
            .map(|(s, fi)| s.lp(which) - s0.lp(which) - fi)
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(LpViolation {
            exponent: which,
            p,
            violation,
            initial_norm: s0.lp(which),
            quadrature_allowance: allowance,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayEnvelope {
    /// Least-squares slope of `log |theta|^2` against `log t` on `[delta, T]`.
    pub slope: f64,
    /// `sup_{t in [delta, T]} (nu t)^{alpha/gamma} |theta(t)|^2`.
    pub constant: f64,
}

/// Decay fit over the samples with `t >= delta`; needs at least two such samples.
pub fn decay_envelope_check(series: &DiagnosticSeries, delta: f64) -> Result<DecayEnvelope> {
    let tail: Vec<&DiagnosticSample> = series
        .samples
        .iter()
        .filter(|s| s.t >= delta * (1.0 - 1e-12) && s.t > 0.0)
        .collect();
    if tail.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: tail.len() });
    }
    let xs: Vec<f64> = tail.iter().map(|s| s.t.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|s| (s.l2 * s.l2).ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    let expo = series.alpha / series.gamma;
    let constant = tail
        .iter()
        .map(|s| (series.nu * s.t).powf(expo) * s.l2 * s.l2)
        .fold(0.0, f64::max);
    Ok(DecayEnvelope { slope, constant })
}

/// Slope of the ordinary least-squares line through `(x, y)`; NaN if degenerate.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::{ForcingEntry, TimeProfile};
    use crate::integrator::run;
    use crate::spectral::Wavenumber;
    use num_complex::Complex64;

    fn single_mode(m: usize) -> SpectralField {
        SpectralField::from_modes(m, &[(Wavenumber::new(1, 2), Complex64::new(0.4, -0.1))]).unwrap()
    }

    #[test]
    fn pure_dissipation_balances_close() {
        let p = SimParams::new(0.5, 1.0, 0.2, 16, 0.01, 1.0).with_stride(10);
        let s = run(&single_mode(16), &p, &ForcingSpec::zero(), &mut []).unwrap();
        assert!(hamiltonian_balance_residual(&s).max_abs() < 1e-10);
        assert!(l2_balance_residual(&s).max_abs() < 1e-10);
        assert_eq!(hamiltonian_balance_residual(&s).values.len(), s.len() - 1);
    }

    #[test]
    fn inviscid_unforced_residual_is_drift() {
        let p = SimParams::new(0.5, 1.0, 0.0, 16, 0.01, 0.2);
        let s = run(&single_mode(16), &p, &ForcingSpec::zero(), &mut []).unwrap();
        let r = hamiltonian_balance_residual(&s);
        let first = s.first().unwrap().h_minus_alpha;
        let last = s.last().unwrap().h_minus_alpha;
        assert_eq!(*r.values.last().unwrap(), 0.5 * last * last - 0.5 * first * first);
    }

    #[test]
    fn csv_round_trip_and_columns() {
        let f = ForcingSpec::new(vec![ForcingEntry::new(
            Wavenumber::new(1, 0),
            Complex64::new(0.1, 0.0),
            TimeProfile::Constant,
        )]);
        let p = SimParams::new(0.5, 1.0, 0.1, 16, 0.05, 0.5);
        let s = run(&single_mode(16), &p, &f, &mut []).unwrap();
        let text = s.to_csv();
        assert!(text.starts_with(
            "t,h_minus_alpha,l2,h_gamma_minus_alpha,h_gamma,lp_alpha,l1,linf,pair_ham,pair_l2,cum_diss_ham,cum_diss_l2,res_ham,res_l2\n"
        ));
        let back = DiagnosticSeries::from_csv(text.as_bytes(), 0.5, 1.0, 0.1).unwrap();
        assert_eq!(back.len(), s.len());
        for (a, b) in back.samples.iter().zip(&s.samples) {
            assert_eq!(a.t, b.t);
            assert_eq!(a.l2, b.l2);
            assert!((a.cum_pair_l2 - b.cum_pair_l2).abs() < 1e-14);
        }
        assert!(DiagnosticSeries::from_csv("t,x\n".as_bytes(), 0.5, 1.0, 0.1).is_err());
    }

    #[test]
    fn single_mode_lp_monotone() {
        let p = SimParams::new(0.5, 1.0, 0.1, 16, 0.05, 1.0);
        let s = run(&single_mode(16), &p, &ForcingSpec::zero(), &mut []).unwrap();
        for v in lp_monotonicity_check(&s, &ForcingSpec::zero(), 16).unwrap() {
            assert!(v.violation <= 0.0, "{v:?}");
        }
    }

    #[test]
    fn decay_envelope_needs_samples() {
        let p = SimParams::new(0.5, 1.0, 0.1, 16, 0.05, 1.0).with_stride(5);
        let s = run(&single_mode(16), &p, &ForcingSpec::zero(), &mut []).unwrap();
        let e = decay_envelope_check(&s, 0.1).unwrap();
        assert!(e.constant.is_finite() && e.constant > 0.0);
        assert!(matches!(
            decay_envelope_check(&s, 0.99),
            Err(Error::TooFewSamples { need: 2, got: 1 })
        ));
    }

    #[test]
    fn trapezoid_exact_on_lines() {
        let t = [0.0, 0.5, 1.5];
        let y = [1.0, 2.0, 4.0];
        assert_eq!(cumulative_trapezoid(&t, &y), vec![0.0, 0.75, 3.75]);
    }
}
