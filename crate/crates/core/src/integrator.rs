//! Integrating-factor RK4 for
//! `d_t theta + u . grad theta + nu (-Delta)^gamma theta = f`, `u = R^perp_alpha theta`.
//!
//! The dissipation is absorbed exactly through `w = e^{nu t (-Delta)^gamma} theta`
//! and classical RK4 is applied to `d_t w = e^{nu t (-Delta)^gamma} (f - N(theta))`.
//! The cumulative dissipation and forcing-pairing integrals of both balances are
//! carried as extra ODE components through the same RK4 stages.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticSample, DiagnosticSeries};
use crate::error::{Error, Result};
use crate::forcing::{ForcingSpec, TimeProfile};
use crate::nonlinearity::{DealiasPolicy, TransportKernel};
use crate::spectral::{check_grid, slot, Coefficients, SpectralField};

/// Coefficient magnitude above which a run is declared blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// CFL number in `dt <= CFL / (max |n_i| * max |u|)`.
pub const CFL_NUMBER: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub alpha: f64,
    pub gamma: f64,
    pub nu: f64,
    pub grid_size: usize,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: DealiasPolicy,
    /// When false the transport term is switched off (linear fractional heat flow).
    pub nonlinear: bool,
    /// Observers fire every `sample_stride` steps and at the final time.
    pub sample_stride: usize,
}

impl SimParams {
    pub fn new(alpha: f64, gamma: f64, nu: f64, grid_size: usize, dt: f64, t_end: f64) -> Self {
        SimParams {
            alpha,
            gamma,
            nu,
            grid_size,
            dt,
            t_end,
            dealias: DealiasPolicy::default(),
            nonlinear: true,
            sample_stride: 1,
        }
    }

    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha = {} not in (0, 1]", self.alpha));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma = {} must be positive", self.gamma));
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return bad(format!("nu = {} must be nonnegative", self.nu));
        }
        check_grid(self.grid_size)?;
        self.dealias.validate(self.grid_size)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("T = {} must be nonnegative", self.t_end));
        }
        if self.sample_stride == 0 {
            return bad("sample stride must be at least 1".into());
        }
        Ok(())
    }

    /// Number of equal steps covering `[0, t_end]` with step at most `dt`.
    pub fn step_count(&self) -> u64 {
        if self.t_end == 0.0 {
            0
        } else {
            (self.t_end / self.dt - 1e-9).ceil().max(1.0) as u64
        }
    }

    /// The step actually taken: `t_end / step_count`, never larger than `dt`.
    pub fn effective_dt(&self) -> f64 {
        match self.step_count() {
            0 => self.dt,
            n => self.t_end / n as f64,
        }
    }
}

/// Running values of the four time integrals entering the two balances.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BalanceIntegrals {
    /// `nu int ||theta||^2_{H^{gamma - alpha}}`.
    pub diss_ham: f64,
    /// `nu int ||theta||^2_{H^gamma}`.
    pub diss_l2: f64,
    /// `int <f, theta>_{H^{-alpha}}`.
    pub pair_ham: f64,
    /// `int <f, theta>_{L^2}`.
    pub pair_l2: f64,
}

impl BalanceIntegrals {
    fn add_scaled(&mut self, a: f64, g: &BalanceIntegrals) {
        self.diss_ham += a * g.diss_ham;
        self.diss_l2 += a * g.diss_l2;
        self.pair_ham += a * g.pair_ham;
        self.pair_l2 += a * g.pair_l2;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryState {
    pub t: f64,
    pub field: SpectralField,
    pub step_index: u64,
    pub integrals: BalanceIntegrals,
}

impl TrajectoryState {
    pub fn initial(field: SpectralField) -> Self {
        TrajectoryState {
            t: 0.0,
            field,
            step_index: 0,
            integrals: BalanceIntegrals::default(),
        }
    }
}

/// Diagonal multiplier `e^{-nu |n|^{2 gamma} tau}`, stored per FFT slot.
#[derive(Clone, Debug, PartialEq)]
pub struct DissipationFactor {
    m: usize,
    factors: Vec<f64>,
}

impl DissipationFactor {
    pub fn get(&self, n: crate::spectral::Wavenumber) -> f64 {
        match (slot(n.n1, self.m), slot(n.n2, self.m)) {
            (Some(k1), Some(k2)) => self.factors[k1 * self.m + k2],
            _ => 1.0,
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.factors
    }

    pub fn apply(&self, f: &mut SpectralField) {
        for (c, e) in f.data_mut().iter_mut().zip(&self.factors) {
            *c *= *e;
        }
    }
}

pub fn dissipation_factor(params: &SimParams, dt_frac: f64) -> Result<DissipationFactor> {
    if !(dt_frac >= 0.0) {
        return Err(Error::InvalidParams(format!("dt fraction {dt_frac} must be >= 0")));
    }
    let m = params.grid_size;
    let scratch = Coefficients::zeros(m)?;
    let factors = (0..m * m)
        .map(|i| {
            let n = scratch.wavenumber_at(i);
            (-params.nu * n.laplacian_power(params.gamma) * dt_frac).exp()
        })
        .collect();
    Ok(DissipationFactor { m, factors })
}

struct ForcedSlot {
    idx: usize,
    conj_idx: usize,
    amplitude: Complex64,
    profile: TimeProfile,
}

/// Reusable stepping machinery for one `(params, forcing)` pair.
pub struct Stepper {
    params: SimParams,
    dt: f64,
    kernel: Option<TransportKernel>,
    half: DissipationFactor,
    full: DissipationFactor,
    w_diss_ham: Vec<f64>,
    w_diss_l2: Vec<f64>,
    w_pair_ham: Vec<f64>,
    forced: Vec<ForcedSlot>,
    max_component: f64,
}

impl Stepper {
    /// Builds a stepper with step `dt` (usually [`SimParams::effective_dt`]).
    pub fn new(params: &SimParams, forcing: &ForcingSpec, dt: f64) -> Result<Self> {
        params.validate()?;
        let m = params.grid_size;
        forcing.validate(m, &params.dealias)?;
        let kernel = if params.nonlinear {
            Some(TransportKernel::new(m, params.alpha, &params.dealias)?)
        } else {
            None
        };
        let scratch = Coefficients::zeros(m)?;
        let weights = |s: f64| -> Vec<f64> {
            (0..m * m)
                .map(|i| scratch.wavenumber_at(i).laplacian_power(s))
                .collect()
        };
        let forced = forcing
            .modes()
            .map(|e| {
                let n = e.wavenumber();
                ForcedSlot {
                    idx: scratch.index(n).expect("validated forcing mode"),
                    conj_idx: scratch.index(n.neg()).expect("validated forcing mode"),
                    amplitude: e.amplitude(),
                    profile: e.profile,
                }
            })
            .collect();
        Ok(Stepper {
            params: *params,
            dt,
            kernel,
            half: dissipation_factor(params, 0.5 * dt)?,
            full: dissipation_factor(params, dt)?,
            w_diss_ham: weights(params.gamma - params.alpha),
            w_diss_l2: weights(params.gamma),
            w_pair_ham: weights(-params.alpha),
            forced,
            max_component: params.dealias.max_component(m),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `f(t) - N(theta)` plus the integrands of the balance integrals at `(theta, t)`.
    fn rhs(&mut self, theta: &SpectralField, t: f64) -> Result<(SpectralField, BalanceIntegrals)> {
        let mut out = match self.kernel.as_mut() {
            Some(k) => k.evaluate(theta)?.scale(-1.0),
            None => SpectralField::zeros(self.params.grid_size)?,
        };
        let data = theta.data();
        let nu = self.params.nu;
        let mut g = BalanceIntegrals::default();
        if nu > 0.0 {
            for (i, c) in data.iter().enumerate() {
                if c.re != 0.0 || c.im != 0.0 {
                    let e = c.norm_sqr();
                    g.diss_ham += self.w_diss_ham[i] * e;
                    g.diss_l2 += self.w_diss_l2[i] * e;
                }
            }
            g.diss_ham *= nu;
            g.diss_l2 *= nu;
        }
        let buf = out.data_mut();
        for slot in &self.forced {
            let a = slot.amplitude * slot.profile.value(t);
            buf[slot.idx] += a;
            buf[slot.conj_idx] += a.conj();
            // Each pair contributes twice to the real pairing sum.
            let p = 2.0 * (a * data[slot.idx].conj()).re;
            g.pair_ham += self.w_pair_ham[slot.idx] * p;
            g.pair_l2 += p;
        }
        Ok((out, g))
    }

    fn last_speed(&self) -> f64 {
        self.kernel.as_ref().map_or(0.0, |k| k.last_max_speed())
    }

    /// Advective limit `CFL / (max |n_i| max |u|)` for the state last passed to the RHS.
    fn cfl_limit(&self) -> f64 {
        let speed = self.last_speed();
        if speed > 0.0 {
            CFL_NUMBER / (self.max_component * speed)
        } else {
            f64::INFINITY
        }
    }

    pub fn step(&mut self, state: &TrajectoryState) -> Result<TrajectoryState> {
        let h = self.dt;
        let t = state.t;
        let theta = &state.field;

        let (k1, g1) = self.rhs(theta, t)?;
        if self.params.nonlinear {
            let limit = self.cfl_limit();
            if h > limit {
                return Err(Error::CflViolation { t, dt: h, limit });
            }
        }

        let mut a = theta.clone();
        a.axpy(0.5 * h, &k1)?;
        self.half.apply(&mut a);
        let (k2, g2) = self.rhs(&a, t + 0.5 * h)?;

        let mut b = theta.clone();
        self.half.apply(&mut b);
        b.axpy(0.5 * h, &k2)?;
        let (k3, g3) = self.rhs(&b, t + 0.5 * h)?;

        let mut k3_half = k3.clone();
        self.half.apply(&mut k3_half);
        let mut c = theta.clone();
        self.full.apply(&mut c);
        c.axpy(h, &k3_half)?;
        let (k4, g4) = self.rhs(&c, t + h)?;

        let mut k1_full = k1;
        self.full.apply(&mut k1_full);
        let mut mid = k2;
        mid.axpy(1.0, &k3)?;
        self.half.apply(&mut mid);

        let mut next = theta.clone();
        self.full.apply(&mut next);
        next.axpy(h / 6.0, &k1_full)?;
        next.axpy(h / 3.0, &mid)?;
        next.axpy(h / 6.0, &k4)?;

        let mut integrals = state.integrals;
        integrals.add_scaled(h / 6.0, &g1);
        integrals.add_scaled(h / 3.0, &g2);
        integrals.add_scaled(h / 3.0, &g3);
        integrals.add_scaled(h / 6.0, &g4);

        let step_index = state.step_index + 1;
        let t_next = t + h;
        let max_abs = next.max_abs_coefficient();
        if !next.is_finite() || !(max_abs <= BLOWUP_THRESHOLD) {
            return Err(Error::BlowUp {
                t: t_next,
                step: step_index,
                max_abs,
            });
        }
        Ok(TrajectoryState {
            t: t_next,
            field: next,
            step_index,
            integrals,
        })
    }
}

/// One integrating-factor RK4 step of size `params.dt`.
pub fn step(state: &TrajectoryState, params: &SimParams, forcing: &ForcingSpec) -> Result<TrajectoryState> {
    Stepper::new(params, forcing, params.dt)?.step(state)
}

/// Receives every recorded sample of a run.
pub trait Observer {
    fn observe(&mut self, state: &TrajectoryState, sample: &DiagnosticSample);
}

impl<F: FnMut(&TrajectoryState, &DiagnosticSample)> Observer for F {
    fn observe(&mut self, state: &TrajectoryState, sample: &DiagnosticSample) {
        self(state, sample)
    }
}

/// Integrates from `theta0` to `params.t_end` in `params.step_count()` equal steps,
/// sampling diagnostics every `sample_stride` steps and at the final time.
pub fn run(
    theta0: &SpectralField,
    params: &SimParams,
    forcing: &ForcingSpec,
    observers: &mut [&mut dyn Observer],
) -> Result<DiagnosticSeries> {
    params.validate()?;
    if theta0.grid_size() != params.grid_size {
        return Err(Error::GridMismatch {
            left: theta0.grid_size(),
            right: params.grid_size,
        });
    }
    let steps = params.step_count();
    let mut stepper = Stepper::new(params, forcing, params.effective_dt())?;
    let mut series = DiagnosticSeries::new(params.alpha, params.gamma, params.nu);
    let mut state = TrajectoryState::initial(theta0.clone());

    let mut record = |state: &TrajectoryState, series: &mut DiagnosticSeries| -> Result<()> {
        let f = forcing.evaluate(state.t, params.grid_size)?;
        let sample = DiagnosticSample::measure(state, params, &f)?;
        for obs in observers.iter_mut() {
            obs.observe(state, &sample);
        }
        series.push(sample);
        Ok(())
    };

    record(&state, &mut series)?;
    for k in 1..=steps {
        state = stepper.step(&state)?;
        if k == steps {
            // Land exactly on t_end.
            state.t = params.t_end;
        }
        if k % params.sample_stride as u64 == 0 || k == steps {
            record(&state, &mut series)?;
        }
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Wavenumber;

    fn mode(m: usize, n: (i64, i64), c: f64) -> SpectralField {
        SpectralField::from_modes(m, &[(Wavenumber::new(n.0, n.1), Complex64::new(c, 0.0))]).unwrap()
    }

    #[test]
    fn dissipation_factor_examples() {
        let p = SimParams::new(0.5, 1.0, 0.0, 16, 0.1, 1.0);
        let f = dissipation_factor(&p, 1.0).unwrap();
        assert!(f.as_slice().iter().all(|&v| v == 1.0));

        let p = SimParams::new(0.5, 1.0, 0.1, 16, 0.1, 1.0);
        let f = dissipation_factor(&p, 1.0).unwrap();
        assert!((f.get(Wavenumber::new(2, 0)) - (-0.4f64).exp()).abs() < 1e-16);
        assert!(dissipation_factor(&p, -1.0).is_err());
    }

    #[test]
    fn params_validation() {
        let ok = SimParams::new(0.5, 1.0, 0.1, 16, 0.1, 1.0);
        assert!(ok.validate().is_ok());
        for bad in [
            SimParams { alpha: 0.0, ..ok },
            SimParams { alpha: 1.2, ..ok },
            SimParams { gamma: 0.0, ..ok },
            SimParams { nu: -1.0, ..ok },
            SimParams { grid_size: 15, ..ok },
            SimParams { dt: 0.0, ..ok },
            SimParams { sample_stride: 0, ..ok },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn step_count_lands_on_t_end() {
        let p = SimParams::new(0.5, 1.0, 0.1, 16, 0.3, 1.0);
        assert_eq!(p.step_count(), 4);
        assert!((p.effective_dt() - 0.25).abs() < 1e-15);
        let p = SimParams::new(0.5, 1.0, 0.1, 16, 0.25, 1.0);
        assert_eq!(p.step_count(), 4);
    }

    #[test]
    fn single_mode_decays_exactly() {
        let p = SimParams::new(0.5, 1.0, 0.1, 16, 0.05, 1.0);
        let theta0 = mode(16, (2, 1), 0.5);
        let s = run(&theta0, &p, &ForcingSpec::zero(), &mut []).unwrap();
        let last = s.samples.last().unwrap();
        let want = 0.5 * (-0.1 * 5.0f64).exp();
        assert!((last.l2 - want * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zero_horizon_gives_initial_sample_only() {
        let p = SimParams::new(0.5, 1.0, 0.1, 16, 0.05, 0.0);
        let s = run(&mode(16, (1, 0), 0.5), &p, &ForcingSpec::zero(), &mut []).unwrap();
        assert_eq!(s.samples.len(), 1);
        assert_eq!(s.samples[0].t, 0.0);
    }

    #[test]
    fn cfl_violation_is_reported() {
        let theta0 = SpectralField::from_modes(
            32,
            &[
                (Wavenumber::new(1, 0), Complex64::new(50.0, 0.0)),
                (Wavenumber::new(0, 1), Complex64::new(50.0, 0.0)),
            ],
        )
        .unwrap();
        let p = SimParams::new(0.5, 1.0, 0.0, 32, 0.1, 1.0);
        let err = run(&theta0, &p, &ForcingSpec::zero(), &mut []).unwrap_err();
        assert!(matches!(err, Error::CflViolation { .. }), "{err}");
        assert!(err.is_numerical_abort());
    }

    #[test]
    fn observers_fire_at_stride() {
        let p = SimParams::new(0.5, 1.0, 0.1, 16, 0.1, 1.0).with_stride(3);
        let mut times = Vec::new();
        let mut obs = |s: &TrajectoryState, _: &DiagnosticSample| times.push(s.step_index);
        run(&mode(16, (1, 1), 0.2), &p, &ForcingSpec::zero(), &mut [&mut obs]).unwrap();
        assert_eq!(times, vec![0, 3, 6, 9, 10]);
    }
}
