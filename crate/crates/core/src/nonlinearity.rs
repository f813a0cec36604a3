//! Dealiased transport nonlinearity `J(Ju . grad J theta)`, the commutator weak
//! form, and the two cancellation certificates.
//!
//! `J` is the sharp radial Fourier cutoff `|n| <= cutoff_fraction * M / 2`. It
//! is a radial multiplier, so it commutes with `R^perp_alpha` and every
//! fractional Laplacian; with the default fraction 2/3 it is also the usual
//! dealiasing rule, which makes the grid products exact on the retained modes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::with_fft;
use crate::spectral::{check_grid, Coefficients, SpectralField, Wavenumber};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DealiasPolicy {
    pub cutoff_fraction: f64,
}

impl Default for DealiasPolicy {
    fn default() -> Self {
        DealiasPolicy {
            cutoff_fraction: 2.0 / 3.0,
        }
    }
}

impl DealiasPolicy {
    pub fn new(cutoff_fraction: f64) -> Self {
        DealiasPolicy { cutoff_fraction }
    }

    /// Retained Fourier radius on an `m x m` grid.
    pub fn radius(&self, m: usize) -> f64 {
        self.cutoff_fraction * m as f64 / 2.0
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        check_grid(m)?;
        if !(self.cutoff_fraction > 0.0 && self.cutoff_fraction <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "dealias cutoff fraction {} not in (0, 1]",
                self.cutoff_fraction
            )));
        }
        if self.radius(m) < 1.0 {
            return Err(Error::InvalidParams(format!(
                "dealias radius {} on a {m} grid keeps no modes",
                self.radius(m)
            )));
        }
        Ok(())
    }

    pub fn keeps(&self, n: Wavenumber, m: usize) -> bool {
        let r = self.radius(m);
        n.modulus_sq() <= r * r
    }

    /// Largest retained `|n_i|`, the wavenumber scale entering the CFL rule.
    pub fn max_component(&self, m: usize) -> f64 {
        self.radius(m).floor().min((m / 2 - 1) as f64)
    }

    pub fn apply(&self, f: &SpectralField) -> SpectralField {
        let m = f.grid_size();
        f.apply_real_multiplier(|n| if self.keeps(n, m) { 1.0 } else { 0.0 })
    }
}

#[cfg(not(feature = "fault-injection"))]
#[inline]
fn riesz_weight(n: Wavenumber, alpha: f64) -> f64 {
    n.laplacian_power(-alpha)
}

// Anisotropic, even perturbation of |n|^{-2 alpha}: u stays real and
// divergence-free but is no longer grad^perp (-Delta)^{-alpha} theta.
#[cfg(feature = "fault-injection")]
#[inline]
fn riesz_weight(n: Wavenumber, alpha: f64) -> f64 {
    n.laplacian_power(-alpha) * (1.0 + 0.1 * (n.n1 * n.n1) as f64 / n.modulus_sq())
}

struct ActiveMode {
    idx: usize,
    n1: f64,
    n2: f64,
    riesz: f64,
}

/// Precomputed evaluator for `N(theta)` on a fixed grid; holds its own buffers.
pub struct TransportKernel {
    m: usize,
    active: Vec<ActiveMode>,
    velocity: Vec<Complex64>,
    gradient: Vec<Complex64>,
    max_speed: f64,
}

impl TransportKernel {
    pub fn new(m: usize, alpha: f64, policy: &DealiasPolicy) -> Result<Self> {
        policy.validate(m)?;
        let scratch = Coefficients::zeros(m)?;
        let mut active = Vec::new();
        for idx in 0..m * m {
            let n = scratch.wavenumber_at(idx);
            if n.is_zero() || scratch.index(n).is_none() || !policy.keeps(n, m) {
                continue;
            }
            active.push(ActiveMode {
                idx,
                n1: n.n1 as f64,
                n2: n.n2 as f64,
                riesz: riesz_weight(n, alpha),
            });
        }
        Ok(TransportKernel {
            m,
            active,
            velocity: vec![Complex64::default(); m * m],
            gradient: vec![Complex64::default(); m * m],
            max_speed: 0.0,
        })
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    /// `max_x |u(x)|` from the most recent evaluation.
    pub fn last_max_speed(&self) -> f64 {
        self.max_speed
    }

    /// Evaluates `N(theta) = J(Ju . grad J theta)`.
    pub fn evaluate(&mut self, theta: &SpectralField) -> Result<SpectralField> {
        if theta.grid_size() != self.m {
            return Err(Error::GridMismatch {
                left: theta.grid_size(),
                right: self.m,
            });
        }
        let data = theta.data();
        self.velocity.fill(Complex64::default());
        self.gradient.fill(Complex64::default());
        // Two real fields per complex transform: u1 + i u2 and d1 theta + i d2 theta.
        for mode in &self.active {
            let c = data[mode.idx];
            self.velocity[mode.idx] = -mode.riesz * Complex64::new(mode.n1, mode.n2) * c;
            self.gradient[mode.idx] = Complex64::new(-mode.n2, mode.n1) * c;
        }
        let (velocity, gradient) = (&mut self.velocity, &mut self.gradient);
        with_fft(self.m, |fft| {
            fft.inverse(velocity);
            fft.inverse(gradient);
        });
        let mut max_speed_sq: f64 = 0.0;
        for (u, g) in self.velocity.iter_mut().zip(&self.gradient) {
            max_speed_sq = max_speed_sq.max(u.norm_sqr());
            *u = Complex64::new(u.re * g.re + u.im * g.im, 0.0);
        }
        self.max_speed = max_speed_sq.sqrt();
        let product = &mut self.velocity;
        with_fft(self.m, |fft| fft.forward(product));

        let mut out = Coefficients::zeros(self.m)?;
        let buf = out.data_mut();
        for mode in &self.active {
            buf[mode.idx] = self.velocity[mode.idx];
        }
        Ok(out.into_field())
    }
}

/// `N(theta) = J(Ju . grad J theta)` with `u = R^perp_alpha theta`.
pub fn nonlinear_term(theta: &SpectralField, alpha: f64, policy: &DealiasPolicy) -> Result<SpectralField> {
    TransportKernel::new(theta.grid_size(), alpha, policy)?.evaluate(theta)
}

/// `(|<N(theta), theta>_{H^{-alpha}}|, |<N(theta), theta>_{L^2}|)`.
pub fn cancellation_residuals(
    theta: &SpectralField,
    alpha: f64,
    policy: &DealiasPolicy,
) -> Result<(f64, f64)> {
    let n = nonlinear_term(theta, alpha, policy)?;
    Ok((
        n.inner_product_hs(theta, -alpha)?.abs(),
        n.inner_product_hs(theta, 0.0)?.abs(),
    ))
}

/// A time-independent test function `phi` together with its gradient.
#[derive(Clone, Debug)]
pub struct TestFunction {
    phi: SpectralField,
    grad: [SpectralField; 2],
}

impl TestFunction {
    /// The mean of `phi` is irrelevant (only `grad phi` enters) and is not stored.
    pub fn new(phi: SpectralField) -> Self {
        let grad = [phi.derivative(0), phi.derivative(1)];
        TestFunction { phi, grad }
    }

    pub fn constant(m: usize) -> Result<Self> {
        Ok(Self::new(SpectralField::zeros(m)?))
    }

    pub fn phi(&self) -> &SpectralField {
        &self.phi
    }

    pub fn gradient(&self) -> &[SpectralField; 2] {
        &self.grad
    }

    pub fn grid_size(&self) -> usize {
        self.phi.grid_size()
    }

    /// `sum_n (1 + |n|)^2 |phihat(n)|`, an upper bound for the `C^2` norm.
    pub fn c2_proxy(&self) -> f64 {
        self.phi
            .modes()
            .map(|(n, c)| (1.0 + n.modulus()).powi(2) * c.norm())
            .sum()
    }
}

/// Dealiased grid product of two real fields, mean retained.
fn dealiased_product(a: &Coefficients, b: &Coefficients, policy: &DealiasPolicy) -> Coefficients {
    let m = a.grid_size();
    let mut buf: Vec<Complex64> = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| x + Complex64::i() * y)
        .collect();
    with_fft(m, |fft| {
        fft.inverse(&mut buf);
        for v in buf.iter_mut() {
            *v = Complex64::new(v.re * v.im, 0.0);
        }
        fft.forward(&mut buf);
    });
    let mut out = Coefficients::from_raw(m, buf);
    let r2 = policy.radius(m).powi(2);
    for (i, c) in out.data_mut().iter_mut().enumerate() {
        if a.wavenumber_at(i).modulus_sq() > r2 {
            *c = Complex64::default();
        }
    }
    out
}

fn laplacian_power_coeffs(c: &Coefficients, s: f64) -> Coefficients {
    let mut out = c.clone();
    for (i, v) in out.data_mut().iter_mut().enumerate() {
        *v *= c.wavenumber_at(i).laplacian_power(s);
    }
    out
}

/// `T_alpha[phi] h = grad phi (-Delta)^alpha h - (-Delta)^alpha (grad phi h)`,
/// one component per gradient direction. Products use the default dealiasing
/// rule; the components may carry a nonzero mean, which is kept.
pub fn commutator_t_alpha(phi: &TestFunction, h: &SpectralField, alpha: f64) -> Result<[Coefficients; 2]> {
    h.check_same_grid(phi.phi())?;
    let policy = DealiasPolicy::default();
    policy.validate(h.grid_size())?;
    let lh = h.fractional_laplacian(alpha).into_coefficients();
    let h = h.coefficients();
    let component = |g: &SpectralField| {
        let g = g.coefficients();
        let first = dealiased_product(g, &lh, &policy);
        let second = laplacian_power_coeffs(&dealiased_product(g, h, &policy), alpha);
        let data = first
            .data()
            .iter()
            .zip(second.data())
            .map(|(a, b)| a - b)
            .collect();
        Coefficients::from_raw(g.grid_size(), data)
    };
    Ok([component(&phi.grad[0]), component(&phi.grad[1])])
}

/// Both sides of `int theta u.grad phi = 1/2 <R^perp theta, T_alpha[phi] (-Delta)^{-alpha} theta>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakFormGap {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs|`.
    pub gap: f64,
    /// `1 + ||theta||_{H^{-alpha}}^2 * c2_proxy(phi)`.
    pub scale: f64,
    /// `|rhs| / (c2_proxy * ||theta||^2_{H^{-alpha}})`, the empirical continuity constant.
    pub continuity_ratio: f64,
}

impl WeakFormGap {
    pub fn relative(&self) -> f64 {
        self.gap / self.scale
    }
}

/// Evaluates both sides of the weak-form identity independently.
pub fn weak_form_identity_gap(theta: &SpectralField, phi: &TestFunction, alpha: f64) -> Result<WeakFormGap> {
    theta.check_same_grid(phi.phi())?;
    let (u1, u2) = theta.riesz_perp(alpha);

    // Direct quadrature of theta u . grad phi.
    let th = theta.to_physical();
    let (u1p, u2p) = (u1.to_physical(), u2.to_physical());
    let (g1, g2) = (phi.grad[0].to_physical(), phi.grad[1].to_physical());
    let lhs = th
        .values()
        .iter()
        .zip(u1p.values().iter().zip(u2p.values()))
        .zip(g1.values().iter().zip(g2.values()))
        .map(|((t, (a, b)), (x, y))| t * (a * x + b * y))
        .sum::<f64>()
        / th.values().len() as f64;

    let h = theta.fractional_laplacian(-alpha);
    let t = commutator_t_alpha(phi, &h, alpha)?;
    let rhs = 0.5 * (u1.coefficients().pairing(&t[0])? + u2.coefficients().pairing(&t[1])?);

    let hneg = theta.sobolev_norm_sq(-alpha);
    let c2 = phi.c2_proxy();
    let denom = c2 * hneg;
    Ok(WeakFormGap {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
        scale: 1.0 + hneg * c2,
        continuity_ratio: if denom > 0.0 { rhs.abs() / denom } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(m: usize, modes: &[(i64, i64, f64, f64)]) -> SpectralField {
        let modes: Vec<_> = modes
            .iter()
            .map(|&(a, b, re, im)| (Wavenumber::new(a, b), Complex64::new(re, im)))
            .collect();
        SpectralField::from_modes(m, &modes).unwrap()
    }

    #[test]
    fn single_mode_has_no_self_advection() {
        let theta = field(32, &[(1, 0, 0.5, 0.0)]);
        let n = nonlinear_term(&theta, 0.5, &DealiasPolicy::default()).unwrap();
        assert!(n.max_abs_coefficient() < 1e-16);
        let (a, b) = cancellation_residuals(&theta, 0.5, &DealiasPolicy::default()).unwrap();
        assert!(a < 1e-16 && b < 1e-16);
    }

    #[test]
    fn zero_field_cancellations() {
        let theta = SpectralField::zeros(16).unwrap();
        assert_eq!(
            cancellation_residuals(&theta, 0.3, &DealiasPolicy::default()).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn policy_validation() {
        assert!(DealiasPolicy::new(0.0).validate(16).is_err());
        assert!(DealiasPolicy::new(1.5).validate(16).is_err());
        assert!(DealiasPolicy::new(0.1).validate(8).is_err());
        assert!(DealiasPolicy::default().validate(8).is_ok());
        assert_eq!(DealiasPolicy::default().max_component(64), 21.0);
    }

    #[test]
    fn commutator_vanishes_for_constant_phi() {
        let phi = TestFunction::constant(32).unwrap();
        let h = field(32, &[(2, 1, 0.3, -0.2)]);
        let t = commutator_t_alpha(&phi, &h, 0.5).unwrap();
        assert!(t.iter().all(|c| c.data().iter().all(|v| v.norm() < 1e-15)));
    }

    #[test]
    fn weak_form_single_mode_is_zero() {
        let theta = field(32, &[(0, 2, 0.4, 0.1)]);
        let phi = TestFunction::new(field(32, &[(1, 1, 0.2, 0.0)]));
        let g = weak_form_identity_gap(&theta, &phi, 0.5).unwrap();
        assert!(g.lhs.abs() < 1e-16 && g.rhs.abs() < 1e-16);
    }

    #[test]
    fn kernel_rejects_grid_mismatch() {
        let mut k = TransportKernel::new(16, 0.5, &DealiasPolicy::default()).unwrap();
        assert!(k.evaluate(&SpectralField::zeros(32).unwrap()).is_err());
    }
}
