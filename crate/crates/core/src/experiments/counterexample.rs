//! Self-similar family of linear solutions with non-vanishing dissipation.
//!
//! The base datum is the radial zero-mean profile `g(r) = (2 - r^2) e^{-r^2/2}`
//! (minus the Laplacian of a Gaussian) stretched to length `l`. Member `nu` is
//! `nu^{-(1+alpha)/gamma} theta_0(x / nu^{1/gamma})`, evolved by the fractional heat
//! flow with viscosity `nu`. Its periodization has the exact torus coefficients
//!
//! ```text
//! thetahat(n) = A s^2 |s n|^2 e^{-|s n|^2 / 2} / (2 pi),   s = l nu^{1/gamma},  A = amplitude nu^{-(1+alpha)/gamma}
//! ```
//!
//! so the flow is diagonal: `thetahat(n, t) = thetahat(n) e^{-nu |n|^{2 gamma} t}`.
//! Fine members need far more modes than any grid carries, so [`LatticeEvaluator`]
//! sums the closed forms directly over the integer lattice.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticSample, DiagnosticSeries};
use crate::error::{Error, Result};
use crate::integrator::SimParams;
use crate::spectral::{PhysicalGrid, SpectralField, Wavenumber};

use super::initial::BumpParams;

/// Relative level defining the effective support of the base profile.
pub const SUPPORT_LEVEL: f64 = 1e-8;

/// Spectral extent of the lattice sums, in units of `1/s`.
const SPECTRAL_CUTOFF: f64 = 6.5;

/// Base profile `(2 - r^2) e^{-r^2/2}`.
pub fn base_profile(r: f64) -> f64 {
    (2.0 - r * r) * (-0.5 * r * r).exp()
}

/// Its Fourier transform on `R^2`, `2 pi rho^2 e^{-rho^2/2}`.
pub fn base_transform(rho: f64) -> f64 {
    TAU * rho * rho * (-0.5 * rho * rho).exp()
}

/// Radius beyond which `|g| <= SUPPORT_LEVEL * max |g|`.
pub fn effective_radius() -> f64 {
    // |g| is decreasing past r = 2; bisect (r^2 - 2) e^{-r^2/2} = 2 * level.
    let target = 2.0 * SUPPORT_LEVEL;
    let (mut lo, mut hi) = (2.0f64, 20.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if -base_profile(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialBump {
    pub amplitude: f64,
    pub length: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub self_similar: bool,
}

impl RadialBump {
    /// Resolves the default length: self-similar families fit the coarsest member to
    /// `0.9 pi`, a fixed bump to `0.5 pi`.
    pub fn for_sweep(p: &BumpParams, alpha: f64, gamma: f64, nu_max: f64) -> Self {
        let r = effective_radius();
        let length = match (p.length, p.self_similar) {
            (Some(l), _) => l,
            (None, true) => 0.9 * PI / (r * nu_max.powf(1.0 / gamma)),
            (None, false) => 0.5 * PI / r,
        };
        RadialBump {
            amplitude: p.amplitude,
            length,
            alpha,
            gamma,
            self_similar: p.self_similar,
        }
    }

    pub fn width(&self, nu: f64) -> f64 {
        if self.self_similar {
            self.length * nu.powf(1.0 / self.gamma)
        } else {
            self.length
        }
    }

    pub fn member_amplitude(&self, nu: f64) -> f64 {
        if self.self_similar {
            self.amplitude * nu.powf(-(1.0 + self.alpha) / self.gamma)
        } else {
            self.amplitude
        }
    }

    /// Support-wrap guard: the effective support must stay inside the fundamental cell.
    pub fn check_support(&self, nu: f64) -> Result<()> {
        let radius = self.width(nu) * effective_radius();
        if radius < PI {
            Ok(())
        } else {
            Err(Error::SupportWrap { radius })
        }
    }

    /// Torus coefficient of member `nu` at `|n|^2 = q`.
    pub fn coefficient(&self, nu: f64, q: f64) -> f64 {
        let s = self.width(nu);
        self.member_amplitude(nu) * s * s * base_transform(s * q.sqrt()) / (TAU * TAU)
    }

    /// Member `nu` in physical space at `x`, summed over periodic images.
    pub fn physical(&self, nu: f64, x1: f64, x2: f64) -> f64 {
        let s = self.width(nu);
        let a = self.member_amplitude(nu);
        let mut sum = 0.0;
        for k1 in -1..=1 {
            for k2 in -1..=1 {
                let y1 = wrap(x1) + TAU * k1 as f64;
                let y2 = wrap(x2) + TAU * k2 as f64;
                sum += base_profile((y1 * y1 + y2 * y2).sqrt() / s);
            }
        }
        a * sum
    }

    /// Exact coefficients truncated to the grid.
    pub fn member_field(&self, nu: f64, m: usize) -> Result<SpectralField> {
        self.check_support(nu)?;
        let k = (m / 2) as i64 - 1;
        let mut modes = Vec::new();
        for n1 in 0..=k {
            for n2 in -k..=k {
                let n = Wavenumber::new(n1, n2);
                if n.is_lex_positive() {
                    let c = self.coefficient(nu, n.modulus_sq());
                    if c != 0.0 {
                        modes.push((n, Complex64::new(c, 0.0)));
                    }
                }
            }
        }
        SpectralField::from_modes(m, &modes)
    }

    /// `int_0^tau |Theta(t)|^2_{H^s} dt` on `R^2`, where `Theta` is the unit-viscosity
    /// member, with the coefficient normalization of the torus sums. Radial Simpson
    /// quadrature in `r = width * |xi|`.
    pub fn plane_norm_integral(&self, s: f64, tau: f64) -> f64 {
        const R_MAX: f64 = 12.0;
        const PANELS: usize = 24_000;
        let w = self.width(1.0);
        let a = self.member_amplitude(1.0);
        let f = |r: f64| {
            if r == 0.0 {
                return 0.0;
            }
            let rho = r / w;
            let c = a * w * w * base_transform(r) / (TAU * TAU);
            let k = 2.0 * rho.powf(2.0 * self.gamma);
            c * c * rho.powf(2.0 * s + 1.0) * exp_integral(k, 0.0, tau)
        };
        let h = R_MAX / PANELS as f64;
        let mut sum = f(0.0) + f(R_MAX);
        for i in 1..PANELS {
            sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        TAU * sum * h / 3.0 / w
    }

    /// Right-hand side of the rescaling identity
    /// `int_0^T |theta^nu|^2_{H^s} = nu^{1 - 2(alpha+s)/gamma} int_0^{T/nu} |Theta|^2_{H^s}`.
    pub fn rescaled_norm_integral(&self, nu: f64, s: f64, t_end: f64) -> f64 {
        nu.powf(1.0 - 2.0 * (self.alpha + s) / self.gamma) * self.plane_norm_integral(s, t_end / nu)
    }

    /// Grid samples of the periodized datum, transformed.
    pub fn sampled_field(&self, nu: f64, m: usize) -> Result<SpectralField> {
        self.check_support(nu)?;
        let grid = PhysicalGrid::from_fn(m, |x1, x2| self.physical(nu, x1, x2))?;
        SpectralField::from_physical(&grid)
    }
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Grid datum and linear run recipe for one member.
#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleMember {
    pub theta0: SpectralField,
    pub params: SimParams,
}

/// Member `nu` sampled on an `m x m` grid, with the matching linear run to `t_end`
/// (`samples` equal steps).
pub fn build_counterexample_family(
    nu: f64,
    bump: &RadialBump,
    m: usize,
    t_end: f64,
    samples: usize,
) -> Result<CounterexampleMember> {
    let theta0 = bump.sampled_field(nu, m)?;
    let params = SimParams::new(bump.alpha, bump.gamma, nu, m, t_end / samples as f64, t_end).linear();
    params.validate()?;
    Ok(CounterexampleMember { theta0, params })
}

/// What the lattice evaluator integrates for one member.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeRequest {
    pub t_end: f64,
    pub samples: usize,
    pub deltas: Vec<f64>,
    /// Tail cutoffs (absolute frequencies) for `int_0^T |theta_{>c}|^2_{H^-alpha}`.
    pub cutoffs: Vec<f64>,
    /// Sobolev indices for `int_0^T |theta|^2_{H^s}`.
    pub sobolev: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeMember {
    pub nu: f64,
    /// Largest `|n_i|` visited.
    pub extent: i64,
    pub series: DiagnosticSeries,
    /// `nu int_0^T |theta|^2_{H^{gamma-alpha}}`.
    pub d: f64,
    /// `nu int_0^delta` of the same, per requested delta.
    pub d_delta: Vec<f64>,
    /// `nu int_0^nu` of the same.
    pub d_self: f64,
    /// `nu^{(alpha+gamma)/gamma} int_delta^T |theta|^2_{H^gamma}` for `delta = 0` then each requested delta.
    pub h: Vec<f64>,
    pub tails: Vec<f64>,
    pub sobolev_integrals: Vec<f64>,
}

/// `int_a^b e^{-k t} dt` for `k > 0`, cancellation-free.
fn exp_integral(k: f64, a: f64, b: f64) -> f64 {
    (-k * a).exp() * -(-k * (b - a)).exp_m1() / k
}

/// Visits the lattice eighth `0 <= n2 <= n1 <= extent` with `|n|^2 <= extent^2`, row by row,
/// passing `(q, multiplicity)` lists.
fn for_each_row(extent: i64, mut f: impl FnMut(&[(f64, f64)])) {
    let r2 = extent * extent;
    let mut row = Vec::with_capacity(extent as usize + 1);
    for a in 1..=extent {
        row.clear();
        for b in 0..=a {
            let q = a * a + b * b;
            if q > r2 {
                break;
            }
            let mult = if b == 0 || b == a { 4.0 } else { 8.0 };
            row.push((q as f64, mult));
        }
        if !row.is_empty() {
            f(&row);
        }
    }
}

pub struct LatticeEvaluator {
    pub bump: RadialBump,
}

impl LatticeEvaluator {
    pub fn new(bump: RadialBump) -> Self {
        LatticeEvaluator { bump }
    }

    pub fn extent(&self, nu: f64) -> i64 {
        (SPECTRAL_CUTOFF / self.bump.width(nu)).ceil() as i64
    }

    pub fn evaluate(&self, nu: f64, req: &LatticeRequest) -> Result<LatticeMember> {
        self.bump.check_support(nu)?;
        let (alpha, gamma) = (self.bump.alpha, self.bump.gamma);
        let extent = self.extent(nu);
        let t_end = req.t_end;
        let ns = req.samples;
        let dt = t_end / ns as f64;
        let h_scale = nu.powf((alpha + gamma) / gamma);
        let cut2: Vec<f64> = req.cutoffs.iter().map(|c| c * c).collect();

        let mut d = 0.0;
        let mut d_self = 0.0;
        let mut d_delta = vec![0.0; req.deltas.len()];
        let mut h = vec![0.0; req.deltas.len() + 1];
        let mut tails = vec![0.0; req.cutoffs.len()];
        let mut sob = vec![0.0; req.sobolev.len()];
        // Per sample: H^-alpha, L2, H^{gamma-alpha}, H^gamma squared norms and the two
        // cumulative dissipation integrals (as sum d - sum d P).
        let mut acc = vec![[0.0f64; 6]; ns + 1];
        let mut d_ham_total = 0.0;
        let mut d_l2_total = 0.0;

        let mut c = Vec::new();
        let mut decay = Vec::new();
        let mut power = Vec::new();
        for_each_row(extent, |row| {
            c.clear();
            decay.clear();
            for &(q, mult) in row {
                let a = self.bump.coefficient(nu, q);
                let w = mult * a * a;
                if w == 0.0 {
                    continue;
                }
                let g = q.powf(gamma);
                let k = 2.0 * nu * g;
                let q_ma = q.powf(-alpha);
                let q_gma = g * q_ma;
                let full = exp_integral(k, 0.0, t_end);
                d += nu * w * q_gma * full;
                d_self += nu * w * q_gma * exp_integral(k, 0.0, nu);
                for (j, &delta) in req.deltas.iter().enumerate() {
                    d_delta[j] += nu * w * q_gma * exp_integral(k, 0.0, delta);
                    h[j + 1] += h_scale * w * g * exp_integral(k, delta, t_end);
                }
                h[0] += h_scale * w * g * full;
                for (j, &c2) in cut2.iter().enumerate() {
                    if q > c2 {
                        tails[j] += w * q_ma * full;
                    }
                }
                for (j, &s) in req.sobolev.iter().enumerate() {
                    sob[j] += w * q.powf(s) * full;
                }
                let dh = nu * w * q_gma / k;
                let dl = nu * w * g / k;
                d_ham_total += dh;
                d_l2_total += dl;
                c.push([w * q_ma, w, w * q_gma, w * g, dh, dl]);
                decay.push((-k * dt).exp());
            }
            power.clear();
            power.resize(c.len(), 1.0f64);
            for slot in acc.iter_mut() {
                let mut s = [0.0f64; 6];
                for (ci, p) in c.iter().zip(&power) {
                    for j in 0..6 {
                        s[j] += ci[j] * p;
                    }
                }
                for j in 0..6 {
                    slot[j] += s[j];
                }
                for (p, e) in power.iter_mut().zip(&decay) {
                    *p *= e;
                }
            }
        });

        let mut series = DiagnosticSeries::new(alpha, gamma, nu);
        for (k, v) in acc.iter().enumerate() {
            series.push(DiagnosticSample {
                t: t_end * k as f64 / ns as f64,
                h_minus_alpha: v[0].max(0.0).sqrt(),
                l2: v[1].max(0.0).sqrt(),
                h_gamma_minus_alpha: v[2].max(0.0).sqrt(),
                h_gamma: v[3].max(0.0).sqrt(),
                lp_alpha: f64::NAN,
                l1: f64::NAN,
                linf: f64::NAN,
                pair_ham: 0.0,
                pair_l2: 0.0,
                cum_diss_ham: if k == 0 { 0.0 } else { d_ham_total - v[4] },
                cum_diss_l2: if k == 0 { 0.0 } else { d_l2_total - v[5] },
                cum_pair_ham: 0.0,
                cum_pair_l2: 0.0,
            });
        }
        Ok(LatticeMember {
            nu,
            extent,
            series,
            d,
            d_delta,
            d_self,
            h,
            tails,
            sobolev_integrals: sob,
        })
    }

    /// `int_0^T <theta^{nu_i}, theta^{nu_j}>_{H^-alpha} dt`; both members are real and radial.
    pub fn cross_integral(&self, nu_i: f64, nu_j: f64, t_end: f64) -> f64 {
        let (alpha, gamma) = (self.bump.alpha, self.bump.gamma);
        let extent = self.extent(nu_i).min(self.extent(nu_j));
        let mut sum = 0.0;
        for_each_row(extent, |row| {
            for &(q, mult) in row {
                let a = self.bump.coefficient(nu_i, q) * self.bump.coefficient(nu_j, q);
                if a != 0.0 {
                    let k = (nu_i + nu_j) * q.powf(gamma);
                    sum += mult * a * q.powf(-alpha) * exp_integral(k, 0.0, t_end);
                }
            }
        });
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::ForcingSpec;
    use crate::integrator::run;

    fn bump() -> RadialBump {
        RadialBump::for_sweep(
            &BumpParams {
                amplitude: 1.0,
                length: None,
                self_similar: true,
            },
            0.5,
            0.5,
            1e-2,
        )
    }

    #[test]
    fn effective_radius_value() {
        let r = effective_radius();
        assert!((base_profile(r).abs() - 2e-8).abs() < 1e-15);
        assert!(r > 6.4 && r < 6.7, "{r}");
    }

    #[test]
    fn support_guard() {
        let b = bump();
        assert!(b.check_support(1e-2).is_ok());
        assert!(matches!(b.check_support(1.2e-2), Err(Error::SupportWrap { .. })));
    }

    #[test]
    fn sampled_matches_exact_coefficients() {
        let b = bump();
        let exact = b.member_field(1e-2, 64).unwrap();
        let sampled = b.sampled_field(1e-2, 64).unwrap();
        let diff = (&exact - &sampled).max_abs_coefficient();
        assert!(diff < 1e-9 * exact.max_abs_coefficient(), "{diff}");
    }

    #[test]
    fn lattice_matches_grid_integrator() {
        let b = bump();
        let nu = 1e-2;
        let member = build_counterexample_family(nu, &b, 64, 1.0, 200).unwrap();
        let grid = run(&member.theta0, &member.params, &ForcingSpec::zero(), &mut []).unwrap();
        let req = LatticeRequest {
            t_end: 1.0,
            samples: 200,
            deltas: vec![],
            cutoffs: vec![],
            sobolev: vec![],
        };
        let lat = LatticeEvaluator::new(b).evaluate(nu, &req).unwrap();
        let (g, l) = (grid.last().unwrap(), lat.series.last().unwrap());
        assert!((g.cum_diss_ham - lat.d).abs() < 1e-8 * lat.d);
        assert!((l.cum_diss_ham - lat.d).abs() < 1e-12 * lat.d);
        assert!((g.h_gamma - l.h_gamma).abs() < 1e-8 * l.h_gamma);
        assert!((grid.samples[0].h_minus_alpha - lat.series.samples[0].h_minus_alpha).abs() < 1e-9);
    }

    #[test]
    fn cross_integral_of_member_with_itself() {
        let b = bump();
        let e = LatticeEvaluator::new(b);
        let req = LatticeRequest {
            t_end: 1.0,
            samples: 4,
            deltas: vec![],
            cutoffs: vec![],
            sobolev: vec![-0.5],
        };
        let m = e.evaluate(3e-3, &req).unwrap();
        let c = e.cross_integral(3e-3, 3e-3, 1.0);
        assert!((c - m.sobolev_integrals[0]).abs() < 1e-12 * c);
    }
}
