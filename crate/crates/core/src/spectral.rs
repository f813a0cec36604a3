//! Spectral representation of zero-mean real fields on the torus `[0, 2pi)^2`.
//!
//! Conventions used throughout the crate:
//!
//! * Coefficients are normalized so that `f(x) = sum_n fhat(n) e^{i n.x}`.
//! * The torus carries the normalized measure `dx / (2pi)^2`, hence
//!   `||f||_{L^2}^2 = sum_n |fhat(n)|^2` and `L^2` coincides with `H^0`.
//! * `|n|` is the Euclidean modulus of the wavevector.
//! * On an `M x M` grid the stored wavevectors satisfy `|n_i| <= M/2`, and the
//!   Nyquist row and column (`n_i = -M/2`) are kept at zero so that Hermitian
//!   pairing is unambiguous.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::with_fft;

/// Integer wavevector on the lattice `Z^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Wavenumber {
    pub n1: i64,
    pub n2: i64,
}

impl Wavenumber {
    pub const fn new(n1: i64, n2: i64) -> Self {
        Wavenumber { n1, n2 }
    }

    pub fn is_zero(self) -> bool {
        self.n1 == 0 && self.n2 == 0
    }

    pub fn modulus_sq(self) -> f64 {
        (self.n1 * self.n1 + self.n2 * self.n2) as f64
    }

    pub fn modulus(self) -> f64 {
        self.modulus_sq().sqrt()
    }

    /// `|n|^{2s}`, the symbol of `(-Delta)^s`. Zero at the origin.
    pub fn laplacian_power(self, s: f64) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.modulus_sq().powf(s)
        }
    }

    pub fn neg(self) -> Self {
        Wavenumber::new(-self.n1, -self.n2)
    }

    /// Half-plane used to list each Hermitian pair once: `n1 > 0`, or `n1 == 0 && n2 > 0`.
    pub fn is_lex_positive(self) -> bool {
        self.n1 > 0 || (self.n1 == 0 && self.n2 > 0)
    }

    /// Largest component magnitude.
    pub fn max_component(self) -> i64 {
        self.n1.abs().max(self.n2.abs())
    }
}

impl From<(i64, i64)> for Wavenumber {
    fn from((n1, n2): (i64, i64)) -> Self {
        Wavenumber::new(n1, n2)
    }
}

/// Exponent of a homogeneous Sobolev space; may be negative.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SobolevIndex(pub f64);

impl From<f64> for SobolevIndex {
    fn from(s: f64) -> Self {
        SobolevIndex(s)
    }
}

pub(crate) fn check_grid(m: usize) -> Result<()> {
    if m == 0 || m % 2 != 0 {
        return Err(Error::OddGrid(m));
    }
    Ok(())
}

/// Signed frequency stored at FFT index `k` on a grid of size `m`.
#[inline]
pub(crate) fn freq(k: usize, m: usize) -> i64 {
    if k < m / 2 {
        k as i64
    } else {
        k as i64 - m as i64
    }
}

/// FFT index of a signed frequency; `None` when it is outside `|n| < m/2`.
#[inline]
pub(crate) fn slot(n: i64, m: usize) -> Option<usize> {
    let half = (m / 2) as i64;
    if n.abs() >= half {
        None
    } else if n >= 0 {
        Some(n as usize)
    } else {
        Some((n + m as i64) as usize)
    }
}

/// Real samples on the uniform `M x M` grid `x = 2pi (j1, j2) / M`, row-major in `j1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalGrid {
    m: usize,
    values: Vec<f64>,
}

impl PhysicalGrid {
    pub fn new(m: usize, values: Vec<f64>) -> Result<Self> {
        check_grid(m)?;
        if values.len() != m * m {
            return Err(Error::SampleCount {
                m,
                expected: m * m,
                got: values.len(),
            });
        }
        Ok(PhysicalGrid { m, values })
    }

    /// Samples `f(x1, x2)` at the grid nodes.
    pub fn from_fn(m: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_grid(m)?;
        let h = std::f64::consts::TAU / m as f64;
        let mut values = Vec::with_capacity(m * m);
        for j1 in 0..m {
            for j2 in 0..m {
                values.push(f(j1 as f64 * h, j2 as f64 * h));
            }
        }
        Ok(PhysicalGrid { m, values })
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, j1: usize, j2: usize) -> f64 {
        self.values[j1 * self.m + j2]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `(mean |f|^p)^{1/p}`, or the grid maximum of `|f|` for `p = inf`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        if p.is_infinite() {
            return Ok(self.max_abs());
        }
        let n = self.values.len() as f64;
        let sum: f64 = if p == 1.0 {
            self.values.iter().map(|v| v.abs()).sum()
        } else if p == 2.0 {
            self.values.iter().map(|v| v * v).sum()
        } else {
            self.values.iter().map(|v| v.abs().powf(p)).sum()
        };
        Ok((sum / n).powf(1.0 / p))
    }
}

/// Raw Fourier coefficients on an `M x M` grid, mean mode included.
///
/// Used for intermediate quantities (products, commutators) that need not be
/// zero-mean; [`SpectralField`] wraps it with the field invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    m: usize,
    data: Vec<Complex64>,
}

impl Coefficients {
    pub fn zeros(m: usize) -> Result<Self> {
        check_grid(m)?;
        Ok(Coefficients {
            m,
            data: vec![Complex64::default(); m * m],
        })
    }

    pub(crate) fn from_raw(m: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), m * m);
        Coefficients { m, data }
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    pub(crate) fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub(crate) fn index(&self, n: Wavenumber) -> Option<usize> {
        Some(slot(n.n1, self.m)? * self.m + slot(n.n2, self.m)?)
    }

    pub(crate) fn wavenumber_at(&self, idx: usize) -> Wavenumber {
        Wavenumber::new(freq(idx / self.m, self.m), freq(idx % self.m, self.m))
    }

    /// Coefficient at `n`; zero outside the grid.
    pub fn get(&self, n: Wavenumber) -> Complex64 {
        self.index(n).map_or(Complex64::default(), |i| self.data[i])
    }

    pub fn mean(&self) -> Complex64 {
        self.data[0]
    }

    /// Inverse transform without discarding the imaginary part.
    pub fn to_physical_complex(&self) -> Vec<Complex64> {
        let mut buf = self.data.clone();
        with_fft(self.m, |fft| fft.inverse(&mut buf));
        buf
    }

    /// Real part of `sum_n a(n) conj(b(n))`, the `L^2` pairing including the mean.
    pub fn pairing(&self, other: &Coefficients) -> Result<f64> {
        if self.m != other.m {
            return Err(Error::GridMismatch {
                left: self.m,
                right: other.m,
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a * b.conj()).re)
            .sum())
    }

    /// Projects onto the zero-mean, Hermitian, Nyquist-free subspace.
    pub fn into_field(mut self) -> SpectralField {
        let m = self.m;
        let half = m / 2;
        for k1 in 0..m {
            for k2 in 0..m {
                let idx = k1 * m + k2;
                if k1 == half || k2 == half {
                    self.data[idx] = Complex64::default();
                    continue;
                }
                let j1 = (m - k1) % m;
                let j2 = (m - k2) % m;
                let jdx = j1 * m + j2;
                if jdx < idx {
                    continue;
                }
                let sym = 0.5 * (self.data[idx] + self.data[jdx].conj());
                self.data[idx] = sym;
                self.data[jdx] = sym.conj();
            }
        }
        self.data[0] = Complex64::default();
        SpectralField { coeffs: self }
    }
}

/// Zero-mean real scalar field on the torus stored by its Hermitian-symmetric spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    coeffs: Coefficients,
}

impl SpectralField {
    pub fn zeros(m: usize) -> Result<Self> {
        Ok(SpectralField {
            coeffs: Coefficients::zeros(m)?,
        })
    }

    /// Builds a field from one member of each Hermitian pair; the conjugate at `-n`
    /// is filled in automatically and repeated wavevectors accumulate.
    pub fn from_modes(m: usize, modes: &[(Wavenumber, Complex64)]) -> Result<Self> {
        let mut coeffs = Coefficients::zeros(m)?;
        for &(n, c) in modes {
            if n.is_zero() {
                return Err(Error::ZeroMode);
            }
            let (i, j) = match (coeffs.index(n), coeffs.index(n.neg())) {
                (Some(i), Some(j)) => (i, j),
                _ => {
                    return Err(Error::OutOfGrid {
                        n1: n.n1,
                        n2: n.n2,
                        m,
                    })
                }
            };
            coeffs.data[i] += c;
            coeffs.data[j] += c.conj();
        }
        Ok(SpectralField { coeffs })
    }

    /// Forward transform of real samples. The mean is discarded.
    pub fn from_physical(grid: &PhysicalGrid) -> Result<Self> {
        let m = grid.grid_size();
        check_grid(m)?;
        let mut buf: Vec<Complex64> = grid
            .values()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        with_fft(m, |fft| fft.forward(&mut buf));
        Ok(Coefficients::from_raw(m, buf).into_field())
    }

    pub fn to_physical(&self) -> PhysicalGrid {
        let buf = self.coeffs.to_physical_complex();
        PhysicalGrid {
            m: self.grid_size(),
            values: buf.into_iter().map(|c| c.re).collect(),
        }
    }

    pub fn grid_size(&self) -> usize {
        self.coeffs.m
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Coefficients {
        self.coeffs
    }

    pub(crate) fn data(&self) -> &[Complex64] {
        &self.coeffs.data
    }

    /// Mutable access for kernels that preserve the invariants themselves.
    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs.data
    }

    pub fn coefficient(&self, n: Wavenumber) -> Complex64 {
        self.coeffs.get(n)
    }

    /// Every nonzero coefficient, both members of each pair.
    pub fn modes(&self) -> impl Iterator<Item = (Wavenumber, Complex64)> + '_ {
        self.coeffs
            .data
            .iter()
            .enumerate()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(i, &c)| (self.coeffs.wavenumber_at(i), c))
    }

    /// Nonzero coefficients on the lexicographically positive half-plane, sorted.
    pub fn half_spectrum(&self) -> Vec<(Wavenumber, Complex64)> {
        let mut out: Vec<_> = self.modes().filter(|(n, _)| n.is_lex_positive()).collect();
        out.sort_by_key(|(n, _)| *n);
        out
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coeffs.data.iter().fold(0.0, |acc, c| acc.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .data
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest deviation from Hermitian symmetry plus the magnitude of the mean.
    pub fn invariant_defect(&self) -> f64 {
        let m = self.grid_size();
        let mut worst = self.coeffs.data[0].norm();
        for k1 in 0..m {
            for k2 in 0..m {
                let a = self.coeffs.data[k1 * m + k2];
                let b = self.coeffs.data[((m - k1) % m) * m + (m - k2) % m];
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst
    }

    /// Multiplies every coefficient by an even real symbol `w(n)`.
    pub fn apply_real_multiplier(&self, w: impl Fn(Wavenumber) -> f64) -> SpectralField {
        let mut out = self.clone();
        for (i, c) in out.coeffs.data.iter_mut().enumerate() {
            if c.re != 0.0 || c.im != 0.0 {
                *c *= w(self.coeffs.wavenumber_at(i));
            }
        }
        out
    }

    /// `sum_n w(n) |fhat(n)|^2` for an even real weight.
    pub fn weighted_energy(&self, w: impl Fn(Wavenumber) -> f64) -> f64 {
        self.coeffs
            .data
            .iter()
            .enumerate()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(i, c)| w(self.coeffs.wavenumber_at(i)) * c.norm_sqr())
            .sum()
    }

    /// `(-Delta)^s f`: multiplies by `|n|^{2s}`.
    pub fn fractional_laplacian(&self, s: impl Into<SobolevIndex>) -> SpectralField {
        let s = s.into().0;
        self.apply_real_multiplier(|n| n.laplacian_power(s))
    }

    /// `u = grad^perp (-Delta)^{-alpha} f`, i.e. `u1 = -i n2 |n|^{-2alpha} fhat`,
    /// `u2 = i n1 |n|^{-2alpha} fhat`.
    pub fn riesz_perp(&self, alpha: f64) -> (SpectralField, SpectralField) {
        let mut u1 = self.clone();
        let mut u2 = self.clone();
        for (i, c) in self.coeffs.data.iter().enumerate() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let n = self.coeffs.wavenumber_at(i);
            let w = n.laplacian_power(-alpha);
            u1.coeffs.data[i] = Complex64::new(0.0, -(n.n2 as f64) * w) * c;
            u2.coeffs.data[i] = Complex64::new(0.0, n.n1 as f64 * w) * c;
        }
        (u1, u2)
    }

    /// `partial_j f` for `j` in {0, 1}.
    pub fn derivative(&self, j: usize) -> SpectralField {
        let mut out = self.clone();
        for (i, c) in out.coeffs.data.iter_mut().enumerate() {
            let n = self.coeffs.wavenumber_at(i);
            let k = if j == 0 { n.n1 } else { n.n2 };
            *c *= Complex64::new(0.0, k as f64);
        }
        out
    }

    pub fn sobolev_norm_sq(&self, s: impl Into<SobolevIndex>) -> f64 {
        let s = s.into().0;
        if s == 0.0 {
            return self.weighted_energy(|_| 1.0);
        }
        self.weighted_energy(|n| n.laplacian_power(s))
    }

    /// `||f||_{H^s} = (sum_n |n|^{2s} |fhat(n)|^2)^{1/2}`.
    pub fn sobolev_norm(&self, s: impl Into<SobolevIndex>) -> f64 {
        self.sobolev_norm_sq(s).sqrt()
    }

    /// `<f, g>_{H^s} = sum_n |n|^{2s} Re(fhat(n) conj(ghat(n)))`.
    pub fn inner_product_hs(&self, other: &SpectralField, s: impl Into<SobolevIndex>) -> Result<f64> {
        self.check_same_grid(other)?;
        let s = s.into().0;
        Ok(self
            .coeffs
            .data
            .iter()
            .zip(&other.coeffs.data)
            .enumerate()
            .filter(|(_, (a, b))| (a.re != 0.0 || a.im != 0.0) && (b.re != 0.0 || b.im != 0.0))
            .map(|(i, (a, b))| {
                self.coeffs.wavenumber_at(i).laplacian_power(s) * (a * b.conj()).re
            })
            .sum())
    }

    /// Keeps the modes with `|n| <= cutoff` (closed ball).
    pub fn project_low(&self, cutoff: f64) -> SpectralField {
        let c2 = cutoff * cutoff;
        self.apply_real_multiplier(|n| if n.modulus_sq() <= c2 { 1.0 } else { 0.0 })
    }

    /// Keeps the modes with `|n| > cutoff`; `project_low + project_high` is the identity.
    pub fn project_high(&self, cutoff: f64) -> SpectralField {
        let c2 = cutoff * cutoff;
        self.apply_real_multiplier(|n| if n.modulus_sq() > c2 { 1.0 } else { 0.0 })
    }

    /// Grid quadrature of `(int |f|^p dx/(2pi)^2)^{1/p}`; grid maximum for `p = inf`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        self.to_physical().lp_norm(p)
    }

    /// Translation `f(. + h)`, a phase shift `e^{i n.h}` on each coefficient.
    pub fn translate(&self, h: (f64, f64)) -> SpectralField {
        let mut out = self.clone();
        for (i, c) in out.coeffs.data.iter_mut().enumerate() {
            let n = self.coeffs.wavenumber_at(i);
            let phase = n.n1 as f64 * h.0 + n.n2 as f64 * h.1;
            *c *= Complex64::from_polar(1.0, phase);
        }
        out
    }

    /// Copies the spectrum onto a grid of size `m`, dropping modes that do not fit.
    pub fn resample(&self, m: usize) -> Result<SpectralField> {
        let mut out = Coefficients::zeros(m)?;
        for (n, c) in self.modes() {
            if let (Some(i), Some(_)) = (out.index(n), out.index(n.neg())) {
                out.data[i] = c;
            }
        }
        Ok(SpectralField { coeffs: out })
    }

    pub fn scale(&self, a: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.data.iter_mut().for_each(|c| *c *= a);
        out
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) -> Result<()> {
        self.check_same_grid(other)?;
        for (x, y) in self.coeffs.data.iter_mut().zip(&other.coeffs.data) {
            *x += a * y;
        }
        Ok(())
    }

    pub(crate) fn check_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid_size() != other.grid_size() {
            return Err(Error::GridMismatch {
                left: self.grid_size(),
                right: other.grid_size(),
            });
        }
        Ok(())
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;

    /// Panics on grid mismatch; use [`SpectralField::axpy`] for a checked sum.
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, rhs).expect("grid mismatch in field addition");
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs).expect("grid mismatch in field subtraction");
        out
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;

    fn mul(self, a: f64) -> SpectralField {
        self.scale(a)
    }
}

/// Critical integrability exponent `p_alpha = 2 / (1 + alpha)`.
pub fn critical_exponent(alpha: f64) -> f64 {
    2.0 / (1.0 + alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cos_x1(m: usize) -> SpectralField {
        SpectralField::from_modes(m, &[(Wavenumber::new(1, 0), c(0.5, 0.0))]).unwrap()
    }

    #[test]
    fn constant_grid_has_empty_spectrum() {
        let g = PhysicalGrid::from_fn(16, |_, _| 5.0).unwrap();
        let f = SpectralField::from_physical(&g).unwrap();
        assert!(f.modes().all(|(_, c)| c.norm() < 1e-14));
    }

    #[test]
    fn cosine_samples_give_single_pair() {
        let g = PhysicalGrid::from_fn(16, |x1, _| x1.cos()).unwrap();
        let f = SpectralField::from_physical(&g).unwrap();
        for (n, a) in f.modes() {
            if n == Wavenumber::new(1, 0) || n == Wavenumber::new(-1, 0) {
                assert!((a - c(0.5, 0.0)).norm() < 1e-14);
            } else {
                assert!(a.norm() < 1e-14, "stray mode {n:?}");
            }
        }
    }

    #[test]
    fn odd_grid_rejected() {
        assert!(matches!(
            PhysicalGrid::new(15, vec![0.0; 225]),
            Err(Error::OddGrid(15))
        ));
        assert!(SpectralField::zeros(7).is_err());
    }

    #[test]
    fn to_physical_examples() {
        let zero = SpectralField::zeros(8).unwrap().to_physical();
        assert!(zero.values().iter().all(|&v| v == 0.0));

        let g = cos_x1(16).to_physical();
        let h = TAU / 16.0;
        for j1 in 0..16 {
            for j2 in 0..16 {
                assert!((g.get(j1, j2) - (j1 as f64 * h).cos()).abs() < 1e-14);
            }
        }

        // i/2 at -(3,4) and -i/2 at (3,4) is sin(3x1 + 4x2).
        let s = SpectralField::from_modes(16, &[(Wavenumber::new(3, 4), c(0.0, -0.5))]).unwrap();
        assert_eq!(s.coefficient(Wavenumber::new(-3, -4)), c(0.0, 0.5));
        let g = s.to_physical();
        for j1 in 0..16 {
            for j2 in 0..16 {
                let want = (3.0 * j1 as f64 * h + 4.0 * j2 as f64 * h).sin();
                assert!((g.get(j1, j2) - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn from_modes_rejects_mean_and_nyquist() {
        assert!(matches!(
            SpectralField::from_modes(8, &[(Wavenumber::new(0, 0), c(1.0, 0.0))]),
            Err(Error::ZeroMode)
        ));
        assert!(matches!(
            SpectralField::from_modes(8, &[(Wavenumber::new(4, 0), c(1.0, 0.0))]),
            Err(Error::OutOfGrid { .. })
        ));
    }

    #[test]
    fn fractional_laplacian_examples() {
        let f = cos_x1(16);
        assert_eq!(f.fractional_laplacian(1.0), f);
        let g = SpectralField::from_modes(16, &[(Wavenumber::new(3, 4), c(0.5, 0.0))]).unwrap();
        let lg = g.fractional_laplacian(0.5);
        assert!((lg.coefficient(Wavenumber::new(3, 4)) - c(2.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn riesz_perp_of_cosine() {
        for alpha in [0.1, 0.5, 1.0] {
            let (u1, u2) = cos_x1(16).riesz_perp(alpha);
            assert!(u1.max_abs_coefficient() < 1e-15);
            let g = u2.to_physical();
            let h = TAU / 16.0;
            for j1 in 0..16 {
                assert!((g.get(j1, 3) + (j1 as f64 * h).sin()).abs() < 1e-14);
            }
        }
        let (u1, u2) = SpectralField::zeros(8).unwrap().riesz_perp(0.5);
        assert_eq!(u1.max_abs_coefficient() + u2.max_abs_coefficient(), 0.0);
    }

    #[test]
    fn sobolev_norm_examples() {
        let g = SpectralField::from_modes(16, &[(Wavenumber::new(3, 4), c(0.5, 0.0))]).unwrap();
        assert!((g.sobolev_norm_sq(1.0) - 12.5).abs() < 1e-12);
        assert_eq!(SpectralField::zeros(8).unwrap().sobolev_norm(-0.3), 0.0);
    }

    #[test]
    fn inner_product_examples() {
        let f = cos_x1(16);
        let s = SpectralField::from_modes(16, &[(Wavenumber::new(1, 0), c(0.0, -0.5))]).unwrap();
        assert_eq!(f.inner_product_hs(&s, 0.7).unwrap(), 0.0);
        assert!((f.inner_product_hs(&f, -0.5).unwrap() - 0.5).abs() < 1e-15);
        let other = SpectralField::zeros(8).unwrap();
        assert!(matches!(
            f.inner_product_hs(&other, 0.0),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn projection_boundary_is_closed() {
        let g = SpectralField::from_modes(32, &[(Wavenumber::new(3, 4), c(0.5, 0.1))]).unwrap();
        assert_eq!(g.project_low(5.0), g);
        assert_eq!(g.project_high(5.0).max_abs_coefficient(), 0.0);
        assert_eq!(g.project_low(0.5).max_abs_coefficient(), 0.0);
    }

    #[test]
    fn lp_norm_examples() {
        let f = cos_x1(16);
        assert!((f.lp_norm(2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((f.lp_norm(f64::INFINITY).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(f.lp_norm(0.5), Err(Error::InvalidExponent(_))));
        assert_eq!(critical_exponent(0.5), 4.0 / 3.0);
        assert!(f.lp_norm(critical_exponent(0.5)).unwrap() > 0.0);
    }
}
