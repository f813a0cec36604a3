//! Slow reference computations used to check the fast paths.

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::nonlinearity::DealiasPolicy;
use crate::spectral::{SpectralField, Wavenumber};

/// `J(Ju . grad J theta)` by the direct double sum over mode pairs. Quadratic in
/// the number of modes; meant for fields with a handful of modes.
pub fn direct_nonlinear_term(theta: &SpectralField, alpha: f64, policy: &DealiasPolicy) -> Result<SpectralField> {
    Ok(direct_sum(theta, alpha, policy)?.0)
}

/// The direct sum together with `max_k sum_{p+q=k} sum_j |u_j(p) q_j theta(q)|`, the scale against
/// which round-off in any evaluation of the sum is measured. It stays meaningful when
/// the terms cancel exactly (for instance between modes of equal modulus).
pub fn direct_nonlinear_term_with_scale(
    theta: &SpectralField,
    alpha: f64,
    policy: &DealiasPolicy,
) -> Result<(SpectralField, f64)> {
    direct_sum(theta, alpha, policy)
}

fn direct_sum(theta: &SpectralField, alpha: f64, policy: &DealiasPolicy) -> Result<(SpectralField, f64)> {
    let m = theta.grid_size();
    let kept: Vec<(Wavenumber, Complex64)> = theta.modes().filter(|(n, _)| policy.keeps(*n, m)).collect();
    let mut acc: Vec<(Wavenumber, Complex64, f64)> = Vec::new();
    for &(p, tp) in &kept {
        let w = p.laplacian_power(-alpha);
        let u1 = Complex64::new(0.0, -(p.n2 as f64) * w) * tp;
        let u2 = Complex64::new(0.0, p.n1 as f64 * w) * tp;
        for &(q, tq) in &kept {
            let k = Wavenumber::new(p.n1 + q.n1, p.n2 + q.n2);
            if k.is_zero() || !policy.keeps(k, m) {
                continue;
            }
            let grad = Complex64::new(0.0, 1.0) * tq;
            let (a1, a2) = (u1 * grad * q.n1 as f64, u2 * grad * q.n2 as f64);
            let (v, size) = (a1 + a2, a1.norm() + a2.norm());
            match acc.iter_mut().find(|(n, _, _)| *n == k) {
                Some((_, c, a)) => {
                    *c += v;
                    *a += size;
                }
                None => acc.push((k, v, size)),
            }
        }
    }
    let scale = acc.iter().map(|e| e.2).fold(0.0, f64::max);
    let half: Vec<_> = acc
        .into_iter()
        .filter(|(n, _, _)| n.is_lex_positive())
        .map(|(n, c, _)| (n, c))
        .collect();
    Ok((SpectralField::from_modes(m, &half)?, scale))
}

/// Real field with `pairs` random Hermitian pairs at `1 <= |n| <= kmax`,
/// coefficients uniform in the unit square.
pub fn random_field(rng: &mut impl Rng, m: usize, pairs: usize, kmax: i64) -> Result<SpectralField> {
    let mut modes: Vec<(Wavenumber, Complex64)> = Vec::with_capacity(pairs);
    while modes.len() < pairs {
        let n = Wavenumber::new(rng.gen_range(0..=kmax), rng.gen_range(-kmax..=kmax));
        if !n.is_lex_positive() || n.modulus() > kmax as f64 || modes.iter().any(|(k, _)| *k == n) {
            continue;
        }
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        modes.push((n, c));
    }
    SpectralField::from_modes(m, &modes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::nonlinear_term;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn direct_sum_agrees_with_transform_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let policy = DealiasPolicy::default();
        for _ in 0..5 {
            let theta = random_field(&mut rng, 32, 6, 6).unwrap();
            let fast = nonlinear_term(&theta, 0.5, &policy).unwrap();
            let slow = direct_nonlinear_term(&theta, 0.5, &policy).unwrap();
            let err = (&fast - &slow).max_abs_coefficient();
            assert!(err <= 1e-12 * slow.max_abs_coefficient().max(1.0), "{err}");
        }
    }

    #[test]
    fn random_field_counts_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_field(&mut rng, 32, 8, 5).unwrap();
        assert_eq!(f.half_spectrum().len(), 8);
        assert_eq!(f.invariant_defect(), 0.0);
    }
}
