use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gsqg_core::oracles::random_field;
use gsqg_core::{
    cancellation_residuals, nonlinear_term, run, DealiasPolicy, ForcingSpec, SimParams, Snapshot, SpectralField,
};

fn field(seed: u64, m: usize, pairs: usize, kmax: i64) -> SpectralField {
    random_field(&mut ChaCha8Rng::seed_from_u64(seed), m, pairs, kmax).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nonlinearity_keeps_real_zero_mean_fields(seed in any::<u64>(), pairs in 1usize..20, alpha in 0.05f64..=1.0) {
        let theta = field(seed, 32, pairs, 10);
        let n = nonlinear_term(&theta, alpha, &DealiasPolicy::default()).unwrap();
        prop_assert!(n.invariant_defect() <= 1e-15 * theta.max_abs_coefficient().powi(2).max(1.0));
        prop_assert_eq!(n.coefficient(gsqg_core::Wavenumber::new(0, 0)), num_complex::Complex64::new(0.0, 0.0));
    }

    #[test]
    fn multipliers_compose(seed in any::<u64>(), a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let f = field(seed, 32, 12, 12);
        let lhs = f.fractional_laplacian(a).fractional_laplacian(b);
        let rhs = f.fractional_laplacian(a + b);
        let err = (&lhs - &rhs).max_abs_coefficient();
        prop_assert!(err <= 1e-12 * rhs.max_abs_coefficient(), "{}", err);
    }

    #[test]
    fn sobolev_interpolation(seed in any::<u64>(), s0 in -1.0f64..0.0, s1 in 0.0f64..2.0, th in 0.0f64..=1.0) {
        let f = field(seed, 32, 10, 12);
        let s = (1.0 - th) * s0 + th * s1;
        let lhs = f.sobolev_norm(s);
        let rhs = f.sobolev_norm(s0).powf(1.0 - th) * f.sobolev_norm(s1).powf(th);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn bernstein_on_low_modes(seed in any::<u64>(), cutoff in 1.0f64..12.0, s0 in -1.0f64..0.5, ds in 0.0f64..1.5) {
        let low = field(seed, 32, 16, 12).project_low(cutoff);
        let s1 = s0 + ds;
        prop_assert!(low.sobolev_norm(s1) <= cutoff.powf(ds) * low.sobolev_norm(s0) * (1.0 + 1e-12));
        // And the reverse inequality on high modes.
        let high = field(seed, 32, 16, 12).project_high(cutoff);
        prop_assert!(high.sobolev_norm(s0) <= cutoff.powf(-ds) * high.sobolev_norm(s1) * (1.0 + 1e-12));
    }

    #[test]
    fn low_high_split_is_orthogonal(seed in any::<u64>(), cutoff in 0.0f64..15.0, s in -1.0f64..1.0) {
        let f = field(seed, 32, 16, 12);
        let (lo, hi) = (f.project_low(cutoff), f.project_high(cutoff));
        let sum = lo.sobolev_norm_sq(s) + hi.sobolev_norm_sq(s);
        prop_assert!(rel(sum, f.sobolev_norm_sq(s)) <= 1e-13);
        prop_assert!(lo.inner_product_hs(&hi, s).unwrap().abs() == 0.0);
    }

    #[test]
    fn nonlinearity_commutes_with_translation(seed in any::<u64>(), h1 in 0.0f64..6.3, h2 in 0.0f64..6.3, alpha in 0.1f64..=1.0) {
        let theta = field(seed, 32, 8, 8);
        let policy = DealiasPolicy::default();
        let a = nonlinear_term(&theta.translate((h1, h2)), alpha, &policy).unwrap();
        let b = nonlinear_term(&theta, alpha, &policy).unwrap().translate((h1, h2));
        let err = (&a - &b).max_abs_coefficient();
        prop_assert!(err <= 1e-12 * b.max_abs_coefficient().max(1e-300) + 1e-15, "{}", err);
    }

    #[test]
    fn cancellations_hold_for_random_fields(seed in any::<u64>(), pairs in 1usize..24, alpha in 0.05f64..=1.0) {
        let theta = field(seed, 64, pairs, 16);
        let (ham, l2) = cancellation_residuals(&theta, alpha, &DealiasPolicy::default()).unwrap();
        prop_assert!(ham <= 1e-10 && l2 <= 1e-10, "{} {}", ham, l2);
    }

    #[test]
    fn plancherel_and_round_trip(seed in any::<u64>(), pairs in 1usize..30) {
        let f = field(seed, 64, pairs, 20);
        let grid = f.to_physical();
        let quad = grid.values().iter().map(|v| v * v).sum::<f64>() / grid.values().len() as f64;
        prop_assert!(rel(quad, f.sobolev_norm_sq(0.0)) <= 1e-12);
        let back = SpectralField::from_physical(&grid).unwrap();
        prop_assert!((&back - &f).max_abs_coefficient() <= 1e-14);
    }

    #[test]
    fn snapshot_round_trip_is_exact(seed in any::<u64>(), t in 0.0f64..10.0) {
        let f = field(seed, 16, 6, 6);
        let snap = Snapshot::new(f, 0.5, 1.0, 1e-3, t);
        let mut bin = Vec::new();
        snap.write_binary(&mut bin).unwrap();
        prop_assert_eq!(Snapshot::read_binary(bin.as_slice()).unwrap(), snap.clone());
        let mut csv = Vec::new();
        snap.write_csv(&mut csv).unwrap();
        prop_assert_eq!(Snapshot::read_csv(std::str::from_utf8(&csv).unwrap()).unwrap(), snap);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn runs_are_deterministic(seed in any::<u64>(), nu in 1e-3f64..0.5) {
        let theta = field(seed, 32, 6, 6).scale(0.2);
        let params = SimParams::new(0.5, 1.0, nu, 32, 0.01, 0.2).with_stride(5);
        let a = run(&theta, &params, &ForcingSpec::zero(), &mut []).unwrap();
        let b = run(&theta, &params, &ForcingSpec::zero(), &mut []).unwrap();
        prop_assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn hamiltonian_never_grows_without_forcing(seed in any::<u64>(), nu in 1e-3f64..0.5, alpha in 0.2f64..=1.0) {
        let theta = field(seed, 32, 6, 6).scale(0.2);
        let params = SimParams::new(alpha, 1.0, nu, 32, 0.01, 0.3);
        let series = run(&theta, &params, &ForcingSpec::zero(), &mut []).unwrap();
        let h: Vec<f64> = series.samples.iter().map(|s| s.h_minus_alpha).collect();
        prop_assert!(h.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }
}
