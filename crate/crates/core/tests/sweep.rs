use gsqg_core::experiments::{
    frequency_equivalence_check, higher_order_bound_check, no_instant_dissipation_check, run_sweep, Scenario,
    SweepConfig, SweepReport,
};

fn single_mode_config(nu: f64) -> SweepConfig {
    SweepConfig::from_toml(&format!(
        r#"
[problem]
alpha = 0.5
gamma = 1.0
nonlinear = false

[sweep]
nus = [{nu}]
T = 1.0
deltas = [0.5]
lambdas = [1.0]
Ns = [0.5, 2.0]
M_cap = 32
M_min = 16
samples = 20
engine = "grid"

[initial]
kind = "modes"
parameters = {{ modes = [{{ n = [1, 0], re = 0.5, im = 0.0 }}] }}
"#
    ))
    .unwrap()
}

#[test]
fn single_mode_dissipation_matches_closed_form() {
    let nu = 0.1;
    let report = run_sweep(&single_mode_config(nu)).unwrap().report;
    let m = &report.per_nu[0];
    // |theta|^2 = 2 * 0.25 * e^{-2 nu t} at |n| = 1 for every Sobolev index.
    let d = 0.25 * (1.0 - (-2.0 * nu).exp());
    assert!((m.d.unwrap() / d - 1.0).abs() < 1e-8, "{:?} vs {d}", m.d);
    let d_half = 0.25 * (1.0 - (-nu).exp());
    assert!((m.d_delta.get(0.5).unwrap() / d_half - 1.0).abs() < 1e-8);
    // H(nu, delta) = nu^{(alpha+gamma)/gamma} int_delta^T |theta|^2_{H^gamma}.
    let h = nu.powf(1.5) * 0.25 * ((-nu).exp() - (-2.0 * nu).exp()) / nu;
    assert!((m.h.get(0.5).unwrap() / h - 1.0).abs() < 1e-8);
    // N = 0.5 keeps the whole mode in the tail; N = 2 removes it.
    assert!(m.phi.get(2.0).unwrap() == 0.0);
    assert!(m.phi.get(0.5).unwrap() > 0.0);
}

fn toy_config() -> SweepConfig {
    SweepConfig::from_toml(
        r#"
[problem]
alpha = 0.5
gamma = 1.0

[sweep]
nus = [0.2, 0.05]
T = 0.5
deltas = [0.25, 0.1]
lambdas = [0.5, 1.0]
Ns = [1.0, 2.0, 4.0, 8.0]
M_cap = 64
samples = 10

[initial]
kind = "modes"
parameters = { modes = [
  { n = [1, 0], re = 0.3, im = 0.0 },
  { n = [1, 2], re = 0.0, im = 0.2 },
  { n = [3, -1], re = 0.1, im = 0.1 },
] }
"#,
    )
    .unwrap()
}

#[test]
fn toy_sweep_report_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_sweep(&toy_config()).unwrap();
    run.persist(dir.path()).unwrap();
    let report = &run.report;
    assert_eq!(report.per_nu.len(), 2);
    for m in &report.per_nu {
        assert!(m.flags.is_empty(), "{:?}", m.flags);
        let d = m.d.unwrap();
        assert!(d > 0.0 && d.is_finite());
        for (_, v) in &m.d_delta.0 {
            assert!(*v >= 0.0 && *v <= d);
        }
        let phi: Vec<f64> = m.phi.values().collect();
        assert!(phi.windows(2).all(|w| w[1] <= w[0]));
        // Each tail is a piece of the full H^-alpha integral.
        let full = m.sobolev_integrals.get(-0.5).unwrap();
        assert!(m.tails.values().chain(m.phi.values()).all(|t| t <= full * (1.0 + 1e-12)));
        assert!(m.max_residual_ham.unwrap() < 1e-8);
        assert!(dir.path().join(m.series.as_ref().unwrap()).exists());
    }
    let phi: Vec<f64> = report.phi.values().collect();
    assert!(phi.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(report.cauchy.len(), 1);
    assert!(report.cauchy[0].distance > 0.0);

    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let back = SweepReport::from_json(&text).unwrap();
    assert_eq!(&back, report);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["config", "per_nu", "phi", "cauchy"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    for key in ["nu", "D", "D_delta", "H", "tails", "flags"] {
        assert!(v["per_nu"][0].get(key).is_some(), "{key}");
    }

    let eq = frequency_equivalence_check(report);
    assert_eq!(eq.curves.len(), 2);
    let table = no_instant_dissipation_check(report).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert!(table.rows[0].0 > table.rows[1].0);
    assert!(higher_order_bound_check(report, 0.1).is_ok());
    assert!(higher_order_bound_check(report, 0.0).is_err());
    assert!(higher_order_bound_check(report, 0.5).is_err());
}

#[test]
fn sweep_is_deterministic() {
    let a = run_sweep(&toy_config()).unwrap().report.to_json().unwrap();
    let b = run_sweep(&toy_config()).unwrap().report.to_json().unwrap();
    assert_eq!(a, b);
}

#[test]
fn invalid_configs_are_rejected() {
    let text = toy_config();
    let mut bad = text.clone();
    bad.sweep.nus = vec![0.05, 0.2];
    assert!(run_sweep(&bad).is_err());
    let mut bad = text.clone();
    bad.sweep.deltas = vec![0.7];
    assert!(run_sweep(&bad).is_err());
    assert!(SweepConfig::from_toml("[problem]\nalpha = 0.5\n").is_err());
    assert!(SweepConfig::from_toml(&Scenario::SmoothCompact.toml().replace("M_cap", "M_kap")).is_err());
}

/// Lattice sums against the plane integrals `nu^{1-2(alpha+s)/gamma} int_0^{T/nu}` on a
/// shortened counterexample sweep.
#[test]
fn counterexample_matches_plane_rescaling() {
    let mut cfg = Scenario::Counterexample.config();
    cfg.sweep.nus = vec![1e-2, 3e-3];
    cfg.sweep.samples = 20;
    cfg.sweep.deltas = vec![0.5];
    let bump = cfg.bump().unwrap().unwrap();
    let report = run_sweep(&cfg).unwrap().report;
    let (a, g) = (cfg.problem.alpha, cfg.problem.gamma);
    for m in &report.per_nu {
        for s in [-a, g - a, g] {
            let lattice = m.sobolev_integrals.get(s).unwrap();
            let plane = bump.rescaled_norm_integral(m.nu, s, cfg.sweep.t_end);
            assert!((lattice / plane - 1.0).abs() < 0.02, "nu = {}, s = {s}: {lattice} vs {plane}", m.nu);
        }
        // nu int_0^nu |theta|^2_{H^{gamma-alpha}} = int_0^1 |Theta|^2_{H^{gamma-alpha}}.
        let want = bump.plane_norm_integral(g - a, 1.0);
        assert!((m.d_self.unwrap() / want - 1.0).abs() < 0.02);
    }
}
