use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use gsqg_bench::{rough_datum, GRID_SIZES};
use gsqg_core::nonlinearity::TransportKernel;
use gsqg_core::{DealiasPolicy, ForcingSpec, SimParams, Stepper, TrajectoryState};

fn nonlinear_term(c: &mut Criterion) {
    let mut group = c.benchmark_group("nonlinear_term");
    for m in GRID_SIZES {
        let theta = rough_datum(m);
        let mut kernel = TransportKernel::new(m, 0.5, &DealiasPolicy::default()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &theta, |b, theta| {
            b.iter(|| kernel.evaluate(black_box(theta)).unwrap())
        });
    }
    group.finish();
}

fn rk4_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("stepper_step");
    group.sample_size(20);
    for m in GRID_SIZES {
        let params = SimParams::new(0.5, 1.0, 0.01, m, 1e-3, 1.0);
        let mut stepper = Stepper::new(&params, &ForcingSpec::zero(), params.effective_dt()).unwrap();
        let state = TrajectoryState::initial(rough_datum(m));
        group.bench_with_input(BenchmarkId::from_parameter(m), &state, |b, state| {
            b.iter(|| stepper.step(black_box(state)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, nonlinear_term, rk4_step);
criterion_main!(benches);
