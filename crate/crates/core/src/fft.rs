//! Square 2-D complex FFTs on M x M grids with per-thread cached plans.
//!
//! Layout is row-major: index `k1 * m + k2`, with the first index along x1.
//! The forward transform carries the 1/M^2 factor so that
//! `f(x) = sum_n fhat(n) e^{i n.x}` with no factor on the inverse.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Fft2 {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Fft2 {
    fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Fft2 {
            m,
            forward,
            inverse,
            scratch: vec![Complex64::default(); len],
        }
    }

    fn transpose(&self, data: &mut [Complex64]) {
        let m = self.m;
        for i in 0..m {
            for j in (i + 1)..m {
                data.swap(i * m + j, j * m + i);
            }
        }
    }

    fn apply(&mut self, data: &mut [Complex64], forward: bool) {
        debug_assert_eq!(data.len(), self.m * self.m);
        let plan = if forward {
            self.forward.clone()
        } else {
            self.inverse.clone()
        };
        // rustfft processes every consecutive length-m chunk.
        plan.process_with_scratch(data, &mut self.scratch);
        self.transpose(data);
        plan.process_with_scratch(data, &mut self.scratch);
        self.transpose(data);
    }

    /// Physical samples to normalized coefficients.
    pub(crate) fn forward(&mut self, data: &mut [Complex64]) {
        self.apply(data, true);
        let scale = 1.0 / (self.m * self.m) as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    /// Coefficients to physical samples.
    pub(crate) fn inverse(&mut self, data: &mut [Complex64]) {
        self.apply(data, false);
    }
}

thread_local! {
    static PLANS: RefCell<HashMap<usize, Rc<RefCell<Fft2>>>> = RefCell::new(HashMap::new());
}

/// Runs `f` with this thread's transform for grid size `m`.
pub(crate) fn with_fft<R>(m: usize, f: impl FnOnce(&mut Fft2) -> R) -> R {
    let plan = PLANS.with(|plans| {
        plans
            .borrow_mut()
            .entry(m)
            .or_insert_with(|| Rc::new(RefCell::new(Fft2::new(m))))
            .clone()
    });
    let mut guard = plan.borrow_mut();
    f(&mut guard)
}
