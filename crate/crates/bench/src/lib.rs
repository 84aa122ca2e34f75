//! Fixtures shared by the kernel benchmarks.

use etcsim_core::model::{build_heat_cascade, cascade_constant_initial, CascadeParams};
use etcsim_core::{CMatrix, ModalSystem, StateVector, C64};

/// Cascade closed loop with `n` heat modes and its constant initial state.
pub fn cascade(n: usize) -> (ModalSystem, StateVector) {
    let sys = build_heat_cascade(n, &CascadeParams::default()).expect("default cascade builds");
    let x0 = cascade_constant_initial(&sys, -1.0);
    (sys, x0)
}

/// Dense non-normal test matrix with entries of order one.
pub fn dense(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        let x = ((i * 7 + j * 13) % 17) as f64 / 17.0 - 0.5;
        let d = if i == j { -(i as f64 + 1.0) } else { 0.0 };
        C64::new(x + d, 0.1 * x)
    })
}
