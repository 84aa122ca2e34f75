#![allow(dead_code)]

use etcsim_core::linalg::{c, CMatrix, HermitianMatrix, C64};
use proptest::prelude::*;
use rand::Rng;

pub fn matrix_strategy(n: usize, scale: f64) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-scale..scale, -scale..scale), n * n)
        .prop_map(move |v| CMatrix::from_vec(n, n, v.into_iter().map(|(re, im)| c(re, im)).collect()).unwrap())
}

pub fn pd_strategy(n: usize) -> impl Strategy<Value = HermitianMatrix> {
    matrix_strategy(n, 1.0).prop_map(move |m| {
        HermitianMatrix::new(&m.adjoint().matmul(&m) + &CMatrix::identity(n).scale_real(0.2)).unwrap()
    })
}

/// Shifted left of the Gershgorin discs by `margin`.
pub fn hurwitz(m: &CMatrix, margin: f64) -> CMatrix {
    let n = m.rows();
    let shift = (0..n)
        .map(|i| m.row_slice(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    m - &CMatrix::identity(n).scale_real(shift + margin)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_real_vec(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| c(rng.gen_range(-1.0..1.0), 0.0)).collect()
}

/// Classical RK4 for `ẋ = Ax + w` with constant `w`.
pub fn rk4(a: &CMatrix, w: &[C64], x0: &[C64], t: f64, h: f64) -> Vec<C64> {
    let f = |x: &[C64]| -> Vec<C64> { a.mat_vec(x).iter().zip(w).map(|(p, q)| p + q).collect() };
    let axpy = |x: &[C64], k: &[C64], s: f64| -> Vec<C64> { x.iter().zip(k).map(|(p, q)| p + q * s).collect() };
    let steps = (t / h).round() as usize;
    let h = t / steps as f64;
    let mut x = x0.to_vec();
    for _ in 0..steps {
        let k1 = f(&x);
        let k2 = f(&axpy(&x, &k1, h / 2.0));
        let k3 = f(&axpy(&x, &k2, h / 2.0));
        let k4 = f(&axpy(&x, &k3, h));
        for i in 0..x.len() {
            x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    x
}

pub fn rel_err(a: &[C64], b: &[C64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
    let n: f64 = b.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
    d / n.max(1e-300)
}
