//! Matrix exponential by scaling and squaring with the degree-13 Padé
//! approximant, and the zero-order-hold step built on it.

use super::matrix::{CMatrix, C64};
use crate::error::{Error, Result};

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the unscaled [13/13] approximant is accurate to
/// unit roundoff.
pub const THETA_13: f64 = 5.371_920_351_148_152;

pub fn matexp(m: &CMatrix) -> Result<CMatrix> {
    let n = m.ensure_square("matexp argument")?;
    if !m.is_finite() {
        return Err(Error::Domain("matexp argument has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    if m.is_diagonal() {
        let d: Vec<C64> = m.diagonal().iter().map(|z| z.exp()).collect();
        return Ok(CMatrix::diag(&d));
    }

    let norm = m.norm_1();
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m.scale_real(0.5f64.powi(s));
    let b = &PADE13;
    let ident = CMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| -> CMatrix {
        let mut out = a6.scale_real(c6);
        out = &out + &a4.scale_real(c4);
        out = &out + &a2.scale_real(c2);
        &out + &ident.scale_real(c0)
    };

    let u_inner = a6.matmul(&lin(b[13], b[11], b[9], 0.0));
    let u = a.matmul(&(&u_inner + &lin(b[7], b[5], b[3], b[1])));
    let v_inner = a6.matmul(&lin(b[12], b[10], b[8], 0.0));
    let v = &v_inner + &lin(b[6], b[4], b[2], b[0]);

    let mut r = (&v - &u).solve(&(&v + &u))?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}

/// Zero-order-hold propagation over `tau` for `ẋ = A x + G w`, `w` constant.
#[derive(Clone, Debug)]
pub struct ZohStep {
    /// `e^{Aτ}`
    pub phi: CMatrix,
    /// `∫₀^τ e^{As} ds · G`
    pub gamma: CMatrix,
}

impl ZohStep {
    pub fn apply(&self, x: &[C64], w: &[C64]) -> Vec<C64> {
        let mut out = self.phi.mat_vec(x);
        if !w.is_empty() {
            for (o, g) in out.iter_mut().zip(self.gamma.mat_vec(w)) {
                *o += g;
            }
        }
        out
    }
}

/// `Φ = e^{Aτ}` and `Γ = ∫₀^τ e^{As}ds · G` from one exponential of the
/// augmented matrix `[[A, G], [0, 0]]·τ`.
pub fn zoh_step(a: &CMatrix, g: &CMatrix, tau: f64) -> Result<ZohStep> {
    let n = a.ensure_square("state matrix")?;
    if g.rows() != n {
        return Err(Error::Dimension(format!(
            "input matrix has {} rows, state dimension is {n}",
            g.rows()
        )));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("step length must be non-negative, got {tau}")));
    }
    let m = g.cols();
    if a.is_diagonal() {
        return Ok(zoh_diagonal(&a.diagonal(), g, tau));
    }
    let mut aug = CMatrix::zeros(n + m, n + m);
    aug.set_block(0, 0, &a.scale_real(tau));
    aug.set_block(0, n, &g.scale_real(tau));
    let e = matexp(&aug)?;
    Ok(ZohStep {
        phi: e.submatrix(0, 0, n, n),
        gamma: e.submatrix(0, n, n, m),
    })
}

/// `(e^z − 1)/z`, continuous at zero.
pub fn phi1(z: C64) -> C64 {
    if z.norm() < 1e-3 {
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..8 {
            term = term * z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

fn zoh_diagonal(lambda: &[C64], g: &CMatrix, tau: f64) -> ZohStep {
    let n = lambda.len();
    let phi = CMatrix::diag(&lambda.iter().map(|l| (l * tau).exp()).collect::<Vec<_>>());
    let weights: Vec<C64> = lambda.iter().map(|l| phi1(l * tau) * tau).collect();
    let gamma = CMatrix::from_fn(n, g.cols(), |i, j| weights[i] * g[(i, j)]);
    ZohStep { phi, gamma }
}
