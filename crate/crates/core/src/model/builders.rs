use std::f64::consts::{PI, SQRT_2};

use super::system::{ModalSystem, StateVector, SystemKind};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, HermitianMatrix, C64};

/// Neumann heat rod on `[0, 1]` with modes `φ₀ = 1`, `φ_n = √2 cos(nπξ)`,
/// distributed control `B = I` and `Fx = −⟨x, φ₀⟩φ₀`.
pub fn build_heat_rod(n_modes: usize) -> ModalSystem {
    let n = n_modes + 1;
    let lambda: Vec<f64> = (0..n).map(|k| -(k as f64 * PI).powi(2)).collect();
    let mut f = CMatrix::zeros(n, n);
    f[(0, 0)] = c(-1.0, 0.0);
    ModalSystem::new(
        SystemKind::HeatRod,
        CMatrix::real_diag(&lambda),
        CMatrix::identity(n),
        f,
        HermitianMatrix::identity(n),
        HermitianMatrix::identity(n),
        (0..n).map(|k| format!("phi_{k}")).collect(),
        n_modes,
    )
    .expect("heat rod dimensions are consistent")
}

/// Parameters of the heat equation driven by a scalar ODE through
/// `b = amplitude·𝟙_[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CascadeParams {
    pub amplitude: f64,
    pub interval: (f64, f64),
    pub g: f64,
    pub h: f64,
    pub f: f64,
    pub f2: f64,
}

impl Default for CascadeParams {
    fn default() -> Self {
        Self {
            amplitude: 5.0,
            interval: (0.4, 0.6),
            g: 0.5,
            h: 1.0,
            f: -1.0,
            f2: -2.5,
        }
    }
}

impl CascadeParams {
    /// `⟨b, φ_n⟩` from the antiderivative of the cosine basis.
    pub fn b_coefficient(&self, n: usize) -> f64 {
        let (lo, hi) = self.interval;
        if n == 0 {
            return self.amplitude * (hi - lo);
        }
        let k = n as f64 * PI;
        self.amplitude * SQRT_2 / k * ((k * hi).sin() - (k * lo).sin())
    }
}

/// Heat modes `0..=n_modes` followed by the ODE state.
pub fn build_heat_cascade(n_modes: usize, p: &CascadeParams) -> Result<ModalSystem> {
    let (lo, hi) = p.interval;
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
        return Err(Error::Domain(format!("indicator interval [{lo}, {hi}] must lie in [0, 1]")));
    }
    let n = n_modes + 2;
    let z2 = n - 1;
    let mut a = CMatrix::zeros(n, n);
    for k in 0..=n_modes {
        a[(k, k)] = c(-(k as f64 * PI).powi(2), 0.0);
        a[(k, z2)] = c(p.b_coefficient(k), 0.0);
    }
    a[(z2, z2)] = c(p.g, 0.0);
    let mut b = CMatrix::zeros(n, 1);
    b[(z2, 0)] = c(p.h, 0.0);
    let mut f = CMatrix::zeros(1, n);
    f[(0, 0)] = c(p.f, 0.0);
    f[(0, z2)] = c(p.f2, 0.0);
    let mut labels: Vec<String> = (0..=n_modes).map(|k| format!("phi_{k}")).collect();
    labels.push("z2".into());
    ModalSystem::new(
        SystemKind::HeatCascade,
        a,
        b,
        f,
        HermitianMatrix::identity(n),
        HermitianMatrix::identity(1),
        labels,
        n_modes,
    )
}

/// Heat profile `z₁ ≡ 1` with ODE state `z₂⁰`.
pub fn cascade_constant_initial(sys: &ModalSystem, z2: f64) -> StateVector {
    let mut x = StateVector::zeros(sys.n_state());
    x[0] = c(1.0, 0.0);
    let last = sys.n_state() - 1;
    x[last] = c(z2, 0.0);
    x
}

/// `ν_n = nπ − π/2`.
pub fn beam_nu(n: usize) -> f64 {
    n as f64 * PI - PI / 2.0
}

/// `μ± = −γ ± i√(1−γ²)`.
fn beam_mu(gamma: f64, sign: f64) -> C64 {
    c(-gamma, sign * (1.0 - gamma * gamma).sqrt())
}

/// Eigenvalue `λ_{±n} = μ±·ν_n²` for `sign = ±1`.
pub fn beam_lambda(gamma: f64, n: usize, sign: f64) -> C64 {
    beam_mu(gamma, sign) * beam_nu(n).powi(2)
}

/// Scaling of `f_{±n}`: `√2 / (1 − μ∓²)`.
pub fn beam_f_scale(gamma: f64, sign: f64) -> C64 {
    let m = beam_mu(gamma, -sign);
    c(SQRT_2, 0.0) / (c(1.0, 0.0) - m * m)
}

/// Coordinate index and sign for `n ∈ {±1, …, ±pairs}` in the order
/// `−1, +1, −2, +2, …`.
pub fn beam_index(n: i64) -> usize {
    let k = n.unsigned_abs() as usize - 1;
    if n < 0 {
        2 * k
    } else {
        2 * k + 1
    }
}

/// Signed mode label of coordinate `i`.
pub fn beam_mode(i: usize) -> i64 {
    let k = (i / 2 + 1) as i64;
    if i.is_multiple_of(2) {
        -k
    } else {
        k
    }
}

/// Damped Euler–Bernoulli beam in the biorthogonal coordinates
/// `c_n = ⟨x, g_n⟩_X`, so that `A` is diagonal and the energy inner product
/// lives entirely in the Gram matrix.
pub fn build_beam(pairs: usize, gamma: f64, feedback_gain: f64) -> Result<ModalSystem> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("damping must lie in (0, 1), got {gamma}")));
    }
    if pairs == 0 {
        return Err(Error::Domain("beam needs at least one mode pair".into()));
    }
    let n = 2 * pairs;
    let mut lambda = vec![c(0.0, 0.0); n];
    let mut kappa = vec![c(0.0, 0.0); n];
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let mode = beam_mode(i);
        let sign = mode.signum() as f64;
        lambda[i] = beam_lambda(gamma, mode.unsigned_abs() as usize, sign);
        kappa[i] = beam_f_scale(gamma, sign);
        labels.push(format!("f_{mode}"));
    }
    // ⟨f_a, f_b⟩ = κ_a·conj(κ_b)·(ν⁴ / (λ_a·conj(λ_b)) + 1) for equal |n|.
    let mut gram = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i / 2 != j / 2 {
                continue;
            }
            let nu4 = beam_nu(i / 2 + 1).powi(4);
            let inner = kappa[j] * kappa[i].conj() * (nu4 / (lambda[j] * lambda[i].conj()) + 1.0);
            gram[(i, j)] = inner;
        }
    }
    let b = CMatrix::from_fn(n, 1, |i, _| {
        let k = beam_mode(i).unsigned_abs();
        c(if k % 2 == 1 { 1.0 } else { -1.0 }, 0.0)
    });
    let gain = -13.0 / 4.0 * gamma * PI * PI * feedback_gain;
    let mut f = CMatrix::zeros(1, n);
    f[(0, beam_index(-1))] = c(gain, 0.0);
    f[(0, beam_index(1))] = c(gain, 0.0);
    ModalSystem::new(
        SystemKind::Beam { gamma },
        CMatrix::diag(&lambda),
        b,
        f,
        HermitianMatrix::new(gram)?,
        HermitianMatrix::identity(1),
        labels,
        pairs,
    )
}

/// `c_{±n} = ⟨(z₀, ż₀), g_{±n}⟩_X` from the `e_n`-coefficients of deflection
/// and velocity, `e_n(ξ) = √2 sin(ν_n ξ)`.
pub fn beam_project_initial(sys: &ModalSystem, z0: &[C64], zdot0: &[C64]) -> Result<StateVector> {
    if !matches!(sys.kind(), SystemKind::Beam { .. }) {
        return Err(Error::Unsupported("beam projection needs a beam system".into()));
    }
    let pairs = sys.n_state() / 2;
    if z0.len() != pairs || zdot0.len() != pairs {
        return Err(Error::Dimension(format!(
            "expected {pairs} coefficients, got {} and {}",
            z0.len(),
            zdot0.len()
        )));
    }
    let lambda = sys.a().diagonal();
    let coeffs = (0..sys.n_state())
        .map(|i| {
            let k = i / 2;
            let l = lambda[i];
            let nu4 = l.norm_sqr();
            (-(z0[k] * nu4) / l + zdot0[k]) / SQRT_2
        })
        .collect::<Vec<_>>();
    Ok(StateVector::new(coeffs))
}

/// Composite Simpson rule with an even number of intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let m = intervals + intervals % 2;
    let h = (b - a) / m as f64;
    let mut sum = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// `∫₀¹ z(ξ)·√2 sin(ν_n ξ) dξ` for `n = 1..=pairs` by 2048-interval Simpson.
pub fn beam_sine_coefficients(z: impl Fn(f64) -> f64, pairs: usize) -> Vec<C64> {
    (1..=pairs)
        .map(|n| {
            let nu = beam_nu(n);
            c(simpson(|xi| z(xi) * SQRT_2 * (nu * xi).sin(), 0.0, 1.0, 2048), 0.0)
        })
        .collect()
}

/// Deflection `1 − cos(πξ)` released at rest.
pub fn beam_case_study_initial(sys: &ModalSystem) -> Result<StateVector> {
    let pairs = sys.n_state() / 2;
    let z0 = beam_sine_coefficients(|xi| 1.0 - (PI * xi).cos(), pairs);
    beam_project_initial(sys, &z0, &vec![c(0.0, 0.0); pairs])
}

/// Real diagonal system with one input, from eigenvalues and the `B`, `F`
/// coefficient lists.
pub fn build_custom_modal(eigenvalues: &[f64], b: &[f64], f: &[f64]) -> Result<ModalSystem> {
    let n = eigenvalues.len();
    if b.len() != n || f.len() != n {
        return Err(Error::Dimension(format!(
            "{n} eigenvalues but {} input and {} feedback coefficients",
            b.len(),
            f.len()
        )));
    }
    ModalSystem::new(
        SystemKind::Custom,
        CMatrix::real_diag(eigenvalues),
        CMatrix::from_fn(n, 1, |i, _| c(b[i], 0.0)),
        CMatrix::from_fn(1, n, |_, j| c(f[j], 0.0)),
        HermitianMatrix::identity(n),
        HermitianMatrix::identity(1),
        (0..n).map(|k| format!("mode_{k}")).collect(),
        n,
    )
}
