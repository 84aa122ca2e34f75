use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};
use crate::linalg::{zoh_step, CMatrix, HermitianMatrix, C64};

/// Which builder produced a [`ModalSystem`].
#[derive(Clone, Debug, PartialEq)]
pub enum SystemKind {
    HeatRod,
    HeatCascade,
    Beam { gamma: f64 },
    Custom,
}

/// Finite modal truncation of `ẋ = Ax + Bu`, `u = Fx(t_k)`.
///
/// Coordinates are modal coefficients; the state-space inner product is
/// `⟨x, y⟩_X = yᴴ·gram·x` and the input inner product uses `gram_u`.
#[derive(Clone, Debug)]
pub struct ModalSystem {
    kind: SystemKind,
    a: CMatrix,
    b: CMatrix,
    f: CMatrix,
    gram: HermitianMatrix,
    gram_u: HermitianMatrix,
    labels: Vec<String>,
    truncation_order: usize,
    gram_factor: Option<CMatrix>,
    gram_u_factor: Option<CMatrix>,
}

impl ModalSystem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        kind: SystemKind,
        a: CMatrix,
        b: CMatrix,
        f: CMatrix,
        gram: HermitianMatrix,
        gram_u: HermitianMatrix,
        labels: Vec<String>,
        truncation_order: usize,
    ) -> Result<Self> {
        let n = a.ensure_square("A")?;
        let m = b.cols();
        if n == 0 || m == 0 {
            return Err(Error::Dimension("state and input dimensions must be positive".into()));
        }
        if b.rows() != n || f.shape() != (m, n) {
            return Err(Error::Dimension(format!(
                "A is {n}x{n}, B is {}x{}, F is {}x{}",
                b.rows(),
                b.cols(),
                f.rows(),
                f.cols()
            )));
        }
        if gram.order() != n || gram_u.order() != m {
            return Err(Error::Dimension(format!(
                "Gram orders {} and {} do not match state {n} and input {m}",
                gram.order(),
                gram_u.order()
            )));
        }
        if labels.len() != n {
            return Err(Error::Dimension(format!("{} labels for {n} coordinates", labels.len())));
        }
        for (name, mat) in [("A", &a), ("B", &b), ("F", &f)] {
            if !mat.is_finite() {
                return Err(Error::Domain(format!("{name} has non-finite entries")));
            }
        }
        let gram_factor = positive_definite_factor(&gram, "state Gram")?;
        let gram_u_factor = positive_definite_factor(&gram_u, "input Gram")?;
        Ok(Self {
            kind,
            a,
            b,
            f,
            gram,
            gram_u,
            labels,
            truncation_order,
            gram_factor,
            gram_u_factor,
        })
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn f(&self) -> &CMatrix {
        &self.f
    }

    pub fn gram(&self) -> &HermitianMatrix {
        &self.gram
    }

    pub fn gram_u(&self) -> &HermitianMatrix {
        &self.gram_u
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn truncation_order(&self) -> usize {
        self.truncation_order
    }

    pub fn n_state(&self) -> usize {
        self.a.rows()
    }

    pub fn n_input(&self) -> usize {
        self.b.cols()
    }

    /// Same plant with a different feedback matrix.
    pub fn with_feedback(&self, f: CMatrix) -> Result<Self> {
        Self::new(
            self.kind.clone(),
            self.a.clone(),
            self.b.clone(),
            f,
            self.gram.clone(),
            self.gram_u.clone(),
            self.labels.clone(),
            self.truncation_order,
        )
    }

    /// `A + BF`.
    pub fn closed_loop(&self) -> CMatrix {
        &self.a + &self.b.matmul(&self.f)
    }

    /// Upper Cholesky factor `R` of the state Gram, `None` for the identity.
    pub fn gram_factor(&self) -> Option<&CMatrix> {
        self.gram_factor.as_ref()
    }

    /// `√(xᴴ·gram·x)`.
    pub fn state_norm(&self, x: &[C64]) -> f64 {
        weighted_norm(self.gram_factor.as_ref(), x)
    }

    /// `√(uᴴ·gram_U·u)`.
    pub fn input_norm(&self, u: &[C64]) -> f64 {
        weighted_norm(self.gram_u_factor.as_ref(), u)
    }

    /// `F x`.
    pub fn input(&self, x: &[C64]) -> Vec<C64> {
        self.f.mat_vec(x)
    }

    pub fn check_state(&self, x: &[C64]) -> Result<()> {
        if x.len() != self.n_state() {
            return Err(Error::Dimension(format!(
                "state has {} coefficients, system has {}",
                x.len(),
                self.n_state()
            )));
        }
        Ok(())
    }
}

fn positive_definite_factor(g: &HermitianMatrix, what: &str) -> Result<Option<CMatrix>> {
    if g.is_identity() {
        return Ok(None);
    }
    let min = g.min_eigenvalue();
    if min <= 1e-12 {
        return Err(Error::Definiteness(format!("{what} has minimum eigenvalue {min:e}")));
    }
    g.cholesky_upper().map(Some)
}

fn weighted_norm(factor: Option<&CMatrix>, x: &[C64]) -> f64 {
    match factor {
        None => crate::linalg::vec_norm(x),
        Some(r) => crate::linalg::vec_norm(&r.mat_vec(x)),
    }
}

/// Modal coefficients of a state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub coeffs: Vec<C64>,
}

impl StateVector {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(n: usize) -> Self {
        Self { coeffs: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self { coeffs: values.iter().map(|&v| C64::new(v, 0.0)).collect() }
    }
}

impl From<Vec<C64>> for StateVector {
    fn from(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }
}

impl Deref for StateVector {
    type Target = [C64];

    fn deref(&self) -> &[C64] {
        &self.coeffs
    }
}

impl DerefMut for StateVector {
    fn deref_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }
}

/// `T(τ)x = e^{Aτ}x`.
pub fn apply_semigroup(sys: &ModalSystem, x: &[C64], tau: f64) -> Result<StateVector> {
    sys.check_state(x)?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("semigroup time must be non-negative, got {tau}")));
    }
    let a = sys.a();
    if a.is_diagonal() {
        let d = a.diagonal();
        return Ok(x.iter().zip(d).map(|(xi, l)| xi * (l * tau).exp()).collect::<Vec<_>>().into());
    }
    Ok(crate::linalg::matexp(&a.scale_real(tau))?.mat_vec(x).into())
}

/// `Δ(τ) = T(τ) + S_τF` with `S_τ = ∫₀^τ T(s)B ds`.
pub fn delta(sys: &ModalSystem, tau: f64) -> Result<CMatrix> {
    let step = zoh_step(sys.a(), sys.b(), tau)?;
    Ok(&step.phi + &step.gamma.matmul(sys.f()))
}

/// Exact inter-event propagation `x(t_k+τ) = Φ(τ)x_k + Γ(τ)u_k`, with the
/// last step cached for uniform scans.
#[derive(Clone, Debug)]
pub struct Propagator<'a> {
    sys: &'a ModalSystem,
    cached: Option<(u64, crate::linalg::ZohStep)>,
}

impl<'a> Propagator<'a> {
    pub fn new(sys: &'a ModalSystem) -> Self {
        Self { sys, cached: None }
    }

    pub fn system(&self) -> &'a ModalSystem {
        self.sys
    }

    pub fn step(&mut self, tau: f64) -> Result<&crate::linalg::ZohStep> {
        let key = tau.to_bits();
        if self.cached.as_ref().map(|(k, _)| *k) != Some(key) {
            let s = zoh_step(self.sys.a(), self.sys.b(), tau)?;
            self.cached = Some((key, s));
        }
        Ok(&self.cached.as_ref().expect("just filled").1)
    }

    /// State after holding input `u` for `tau` starting from `x`.
    pub fn advance(&mut self, x: &[C64], u: &[C64], tau: f64) -> Result<Vec<C64>> {
        Ok(self.step(tau)?.apply(x, u))
    }

    /// Uncached evaluation for one-off times such as bisection midpoints.
    pub fn advance_once(&self, x: &[C64], u: &[C64], tau: f64) -> Result<Vec<C64>> {
        Ok(zoh_step(self.sys.a(), self.sys.b(), tau)?.apply(x, u))
    }
}
