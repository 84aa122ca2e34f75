use super::report::{CertificateReport, Verdict};
use crate::error::{Error, Result};
use crate::linalg::{
    hurwitz_growth, lyapunov_residual, matexp, solve_lyapunov, spectral_abscissa, spectral_norm,
    spectral_norm_warm, weighted, zoh_step, CMatrix, HermitianMatrix, C64,
};
use crate::model::ModalSystem;

/// `ε_max = ω / (M‖B‖)`.
pub fn eps_bound_thm41(m: f64, omega: f64, norm_b: f64) -> Result<f64> {
    if !(m >= 1.0 && omega > 0.0 && norm_b > 0.0) {
        return Err(Error::Domain(format!(
            "need M >= 1, omega > 0, ||B|| > 0; got {m}, {omega}, {norm_b}"
        )));
    }
    Ok(omega / (m * norm_b))
}

/// `γ = −log((1−ε₀)e^{−ωτ_max} + ε₀)/τ_max` with `ε₀ = εM‖B‖/ω`.
pub fn decay_thm41(epsilon: f64, m: f64, omega: f64, norm_b: f64, tau_max: f64) -> Result<f64> {
    let eps_max = eps_bound_thm41(m, omega, norm_b)?;
    if !(tau_max > 0.0) || epsilon < 0.0 {
        return Err(Error::Domain("need tau_max > 0 and epsilon >= 0".into()));
    }
    if epsilon >= eps_max {
        return Err(Error::Certificate(format!(
            "epsilon = {epsilon} is not below the bound {eps_max}"
        )));
    }
    let e0 = epsilon / eps_max;
    Ok(-((1.0 - e0) * (-omega * tau_max).exp() + e0).ln() / tau_max)
}

/// Largest two-decimal threshold strictly below `eps_max`.
pub fn largest_two_decimal_below(eps_max: f64) -> f64 {
    let mut k = (eps_max * 100.0).floor();
    while k / 100.0 >= eps_max {
        k -= 1.0;
    }
    k / 100.0
}

pub fn bounded_threshold_report(
    epsilon: f64,
    m: f64,
    omega: f64,
    norm_b: f64,
    tau_max: f64,
    m_source: &str,
    truncation: usize,
) -> Result<CertificateReport> {
    let eps_max = eps_bound_thm41(m, omega, norm_b)?;
    let base = |v| {
        CertificateReport::new("bounded_threshold", v)
            .input("epsilon", epsilon)
            .input("M", m)
            .input("omega", omega)
            .input("norm_B", norm_b)
            .input("tau_max", tau_max)
            .input("truncation_order", truncation as f64)
            .real("eps_max", eps_max)
            .real("eps_two_decimal", largest_two_decimal_below(eps_max))
            .note(format!("M supplied by {m_source}"))
    };
    Ok(match decay_thm41(epsilon, m, omega, norm_b, tau_max) {
        Ok(gamma) => base(Verdict::Certified).real("eps0", epsilon / eps_max).real("gamma", gamma),
        Err(Error::Certificate(msg)) => base(Verdict::NotCertified).note(msg),
        Err(e) => return Err(e),
    })
}

/// Closed loop and input matrix in coordinates orthonormal for the state and
/// input inner products.
fn orthonormal_closed_loop(sys: &ModalSystem) -> Result<(CMatrix, CMatrix)> {
    let a = weighted(&sys.closed_loop(), sys.gram(), sys.gram())?;
    let b = weighted(sys.b(), sys.gram(), sys.gram_u())?;
    Ok((a, b))
}

/// Lyapunov certificate for the bounded-control case.
#[derive(Clone, Debug)]
pub struct LyapunovThreshold {
    /// `P` in orthonormal coordinates.
    pub p: HermitianMatrix,
    pub norm_pb: f64,
    pub eps_max: f64,
    /// `∫₀^∞ ‖T_BF(t)‖² dt`, quadrature plus tail bound.
    pub integral: f64,
    pub tail_bound: f64,
    pub alpha: f64,
    pub beta: f64,
    pub residual: f64,
}

impl LyapunovThreshold {
    /// `γ(ε) = (1 − 2ε‖PB‖) / (2∫‖T_BF‖²)`.
    pub fn gamma(&self, epsilon: f64) -> f64 {
        (1.0 - 2.0 * epsilon * self.norm_pb) / (2.0 * self.integral)
    }
}

pub fn lyap_cert_thm42(sys: &ModalSystem) -> Result<LyapunovThreshold> {
    let (a, b) = orthonormal_closed_loop(sys)?;
    let n = a.rows();
    let q = HermitianMatrix::identity(n);
    let p = solve_lyapunov(&a, &q)?;
    let norm_pb = spectral_norm(&p.as_matrix().matmul(&b));
    let eigs = crate::linalg::hermitian_eigenvalues(&p);

    let dt = 1e-3;
    let e_dt = matexp(&a.scale_real(dt))?;
    let mut e = CMatrix::identity(n);
    let mut warm = Vec::new();
    let mut prev = 1.0;
    let mut integral = 0.0;
    let mut steps = 0usize;
    loop {
        e = e.matmul(&e_dt);
        steps += 1;
        let v = spectral_norm_warm(&e, &mut warm).powi(2);
        integral += 0.5 * dt * (prev + v);
        prev = v;
        if v.sqrt() < 1e-8 || steps > 10_000_000 {
            break;
        }
    }
    // ‖e^{A(T+s)}‖ ≤ ‖e^{AT}‖‖e^{As}‖ and ∫‖e^{As}‖² ≤ ∫‖e^{As}‖_F² = tr P.
    let tail_bound = prev * p.as_matrix().trace().re;
    Ok(LyapunovThreshold {
        residual: lyapunov_residual(&a, &p, &q),
        alpha: eigs[0],
        beta: *eigs.last().expect("non-empty"),
        eps_max: 1.0 / (2.0 * norm_pb),
        integral: integral + tail_bound,
        tail_bound,
        norm_pb,
        p,
    })
}

pub fn lyapunov_threshold_report(
    sys: &ModalSystem,
    epsilon: f64,
    m_omega: Option<(f64, f64)>,
) -> Result<CertificateReport> {
    let cert = match lyap_cert_thm42(sys) {
        Ok(c) => c,
        Err(Error::Certificate(msg)) => {
            return Ok(CertificateReport::new("lyapunov_threshold", Verdict::NotCertified).note(msg))
        }
        Err(e) => return Err(e),
    };
    let verdict = if epsilon < cert.eps_max { Verdict::Certified } else { Verdict::NotCertified };
    let mut r = CertificateReport::new("lyapunov_threshold", verdict)
        .input("epsilon", epsilon)
        .input("truncation_order", sys.truncation_order() as f64)
        .real("norm_PB", cert.norm_pb)
        .real("eps_max", cert.eps_max)
        .real("integral_T_BF_sq", cert.integral)
        .real("integral_tail_bound", cert.tail_bound)
        .real("gamma", cert.gamma(epsilon))
        .real("alpha", cert.alpha)
        .real("beta", cert.beta)
        .real("lyapunov_residual", cert.residual)
        .matrix("P", cert.p.as_matrix().clone())
        .note("P is expressed in coordinates orthonormal for the state inner product");
    if let Some((m, omega)) = m_omega {
        let norm_b = weighted_norm_b(sys)?;
        let eps_r = omega / (m * m * norm_b);
        r = r
            .input("M", m)
            .input("omega", omega)
            .real("simplified_eps_max", eps_r)
            .real("simplified_gamma_lower", (omega - epsilon * m * m * norm_b) / (m * m));
    }
    Ok(r)
}

fn weighted_norm_b(sys: &ModalSystem) -> Result<f64> {
    crate::linalg::weighted_operator_norm(sys.b(), sys.gram(), sys.gram_u())
}

/// `sup_{t≥0} e^{ωt}‖e^{A_cl t}‖` and the time at which it is attained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MMin {
    pub value: f64,
    pub t_arg: f64,
}

/// Grid sweep of `e^{ωt}‖e^{A_cl t}‖` over `[0, t_max]` with golden-section
/// refinement around the largest grid value; the norm is the operator norm
/// induced by `gram`.
pub fn m_min(a_cl: &CMatrix, gram: &HermitianMatrix, omega: f64, t_max: f64, dt: f64) -> Result<MMin> {
    let a = weighted(a_cl, gram, gram)?;
    let abscissa = spectral_abscissa(&a)?;
    if abscissa >= -omega {
        return Err(Error::Certificate(format!(
            "spectral abscissa {abscissa:.6e} is not below -omega = {:.6e}",
            -omega
        )));
    }
    let n = a.rows();
    let e_dt = matexp(&a.scale_real(dt))?;
    let mut e = CMatrix::identity(n);
    let mut warm = Vec::new();
    let steps = (t_max / dt).round() as usize;
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let t = j as f64 * dt;
        let v = (omega * t).exp() * spectral_norm_warm(&e, &mut warm);
        cand.push((v, j));
        e = e.matmul(&e_dt);
    }
    cand.sort_by(|x, y| y.0.total_cmp(&x.0));
    let exact = |t: f64| -> Result<f64> { Ok((omega * t).exp() * spectral_norm(&matexp(&a.scale_real(t))?)) };
    let mut best = MMin { value: 1.0, t_arg: 0.0 };
    // Power-iteration values steer the search; the maximum is re-evaluated
    // exactly around the leading candidates.
    for &(_, j) in cand.iter().take(5) {
        let t0 = j as f64 * dt;
        let (lo, hi) = ((t0 - dt).max(0.0), (t0 + dt).min(t_max));
        let (t, v) = golden_max(&exact, lo, hi, 1e-9)?;
        let v0 = exact(t0)?;
        for (tt, vv) in [(t, v), (t0, v0)] {
            if vv > best.value {
                best = MMin { value: vv, t_arg: tt };
            }
        }
    }
    Ok(best)
}

fn golden_max(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    let t = 0.5 * (a + b);
    Ok((t, f(t)?))
}

pub fn m_min_report(sys: &ModalSystem, omega: f64, t_max: f64, dt: f64) -> Result<CertificateReport> {
    let base = CertificateReport::new("m_min", Verdict::Certified)
        .input("omega", omega)
        .input("t_max", t_max)
        .input("dt", dt)
        .input("truncation_order", sys.truncation_order() as f64);
    Ok(match m_min(&sys.closed_loop(), sys.gram(), omega, t_max, dt) {
        Ok(m) => base.real("m_min", m.value).real("t_arg", m.t_arg),
        Err(Error::Certificate(msg)) => CertificateReport { verdict: Verdict::NotCertified, ..base }.note(msg),
        Err(e) => return Err(e),
    })
}

/// Grid-certified lower bound on inter-event times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theta {
    pub theta: f64,
    pub verdict: Verdict,
}

/// Largest grid `τ` with `sup_{s≤τ} ‖F(Δ(s) − I)‖ ≤ ε`, where
/// `F(Δ(s) − I) = F(T(s) − I) + FS_sF`.
pub fn theta_bound(sys: &ModalSystem, epsilon: f64, step: f64, upper: f64) -> Result<Theta> {
    let n = sys.n_state();
    let m = sys.n_input();
    let mut aug = CMatrix::zeros(n + m, n + m);
    aug.set_block(0, 0, sys.a());
    aug.set_block(0, n, sys.b());
    let e_h = matexp(&aug.scale_real(step))?;
    // W(s) = F·[Φ(s) Γ(s)], advanced by the augmented exponential.
    let mut w = CMatrix::zeros(m, n + m);
    w.set_block(0, 0, sys.f());
    let f = sys.f();
    let r_u = if sys.gram_u().is_identity() { None } else { Some(sys.gram_u().cholesky_upper()?) };
    let r_inv = match sys.gram_factor() {
        None => None,
        Some(r) => Some(r.inverse()?),
    };
    let steps = (upper / step).round() as usize;
    for j in 1..=steps {
        w = w.matmul(&e_h);
        let phi = w.submatrix(0, 0, m, n);
        let gamma = w.submatrix(0, n, m, m);
        let mut op = &(&phi + &gamma.matmul(f)) - f;
        if let Some(r) = &r_u {
            op = r.matmul(&op);
        }
        if let Some(ri) = &r_inv {
            op = op.matmul(ri);
        }
        if spectral_norm(&op) > epsilon {
            let theta = (j - 1) as f64 * step;
            let verdict = if j == 1 { Verdict::Inconclusive } else { Verdict::Certified };
            return Ok(Theta { theta, verdict });
        }
    }
    Ok(Theta { theta: steps as f64 * step, verdict: Verdict::Certified })
}

/// Coercivity constants at `s1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coercivity {
    pub c1: f64,
    pub m: f64,
    pub c2: f64,
}

/// `c₁ = σ_min(e^{As₁}) = 1/‖e^{−As₁}‖` in the state norm,
/// `M = max_{τ≤s₁} ‖e^{Aτ}‖` on a 1e-3 grid, `c₂ = 2M/c₁`.
pub fn coercivity(sys: &ModalSystem, s1: f64) -> Result<Coercivity> {
    if !(s1 > 0.0) {
        return Err(Error::Domain(format!("s1 must be positive, got {s1}")));
    }
    let a = weighted(sys.a(), sys.gram(), sys.gram())?;
    let inv = matexp(&a.scale_real(-s1))?;
    // rescaled so the power iteration on MᴴM stays finite
    let scale = inv.max_abs();
    let c1 = if inv.is_finite() {
        1.0 / (scale * spectral_norm(&inv.scale_real(1.0 / scale)))
    } else {
        0.0
    };
    let steps = (s1 / 1e-3).ceil().max(1.0) as usize;
    let mut m: f64 = 1.0;
    for j in 1..=steps {
        let t = (j as f64 * 1e-3).min(s1);
        m = m.max(spectral_norm(&matexp(&a.scale_real(t))?));
    }
    Ok(Coercivity { c1, m, c2: 2.0 * m / c1 })
}

pub fn coercivity_report(sys: &ModalSystem, s1: f64) -> Result<CertificateReport> {
    let c = coercivity(sys, s1)?;
    Ok(CertificateReport::new("coercivity", Verdict::Inconclusive)
        .input("s1", s1)
        .input("truncation_order", sys.truncation_order() as f64)
        .real("c1", c.c1)
        .real("M", c.m)
        .real("c2", c.c2)
        .note("c1 is a property of the truncation and decreases with the truncation order for parabolic systems; it is a diagnostic, not a certificate for the infinite-dimensional system"))
}

pub fn theta_report(sys: &ModalSystem, epsilon: f64, step: f64, upper: f64) -> Result<CertificateReport> {
    let th = theta_bound(sys, epsilon, step, upper)?;
    let mut r = CertificateReport::new("min_inter_event", th.verdict)
        .input("epsilon", epsilon)
        .input("grid_step", step)
        .input("grid_upper", upper)
        .input("truncation_order", sys.truncation_order() as f64)
        .real("theta", th.theta)
        .note("the bound is evaluated on a grid and is specific to the truncation");
    if finite_modal_support(sys.f()) {
        r = r.note("F has finite modal support: F(T(s) - I) is exact, only F S_s F carries truncation error");
    }
    Ok(r)
}

fn finite_modal_support(f: &CMatrix) -> bool {
    let n = f.cols();
    let zero_cols = (0..n).filter(|&j| (0..f.rows()).all(|i| f[(i, j)] == C64::new(0.0, 0.0))).count();
    zero_cols > 0
}

/// `ρ(e^{A_cl})`, below one when the closed loop is Hurwitz.
pub fn closed_loop_growth(sys: &ModalSystem) -> Result<f64> {
    hurwitz_growth(&sys.closed_loop())
}

/// `‖S_h‖` for the zero-order-hold input map over `h`.
pub fn zoh_input_norm(sys: &ModalSystem, h: f64) -> Result<f64> {
    let step = zoh_step(sys.a(), sys.b(), h)?;
    crate::linalg::weighted_operator_norm(&step.gamma, sys.gram(), sys.gram_u())
}
