use super::report::{CertificateReport, Verdict};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, solve_lyapunov, spectral_norm, weighted, CMatrix, HermitianMatrix, C64,
};
use crate::model::PlusPart;

/// Tolerance on the extreme eigenvalues of the two LMI blocks.
pub const LMI_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct LmiWitness {
    pub p: HermitianMatrix,
    pub q: HermitianMatrix,
    pub kappa: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LmiVerdict {
    pub certified: bool,
    /// Smallest eigenvalue of the threshold block, required `≥ −LMI_TOL`.
    pub min_eig_threshold: f64,
    /// Largest eigenvalue of the decay block, required `≤ LMI_TOL`.
    pub max_eig_decay: f64,
}

/// Checks `[Q − ε²κI, −PB; −BᴴP, κI] ⪰ 0` and
/// `A_clᴴP + PA_cl + (γ⁺)²P + Q ⪯ 0` with `A_cl = A + BF`.
pub fn lmi_check(
    a: &CMatrix,
    b: &CMatrix,
    f: &CMatrix,
    gamma_plus: f64,
    epsilon: f64,
    w: &LmiWitness,
) -> Result<LmiVerdict> {
    let n = a.ensure_square("plus-part state matrix")?;
    let m = b.cols();
    if w.p.order() != n || w.q.order() != n || b.rows() != n || f.rows() != m || f.cols() != n {
        return Err(Error::Dimension("inconsistent plus-part or witness dimensions".into()));
    }
    if !(w.kappa > 0.0) {
        return Err(Error::Domain(format!("kappa must be positive, got {}", w.kappa)));
    }
    let p = w.p.as_matrix();
    let pb = p.matmul(b);
    let mut block = CMatrix::zeros(n + m, n + m);
    block.set_block(0, 0, &(w.q.as_matrix() - &CMatrix::identity(n).scale_real(epsilon * epsilon * w.kappa)));
    block.set_block(0, n, &-&pb);
    block.set_block(n, 0, &-&pb.adjoint());
    block.set_block(n, n, &CMatrix::identity(m).scale_real(w.kappa));
    let min_eig_threshold = hermitian_eigenvalues(&HermitianMatrix::new(block.hermitian_part())?)[0];

    let a_cl = a + &b.matmul(f);
    let decay = &(&(&a_cl.adjoint().matmul(p) + &p.matmul(&a_cl)) + &p.scale_real(gamma_plus * gamma_plus))
        + w.q.as_matrix();
    let max_eig_decay = *hermitian_eigenvalues(&HermitianMatrix::new(decay.hermitian_part())?)
        .last()
        .expect("non-empty");
    Ok(LmiVerdict {
        certified: min_eig_threshold >= -LMI_TOL && max_eig_decay <= LMI_TOL,
        min_eig_threshold,
        max_eig_decay,
    })
}

/// Lyapunov-pinned search: `Q = qI`, `P` solves the decay LMI with
/// equality, `κ` maximizes the Schur complement of the threshold block.
/// Returns `Ok(None)` when no scanned `q` is feasible.
pub fn lmi_search(
    a: &CMatrix,
    b: &CMatrix,
    f: &CMatrix,
    gamma_plus: f64,
    epsilon: f64,
) -> Result<Option<LmiWitness>> {
    let n = a.ensure_square("plus-part state matrix")?;
    let a_cl = a + &b.matmul(f);
    let shifted = &a_cl + &CMatrix::identity(n).scale_real(0.5 * gamma_plus * gamma_plus);
    let unit = solve_lyapunov(&shifted, &HermitianMatrix::identity(n)).map_err(|e| match e {
        Error::Certificate(msg) => Error::Certificate(format!(
            "A_cl + (gamma_plus^2/2) I is not Hurwitz for gamma_plus = {gamma_plus}: {msg}"
        )),
        other => other,
    })?;
    for j in 0..=24 {
        let q = 10f64.powf(-3.0 + 0.25 * j as f64);
        let p = HermitianMatrix::new(unit.as_matrix().scale_real(q))?;
        let norm_pb_sq = spectral_norm(&p.as_matrix().matmul(b)).powi(2);
        let schur = |ln_k: f64| {
            let k = ln_k.exp();
            q - epsilon * epsilon * k - norm_pb_sq / k
        };
        let ln_k = golden_max(schur, (q * 1e-12).ln(), (q * 1e12).ln(), 1e-10);
        let w = LmiWitness {
            p,
            q: HermitianMatrix::new(CMatrix::identity(n).scale_real(q))?,
            kappa: ln_k.exp(),
        };
        if lmi_check(a, b, f, gamma_plus, epsilon, &w)?.certified {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn golden_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Search strategy for [`lmi_max_eps`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LmiStrategy {
    /// `Q = qI`, see [`lmi_search`].
    ScalarQ,
    /// Hermitian `Q`, see [`lmi_search_general`].
    GeneralQ,
}

fn search(
    strategy: LmiStrategy,
    a: &CMatrix,
    b: &CMatrix,
    f: &CMatrix,
    gamma_plus: f64,
    epsilon: f64,
) -> Result<Option<LmiWitness>> {
    match strategy {
        LmiStrategy::ScalarQ => lmi_search(a, b, f, gamma_plus, epsilon),
        LmiStrategy::GeneralQ => lmi_search_general(a, b, f, gamma_plus, epsilon),
    }
}

/// Largest `ε` (to within `tol`) for which the chosen search finds a witness.
pub fn lmi_max_eps(
    a: &CMatrix,
    b: &CMatrix,
    f: &CMatrix,
    gamma_plus: f64,
    tol: f64,
    strategy: LmiStrategy,
) -> Result<f64> {
    if search(strategy, a, b, f, gamma_plus, 0.0)?.is_none() {
        return Err(Error::Certificate("LMI infeasible already at epsilon = 0".into()));
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while search(strategy, a, b, f, gamma_plus, hi)?.is_some() {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Ok(lo);
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if search(strategy, a, b, f, gamma_plus, mid)?.is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Hermitian `Q` from `n²` reals: diagonal first, then real and imaginary
/// parts of the strict upper triangle.
fn hermitian_from_params(v: &[f64], n: usize) -> CMatrix {
    let mut q = CMatrix::zeros(n, n);
    let mut k = n;
    for i in 0..n {
        q[(i, i)] = C64::new(v[i], 0.0);
        for j in i + 1..n {
            q[(i, j)] = C64::new(v[k], v[k + 1]);
            q[(j, i)] = C64::new(v[k], -v[k + 1]);
            k += 2;
        }
    }
    q
}

/// Threshold-block minimum eigenvalue maximized over `κ` for `P` pinned by
/// the decay inequality; `Q` is normalized to unit trace.
struct PinnedObjective<'a> {
    shifted: CMatrix,
    b: &'a CMatrix,
    epsilon: f64,
    n: usize,
}

impl PinnedObjective<'_> {
    fn pq(&self, v: &[f64]) -> Result<Option<(HermitianMatrix, HermitianMatrix)>> {
        let q = hermitian_from_params(v, self.n);
        let tr = q.trace().re;
        if !(tr > 0.0) {
            return Ok(None);
        }
        let q = HermitianMatrix::new(q.scale_real(1.0 / tr))?;
        let p = solve_lyapunov(&self.shifted, &q)?;
        Ok(Some((p, q)))
    }

    fn block_min_eig(&self, p: &HermitianMatrix, q: &HermitianMatrix, kappa: f64) -> Result<f64> {
        let n = self.n;
        let m = self.b.cols();
        let pb = p.as_matrix().matmul(self.b);
        let mut block = CMatrix::zeros(n + m, n + m);
        block.set_block(0, 0, &(q.as_matrix() - &CMatrix::identity(n).scale_real(self.epsilon * self.epsilon * kappa)));
        block.set_block(0, n, &-&pb);
        block.set_block(n, 0, &-&pb.adjoint());
        block.set_block(n, n, &CMatrix::identity(m).scale_real(kappa));
        Ok(hermitian_eigenvalues(&HermitianMatrix::new(block.hermitian_part())?)[0])
    }

    /// `(value, κ)`.
    fn eval(&self, v: &[f64]) -> Result<(f64, f64)> {
        let Some((p, q)) = self.pq(v)? else { return Ok((-1e300, 1.0)) };
        let mut err = None;
        let ln_k = golden_max(
            |lk| match self.block_min_eig(&p, &q, lk.exp()) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    f64::NEG_INFINITY
                }
            },
            (1e-9f64).ln(),
            (1e9f64).ln(),
            1e-9,
        );
        if let Some(e) = err {
            return Err(e);
        }
        Ok((self.block_min_eig(&p, &q, ln_k.exp())?, ln_k.exp()))
    }
}

/// Like [`lmi_search`] with `Q` ranging over Hermitian matrices. The
/// objective is concave in `(Q, κ)`; `Q` is searched by Nelder-Mead started
/// from the identity.
pub fn lmi_search_general(
    a: &CMatrix,
    b: &CMatrix,
    f: &CMatrix,
    gamma_plus: f64,
    epsilon: f64,
) -> Result<Option<LmiWitness>> {
    if let Some(w) = lmi_search(a, b, f, gamma_plus, epsilon)? {
        return Ok(Some(w));
    }
    let n = a.ensure_square("plus-part state matrix")?;
    let a_cl = a + &b.matmul(f);
    let obj = PinnedObjective {
        shifted: &a_cl + &CMatrix::identity(n).scale_real(0.5 * gamma_plus * gamma_plus),
        b,
        epsilon,
        n,
    };
    let mut start = vec![0.0; n * n];
    start[..n].iter_mut().for_each(|x| *x = 1.0 / n as f64);
    let mut failure = None;
    let best = nelder_mead(
        |v| match obj.eval(v) {
            Ok((val, _)) => -val,
            Err(e) => {
                failure = Some(e);
                f64::INFINITY
            }
        },
        &start,
        0.2 / n as f64,
        4000,
        |fx| fx < 0.0,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let Some((p, q)) = obj.pq(&best)? else { return Ok(None) };
    let (_, kappa) = obj.eval(&best)?;
    let w = LmiWitness { p, q, kappa };
    Ok(lmi_check(a, b, f, gamma_plus, epsilon, &w)?.certified.then_some(w))
}

/// Minimizes `f` from `x0` with an axis-aligned initial simplex; stops early
/// once `done(best value)` holds.
fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_iter: usize,
    done: impl Fn(f64) -> bool,
) -> Vec<f64> {
    let d = x0.len();
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..d {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        if done(vals[0]) || (vals[d] - vals[0]).abs() < 1e-14 {
            break;
        }
        let centroid: Vec<f64> =
            (0..d).map(|k| pts[..d].iter().map(|p| p[k]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            (0..d).map(|k| centroid[k] + t * (pts[d][k] - centroid[k])).collect()
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            (pts[d], vals[d]) = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < vals[d - 1] {
            (pts[d], vals[d]) = (xr, fr);
        } else {
            let xc = if fr < vals[d] { along(-0.5) } else { along(0.5) };
            let fc = f(&xc);
            if fc < vals[d].min(fr) {
                (pts[d], vals[d]) = (xc, fc);
            } else {
                for i in 1..=d {
                    pts[i] = (0..d).map(|k| pts[0][k] + 0.5 * (pts[i][k] - pts[0][k])).collect();
                    vals[i] = f(&pts[i]);
                }
            }
        }
    }
    let i = (0..=d).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).expect("non-empty simplex");
    pts[i].clone()
}

/// Plus-part matrices in the requested coordinates.
pub fn plus_coordinates(plus: &PlusPart, orthonormal: bool) -> Result<(CMatrix, CMatrix, CMatrix)> {
    if !orthonormal {
        return Ok((plus.a.clone(), plus.b.clone(), plus.f.clone()));
    }
    let m = plus.b.cols();
    let id_u = HermitianMatrix::identity(m);
    Ok((
        weighted(&plus.a, &plus.gram, &plus.gram)?,
        weighted(&plus.b, &plus.gram, &id_u)?,
        weighted(&plus.f, &id_u, &plus.gram)?,
    ))
}

/// `min{γ⁺, −ω⁻}`.
pub fn margin_decomposed(gamma_plus: f64, omega_minus: f64) -> Result<f64> {
    if !(gamma_plus > 0.0 && omega_minus < 0.0) {
        return Err(Error::Domain(format!(
            "need gamma_plus > 0 and omega_minus < 0, got {gamma_plus} and {omega_minus}"
        )));
    }
    Ok(gamma_plus.min(-omega_minus))
}

pub fn lmi_report(
    plus: &PlusPart,
    gamma_plus: f64,
    epsilon: f64,
    omega_minus: f64,
    truncation: usize,
) -> Result<CertificateReport> {
    let (a, b, f) = plus_coordinates(plus, true)?;
    let base = CertificateReport::new("decomposed_lmi", Verdict::NotCertified)
        .input("gamma_plus", gamma_plus)
        .input("epsilon", epsilon)
        .input("truncation_order", truncation as f64)
        .note("P is pinned by the decay inequality with equality; Q is searched first as qI, then over Hermitian matrices; the search may be conservative")
        .note("plus-part coordinates are orthonormal for the state inner product");
    let witness = match lmi_search_general(&a, &b, &f, gamma_plus, epsilon) {
        Ok(w) => w,
        Err(Error::Certificate(msg)) => return Ok(base.note(msg)),
        Err(e) => return Err(e),
    };
    let eps_scalar = lmi_max_eps(&a, &b, &f, gamma_plus, 1e-3, LmiStrategy::ScalarQ)?;
    let eps_star = lmi_max_eps(&a, &b, &f, gamma_plus, 1e-3, LmiStrategy::GeneralQ)?;
    let mut r = base
        .real("eps_star", eps_star)
        .real("eps_star_scalar_q", eps_scalar)
        .real("margin", margin_decomposed(gamma_plus, omega_minus)?)
        .real("omega_minus", omega_minus);
    if let Some(w) = witness {
        let v = lmi_check(&a, &b, &f, gamma_plus, epsilon, &w)?;
        r.verdict = Verdict::Certified;
        r = r
            .real("kappa", w.kappa)
            .real("min_eig_threshold_block", v.min_eig_threshold)
            .real("max_eig_decay_block", v.max_eig_decay)
            .matrix("P", w.p.into_matrix())
            .matrix("Q", w.q.into_matrix());
    }
    Ok(r)
}
