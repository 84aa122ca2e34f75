use super::hermitian::HermitianMatrix;
use super::matrix::CMatrix;
use super::spectral::spectral_radius;
use super::expm::matexp;
use crate::error::{Error, Result};

/// Solves `AᴴP + PA = −Q` for Hermitian `P`.
///
/// The `n² × n²` Kronecker system `(I⊗Aᴴ + Aᵀ⊗I) vec(P) = −vec(Q)` is solved
/// directly, followed by one step of iterative refinement.
pub fn solve_lyapunov(a: &CMatrix, q: &HermitianMatrix) -> Result<HermitianMatrix> {
    let n = a.ensure_square("Lyapunov state matrix")?;
    if q.order() != n {
        return Err(Error::Dimension(format!(
            "Q has order {}, A has order {n}",
            q.order()
        )));
    }
    let growth = hurwitz_growth(a)?;
    if growth >= 1.0 {
        return Err(Error::Certificate(format!(
            "A is not Hurwitz: Gelfand estimate of rho(e^A) = {growth:.12e} >= 1"
        )));
    }

    let nn = n * n;
    let mut k = CMatrix::zeros(nn, nn);
    for j in 0..n {
        for i in 0..n {
            let row = i + j * n;
            for m in 0..n {
                // (I ⊗ Aᴴ): P[m, j] contributes conj(A[m, i])
                k[(row, m + j * n)] += a[(m, i)].conj();
                // (Aᵀ ⊗ I): P[i, m] contributes A[m, j]
                k[(row, i + m * n)] += a[(m, j)];
            }
        }
    }
    let rhs = CMatrix::from_fn(nn, 1, |r, _| -q.as_matrix()[(r % n, r / n)]);
    let lu = super::matrix::Lu::factor(&k)?;
    let mut x = lu.solve(&rhs);
    let residual = &rhs - &k.matmul(&x);
    let correction = lu.solve(&residual);
    x = &x + &correction;

    let p = CMatrix::from_fn(n, n, |i, j| x[(i + j * n, 0)]);
    HermitianMatrix::new(p.hermitian_part())
}

/// `ρ(e^{A})`; below one exactly when `A` is Hurwitz.
pub fn hurwitz_growth(a: &CMatrix) -> Result<f64> {
    let e = matexp(a)?;
    if !e.is_finite() {
        return Ok(f64::INFINITY);
    }
    spectral_radius(&e)
}

/// `‖AᴴP + PA + Q‖_F`.
pub fn lyapunov_residual(a: &CMatrix, p: &HermitianMatrix, q: &HermitianMatrix) -> f64 {
    let pm = p.as_matrix();
    let r = &(&a.adjoint().matmul(pm) + &pm.matmul(a)) + q.as_matrix();
    r.norm_fro()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm::matexp;
    use crate::linalg::matrix::c;
    use crate::linalg::test_support::{random_hurwitz, random_pd};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scalar() {
        let p = solve_lyapunov(&CMatrix::real_diag(&[-1.0]), &HermitianMatrix::identity(1)).unwrap();
        assert!((p.as_matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn decoupled() {
        let p = solve_lyapunov(&CMatrix::real_diag(&[-1.0, -2.0]), &HermitianMatrix::identity(2)).unwrap();
        let want = CMatrix::real_diag(&[0.5, 0.25]);
        assert!((p.as_matrix() - &want).max_abs() < 1e-15);
    }

    #[test]
    fn unstable_rejected_with_growth_estimate() {
        let err = solve_lyapunov(&CMatrix::real_diag(&[0.1, -1.0]), &HermitianMatrix::identity(2)).unwrap_err();
        match err {
            Error::Certificate(msg) => assert!(msg.contains("rho(e^A)")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn matches_gramian_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_hurwitz(&mut rng, 4);
        let q = random_pd(&mut rng, 4);
        let p = solve_lyapunov(&a, &q).unwrap();
        assert!(lyapunov_residual(&a, &p, &q) < 1e-10 * q.as_matrix().norm_fro());

        // ∫₀^T e^{Aᴴt} Q e^{At} dt by composite Simpson on a fine grid plus a
        // tail bound from the decay of e^{AT}
        let h = 1e-3;
        let steps = 30_000;
        let e_h = matexp(&a.scale_real(h)).unwrap();
        let mut e = CMatrix::identity(4);
        let mut integral = CMatrix::zeros(4, 4);
        for s in 0..=steps {
            let w = if s == 0 || s == steps {
                1.0
            } else if s % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let term = e.adjoint().matmul(q.as_matrix()).matmul(&e);
            integral = &integral + &term.scale(c(w * h / 3.0, 0.0));
            e = e.matmul(&e_h);
        }
        let tail = e.norm_fro();
        assert!(tail < 1e-9, "tail {tail}");
        assert!((&integral - p.as_matrix()).max_abs() < 1e-8 * p.as_matrix().max_abs());
    }
}
