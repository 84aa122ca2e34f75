use super::matrix::{c, CMatrix, C64, ZERO};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// Square matrix equal to its conjugate transpose (within `1e-12` relative).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates and exactly symmetrizes `m`.
    pub fn new(m: CMatrix) -> Result<Self> {
        let n = m.rows();
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_finite() {
            return Err(Error::Shape("non-finite entry".into()));
        }
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..n {
            for j in i..n {
                let d = (m[(i, j)] - m[(j, i)].conj()).norm();
                if d > HERMITIAN_TOL * scale {
                    return Err(Error::Shape(format!(
                        "entry ({i},{j}) deviates from Hermitian symmetry by {d:e}"
                    )));
                }
            }
        }
        Ok(Self(m.hermitian_part()))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n))
    }

    pub fn real_diag(d: &[f64]) -> Self {
        Self(CMatrix::real_diag(d))
    }

    pub fn order(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn is_identity(&self) -> bool {
        let n = self.order();
        (0..n).all(|i| (0..n).all(|j| self.0[(i, j)] == if i == j { c(1.0, 0.0) } else { ZERO }))
    }

    /// Upper-triangular `R` with `self = Rᴴ R`.
    pub fn cholesky_upper(&self) -> Result<CMatrix> {
        let n = self.order();
        let a = &self.0;
        let mut r = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= r[(k, j)].norm_sqr();
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::Definiteness(format!(
                    "non-positive pivot {d:e} at row {j}"
                )));
            }
            let djj = d.sqrt();
            r[(j, j)] = c(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = a[(j, i)];
                for k in 0..j {
                    s -= r[(k, j)].conj() * r[(k, i)];
                }
                r[(j, i)] = s / djj;
            }
        }
        Ok(r)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(self)[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *hermitian_eigenvalues(self).last().expect("non-empty matrix")
    }

    /// `xᴴ H x` (real part; the imaginary part vanishes for Hermitian `H`).
    pub fn quadratic_form(&self, x: &[C64]) -> f64 {
        let hx = self.0.mat_vec(x);
        x.iter().zip(&hx).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

/// Eigenvalues ascending with orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub fn hermitian_eigenvalues(h: &HermitianMatrix) -> Vec<f64> {
    jacobi(h.as_matrix(), false).values
}

pub fn hermitian_eig(h: &HermitianMatrix) -> Eigen {
    jacobi(h.as_matrix(), true)
}

/// Cyclic complex Jacobi sweeps until the off-diagonal Frobenius norm falls
/// below `1e-13` relative to the full norm.
fn jacobi(h: &CMatrix, want_vectors: bool) -> Eigen {
    let n = h.rows();
    let mut a = h.clone();
    let mut v = if want_vectors {
        CMatrix::identity(n)
    } else {
        CMatrix::zeros(0, 0)
    };
    let total = a.norm_fro();
    if total == 0.0 {
        return Eigen {
            values: vec![0.0; n],
            vectors: if want_vectors { v } else { CMatrix::identity(n) },
        };
    }
    let target = 1e-13 * total;

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off < target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r < 1e-300 || r < 1e-18 * total {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / r;
                let zeta = (aqq - app) / (2.0 * r);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                let ph_conj = phase.conj();
                // Columns: A ← A J with J = [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]].
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs - akq * ph_conj * sn;
                    a[(k, q)] = akp * sn + akq * ph_conj * cs;
                }
                // Rows: A ← Jᴴ A.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs - aqk * phase * sn;
                    a[(q, k)] = apk * sn + aqk * phase * cs;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = c(a[(p, p)].re, 0.0);
                a[(q, q)] = c(a[(q, q)].re, 0.0);
                if want_vectors {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * cs - vkq * ph_conj * sn;
                        v[(k, q)] = vkp * sn + vkq * ph_conj * cs;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = if want_vectors {
        CMatrix::from_fn(n, n, |i, j| v[(i, order[j])])
    } else {
        CMatrix::identity(n)
    };
    Eigen { values, vectors }
}

/// Largest singular value via the smaller of `MᴴM` and `MMᴴ`.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let gram = if m.rows() <= m.cols() {
        m.matmul(&m.adjoint())
    } else {
        m.adjoint().matmul(m)
    };
    let h = HermitianMatrix(gram.hermitian_part());
    h.max_eigenvalue().max(0.0).sqrt()
}

/// Largest singular value by power iteration on `MᴴM`, warm-started from
/// `start`, which is overwritten with the converged right singular vector.
///
/// Used inside long time sweeps where a full eigensolve per step is too slow;
/// callers re-evaluate candidate maxima with [`spectral_norm`].
pub fn spectral_norm_warm(m: &CMatrix, start: &mut Vec<C64>) -> f64 {
    let n = m.cols();
    if start.len() != n || super::matrix::vec_norm(start) == 0.0 {
        *start = (0..n)
            .map(|i| c(1.0 + 0.37 * i as f64, 0.11 * (i % 3) as f64))
            .collect();
    }
    // Small generic component so a warm start cannot sit exactly on a
    // lower singular direction.
    for (i, z) in start.iter_mut().enumerate() {
        *z += c(1e-6 * (1.0 + (i % 7) as f64), 1e-6 * (i % 5) as f64);
    }
    let mut x = start.clone();
    let nx = super::matrix::vec_norm(&x);
    x.iter_mut().for_each(|z| *z /= nx);
    let mut sigma_sq = 0.0;
    for _ in 0..500 {
        let y = m.mat_vec(&x);
        let z = m.adjoint_vec(&y);
        let est = super::matrix::vec_norm(&y).powi(2);
        let nz = super::matrix::vec_norm(&z);
        if nz == 0.0 {
            *start = x;
            return 0.0;
        }
        x = z.into_iter().map(|w| w / nz).collect();
        let converged = (est - sigma_sq).abs() <= 1e-15 * est.max(f64::MIN_POSITIVE);
        sigma_sq = est;
        if converged {
            break;
        }
    }
    *start = x;
    sigma_sq.max(0.0).sqrt()
}

/// `sup_{x≠0} ‖Mx‖_{G_out} / ‖x‖_{G_in}` = `‖R_out M R_in⁻¹‖₂` with `G = RᴴR`.
pub fn weighted_operator_norm(
    m: &CMatrix,
    gram_out: &HermitianMatrix,
    gram_in: &HermitianMatrix,
) -> Result<f64> {
    if gram_out.order() != m.rows() || gram_in.order() != m.cols() {
        return Err(Error::Dimension(format!(
            "operator is {}x{} but Gram matrices have orders {} and {}",
            m.rows(),
            m.cols(),
            gram_out.order(),
            gram_in.order()
        )));
    }
    Ok(spectral_norm(&weighted(m, gram_out, gram_in)?))
}

/// `R_out M R_in⁻¹`, the representation of `M` in orthonormal coordinates.
pub fn weighted(
    m: &CMatrix,
    gram_out: &HermitianMatrix,
    gram_in: &HermitianMatrix,
) -> Result<CMatrix> {
    let left = if gram_out.is_identity() {
        m.clone()
    } else {
        gram_out.cholesky_upper()?.matmul(m)
    };
    if gram_in.is_identity() {
        Ok(left)
    } else {
        let r_in = gram_in.cholesky_upper()?;
        // left · R_in⁻¹ = (R_in⁻ᴴ leftᴴ)ᴴ
        Ok(r_in.adjoint().solve(&left.adjoint())?.adjoint())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_support::{random_hermitian, random_matrix, random_pd};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_eigenvalues() {
        let e = hermitian_eigenvalues(&HermitianMatrix::identity(3));
        assert_eq!(e, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn two_by_two_analytic() {
        let h = HermitianMatrix::new(CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        let e = hermitian_eigenvalues(&h);
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn random_hermitian_trace_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let h = random_hermitian(&mut rng, 6);
            let e = hermitian_eig(&h);
            let trace: f64 = e.values.iter().sum();
            assert!((trace - h.as_matrix().trace().re).abs() < 1e-10);
            // determinant via LU on the original matrix
            let det = determinant(h.as_matrix());
            let prod: f64 = e.values.iter().product();
            assert!((prod - det.re).abs() < 1e-10 * det.norm().max(1.0), "{prod} vs {det}");
            let norm = h.as_matrix().norm_fro();
            for (k, &lambda) in e.values.iter().enumerate() {
                let v: Vec<C64> = (0..6).map(|i| e.vectors[(i, k)]).collect();
                let hv = h.as_matrix().mat_vec(&v);
                let res: f64 = hv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b * lambda).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res < 1e-10 * norm);
            }
        }
    }

    fn determinant(a: &CMatrix) -> C64 {
        // Gaussian elimination, test-only oracle.
        let n = a.rows();
        let mut m = a.clone();
        let mut det = c(1.0, 0.0);
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| m[(i, k)].norm().total_cmp(&m[(j, k)].norm())).unwrap();
            if p != k {
                for j in 0..n {
                    let t = m[(k, j)];
                    m[(k, j)] = m[(p, j)];
                    m[(p, j)] = t;
                }
                det = -det;
            }
            det *= m[(k, k)];
            for i in (k + 1)..n {
                let f = m[(i, k)] / m[(k, k)];
                for j in k..n {
                    let u = m[(k, j)];
                    m[(i, j)] -= f * u;
                }
            }
        }
        det
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::Shape(_))));
    }

    #[test]
    fn cholesky_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_pd(&mut rng, 5);
        let r = g.cholesky_upper().unwrap();
        let back = r.adjoint().matmul(&r);
        assert!((&back - g.as_matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn indefinite_gram_rejected() {
        let g = HermitianMatrix::real_diag(&[1.0, -1.0]);
        let m = CMatrix::identity(2);
        assert!(matches!(
            weighted_operator_norm(&m, &g, &g),
            Err(Error::Definiteness(_))
        ));
    }

    #[test]
    fn weighted_norm_trivial_cases() {
        let i3 = HermitianMatrix::identity(3);
        assert!((weighted_operator_norm(&CMatrix::identity(3), &i3, &i3).unwrap() - 1.0).abs() < 1e-14);
        let i2 = HermitianMatrix::identity(2);
        let d = CMatrix::real_diag(&[3.0, 1.0]);
        assert!((weighted_operator_norm(&d, &i2, &i2).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn weighted_norm_dominates_random_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_matrix(&mut rng, 4, 3, 1.0);
        let g_out = random_pd(&mut rng, 4);
        let g_in = random_pd(&mut rng, 3);
        let norm = weighted_operator_norm(&m, &g_out, &g_in).unwrap();
        let mut best: f64 = 0.0;
        for _ in 0..100_000 {
            let x: Vec<C64> = (0..3)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let ratio = (g_out.quadratic_form(&m.mat_vec(&x)) / g_in.quadratic_form(&x)).sqrt();
            best = best.max(ratio);
        }
        assert!(best <= norm * (1.0 + 1e-12));
        assert!(norm - best < 1e-2 * norm, "sampled {best}, computed {norm}");
    }

    #[test]
    fn warm_power_iteration_matches_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(&mut rng, 7, 7, 1.0);
        let mut v = Vec::new();
        let a = spectral_norm_warm(&m, &mut v);
        let b = spectral_norm(&m);
        assert!((a - b).abs() < 1e-9 * b);
    }
}
