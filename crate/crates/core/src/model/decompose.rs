use super::system::ModalSystem;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix, HermitianMatrix};

const GAP_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-9;

/// Split of the modal coordinates at the abscissa `alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub plus_indices: Vec<usize>,
    pub minus_indices: Vec<usize>,
    pub alpha: f64,
    /// `max Re λ` over the minus part; `-∞` when it is empty.
    pub omega_minus: f64,
    /// Finitely many eigenvalues at or right of `alpha` (always true on a
    /// truncation, recorded for the report).
    pub finite_plus_spectrum: bool,
    pub minus_stable: bool,
    pub controllable: bool,
}

/// Restriction of a system to its plus coordinates.
#[derive(Clone, Debug)]
pub struct PlusPart {
    pub a: CMatrix,
    pub b: CMatrix,
    pub f: CMatrix,
    pub gram: HermitianMatrix,
}

impl Decomposition {
    pub fn plus_part(&self, sys: &ModalSystem) -> Result<PlusPart> {
        let p = &self.plus_indices;
        let all_inputs: Vec<usize> = (0..sys.n_input()).collect();
        Ok(PlusPart {
            a: sys.a().select(p, p),
            b: sys.b().select(p, &all_inputs),
            f: sys.f().select(&all_inputs, p),
            gram: HermitianMatrix::new(sys.gram().as_matrix().select(p, p))?,
        })
    }

    /// Copy of `x` with the minus coordinates zeroed.
    pub fn project_plus(&self, x: &[crate::linalg::C64]) -> Vec<crate::linalg::C64> {
        let mut out = vec![crate::linalg::ZERO; x.len()];
        for &i in &self.plus_indices {
            out[i] = x[i];
        }
        out
    }

    pub fn assumptions_hold(&self) -> bool {
        self.finite_plus_spectrum && self.minus_stable && self.controllable
    }
}

pub fn decompose(sys: &ModalSystem, alpha: f64) -> Result<Decomposition> {
    if !sys.a().is_diagonal() {
        return Err(Error::Unsupported(
            "decomposition is implemented for diagonal generators only".into(),
        ));
    }
    let lambda = sys.a().diagonal();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut omega_minus = f64::NEG_INFINITY;
    for (i, l) in lambda.iter().enumerate() {
        if (l.re - alpha).abs() < GAP_TOL {
            return Err(Error::Gap(format!(
                "eigenvalue {l} of coordinate {i} lies on Re λ = {alpha}"
            )));
        }
        if l.re >= alpha {
            plus.push(i);
        } else {
            minus.push(i);
            omega_minus = omega_minus.max(l.re);
        }
    }
    let inputs: Vec<usize> = (0..sys.n_input()).collect();
    let a_plus = sys.a().select(&plus, &plus);
    let b_plus = sys.b().select(&plus, &inputs);
    Ok(Decomposition {
        controllable: pbh_controllable(&a_plus, &b_plus),
        plus_indices: plus,
        minus_indices: minus,
        alpha,
        omega_minus,
        finite_plus_spectrum: true,
        minus_stable: omega_minus < 0.0,
    })
}

/// Hautus test on a diagonal `A`: `[λI − A, B]` has full row rank for every
/// eigenvalue `λ`, judged by its smallest singular value.
pub fn pbh_controllable(a: &CMatrix, b: &CMatrix) -> bool {
    let p = a.rows();
    if p == 0 {
        return true;
    }
    let m = b.cols();
    a.diagonal().iter().all(|&l| {
        let mut h = CMatrix::zeros(p, p + m);
        for i in 0..p {
            for j in 0..p {
                h[(i, j)] = -a[(i, j)];
            }
            h[(i, i)] += l;
        }
        h.set_block(0, p, b);
        let hh = HermitianMatrix::new(h.matmul(&h.adjoint()).hermitian_part())
            .expect("product with own adjoint is Hermitian");
        let smin = hermitian_eigenvalues(&hh)[0].max(0.0).sqrt();
        smin > RANK_TOL * h.norm_fro().max(1.0)
    })
}
