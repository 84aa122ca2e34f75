//! Random inputs and independent oracles shared by the linalg unit tests.

use rand::Rng;

use super::hermitian::HermitianMatrix;
use super::matrix::{c, CMatrix, C64};

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, imag_scale: f64) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.gen_range(-1.0..1.0), imag_scale * rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    let m = random_matrix(rng, n, n, 1.0);
    HermitianMatrix::new((&m + &m.adjoint()).scale_real(0.5)).unwrap()
}

pub fn random_pd(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    let m = random_matrix(rng, n, n, 1.0);
    let g = &m.adjoint().matmul(&m) + &CMatrix::identity(n).scale_real(0.5);
    HermitianMatrix::new(g).unwrap()
}

/// Random matrix shifted so its spectral abscissa is negative.
pub fn random_hurwitz(rng: &mut impl Rng, n: usize) -> CMatrix {
    let m = random_matrix(rng, n, n, 0.3);
    // Gershgorin: shifting by the max row sum pushes every disc left of zero.
    let shift = (0..n)
        .map(|i| m.row_slice(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    &m - &CMatrix::identity(n).scale_real(shift + 1.0)
}

/// Characteristic polynomial by Faddeev–LeVerrier, monic, highest degree first.
pub fn char_poly(a: &CMatrix) -> Vec<C64> {
    let n = a.rows();
    let mut coeffs = vec![c(1.0, 0.0)];
    let mut m = CMatrix::zeros(n, n);
    let ident = CMatrix::identity(n);
    let mut ck = c(1.0, 0.0);
    for k in 1..=n {
        m = &a.matmul(&m) + &ident.scale(ck);
        let am = a.matmul(&m);
        ck = -am.trace() / k as f64;
        coeffs.push(ck);
    }
    coeffs
}

/// Polynomial roots by Durand–Kerner iteration followed by Newton polishing.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let deg = coeffs.len() - 1;
    let eval = |z: C64| coeffs.iter().fold(c(0.0, 0.0), |acc, &a| acc * z + a);
    let deriv = |z: C64| {
        coeffs[..deg]
            .iter()
            .enumerate()
            .fold(c(0.0, 0.0), |acc, (i, &a)| acc * z + a * (deg - i) as f64)
    };
    let radius = 1.0 + coeffs[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut roots: Vec<C64> = (0..deg)
        .map(|k| C64::from_polar(radius * 0.9, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let zi = roots[i];
            let denom = (0..deg)
                .filter(|&j| j != i)
                .fold(c(1.0, 0.0), |acc, j| acc * (zi - roots[j]));
            let step = eval(zi) / denom;
            roots[i] = zi - step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    for z in roots.iter_mut() {
        for _ in 0..5 {
            let d = deriv(*z);
            if d.norm() > 0.0 {
                *z -= eval(*z) / d;
            }
        }
    }
    roots
}

pub fn companion_spectral_radius(a: &CMatrix) -> f64 {
    poly_roots(&char_poly(a))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}
