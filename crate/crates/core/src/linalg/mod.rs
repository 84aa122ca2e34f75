//! Dense complex linear algebra for small matrices.

mod expm;
mod hermitian;
mod lyapunov;
mod matrix;
mod spectral;

#[cfg(test)]
pub(crate) mod test_support;

pub use expm::{matexp, phi1, zoh_step, ZohStep, THETA_13};
pub use hermitian::{
    hermitian_eig, hermitian_eigenvalues, spectral_norm, spectral_norm_warm, weighted,
    weighted_operator_norm, Eigen, HermitianMatrix,
};
pub use lyapunov::{hurwitz_growth, lyapunov_residual, solve_lyapunov};
pub use matrix::{c, vec_add, vec_norm, vec_sub, CMatrix, C64, ONE, ZERO};
pub use spectral::{spectral_abscissa, spectral_radius, spectral_radius_estimate, SpectralRadiusEstimate};
