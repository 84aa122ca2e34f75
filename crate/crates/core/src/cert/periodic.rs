use super::report::{CertificateReport, Verdict};
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, spectral_radius, weighted, weighted_operator_norm, zoh_step, CMatrix};
use crate::model::{delta, ModalSystem};

/// Margin added to `ρ(Δ(h))` before it is used as a decay base.
pub const DELTA_MARGIN: f64 = 1e-6;
const MD_POWERS: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PetCert {
    pub rho: f64,
    pub delta: f64,
    /// `max_{k≤512} ‖Δ(h)ᵏ‖/δᵏ`.
    pub m_d: f64,
    pub norm_s_h: f64,
    pub eps_star: f64,
}

impl PetCert {
    /// `f(ℓ) = −log(δ^ℓ(1−ε₀) + ε₀)/(ℓh)` with `ε₀ = ε/ε*`.
    pub fn rate(&self, epsilon: f64, ell: usize, h: f64) -> f64 {
        let e0 = epsilon / self.eps_star;
        -(self.delta.powi(ell as i32) * (1.0 - e0) + e0).ln() / (ell as f64 * h)
    }
}

pub fn pet_cert(sys: &ModalSystem, h: f64) -> Result<PetCert> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("period must be positive, got {h}")));
    }
    let d = weighted(&delta(sys, h)?, sys.gram(), sys.gram())?;
    let rho = spectral_radius(&d)?;
    let dl = rho + DELTA_MARGIN;
    if dl >= 1.0 {
        return Err(Error::Certificate(format!(
            "Delta(h) is not power stable at h = {h}: rho = {rho:.12e}"
        )));
    }
    let mut pow = CMatrix::identity(d.rows());
    let mut m_d: f64 = 1.0;
    let mut scale = 1.0;
    for _ in 0..MD_POWERS {
        pow = pow.matmul(&d);
        scale *= dl;
        m_d = m_d.max(spectral_norm(&pow) / scale);
    }
    let gamma = zoh_step(sys.a(), sys.b(), h)?.gamma;
    let norm_s_h = weighted_operator_norm(&gamma, sys.gram(), sys.gram_u())?;
    Ok(PetCert { rho, delta: dl, m_d, norm_s_h, eps_star: (1.0 - dl) / (m_d * norm_s_h) })
}

pub fn pet_report(sys: &ModalSystem, h: f64, ell_max: usize, epsilon: f64) -> Result<CertificateReport> {
    let base = CertificateReport::new("periodic_event", Verdict::NotCertified)
        .input("h", h)
        .input("ell_max", ell_max as f64)
        .input("epsilon", epsilon)
        .input("truncation_order", sys.truncation_order() as f64);
    let c = match pet_cert(sys, h) {
        Ok(c) => c,
        Err(Error::Certificate(msg)) => return Ok(base.note(msg)),
        Err(e) => return Err(e),
    };
    let mut r = base
        .real("rho", c.rho)
        .real("delta", c.delta)
        .real("M_d", c.m_d)
        .real("norm_S_h", c.norm_s_h)
        .real("eps_star", c.eps_star)
        .note(format!("M_d is the maximum over powers k <= {MD_POWERS}"));
    if epsilon < c.eps_star {
        r.verdict = Verdict::Certified;
        r = r.real("gamma", c.rate(epsilon, ell_max, h));
    } else {
        r = r.note("epsilon is not below eps_star");
    }
    Ok(r)
}

/// `(h, ρ(Δ(h)))` for each period.
pub fn h_scan(sys: &ModalSystem, hs: &[f64]) -> Result<Vec<(f64, f64)>> {
    hs.iter()
        .map(|&h| {
            if !(h > 0.0) {
                return Err(Error::Domain(format!("period must be positive, got {h}")));
            }
            let d = weighted(&delta(sys, h)?, sys.gram(), sys.gram())?;
            Ok((h, spectral_radius(&d)?))
        })
        .collect()
}

/// Whether `ρ` lies in the certified set `ρ < 1 − 1e-6`.
pub fn h_certified(rho: f64) -> bool {
    rho < 1.0 - DELTA_MARGIN
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HermitianMatrix;
    use crate::model::{build_custom_modal, SystemKind};

    fn scalar(lambda: f64, f: f64) -> ModalSystem {
        ModalSystem::new(
            SystemKind::Custom,
            CMatrix::real_diag(&[lambda]),
            CMatrix::real_diag(&[1.0]),
            CMatrix::real_diag(&[f]),
            HermitianMatrix::identity(1),
            HermitianMatrix::identity(1),
            vec!["x".into()],
            1,
        )
        .unwrap()
    }

    #[test]
    fn scalar_example() {
        let c = pet_cert(&scalar(-1.0, -1.0), 0.1).unwrap();
        let want = 2.0 * (-0.1f64).exp() - 1.0;
        assert!((c.rho - want).abs() < 1e-9);
        assert!((c.delta - want - 1e-6).abs() < 1e-9);
        assert!((c.m_d - 1.0).abs() < 1e-12);
        assert!((c.norm_s_h - (1.0 - (-0.1f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn open_loop_diagonal() {
        let sys = build_custom_modal(&[-1.0, -3.0], &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        let c = pet_cert(&sys, 0.2).unwrap();
        assert!((c.rho - (-0.2f64).exp()).abs() < 1e-9);
        assert!(c.eps_star > 0.0);
    }

    #[test]
    fn rate_positive_and_decreasing() {
        let c = pet_cert(&scalar(-1.0, -1.0), 0.1).unwrap();
        let eps = 0.5 * c.eps_star;
        let rates: Vec<f64> = (1..=50).map(|l| c.rate(eps, l, 0.1)).collect();
        assert!(rates.iter().all(|&r| r > 0.0));
        assert!(rates.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn unstable_sampling_not_certified() {
        assert!(matches!(pet_cert(&scalar(1.0, 0.0), 0.1), Err(Error::Certificate(_))));
    }

    #[test]
    fn scan_approaches_one_as_h_shrinks() {
        let rows = h_scan(&scalar(-1.0, -1.0), &[1e-1, 1e-3, 1e-5]).unwrap();
        assert!(rows.windows(2).all(|w| w[1].1 > w[0].1));
        assert!(rows.iter().all(|r| h_certified(r.1)));
        assert!(1.0 - rows[2].1 < 1e-4);
    }
}
