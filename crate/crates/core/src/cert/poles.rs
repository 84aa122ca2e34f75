use super::report::{CertificateReport, Verdict};
use crate::linalg::{c, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleCheck {
    pub g1_poles: [C64; 2],
    pub g2_pole: f64,
    pub stable: bool,
}

/// Poles of the scalar cascade transfer functions: roots of
/// `λ² − (G + HF₂)λ − B⁺Hf` and the eigenvalue `G + HF₂`.
pub fn cascade_pole_check(g: f64, h: f64, f: f64, f2: f64, b_plus: f64) -> PoleCheck {
    let s = g + h * f2;
    let p = b_plus * h * f;
    let disc = c(s * s + 4.0 * p, 0.0).sqrt();
    let g1_poles = [(c(s, 0.0) + disc) / 2.0, (c(s, 0.0) - disc) / 2.0];
    let stable = g1_poles.iter().all(|z| z.re < 0.0) && s < 0.0;
    PoleCheck { g1_poles, g2_pole: s, stable }
}

pub fn pole_report(g: f64, h: f64, f: f64, f2: f64, b_plus: f64) -> CertificateReport {
    let pc = cascade_pole_check(g, h, f, f2, b_plus);
    CertificateReport::new("cascade_poles", if pc.stable { Verdict::Certified } else { Verdict::NotCertified })
        .input("G", g)
        .input("H", h)
        .input("f", f)
        .input("F2", f2)
        .input("B_plus", b_plus)
        .real("g1_pole_1_re", pc.g1_poles[0].re)
        .real("g1_pole_1_im", pc.g1_poles[0].im)
        .real("g1_pole_2_re", pc.g1_poles[1].re)
        .real("g1_pole_2_im", pc.g1_poles[1].im)
        .real("g2_pole", pc.g2_pole)
}
