//! Stability, threshold, inter-event-time and decomposition certificates.

mod bounded;
mod decomposed;
mod periodic;
mod poles;
mod report;

pub use bounded::{
    closed_loop_growth, coercivity, coercivity_report, decay_thm41, eps_bound_thm41,
    largest_two_decimal_below, lyap_cert_thm42, m_min, m_min_report, theta_bound, theta_report,
    bounded_threshold_report, lyapunov_threshold_report, zoh_input_norm, Coercivity, MMin, Theta, LyapunovThreshold,
};
pub use decomposed::{
    lmi_check, lmi_max_eps, lmi_report, lmi_search, lmi_search_general, margin_decomposed,
    plus_coordinates, LmiStrategy,
    LmiVerdict, LmiWitness, LMI_TOL,
};
pub use periodic::{h_certified, h_scan, pet_cert, pet_report, PetCert, DELTA_MARGIN};
pub use poles::{cascade_pole_check, pole_report, PoleCheck};
pub use report::{CertificateReport, OutputValue, Verdict};
