//! Modal truncations of the example systems and their solution operators.

mod builders;
mod decompose;
mod system;
mod zeno;

pub use builders::{
    beam_f_scale, beam_index, beam_lambda, beam_mode, beam_nu, beam_case_study_initial,
    beam_project_initial, beam_sine_coefficients, build_beam, build_custom_modal,
    build_heat_cascade, build_heat_rod, cascade_constant_initial, simpson, CascadeParams,
};
pub use decompose::{decompose, pbh_controllable, Decomposition, PlusPart};
pub use system::{apply_semigroup, delta, ModalSystem, Propagator, StateVector, SystemKind};
pub use zeno::{heat_first_event, shift_zeno_closed_form, shift_zeno_sequence, ZenoVariant};
