//! Turns a [`RunConfig`] into a system, an initial state and the optional
//! spectral split.

use std::f64::consts::PI;

use etcsim_core::model::{
    beam_case_study_initial, build_beam, build_custom_modal, build_heat_cascade, build_heat_rod,
    cascade_constant_initial, decompose,
};
use etcsim_core::{Decomposition, ModalSystem, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{InitialKind, Preset, RunConfig};
use crate::error::{CliError, CliResult};

pub struct Scenario {
    pub system: ModalSystem,
    pub x0: StateVector,
    pub plus: Option<Decomposition>,
}

pub fn build_system(cfg: &RunConfig) -> CliResult<ModalSystem> {
    let s = &cfg.system;
    Ok(match s.preset {
        Preset::HeatRod => build_heat_rod(s.n),
        Preset::HeatCascade => build_heat_cascade(s.n, &s.cascade)?,
        Preset::Beam => build_beam(s.n, s.gamma, s.feedback_gain)?,
        Preset::CustomModal => build_custom_modal(&s.eigenvalues, &s.input_coeffs, &s.feedback_coeffs)?,
    })
}

pub fn initial_state(cfg: &RunConfig, sys: &ModalSystem) -> CliResult<StateVector> {
    let n = sys.n_state();
    let init = &cfg.initial;
    match init.kind {
        // The heat rod starts on φ₁, the setting of its Zeno example.
        InitialKind::CaseStudy => match cfg.system.preset {
            Preset::HeatRod => {
                let mut x = StateVector::zeros(n);
                x[1.min(n - 1)] = C64::new(1.0, 0.0);
                Ok(x)
            }
            Preset::HeatCascade => Ok(cascade_constant_initial(sys, init.z2.unwrap_or(-1.0))),
            Preset::Beam => Ok(beam_case_study_initial(sys)?),
            Preset::CustomModal => Err(CliError::Invalid("initial.preset: custom_modal has no case-study initial state".into())),
        },
        InitialKind::Mode => {
            let m = init.mode.expect("validated");
            if m >= n {
                return Err(CliError::Invalid(format!("initial.mode: {m} is out of range for {n} coordinates")));
            }
            let mut x = StateVector::zeros(n);
            x[m] = C64::new(1.0, 0.0);
            Ok(x)
        }
        InitialKind::Coefficients => {
            if init.coefficients.len() != n {
                return Err(CliError::Invalid(format!(
                    "initial.coefficients: {} values for {n} coordinates",
                    init.coefficients.len()
                )));
            }
            Ok(StateVector::from_real(&init.coefficients))
        }
        InitialKind::Random => Ok(random_state(n, cfg.sim.seed)),
    }
}

/// Uniform real coefficients in `[-1, 1]`.
pub fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    StateVector::from_real(&(0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect::<Vec<_>>())
}

pub fn build(cfg: &RunConfig) -> CliResult<Scenario> {
    let system = build_system(cfg)?;
    let x0 = initial_state(cfg, &system)?;
    let plus = match cfg.system.alpha {
        Some(alpha) => Some(decompose(&system, alpha)?),
        None => None,
    };
    Ok(Scenario { system, x0, plus })
}

/// `7γπ²/4` for the beam, the decay rate targeted on the unstable part.
pub fn beam_gamma_plus(gamma: f64) -> f64 {
    7.0 * gamma * PI * PI / 4.0
}
