//! Event-triggering mechanisms and event-instant detection.
//!
//! Continuous monitoring is approximated by scanning the trigger margin on a
//! uniform grid with exact propagation and bisecting the first bracket in
//! which it turns positive. Periodic variants look only at multiples of `h`.

use crate::error::{Error, Result};
use crate::linalg::{vec_sub, C64};
use crate::model::{Decomposition, ModalSystem, Propagator};

/// Norm below which a sampled state counts as zero for relative triggers.
pub const DEGENERATE_NORM: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EtmVariant {
    /// `‖Fx(t) − Fx(t_k)‖_U > ε‖x(t_k)‖`
    SampleRelative,
    /// `‖Fx(t) − Fx(t_k)‖_U > ε‖x(t)‖`
    CurrentRelative,
    /// [`EtmVariant::SampleRelative`] with an inter-event cap `τ_max`.
    SampleRelativeCapped,
    /// Sample-relative test evaluated only at multiples of `h`, capped at
    /// `ℓ_max·h`.
    PeriodicEvent,
    /// Updates every `h` regardless of the state.
    PurePeriodic,
    /// `‖x(t) − x(t_k)‖ > ε‖x(t_k)‖`
    StateErrSampleRelative,
    /// `‖x(t) − x(t_k)‖ > ε‖x(t)‖`
    StateErrCurrentRelative,
    /// `‖F⁺x⁺(t) − F⁺x⁺(t_k)‖_U > ε‖x⁺(t)‖` with cap `τ_max`.
    PlusPartCurrentRelativeCapped,
}

impl EtmVariant {
    pub const ALL: [EtmVariant; 8] = [
        EtmVariant::SampleRelative,
        EtmVariant::CurrentRelative,
        EtmVariant::SampleRelativeCapped,
        EtmVariant::PeriodicEvent,
        EtmVariant::PurePeriodic,
        EtmVariant::StateErrSampleRelative,
        EtmVariant::StateErrCurrentRelative,
        EtmVariant::PlusPartCurrentRelativeCapped,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EtmVariant::SampleRelative => "sample_relative",
            EtmVariant::CurrentRelative => "current_relative",
            EtmVariant::SampleRelativeCapped => "sample_relative_capped",
            EtmVariant::PeriodicEvent => "periodic_event",
            EtmVariant::PurePeriodic => "pure_periodic",
            EtmVariant::StateErrSampleRelative => "state_err_sample_relative",
            EtmVariant::StateErrCurrentRelative => "state_err_current_relative",
            EtmVariant::PlusPartCurrentRelativeCapped => "plus_part_current_relative_capped",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }

    pub fn is_periodic(self) -> bool {
        matches!(self, EtmVariant::PeriodicEvent | EtmVariant::PurePeriodic)
    }

    pub fn needs_tau_max(self) -> bool {
        matches!(
            self,
            EtmVariant::SampleRelativeCapped | EtmVariant::PlusPartCurrentRelativeCapped
        )
    }

    pub fn needs_decomposition(self) -> bool {
        self == EtmVariant::PlusPartCurrentRelativeCapped
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtmSpec {
    pub variant: EtmVariant,
    pub epsilon: f64,
    pub tau_max: Option<f64>,
    pub h: Option<f64>,
    pub ell_max: Option<usize>,
    pub dt_scan: f64,
    pub dt_min: f64,
    pub tol_event: f64,
    /// Skip the `dt_min` guard so Zeno sequences can be measured.
    pub allow_zeno: bool,
}

impl EtmSpec {
    pub const DEFAULT_DT_SCAN: f64 = 1e-3;
    pub const DEFAULT_DT_MIN: f64 = 1e-7;
    pub const DEFAULT_TOL_EVENT: f64 = 1e-9;

    /// Spec with default detection tolerances and no optional parameters.
    pub fn new(variant: EtmVariant, epsilon: f64) -> Self {
        Self {
            variant,
            epsilon,
            tau_max: None,
            h: None,
            ell_max: None,
            dt_scan: Self::DEFAULT_DT_SCAN,
            dt_min: Self::DEFAULT_DT_MIN,
            tol_event: Self::DEFAULT_TOL_EVENT,
            allow_zeno: false,
        }
    }

    pub fn capped(variant: EtmVariant, epsilon: f64, tau_max: f64) -> Self {
        Self { tau_max: Some(tau_max), ..Self::new(variant, epsilon) }
    }

    pub fn periodic(h: f64) -> Self {
        Self { h: Some(h), ..Self::new(EtmVariant::PurePeriodic, 0.0) }
    }

    pub fn periodic_event(epsilon: f64, h: f64, ell_max: usize) -> Self {
        Self {
            h: Some(h),
            ell_max: Some(ell_max),
            ..Self::new(EtmVariant::PeriodicEvent, epsilon)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, why: &str| Err(Error::Config(format!("{key}: {why}")));
        if self.variant != EtmVariant::PurePeriodic && !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon", "must be a positive finite number");
        }
        if self.variant.needs_tau_max() && self.tau_max.is_none() {
            return bad("tau_max", "required by this variant");
        }
        if let Some(t) = self.tau_max {
            if !(t > 0.0 && t.is_finite()) {
                return bad("tau_max", "must be positive");
            }
        }
        if self.variant.is_periodic() {
            match self.h {
                Some(h) if h > 0.0 && h.is_finite() => {}
                _ => return bad("h", "periodic variants need h > 0"),
            }
        }
        if self.variant == EtmVariant::PeriodicEvent && !matches!(self.ell_max, Some(l) if l >= 1) {
            return bad("ell_max", "periodic event triggering needs ell_max >= 1");
        }
        if !(self.dt_scan > 0.0) {
            return bad("dt_scan", "must be positive");
        }
        if !(self.tol_event > 0.0) {
            return bad("tol_event", "must be positive");
        }
        if !(self.dt_min >= 0.0 && self.dt_min < self.dt_scan) {
            return bad("dt_min", "must satisfy 0 <= dt_min < dt_scan");
        }
        Ok(())
    }
}

/// Why an inter-event interval ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventReason {
    Triggered,
    Capped,
    Horizon,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventOutcome {
    pub t_next: f64,
    pub reason: EventReason,
    /// Trigger margin at `t_next`; `None` for pure periodic sampling.
    pub margin: Option<f64>,
    /// State at `t_next`.
    pub state: Vec<C64>,
}

/// Input held on `[t_k, t_{k+1})`: `F x_k`, or `F⁺x⁺_k` for the plus-part
/// variant.
pub fn held_input(
    spec: &EtmSpec,
    sys: &ModalSystem,
    x_k: &[C64],
    plus: Option<&Decomposition>,
) -> Result<Vec<C64>> {
    if spec.variant.needs_decomposition() {
        let d = plus.ok_or_else(missing_decomposition)?;
        Ok(sys.input(&d.project_plus(x_k)))
    } else {
        Ok(sys.input(x_k))
    }
}

fn missing_decomposition() -> Error {
    Error::Config("plus-part trigger requires a decomposition".into())
}

/// `g = ‖error‖ − ε‖reference‖`; an event fires when `g > 0`.
pub fn trigger_margin(
    spec: &EtmSpec,
    sys: &ModalSystem,
    x_k: &[C64],
    x_t: &[C64],
    plus: Option<&Decomposition>,
) -> Result<f64> {
    sys.check_state(x_k)?;
    sys.check_state(x_t)?;
    let eps = spec.epsilon;
    let input_err = || sys.input_norm(&sys.input(&vec_sub(x_t, x_k)));
    let state_err = || sys.state_norm(&vec_sub(x_t, x_k));
    Ok(match spec.variant {
        EtmVariant::SampleRelative | EtmVariant::SampleRelativeCapped | EtmVariant::PeriodicEvent => {
            input_err() - eps * sys.state_norm(x_k)
        }
        EtmVariant::CurrentRelative => input_err() - eps * sys.state_norm(x_t),
        EtmVariant::StateErrSampleRelative => state_err() - eps * sys.state_norm(x_k),
        EtmVariant::StateErrCurrentRelative => state_err() - eps * sys.state_norm(x_t),
        EtmVariant::PlusPartCurrentRelativeCapped => {
            let d = plus.ok_or_else(missing_decomposition)?;
            let pk = d.project_plus(x_k);
            let pt = d.project_plus(x_t);
            sys.input_norm(&sys.input(&vec_sub(&pt, &pk))) - eps * sys.state_norm(&pt)
        }
        EtmVariant::PurePeriodic => {
            return Err(Error::Config("pure periodic sampling has no trigger margin".into()))
        }
    })
}

/// Norm the threshold multiplies: `‖x_k‖`, `‖x(t)‖` or `‖Πx(t)‖`.
pub fn reference_norm(
    spec: &EtmSpec,
    sys: &ModalSystem,
    x_k: &[C64],
    x_t: &[C64],
    plus: Option<&Decomposition>,
) -> Result<f64> {
    Ok(match spec.variant {
        EtmVariant::SampleRelative
        | EtmVariant::SampleRelativeCapped
        | EtmVariant::PeriodicEvent
        | EtmVariant::StateErrSampleRelative
        | EtmVariant::PurePeriodic => sys.state_norm(x_k),
        EtmVariant::CurrentRelative | EtmVariant::StateErrCurrentRelative => sys.state_norm(x_t),
        EtmVariant::PlusPartCurrentRelativeCapped => {
            let d = plus.ok_or_else(missing_decomposition)?;
            sys.state_norm(&d.project_plus(x_t))
        }
    })
}

/// Next update instant after `t_k` (see the module documentation).
pub fn next_event(
    spec: &EtmSpec,
    sys: &ModalSystem,
    x_k: &[C64],
    t_k: f64,
    t_horizon: f64,
    plus: Option<&Decomposition>,
) -> Result<EventOutcome> {
    sys.check_state(x_k)?;
    if !(t_horizon > t_k) {
        return Err(Error::Domain(format!("horizon {t_horizon} must exceed t_k = {t_k}")));
    }
    let u_k = held_input(spec, sys, x_k, plus)?;
    let mut prop = Propagator::new(sys);
    let remaining = t_horizon - t_k;

    let outcome = match spec.variant {
        EtmVariant::PurePeriodic => {
            let h = spec.h.ok_or_else(|| Error::Config("h missing".into()))?;
            let (tau, reason) = if h <= remaining { (h, EventReason::Capped) } else { (remaining, EventReason::Horizon) };
            EventOutcome {
                t_next: t_k + tau,
                reason,
                margin: None,
                state: prop.advance_once(x_k, &u_k, tau)?,
            }
        }
        EtmVariant::PeriodicEvent => periodic_event(spec, sys, &mut prop, x_k, &u_k, t_k, t_horizon, plus)?,
        _ => continuous(spec, sys, &mut prop, x_k, &u_k, t_k, remaining, plus)?,
    };

    let dt = outcome.t_next - t_k;
    if outcome.reason == EventReason::Triggered && dt < spec.dt_min && !spec.allow_zeno {
        return Err(Error::ZenoSuspected { t_k, dt });
    }
    Ok(outcome)
}

#[allow(clippy::too_many_arguments)]
fn periodic_event(
    spec: &EtmSpec,
    sys: &ModalSystem,
    prop: &mut Propagator,
    x_k: &[C64],
    u_k: &[C64],
    t_k: f64,
    t_horizon: f64,
    plus: Option<&Decomposition>,
) -> Result<EventOutcome> {
    let h = spec.h.ok_or_else(|| Error::Config("h missing".into()))?;
    let ell_max = spec.ell_max.ok_or_else(|| Error::Config("ell_max missing".into()))?;
    let degenerate = sys.state_norm(x_k) < DEGENERATE_NORM;
    let mut x = x_k.to_vec();
    for ell in 1..=ell_max {
        let mut t = t_k + ell as f64 * h;
        if (t - t_horizon).abs() <= 1e-12 * h {
            t = t_horizon;
        }
        if t > t_horizon {
            let tau_last = (t_horizon - (t_k + (ell - 1) as f64 * h)).max(0.0);
            let state = prop.advance_once(&x, u_k, tau_last)?;
            let margin = trigger_margin(spec, sys, x_k, &state, plus)?;
            return Ok(EventOutcome { t_next: t_horizon, reason: EventReason::Horizon, margin: Some(margin), state });
        }
        x = prop.advance(&x, u_k, h)?;
        let g = trigger_margin(spec, sys, x_k, &x, plus)?;
        if !degenerate && g > 0.0 {
            return Ok(EventOutcome { t_next: t, reason: EventReason::Triggered, margin: Some(g), state: x });
        }
        if ell == ell_max {
            return Ok(EventOutcome { t_next: t, reason: EventReason::Capped, margin: Some(g), state: x });
        }
    }
    unreachable!("ell_max >= 1 is validated")
}

#[allow(clippy::too_many_arguments)]
fn continuous(
    spec: &EtmSpec,
    sys: &ModalSystem,
    prop: &mut Propagator,
    x_k: &[C64],
    u_k: &[C64],
    t_k: f64,
    remaining: f64,
    plus: Option<&Decomposition>,
) -> Result<EventOutcome> {
    let cap = if spec.variant.needs_tau_max() { spec.tau_max } else { None };
    let (tau_end, end_reason) = match cap {
        Some(c) if c <= remaining => (c, EventReason::Capped),
        _ => (remaining, EventReason::Horizon),
    };
    let degenerate = sys.state_norm(x_k) < DEGENERATE_NORM;
    if degenerate {
        let state = prop.advance_once(x_k, u_k, tau_end)?;
        let margin = trigger_margin(spec, sys, x_k, &state, plus)?;
        return Ok(EventOutcome { t_next: t_k + tau_end, reason: end_reason, margin: Some(margin), state });
    }

    let dt = spec.dt_scan;
    let mut lo = 0.0;
    let mut x = x_k.to_vec();
    let mut j: u64 = 0;
    loop {
        j += 1;
        let grid = j as f64 * dt;
        let at_end = grid >= tau_end;
        let tau = if at_end { tau_end } else { grid };
        x = if at_end {
            prop.advance_once(x_k, u_k, tau)?
        } else {
            prop.advance(&x, u_k, dt)?
        };
        let g = trigger_margin(spec, sys, x_k, &x, plus)?;
        if g > 0.0 {
            return bisect(spec, sys, prop, x_k, u_k, t_k, lo, tau, g, x, plus);
        }
        if at_end {
            return Ok(EventOutcome { t_next: t_k + tau_end, reason: end_reason, margin: Some(g), state: x });
        }
        lo = tau;
    }
}

#[allow(clippy::too_many_arguments)]
fn bisect(
    spec: &EtmSpec,
    sys: &ModalSystem,
    prop: &Propagator,
    x_k: &[C64],
    u_k: &[C64],
    t_k: f64,
    mut lo: f64,
    mut hi: f64,
    mut g_hi: f64,
    mut x_hi: Vec<C64>,
    plus: Option<&Decomposition>,
) -> Result<EventOutcome> {
    while hi - lo > spec.tol_event {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let x_mid = prop.advance_once(x_k, u_k, mid)?;
        let g = trigger_margin(spec, sys, x_k, &x_mid, plus)?;
        if g > 0.0 {
            hi = mid;
            g_hi = g;
            x_hi = x_mid;
        } else {
            lo = mid;
        }
    }
    Ok(EventOutcome { t_next: t_k + hi, reason: EventReason::Triggered, margin: Some(g_hi), state: x_hi })
}
