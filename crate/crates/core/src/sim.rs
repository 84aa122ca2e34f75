//! Closed-loop trajectories under a triggering mechanism, event logs, and
//! the comparison metrics of the case studies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::etm::{held_input, next_event, reference_norm, trigger_margin, EtmSpec, EtmVariant, EventReason};
use crate::linalg::{c, vec_sub, C64};
use crate::model::{Decomposition, ModalSystem, Propagator, StateVector};

pub const DEFAULT_DT_OUT: f64 = 1e-2;

/// Why a log entry was created.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordReason {
    Initial,
    Triggered,
    Capped,
}

impl RecordReason {
    pub fn name(self) -> &'static str {
        match self {
            RecordReason::Initial => "initial",
            RecordReason::Triggered => "triggered",
            RecordReason::Capped => "capped",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventRecord {
    pub k: usize,
    pub t_k: f64,
    /// `t_{k+1} − t_k`; `None` for the last record.
    pub inter_event: Option<f64>,
    pub reason: RecordReason,
    pub norm: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EventLog {
    pub records: Vec<EventRecord>,
}

impl EventLog {
    /// Log from bare event times, `times[0]` being the initial instant.
    pub fn from_times(times: &[f64]) -> Self {
        let mut log = EventLog::default();
        for (k, &t) in times.iter().enumerate() {
            log.push(t, if k == 0 { RecordReason::Initial } else { RecordReason::Triggered }, f64::NAN);
        }
        log
    }

    fn push(&mut self, t: f64, reason: RecordReason, norm: f64) {
        if let Some(last) = self.records.last_mut() {
            last.inter_event = Some(t - last.t_k);
        }
        let k = self.records.len();
        self.records.push(EventRecord { k, t_k: t, inter_event: None, reason, norm });
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t_k).collect()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// CSV with header `k,t_k,inter_event,reason,norm_x_tk`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,t_k,inter_event,reason,norm_x_tk\n");
        for r in &self.records {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.k,
                fmt12(r.t_k),
                r.inter_event.map_or(String::new(), fmt12),
                r.reason.name(),
                fmt12(r.norm)
            ));
        }
        s
    }
}

/// Twelve significant digits.
pub fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

/// One inter-event interval: the state and held input at its start.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub t_k: f64,
    pub x_k: Vec<C64>,
    pub u_k: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub norms: Vec<f64>,
    pub inputs: Vec<Vec<C64>>,
    pub event_flags: Vec<bool>,
    pub segments: Vec<Segment>,
    pub t_end: f64,
}

impl Trajectory {
    /// Exact state at any `t ∈ [0, t_end]`.
    pub fn state_at(&self, sys: &ModalSystem, t: f64) -> Result<Vec<C64>> {
        if !(0.0..=self.t_end).contains(&t) {
            return Err(Error::Domain(format!("time {t} outside [0, {}]", self.t_end)));
        }
        let i = self.segments.partition_point(|s| s.t_k <= t).max(1) - 1;
        let s = &self.segments[i];
        Propagator::new(sys).advance_once(&s.x_k, &s.u_k, t - s.t_k)
    }

    /// Held input at time `t`.
    pub fn input_at(&self, t: f64) -> &[C64] {
        let i = self.segments.partition_point(|s| s.t_k <= t).max(1) - 1;
        &self.segments[i].u_k
    }

    /// CSV with header `t,norm_x,u_1..u_m,event_flag`; inputs are written by
    /// real part.
    pub fn to_csv(&self) -> String {
        let m = self.inputs.first().map_or(0, |u| u.len());
        let mut s = String::from("t,norm_x");
        for j in 1..=m {
            s.push_str(&format!(",u_{j}"));
        }
        s.push_str(",event_flag\n");
        for i in 0..self.times.len() {
            s.push_str(&fmt12(self.times[i]));
            s.push(',');
            s.push_str(&fmt12(self.norms[i]));
            for u in &self.inputs[i] {
                s.push(',');
                s.push_str(&fmt12(u.re));
            }
            s.push_str(if self.event_flags[i] { ",1\n" } else { ",0\n" });
        }
        s
    }
}

/// Simulates the sampled-data closed loop on `[0, t_end]`.
///
/// Between events the state is propagated exactly by the zero-order-hold
/// formula; samples lie on the `dt_out` grid with every event instant
/// inserted.
pub fn simulate(
    sys: &ModalSystem,
    spec: &EtmSpec,
    x0: &[C64],
    t_end: f64,
    dt_out: f64,
    plus: Option<&Decomposition>,
) -> Result<(Trajectory, EventLog)> {
    sys.check_state(x0)?;
    spec.validate()?;
    if !(t_end > 0.0 && t_end.is_finite()) || !(dt_out > 0.0) {
        return Err(Error::Domain(format!("need t_end > 0 and dt_out > 0, got {t_end} and {dt_out}")));
    }
    let prop = Propagator::new(sys);
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        norms: Vec::new(),
        inputs: Vec::new(),
        event_flags: Vec::new(),
        segments: Vec::new(),
        t_end,
    };
    let mut log = EventLog::default();
    let mut t_k = 0.0;
    let mut x_k = x0.to_vec();
    let mut reason = RecordReason::Initial;
    let mut next_grid: u64 = 0;
    let grid_eps = 1e-9 * dt_out;

    loop {
        let u_k = held_input(spec, sys, &x_k, plus)?;
        log.push(t_k, reason, sys.state_norm(&x_k));
        traj.segments.push(Segment { t_k, x_k: x_k.clone(), u_k: u_k.clone() });
        push_sample(&mut traj, sys, t_k, x_k.clone(), u_k.clone(), true);
        while (next_grid as f64) * dt_out <= t_k + grid_eps {
            next_grid += 1;
        }
        if t_k >= t_end {
            break;
        }
        let out = next_event(spec, sys, &x_k, t_k, t_end, plus)?;
        loop {
            let t = next_grid as f64 * dt_out;
            if t >= out.t_next - grid_eps {
                break;
            }
            let x = prop.advance_once(&x_k, &u_k, t - t_k)?;
            push_sample(&mut traj, sys, t, x, u_k.clone(), false);
            next_grid += 1;
        }
        if out.reason == EventReason::Horizon {
            push_sample(&mut traj, sys, t_end, out.state, u_k, false);
            break;
        }
        t_k = out.t_next;
        x_k = out.state;
        reason = if out.reason == EventReason::Triggered { RecordReason::Triggered } else { RecordReason::Capped };
    }
    Ok((traj, log))
}

fn push_sample(traj: &mut Trajectory, sys: &ModalSystem, t: f64, x: Vec<C64>, u: Vec<C64>, event: bool) {
    traj.times.push(t);
    traj.norms.push(sys.state_norm(&x));
    traj.states.push(x.into());
    traj.inputs.push(u);
    traj.event_flags.push(event);
}

/// `sup{t : ‖x(t)‖ > fraction·‖x⁰‖}`, located on the output grid and refined
/// by bisection with exact propagation.
pub fn settling_time(sys: &ModalSystem, traj: &Trajectory, fraction: f64) -> Result<f64> {
    if traj.times.is_empty() {
        return Err(Error::Domain("empty trajectory".into()));
    }
    let thr = fraction * traj.norms[0];
    let last = match traj.norms.iter().rposition(|&n| n > thr) {
        None => return Ok(0.0),
        Some(i) => i,
    };
    if last + 1 == traj.times.len() {
        return Err(Error::HorizonInsufficient(format!(
            "norm still above {fraction} of its initial value at t = {}",
            traj.t_end
        )));
    }
    let (mut lo, mut hi) = (traj.times[last], traj.times[last + 1]);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if sys.state_norm(&traj.state_at(sys, mid)?) > thr {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest `g / (ε‖reference‖)` over the samples of `traj` at which the
/// trigger inequality must hold: every sample strictly inside an inter-event
/// interval, or only the `ℓh` check instants for periodic event triggering.
/// `None` for pure periodic sampling or when no sample qualifies.
pub fn max_relative_trigger_margin(
    sys: &ModalSystem,
    spec: &EtmSpec,
    traj: &Trajectory,
    plus: Option<&Decomposition>,
) -> Result<Option<f64>> {
    if spec.variant == EtmVariant::PurePeriodic {
        return Ok(None);
    }
    let mut worst: Option<f64> = None;
    let mut seg = 0;
    for (&t, x) in traj.times.iter().zip(&traj.states) {
        while seg + 1 < traj.segments.len() && traj.segments[seg + 1].t_k <= t {
            seg += 1;
        }
        let s = &traj.segments[seg];
        if t <= s.t_k {
            continue;
        }
        if spec.variant == EtmVariant::PeriodicEvent {
            let h = spec.h.unwrap_or(f64::NAN);
            let ell = (t - s.t_k) / h;
            if (ell - ell.round()).abs() > 1e-9 {
                continue;
            }
        }
        let r = reference_norm(spec, sys, &s.x_k, x, plus)?;
        if r <= 0.0 {
            continue;
        }
        let g = trigger_margin(spec, sys, &s.x_k, x, plus)?;
        let rel = g / (spec.epsilon * r);
        worst = Some(worst.map_or(rel, |w: f64| w.max(rel)));
    }
    Ok(worst)
}

/// Events strictly inside `(0, t)`.
pub fn count_updates(log: &EventLog, t: f64) -> usize {
    log.records.iter().filter(|r| r.t_k > 0.0 && r.t_k < t).count()
}

pub fn min_inter_event(log: &EventLog) -> Result<f64> {
    log.records
        .iter()
        .filter_map(|r| r.inter_event)
        .reduce(f64::min)
        .ok_or_else(|| Error::Domain("log has no complete inter-event interval".into()))
}

/// One row of a perturbation experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbRow {
    pub delta0: f64,
    pub sup_deviation: f64,
    pub max_event_deviation: f64,
    /// Event counts of the nominal and perturbed runs differ.
    pub count_mismatch: bool,
}

/// Runs the nominal and perturbed closed loops for each initial offset
/// `δ₀·d`, `d` a fixed random unit direction, and compares them on the union
/// of both output grids.
#[allow(clippy::too_many_arguments)]
pub fn perturb_compare(
    sys: &ModalSystem,
    spec: &EtmSpec,
    x0: &[C64],
    deltas: &[f64],
    t_end: f64,
    dt_out: f64,
    plus: Option<&Decomposition>,
    seed: u64,
) -> Result<Vec<PerturbRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir: Vec<C64> = (0..sys.n_state())
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let nd = sys.state_norm(&dir);
    let dir: Vec<C64> = dir.into_iter().map(|z| z / nd).collect();

    let (nominal, nominal_log) = simulate(sys, spec, x0, t_end, dt_out, plus)?;
    deltas
        .iter()
        .map(|&d0| {
            let xp: Vec<C64> = x0.iter().zip(&dir).map(|(a, b)| a + b * d0).collect();
            let (pert, pert_log) = simulate(sys, spec, &xp, t_end, dt_out, plus)?;
            let mut grid: Vec<f64> = nominal.times.iter().chain(&pert.times).copied().collect();
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            let mut sup: f64 = 0.0;
            for &t in &grid {
                let a = nominal.state_at(sys, t)?;
                let b = pert.state_at(sys, t)?;
                sup = sup.max(sys.state_norm(&vec_sub(&a, &b)));
            }
            let ev = nominal_log
                .records
                .iter()
                .zip(&pert_log.records)
                .map(|(a, b)| (a.t_k - b.t_k).abs())
                .fold(0.0, f64::max);
            Ok(PerturbRow {
                delta0: d0,
                sup_deviation: sup,
                max_event_deviation: ev,
                count_mismatch: nominal_log.len() != pert_log.len(),
            })
        })
        .collect()
}
