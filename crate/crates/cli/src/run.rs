//! Subcommand bodies: simulation, certification and figure reproduction.

use std::path::Path;

use etcsim_core::cert::{
    coercivity_report, lmi_report, m_min, m_min_report, pet_report, pole_report, theta_report,
    bounded_threshold_report, lyapunov_threshold_report,
};
use etcsim_core::etm::next_event;
use etcsim_core::linalg::weighted_operator_norm;
use etcsim_core::model::{build_heat_cascade, build_heat_rod, heat_first_event, shift_zeno_closed_form,
    shift_zeno_sequence, ZenoVariant};
use etcsim_core::sim::{count_updates, fmt12, min_inter_event, settling_time, simulate};
use etcsim_core::{CertificateReport, EtmSpec, EtmVariant, EventLog, Trajectory, Verdict};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{parse_config, Preset, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, num, report_json, write, write_json};
use crate::scenario::{beam_gamma_plus, build, Scenario};

pub const FIG2_CFG: &str = include_str!("../examples/fig2.cfg");
pub const FIG3_CFG: &str = include_str!("../examples/fig3.cfg");

/// Update period of the periodic comparison runs.
pub const FIG2_PERIOD: f64 = 0.4;
pub const FIG3_PERIOD: f64 = 0.15;

pub const SCENARIOS: [&str; 6] = ["fig1", "fig2", "fig3", "zeno_shift", "zeno_heat", "certs"];

pub fn fig2_config() -> RunConfig {
    parse_config(FIG2_CFG).expect("shipped fig2.cfg is valid")
}

pub fn fig3_config() -> RunConfig {
    parse_config(FIG3_CFG).expect("shipped fig3.cfg is valid")
}

pub struct Run {
    pub scenario: Scenario,
    pub trajectory: Trajectory,
    pub log: EventLog,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metrics {
    pub settling_time: f64,
    /// Updates strictly inside `(0, T_s)`.
    pub updates: usize,
    pub events: usize,
    pub min_inter_event: Option<f64>,
}

impl Metrics {
    fn json(&self) -> Value {
        json!({
            "T_s": num(self.settling_time),
            "updates": self.updates,
            "events": self.events,
            "min_inter_event": self.min_inter_event.map_or(Value::Null, num),
        })
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<Run> {
    let scenario = build(cfg)?;
    let (trajectory, log) = simulate(
        &scenario.system,
        &cfg.etm_spec(),
        &scenario.x0,
        cfg.sim.t_end,
        cfg.sim.dt_out,
        scenario.plus.as_ref(),
    )?;
    Ok(Run { scenario, trajectory, log })
}

pub fn metrics(cfg: &RunConfig, r: &Run) -> CliResult<Metrics> {
    let t_s = settling_time(&r.scenario.system, &r.trajectory, cfg.sim.settle_fraction)?;
    Ok(Metrics {
        settling_time: t_s,
        updates: count_updates(&r.log, t_s),
        events: r.log.len(),
        min_inter_event: min_inter_event(&r.log).ok(),
    })
}

/// Same scenario under pure periodic updates with period `h`.
pub fn periodic_variant(cfg: &RunConfig, h: f64) -> RunConfig {
    let mut p = cfg.clone();
    p.etm.variant = EtmVariant::PurePeriodic;
    p.etm.h = Some(h);
    p.etm.epsilon = None;
    p.etm.tau_max = None;
    p.etm.ell_max = None;
    p.system.alpha = None;
    p
}

fn write_run(dir: &Path, prefix: &str, r: &Run) -> CliResult<()> {
    write(&dir.join(format!("{prefix}trajectory.csv")), &r.trajectory.to_csv())?;
    write(&dir.join(format!("{prefix}events.csv")), &r.log.to_csv())
}

pub fn simulate_cmd(cfg: &RunConfig, outdir: &Path) -> CliResult<Metrics> {
    ensure_dir(outdir)?;
    let r = run(cfg)?;
    let m = metrics(cfg, &r)?;
    write_run(outdir, "", &r)?;
    write(&outdir.join("run.cfg"), &cfg.to_string())?;
    write_json(&outdir.join("metrics.json"), &m.json())?;
    Ok(m)
}

/// Every certificate that applies to the configured system and trigger.
pub fn certify(cfg: &RunConfig) -> CliResult<Vec<CertificateReport>> {
    let sc = build(cfg)?;
    let sys = &sc.system;
    let c = &cfg.cert;
    let eps = cfg.etm.epsilon;
    let variant = cfg.etm.variant;
    let trunc = sys.truncation_order();
    let mut out = Vec::new();

    let m = match c.m {
        Some(m) => Some((m, "user")),
        None => {
            let r = m_min_report(sys, c.omega, c.t_max, c.dt)?;
            let m = r.get_real("m_min");
            out.push(r);
            m.map(|m| (m, "m_min"))
        }
    };
    if let (Some(eps), Some(tau_max), Some((m, src))) = (eps, cfg.etm.tau_max, m) {
        if !variant.needs_decomposition() {
            let norm_b = weighted_operator_norm(sys.b(), sys.gram(), sys.gram_u())?;
            out.push(bounded_threshold_report(eps, m, c.omega, norm_b, tau_max, src, trunc)?);
        }
    }
    if let Some(eps) = eps {
        if !variant.is_periodic() && !variant.needs_decomposition() {
            out.push(lyapunov_threshold_report(sys, eps, m.map(|(m, _)| (m, c.omega)))?);
        }
        if matches!(variant, EtmVariant::SampleRelative | EtmVariant::SampleRelativeCapped) {
            out.push(theta_report(sys, eps, c.theta_step, c.theta_upper)?);
        }
        if variant == EtmVariant::PeriodicEvent {
            let h = cfg.etm.h.expect("validated");
            out.push(pet_report(sys, h, cfg.etm.ell_max.expect("validated"), eps)?);
        }
        if let Some(dec) = &sc.plus {
            let gamma_plus = match (c.gamma_plus, cfg.system.preset) {
                (Some(g), _) => g,
                (None, Preset::Beam) => beam_gamma_plus(cfg.system.gamma),
                (None, _) => {
                    return Err(CliError::Invalid("cert.gamma_plus: required for the decomposed certificate".into()))
                }
            };
            let plus = dec.plus_part(sys)?;
            out.push(lmi_report(&plus, gamma_plus, eps, dec.omega_minus, trunc)?);
        }
    }
    if let Some(s1) = c.s1 {
        out.push(coercivity_report(sys, s1)?);
    }
    if cfg.system.preset == Preset::HeatCascade {
        let p = &cfg.system.cascade;
        out.push(pole_report(p.g, p.h, p.f, p.f2, p.b_coefficient(0)));
    }
    Ok(out)
}

pub fn reports_json(reports: &[CertificateReport]) -> Value {
    Value::Array(reports.iter().map(report_json).collect())
}

/// Writes the reports; with `strict`, any `NotCertified` verdict is an error.
pub fn certify_cmd(cfg: &RunConfig, out: &Path, strict: bool) -> CliResult<Vec<CertificateReport>> {
    let reports = certify(cfg)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    write_json(out, &reports_json(&reports))?;
    if strict {
        let failed: Vec<&str> =
            reports.iter().filter(|r| r.verdict == Verdict::NotCertified).map(|r| r.name.as_str()).collect();
        if !failed.is_empty() {
            return Err(CliError::NotCertified(failed.join(", ")));
        }
    }
    Ok(reports)
}

pub fn reproduce(name: &str, outdir: &Path) -> CliResult<()> {
    ensure_dir(outdir)?;
    match name {
        "fig1" => fig1(outdir),
        "fig2" => comparison("fig2", &fig2_config(), FIG2_PERIOD, outdir),
        "fig3" => comparison("fig3", &fig3_config(), FIG3_PERIOD, outdir),
        "zeno_shift" => zeno_shift(outdir),
        "zeno_heat" => zeno_heat(outdir),
        "certs" => certs(outdir),
        _ => Err(CliError::Invalid(format!("scenario: unknown `{name}`, expected one of {}", SCENARIOS.join(", ")))),
    }
}

/// `M_min(N, ω)` of the cascade closed loop.
pub fn cascade_m_min(cfg: &RunConfig, n: usize) -> CliResult<f64> {
    let sys = build_heat_cascade(n, &cfg.system.cascade)?;
    Ok(m_min(&sys.closed_loop(), sys.gram(), cfg.cert.omega, cfg.cert.t_max, cfg.cert.dt)?.value)
}

fn fig1(outdir: &Path) -> CliResult<()> {
    let cfg = fig2_config();
    let rows: Vec<(usize, f64)> = (2..=40usize)
        .into_par_iter()
        .map(|n| cascade_m_min(&cfg, n).map(|m| (n, m)))
        .collect::<CliResult<_>>()?;
    let mut csv = String::from("N,M_min\n");
    for (n, m) in rows {
        csv.push_str(&format!("{n},{}\n", fmt12(m)));
    }
    write(&outdir.join("fig1_m_min.csv"), &csv)
}

/// Event-triggered and periodic legs of one case study, run concurrently.
pub fn comparison_metrics(cfg: &RunConfig, h: f64) -> CliResult<((Run, Metrics), (Run, Metrics))> {
    let periodic = periodic_variant(cfg, h);
    let leg = |c: &RunConfig| -> CliResult<(Run, Metrics)> {
        let r = run(c)?;
        let m = metrics(c, &r)?;
        Ok((r, m))
    };
    let (a, b) = rayon::join(|| leg(cfg), || leg(&periodic));
    Ok((a?, b?))
}

fn comparison(name: &str, cfg: &RunConfig, h: f64, outdir: &Path) -> CliResult<()> {
    let ((er, em), (pr, pm)) = comparison_metrics(cfg, h)?;
    write_run(outdir, &format!("{name}_event_"), &er)?;
    write_run(outdir, &format!("{name}_periodic_"), &pr)?;
    let v = json!({
        "T_s_event": num(em.settling_time),
        "updates_event": em.updates,
        "min_inter_event_event": em.min_inter_event.map_or(Value::Null, num),
        "T_s_periodic": num(pm.settling_time),
        "updates_periodic": pm.updates,
        "min_inter_event_periodic": pm.min_inter_event.map_or(Value::Null, num),
        "epsilon": cfg.etm.epsilon.map_or(Value::Null, num),
        "tau_max": cfg.etm.tau_max.map_or(Value::Null, num),
        "period": num(h),
        "settle_fraction": num(cfg.sim.settle_fraction),
        "truncation_order": er.scenario.system.truncation_order(),
    });
    write_json(&outdir.join(format!("{name}_metrics.json")), &v)
}

pub const ZENO_SHIFT_EPSILON: f64 = 0.5;
pub const ZENO_SHIFT_STEPS: usize = 50;

fn zeno_shift(outdir: &Path) -> CliResult<()> {
    for (variant, file) in [
        (ZenoVariant::SampleRelative, "zeno_shift_sample_relative.csv"),
        (ZenoVariant::CurrentRelative, "zeno_shift_current_relative.csv"),
    ] {
        let t = shift_zeno_sequence(ZENO_SHIFT_EPSILON, variant, ZENO_SHIFT_STEPS)?;
        let mut csv = String::from("k,t_k,closed_form\n");
        for (k, tk) in t.iter().enumerate() {
            let cf = shift_zeno_closed_form(ZENO_SHIFT_EPSILON, variant, k);
            csv.push_str(&format!("{k},{},{}\n", fmt12(*tk), fmt12(cf)));
        }
        write(&outdir.join(file), &csv)?;
    }
    Ok(())
}

pub const ZENO_HEAT_EPSILON: f64 = 0.3;
pub const ZENO_HEAT_MODES: usize = 10;

/// First event of the heat rod started on `φ_n` under the state-error,
/// current-relative trigger.
pub fn heat_first_event_simulated(n: usize, epsilon: f64) -> CliResult<f64> {
    let sys = build_heat_rod(ZENO_HEAT_MODES);
    let spec = EtmSpec {
        allow_zeno: true,
        tol_event: 1e-13,
        dt_scan: 1e-4,
        dt_min: 0.0,
        ..EtmSpec::new(EtmVariant::StateErrCurrentRelative, epsilon)
    };
    let mut x = vec![etcsim_core::C64::new(0.0, 0.0); sys.n_state()];
    x[n] = etcsim_core::C64::new(1.0, 0.0);
    Ok(next_event(&spec, &sys, &x, 0.0, 1.0, None)?.t_next)
}

fn zeno_heat(outdir: &Path) -> CliResult<()> {
    let mut csv = String::from("n,predicted_t1,simulated_t1\n");
    for n in 1..=5 {
        let pred = heat_first_event(ZENO_HEAT_EPSILON, n);
        let sim = heat_first_event_simulated(n, ZENO_HEAT_EPSILON)?;
        csv.push_str(&format!("{n},{},{}\n", fmt12(pred), fmt12(sim)));
    }
    write(&outdir.join("zeno_heat.csv"), &csv)
}

/// Certificates of both case studies, with the coercivity diagnostic and the
/// periodic-event certificate at the comparison periods.
pub fn case_study_certificates() -> CliResult<(Vec<CertificateReport>, Vec<CertificateReport>)> {
    let mut out = Vec::new();
    for (cfg, h) in [(fig2_config(), FIG2_PERIOD), (fig3_config(), FIG3_PERIOD)] {
        let mut cfg = cfg;
        cfg.cert.s1 = Some(0.1);
        let mut reports = certify(&cfg)?;
        let sys = build(&cfg)?.system;
        reports.push(pet_report(&sys, h, 10, cfg.etm.epsilon.expect("case studies set epsilon"))?);
        out.push(reports);
    }
    let beam = out.pop().expect("two case studies");
    let cascade = out.pop().expect("two case studies");
    Ok((cascade, beam))
}

fn certs(outdir: &Path) -> CliResult<()> {
    let (cascade, beam) = case_study_certificates()?;
    write_json(&outdir.join("certs_heat_cascade.json"), &reports_json(&cascade))?;
    write_json(&outdir.join("certs_beam.json"), &reports_json(&beam))
}
