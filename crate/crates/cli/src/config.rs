//! Line-oriented run configuration.
//!
//! Each non-blank line is `section.key = value`; `#` starts a comment.
//! Sections are `system`, `etm`, `sim`, `initial` and `cert`. Lists are
//! comma separated. Every key may appear at most once, and keys that the
//! chosen preset does not use are rejected so that a misspelt or misplaced
//! setting never passes silently.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use etcsim_core::model::CascadeParams;
use etcsim_core::EtmVariant;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    HeatRod,
    HeatCascade,
    Beam,
    CustomModal,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::HeatRod => "heat_rod",
            Preset::HeatCascade => "heat_cascade",
            Preset::Beam => "beam",
            Preset::CustomModal => "custom_modal",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        [Preset::HeatRod, Preset::HeatCascade, Preset::Beam, Preset::CustomModal]
            .into_iter()
            .find(|p| p.name() == s)
    }

    fn default_n(self) -> usize {
        match self {
            Preset::HeatRod => 10,
            Preset::HeatCascade => 20,
            Preset::Beam => 15,
            Preset::CustomModal => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialKind {
    /// The case-study initial state of the preset.
    CaseStudy,
    /// Unit vector on one modal coordinate.
    Mode,
    Coefficients,
    /// Uniform random real coefficients in `[-1, 1]` from `sim.seed`.
    Random,
}

impl InitialKind {
    pub fn name(self) -> &'static str {
        match self {
            InitialKind::CaseStudy => "case_study",
            InitialKind::Mode => "mode",
            InitialKind::Coefficients => "coefficients",
            InitialKind::Random => "random",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        [InitialKind::CaseStudy, InitialKind::Mode, InitialKind::Coefficients, InitialKind::Random]
            .into_iter()
            .find(|p| p.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig {
    pub preset: Preset,
    /// Truncation order: heat modes above the constant one, or beam pairs.
    pub n: usize,
    pub gamma: f64,
    pub feedback_gain: f64,
    pub cascade: CascadeParams,
    pub eigenvalues: Vec<f64>,
    pub input_coeffs: Vec<f64>,
    pub feedback_coeffs: Vec<f64>,
    /// Threshold of the spectral split used by plus-part triggering.
    pub alpha: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtmConfig {
    pub variant: EtmVariant,
    pub epsilon: Option<f64>,
    pub tau_max: Option<f64>,
    pub h: Option<f64>,
    pub ell_max: Option<usize>,
    pub allow_zeno: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub t_end: f64,
    pub dt_out: f64,
    pub dt_scan: f64,
    pub tol_event: f64,
    pub dt_min: f64,
    pub settle_fraction: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialConfig {
    pub kind: InitialKind,
    pub mode: Option<usize>,
    pub z2: Option<f64>,
    pub coefficients: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertConfig {
    pub omega: f64,
    /// Overshoot constant supplied by the user; computed by `m_min` if absent.
    pub m: Option<f64>,
    pub t_max: f64,
    pub dt: f64,
    pub theta_step: f64,
    pub theta_upper: f64,
    pub s1: Option<f64>,
    pub gamma_plus: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub etm: EtmConfig,
    pub sim: SimConfig,
    pub initial: InitialConfig,
    pub cert: CertConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: SystemConfig {
                preset: Preset::HeatCascade,
                n: Preset::HeatCascade.default_n(),
                gamma: 1.0 / 15.0,
                feedback_gain: 1.0,
                cascade: CascadeParams::default(),
                eigenvalues: Vec::new(),
                input_coeffs: Vec::new(),
                feedback_coeffs: Vec::new(),
                alpha: None,
            },
            etm: EtmConfig {
                variant: EtmVariant::SampleRelativeCapped,
                epsilon: None,
                tau_max: None,
                h: None,
                ell_max: None,
                allow_zeno: false,
            },
            sim: SimConfig {
                t_end: 10.0,
                dt_out: etcsim_core::sim::DEFAULT_DT_OUT,
                dt_scan: etcsim_core::EtmSpec::DEFAULT_DT_SCAN,
                tol_event: etcsim_core::EtmSpec::DEFAULT_TOL_EVENT,
                dt_min: etcsim_core::EtmSpec::DEFAULT_DT_MIN,
                settle_fraction: 0.05,
                seed: 0,
            },
            initial: InitialConfig { kind: InitialKind::CaseStudy, mode: None, z2: None, coefficients: Vec::new() },
            cert: CertConfig {
                omega: 0.5,
                m: None,
                t_max: 40.0,
                dt: 1e-2,
                theta_step: 1e-4,
                theta_upper: 1.0,
                s1: None,
                gamma_plus: None,
            },
        }
    }
}

const CASCADE_KEYS: [&str; 7] = ["amplitude", "interval_lo", "interval_hi", "g", "h", "f", "f2"];
const BEAM_KEYS: [&str; 2] = ["gamma", "feedback_gain"];
const CUSTOM_KEYS: [&str; 3] = ["eigenvalues", "input_coeffs", "feedback_coeffs"];

fn parse_f64(v: &str) -> Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("expected a number, got `{v}`"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("expected a finite number, got `{v}`"))
    }
}

fn parse_usize(v: &str) -> Result<usize, String> {
    v.parse().map_err(|_| format!("expected a non-negative integer, got `{v}`"))
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

fn parse_list(v: &str) -> Result<Vec<f64>, String> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_f64(s.trim())).collect()
}

pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut n_given = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |msg: String| CliError::Syntax { line, msg };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected `section.key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let (section, name) = key
            .split_once('.')
            .ok_or_else(|| syntax(format!("key `{key}` has no section")))?;
        if !seen.insert(key.to_string()) {
            return Err(syntax(format!("duplicate key `{key}`")));
        }
        let bad = |msg: String| CliError::Syntax { line, msg: format!("{key}: {msg}") };
        let f = || parse_f64(value).map_err(bad);
        let u = || parse_usize(value).map_err(bad);
        let l = || parse_list(value).map_err(bad);
        let s = &mut cfg.system;
        let c = &mut s.cascade;
        match (section, name) {
            ("system", "preset") => {
                s.preset = Preset::from_name(value).ok_or_else(|| bad(format!("unknown preset `{value}`")))?
            }
            ("system", "n") => {
                s.n = u()?;
                n_given = true;
            }
            ("system", "gamma") => s.gamma = f()?,
            ("system", "feedback_gain") => s.feedback_gain = f()?,
            ("system", "amplitude") => c.amplitude = f()?,
            ("system", "interval_lo") => c.interval.0 = f()?,
            ("system", "interval_hi") => c.interval.1 = f()?,
            ("system", "g") => c.g = f()?,
            ("system", "h") => c.h = f()?,
            ("system", "f") => c.f = f()?,
            ("system", "f2") => c.f2 = f()?,
            ("system", "eigenvalues") => s.eigenvalues = l()?,
            ("system", "input_coeffs") => s.input_coeffs = l()?,
            ("system", "feedback_coeffs") => s.feedback_coeffs = l()?,
            ("system", "alpha") => s.alpha = Some(f()?),
            ("etm", "variant") => {
                cfg.etm.variant =
                    EtmVariant::from_name(value).ok_or_else(|| bad(format!("unknown variant `{value}`")))?
            }
            ("etm", "epsilon") => cfg.etm.epsilon = Some(f()?),
            ("etm", "tau_max") => cfg.etm.tau_max = Some(f()?),
            ("etm", "h") => cfg.etm.h = Some(f()?),
            ("etm", "ell_max") => cfg.etm.ell_max = Some(u()?),
            ("etm", "allow_zeno") => cfg.etm.allow_zeno = parse_bool(value).map_err(bad)?,
            ("sim", "t_end") => cfg.sim.t_end = f()?,
            ("sim", "dt_out") => cfg.sim.dt_out = f()?,
            ("sim", "dt_scan") => cfg.sim.dt_scan = f()?,
            ("sim", "tol_event") => cfg.sim.tol_event = f()?,
            ("sim", "dt_min") => cfg.sim.dt_min = f()?,
            ("sim", "settle_fraction") => cfg.sim.settle_fraction = f()?,
            ("sim", "seed") => cfg.sim.seed = value.parse().map_err(|_| bad(format!("expected an integer, got `{value}`")))?,
            ("initial", "preset") => {
                cfg.initial.kind =
                    InitialKind::from_name(value).ok_or_else(|| bad(format!("unknown initial preset `{value}`")))?
            }
            ("initial", "mode") => cfg.initial.mode = Some(u()?),
            ("initial", "z2") => cfg.initial.z2 = Some(f()?),
            ("initial", "coefficients") => cfg.initial.coefficients = l()?,
            ("cert", "omega") => cfg.cert.omega = f()?,
            ("cert", "m") => cfg.cert.m = Some(f()?),
            ("cert", "t_max") => cfg.cert.t_max = f()?,
            ("cert", "dt") => cfg.cert.dt = f()?,
            ("cert", "theta_step") => cfg.cert.theta_step = f()?,
            ("cert", "theta_upper") => cfg.cert.theta_upper = f()?,
            ("cert", "s1") => cfg.cert.s1 = Some(f()?),
            ("cert", "gamma_plus") => cfg.cert.gamma_plus = Some(f()?),
            ("system" | "etm" | "sim" | "initial" | "cert", _) => {
                return Err(syntax(format!("unknown key `{key}`")))
            }
            _ => return Err(syntax(format!("unknown section `{section}`"))),
        }
    }
    if !n_given {
        cfg.system.n = cfg.system.preset.default_n();
    }
    check_preset_keys(&cfg, &seen)?;
    cfg.validate()?;
    Ok(cfg)
}

fn check_preset_keys(cfg: &RunConfig, seen: &BTreeSet<String>) -> CliResult<()> {
    let preset = cfg.system.preset;
    let allowed: &[&str] = match preset {
        Preset::HeatRod => &[],
        Preset::HeatCascade => &CASCADE_KEYS,
        Preset::Beam => &BEAM_KEYS,
        Preset::CustomModal => &CUSTOM_KEYS,
    };
    for key in CASCADE_KEYS.iter().chain(&BEAM_KEYS).chain(&CUSTOM_KEYS) {
        if seen.contains(&format!("system.{key}")) && !allowed.contains(key) {
            return Err(CliError::Invalid(format!("system.{key}: not used by preset {}", preset.name())));
        }
    }
    if preset == Preset::CustomModal && seen.contains("system.n") {
        return Err(CliError::Invalid("system.n: custom_modal takes its order from system.eigenvalues".into()));
    }
    if preset != Preset::HeatCascade && seen.contains("initial.z2") {
        return Err(CliError::Invalid("initial.z2: only heat_cascade has an ODE state".into()));
    }
    Ok(())
}

impl RunConfig {
    /// Checks that every value feeds its module in range; the error names the
    /// offending key.
    pub fn validate(&self) -> CliResult<()> {
        let invalid = |key: &str, why: &str| Err(CliError::Invalid(format!("{key}: {why}")));
        let s = &self.system;
        match s.preset {
            Preset::HeatRod | Preset::HeatCascade | Preset::Beam if s.n == 0 => {
                return invalid("system.n", "must be at least 1")
            }
            Preset::Beam if !(s.gamma > 0.0 && s.gamma < 1.0) => return invalid("system.gamma", "must lie in (0, 1)"),
            Preset::CustomModal => {
                if s.eigenvalues.is_empty() {
                    return invalid("system.eigenvalues", "required by custom_modal");
                }
                if s.input_coeffs.len() != s.eigenvalues.len() {
                    return invalid("system.input_coeffs", "needs one entry per eigenvalue");
                }
                if s.feedback_coeffs.len() != s.eigenvalues.len() {
                    return invalid("system.feedback_coeffs", "needs one entry per eigenvalue");
                }
            }
            Preset::HeatCascade => {
                let (lo, hi) = s.cascade.interval;
                if !(0.0 <= lo && lo < hi && hi <= 1.0) {
                    return invalid("system.interval_lo", "need 0 <= interval_lo < interval_hi <= 1");
                }
            }
            _ => {}
        }
        if self.etm.variant.needs_decomposition() && s.alpha.is_none() {
            return invalid("system.alpha", "required by plus-part triggering");
        }
        if let Err(etcsim_core::Error::Config(msg)) = self.etm_spec().validate() {
            return Err(CliError::Invalid(format!("etm.{msg}")));
        }
        let sim = &self.sim;
        if !(sim.t_end > 0.0) {
            return invalid("sim.t_end", "must be positive");
        }
        if !(sim.dt_out > 0.0) {
            return invalid("sim.dt_out", "must be positive");
        }
        if !(sim.settle_fraction > 0.0 && sim.settle_fraction < 1.0) {
            return invalid("sim.settle_fraction", "must lie in (0, 1)");
        }
        let init = &self.initial;
        match init.kind {
            InitialKind::Mode if init.mode.is_none() => return invalid("initial.mode", "required by preset mode"),
            InitialKind::Coefficients if init.coefficients.is_empty() => {
                return invalid("initial.coefficients", "required by preset coefficients")
            }
            InitialKind::CaseStudy if s.preset == Preset::CustomModal => {
                return invalid("initial.preset", "custom_modal has no case-study initial state")
            }
            _ => {}
        }
        if init.mode.is_some() && init.kind != InitialKind::Mode {
            return invalid("initial.mode", "only used with initial.preset = mode");
        }
        if !init.coefficients.is_empty() && init.kind != InitialKind::Coefficients {
            return invalid("initial.coefficients", "only used with initial.preset = coefficients");
        }
        let cert = &self.cert;
        if !(cert.omega > 0.0) {
            return invalid("cert.omega", "must be positive");
        }
        if matches!(cert.m, Some(m) if m < 1.0) {
            return invalid("cert.m", "must be at least 1");
        }
        if !(cert.t_max > 0.0 && cert.dt > 0.0 && cert.dt < cert.t_max) {
            return invalid("cert.dt", "need 0 < dt < t_max");
        }
        if !(cert.theta_step > 0.0 && cert.theta_step < cert.theta_upper) {
            return invalid("cert.theta_step", "need 0 < theta_step < theta_upper");
        }
        if matches!(cert.s1, Some(v) if v <= 0.0) {
            return invalid("cert.s1", "must be positive");
        }
        if matches!(cert.gamma_plus, Some(v) if v <= 0.0) {
            return invalid("cert.gamma_plus", "must be positive");
        }
        Ok(())
    }

    pub fn etm_spec(&self) -> etcsim_core::EtmSpec {
        let e = &self.etm;
        etcsim_core::EtmSpec {
            variant: e.variant,
            epsilon: e.epsilon.unwrap_or(0.0),
            tau_max: e.tau_max,
            h: e.h,
            ell_max: e.ell_max,
            dt_scan: self.sim.dt_scan,
            dt_min: self.sim.dt_min,
            tol_event: self.sim.tol_event,
            allow_zeno: e.allow_zeno,
        }
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Canonical text form; `parse_config` of the output reproduces the record.
impl fmt::Display for RunConfig {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut t = String::new();
        let s = &self.system;
        let _ = writeln!(t, "system.preset = {}", s.preset.name());
        match s.preset {
            Preset::CustomModal => {
                let _ = writeln!(t, "system.eigenvalues = {}", list(&s.eigenvalues));
                let _ = writeln!(t, "system.input_coeffs = {}", list(&s.input_coeffs));
                let _ = writeln!(t, "system.feedback_coeffs = {}", list(&s.feedback_coeffs));
            }
            p => {
                let _ = writeln!(t, "system.n = {}", s.n);
                if p == Preset::Beam {
                    let _ = writeln!(t, "system.gamma = {}", s.gamma);
                    let _ = writeln!(t, "system.feedback_gain = {}", s.feedback_gain);
                }
                if p == Preset::HeatCascade {
                    let c = &s.cascade;
                    let _ = writeln!(t, "system.amplitude = {}", c.amplitude);
                    let _ = writeln!(t, "system.interval_lo = {}", c.interval.0);
                    let _ = writeln!(t, "system.interval_hi = {}", c.interval.1);
                    let _ = writeln!(t, "system.g = {}", c.g);
                    let _ = writeln!(t, "system.h = {}", c.h);
                    let _ = writeln!(t, "system.f = {}", c.f);
                    let _ = writeln!(t, "system.f2 = {}", c.f2);
                }
            }
        }
        if let Some(a) = s.alpha {
            let _ = writeln!(t, "system.alpha = {a}");
        }
        let e = &self.etm;
        let _ = writeln!(t, "etm.variant = {}", e.variant.name());
        for (k, v) in [("epsilon", e.epsilon), ("tau_max", e.tau_max), ("h", e.h)] {
            if let Some(v) = v {
                let _ = writeln!(t, "etm.{k} = {v}");
            }
        }
        if let Some(l) = e.ell_max {
            let _ = writeln!(t, "etm.ell_max = {l}");
        }
        let _ = writeln!(t, "etm.allow_zeno = {}", e.allow_zeno);
        let m = &self.sim;
        let _ = writeln!(t, "sim.t_end = {}", m.t_end);
        let _ = writeln!(t, "sim.dt_out = {}", m.dt_out);
        let _ = writeln!(t, "sim.dt_scan = {}", m.dt_scan);
        let _ = writeln!(t, "sim.tol_event = {}", m.tol_event);
        let _ = writeln!(t, "sim.dt_min = {}", m.dt_min);
        let _ = writeln!(t, "sim.settle_fraction = {}", m.settle_fraction);
        let _ = writeln!(t, "sim.seed = {}", m.seed);
        let i = &self.initial;
        let _ = writeln!(t, "initial.preset = {}", i.kind.name());
        if let Some(mo) = i.mode {
            let _ = writeln!(t, "initial.mode = {mo}");
        }
        if let Some(z) = i.z2 {
            let _ = writeln!(t, "initial.z2 = {z}");
        }
        if !i.coefficients.is_empty() {
            let _ = writeln!(t, "initial.coefficients = {}", list(&i.coefficients));
        }
        let c = &self.cert;
        let _ = writeln!(t, "cert.omega = {}", c.omega);
        if let Some(v) = c.m {
            let _ = writeln!(t, "cert.m = {v}");
        }
        let _ = writeln!(t, "cert.t_max = {}", c.t_max);
        let _ = writeln!(t, "cert.dt = {}", c.dt);
        let _ = writeln!(t, "cert.theta_step = {}", c.theta_step);
        let _ = writeln!(t, "cert.theta_upper = {}", c.theta_upper);
        if let Some(v) = c.s1 {
            let _ = writeln!(t, "cert.s1 = {v}");
        }
        if let Some(v) = c.gamma_plus {
            let _ = writeln!(t, "cert.gamma_plus = {v}");
        }
        out.write_str(&t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = "system.preset = heat_cascade\nsystem.n = 20\netm.variant = sample_relative_capped\netm.epsilon = 0.3\netm.tau_max = 1\n";

    #[test]
    fn reads_epsilon() {
        let cfg = parse_config(FIG2).unwrap();
        assert_eq!(cfg.etm.epsilon, Some(0.3));
        assert_eq!(cfg.system.n, 20);
    }

    #[test]
    fn missing_tau_max_is_a_validation_error() {
        let text = "etm.variant = sample_relative_capped\netm.epsilon = 0.3\n";
        let err = parse_config(text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("tau_max"), "{err}");
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse_config("# header\n\netm.epsilon = 0.3\netm.epsilonn = 0.2\n").unwrap_err();
        assert!(matches!(err, CliError::Syntax { line: 4, .. }), "{err}");
        let err = parse_config("solver.tol = 1").unwrap_err();
        assert!(err.to_string().contains("unknown section"));
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(parse_config("etm.epsilon 0.3").unwrap_err(), CliError::Syntax { line: 1, .. }));
        assert!(matches!(parse_config("epsilon = 0.3").unwrap_err(), CliError::Syntax { .. }));
        let err = parse_config("etm.epsilon = abc").unwrap_err();
        assert!(err.to_string().contains("etm.epsilon"));
        let err = parse_config(&format!("{FIG2}etm.epsilon = 0.2\n")).unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn preset_specific_keys() {
        let err = parse_config(&format!("{FIG2}system.gamma = 0.1\n")).unwrap_err();
        assert!(err.to_string().contains("system.gamma"));
        let beam = "system.preset = beam\nsystem.gamma = 1.5\netm.variant = sample_relative\netm.epsilon = 0.1\n";
        assert!(parse_config(beam).unwrap_err().to_string().contains("system.gamma"));
    }

    #[test]
    fn plus_part_needs_alpha() {
        let text = "system.preset = beam\netm.variant = plus_part_current_relative_capped\netm.epsilon = 0.7\netm.tau_max = 1\n";
        assert!(parse_config(text).unwrap_err().to_string().contains("system.alpha"));
        assert!(parse_config(&format!("{text}system.alpha = -1\n")).is_ok());
    }

    #[test]
    fn round_trip() {
        let texts = [
            FIG2.to_string(),
            "system.preset = custom_modal\nsystem.eigenvalues = 1, -2.5\nsystem.input_coeffs = 1, 1\nsystem.feedback_coeffs = -3, 0.125\netm.variant = periodic_event\netm.epsilon = 0.05\netm.h = 0.1\netm.ell_max = 4\ninitial.preset = coefficients\ninitial.coefficients = 1, 0.1\ncert.m = 2\n".into(),
            "system.preset = heat_rod\nsystem.n = 5\netm.variant = state_err_current_relative\netm.epsilon = 0.3\netm.allow_zeno = true\ninitial.preset = mode\ninitial.mode = 3\nsim.seed = 99\n".into(),
        ];
        for text in texts {
            let cfg = parse_config(&text).unwrap();
            let again = parse_config(&cfg.to_string()).unwrap();
            assert_eq!(cfg, again);
        }
    }
}
