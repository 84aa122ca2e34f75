mod common;

use std::f64::consts::PI;

use common::random_real_vec;
use etcsim_core::cert::{pet_cert, theta_bound};
use etcsim_core::etm::{next_event, EtmSpec, EtmVariant, EventReason};
use etcsim_core::linalg::c;
use etcsim_core::model::*;
use etcsim_core::sim::{max_relative_trigger_margin, min_inter_event, simulate};
use proptest::prelude::*;

fn spec_for(variant: EtmVariant) -> EtmSpec {
    match variant {
        EtmVariant::PurePeriodic => EtmSpec::periodic(0.4),
        EtmVariant::PeriodicEvent => EtmSpec::periodic_event(0.3, 0.1, 6),
        v if v.needs_tau_max() => EtmSpec::capped(v, if v.needs_decomposition() { 0.7 } else { 0.3 }, 1.0),
        v => EtmSpec::new(v, 0.3),
    }
}

fn beam_setup() -> (ModalSystem, Decomposition) {
    let g = 1.0 / 15.0;
    let beam = build_beam(5, g, 1.0).unwrap();
    let dec = decompose(&beam, -0.9 * 9.0 * g * PI * PI / 4.0).unwrap();
    (beam, dec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn trigger_inequality_holds_at_samples(seed in any::<u64>(), which in 0usize..8) {
        use rand::SeedableRng;
        let variant = EtmVariant::ALL[which];
        let spec = spec_for(variant);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (sys, dec) = if variant.needs_decomposition() {
            let (b, d) = beam_setup();
            (b, Some(d))
        } else {
            (build_heat_cascade(8, &CascadeParams::default()).unwrap(), None)
        };
        let x0 = random_real_vec(&mut rng, sys.n_state());
        let (traj, _) = simulate(&sys, &spec, &x0, 3.0, 0.01, dec.as_ref()).unwrap();
        if let Some(worst) = max_relative_trigger_margin(&sys, &spec, &traj, dec.as_ref()).unwrap() {
            prop_assert!(worst <= 1e-6, "{} exceeded by {worst}", variant.name());
        }
    }

    #[test]
    fn first_event_is_monotone_in_epsilon(seed in any::<u64>()) {
        use rand::SeedableRng;
        let sys = build_heat_cascade(8, &CascadeParams::default()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x0 = random_real_vec(&mut rng, sys.n_state());
        let mut last = 0.0;
        for eps in [0.05, 0.1, 0.2, 0.4, 0.8] {
            let spec = EtmSpec::new(EtmVariant::SampleRelative, eps);
            let out = next_event(&spec, &sys, &x0, 0.0, 50.0, None).unwrap();
            prop_assert!(out.t_next >= last - 1e-9);
            last = out.t_next;
            if out.reason == EventReason::Horizon {
                break;
            }
        }
    }

    #[test]
    fn inter_event_times_respect_theta(seed in any::<u64>()) {
        use rand::SeedableRng;
        let sys = build_heat_cascade(10, &CascadeParams::default()).unwrap();
        let theta = theta_bound(&sys, 0.3, 1e-4, 1.0).unwrap().theta;
        prop_assert!(theta > 0.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x0 = random_real_vec(&mut rng, sys.n_state());
        let spec = EtmSpec::new(EtmVariant::SampleRelative, 0.3);
        let (_, log) = simulate(&sys, &spec, &x0, 6.0, 0.05, None).unwrap();
        if log.len() > 2 {
            prop_assert!(min_inter_event(&log).unwrap() >= theta);
        }
    }
}

#[test]
fn pure_periodic_updates_on_the_grid() {
    let sys = build_heat_cascade(6, &CascadeParams::default()).unwrap();
    let x0 = cascade_constant_initial(&sys, -1.0);
    let (_, log) = simulate(&sys, &EtmSpec::periodic(0.4), &x0, 4.0, 0.01, None).unwrap();
    for (k, t) in log.times().iter().enumerate() {
        assert!((t - 0.4 * k as f64).abs() < 1e-12);
    }
}

#[test]
fn periodic_event_runs_decay_at_certified_rate() {
    use rand::SeedableRng;
    let sys = build_heat_cascade(10, &CascadeParams::default()).unwrap();
    let (h, ell_max) = (0.1, 8);
    let cert = pet_cert(&sys, h).unwrap();
    let eps = 0.5 * cert.eps_star;
    let gamma = cert.rate(eps, ell_max, h);
    assert!(gamma > 0.0);
    let spec = EtmSpec::periodic_event(eps, h, ell_max);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let x0 = random_real_vec(&mut rng, sys.n_state());
        let n0 = sys.state_norm(&x0);
        let (traj, log) = simulate(&sys, &spec, &x0, 8.0, 0.05, None).unwrap();
        for r in &log.records {
            let x = traj.state_at(&sys, r.t_k).unwrap();
            let bound = cert.m_d * (-gamma * r.t_k).exp() * n0 * (1.0 + 1e-6);
            assert!(sys.state_norm(&x) <= bound, "t = {}", r.t_k);
        }
    }
}

#[test]
fn plus_part_trigger_ignores_minus_modes() {
    let (beam, dec) = beam_setup();
    let mut x = vec![c(0.0, 0.0); beam.n_state()];
    x[4] = c(1.0, 0.0);
    let spec = spec_for(EtmVariant::PlusPartCurrentRelativeCapped);
    let out = next_event(&spec, &beam, &x, 0.0, 5.0, Some(&dec)).unwrap();
    assert_eq!(out.reason, EventReason::Capped);
    assert!((out.t_next - 1.0).abs() < 1e-12);
}
