mod common;

use std::f64::consts::{PI, SQRT_2};

use common::{random_matrix, random_real_vec, rel_err, rk4};
use etcsim_core::etm::{EtmSpec, EtmVariant};
use etcsim_core::linalg::*;
use etcsim_core::model::*;
use etcsim_core::sim::simulate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn zoh_matches_rk4_on_random_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..20 {
        let n = rng.gen_range(2..=4);
        let a = common::hurwitz(&random_matrix(&mut rng, n, n), -0.5);
        let g = random_matrix(&mut rng, n, 1);
        let x0 = random_real_vec(&mut rng, n);
        let w = [c(rng.gen_range(-1.0..1.0), 0.0)];
        let tau = 0.5;
        let exact = zoh_step(&a, &g, tau).unwrap().apply(&x0, &w);
        let gw = g.mat_vec(&w);
        let approx = rk4(&a, &gw, &x0, tau, 1e-5);
        assert!(rel_err(&exact, &approx) < 1e-7, "{}", rel_err(&exact, &approx));
    }
}

#[test]
fn semigroup_law_on_case_studies() {
    let cascade = build_heat_cascade(10, &CascadeParams::default()).unwrap();
    let beam = build_beam(6, 1.0 / 15.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for sys in [&cascade, &beam] {
        let x = random_real_vec(&mut rng, sys.n_state());
        let (s, t) = (0.13, 0.41);
        let once = apply_semigroup(sys, &x, s + t).unwrap();
        let twice = apply_semigroup(sys, &apply_semigroup(sys, &x, s).unwrap(), t).unwrap();
        assert!(rel_err(&once, &twice) < 1e-12);
    }
}

#[test]
fn delta_composes_with_propagator() {
    let sys = build_heat_cascade(8, &CascadeParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = random_real_vec(&mut rng, sys.n_state());
    let via_delta = delta(&sys, 0.3).unwrap().mat_vec(&x);
    let via_step = Propagator::new(&sys).advance_once(&x, &sys.input(&x), 0.3).unwrap();
    assert!(rel_err(&via_delta, &via_step) < 1e-13);
}

/// Beam eigenfunctions, evaluated pointwise; the energy inner product is
/// `∫ A₀^{1/2}x₁·conj(A₀^{1/2}y₁) + x₂·conj(y₂)` with `A₀^{1/2}e_n = ν_n²e_n`.
struct BeamVector {
    nu: f64,
    pos: C64,
    vel: C64,
}

fn e(nu: f64, xi: f64) -> f64 {
    SQRT_2 * (nu * xi).sin()
}

fn energy_inner(x: &BeamVector, y: &BeamVector) -> C64 {
    let re = |f: &dyn Fn(f64) -> C64| simpson(|xi| f(xi).re, 0.0, 1.0, 4096);
    let im = |f: &dyn Fn(f64) -> C64| simpson(|xi| f(xi).im, 0.0, 1.0, 4096);
    let f = |xi: f64| {
        let stiff = x.pos * x.nu.powi(2) * e(x.nu, xi) * (y.pos * y.nu.powi(2) * e(y.nu, xi)).conj();
        let kin = x.vel * e(x.nu, xi) * (y.vel * e(y.nu, xi)).conj();
        stiff + kin
    };
    c(re(&f), im(&f))
}

fn f_vec(gamma: f64, n: i64) -> BeamVector {
    let k = n.unsigned_abs() as usize;
    let s = n.signum() as f64;
    let l = beam_lambda(gamma, k, s);
    let kappa = beam_f_scale(gamma, s);
    BeamVector { nu: beam_nu(k), pos: kappa / l, vel: kappa }
}

fn g_vec(gamma: f64, n: i64) -> BeamVector {
    let k = n.unsigned_abs() as usize;
    let s = n.signum() as f64;
    let l_opp = beam_lambda(gamma, k, -s);
    BeamVector { nu: beam_nu(k), pos: -c(1.0, 0.0) / l_opp / SQRT_2, vel: c(1.0 / SQRT_2, 0.0) }
}

fn modes(pairs: i64) -> Vec<i64> {
    (1..=pairs).flat_map(|k| [-k, k]).collect()
}

#[test]
fn beam_biorthogonality_by_quadrature() {
    let gamma = 1.0 / 15.0;
    let ms = modes(15);
    for &n in &ms {
        let f = f_vec(gamma, n);
        for &m in &ms {
            let ip = energy_inner(&f, &g_vec(gamma, m));
            let want = if n == m { 1.0 } else { 0.0 };
            assert!((ip - c(want, 0.0)).norm() < 1e-10, "<f_{n}, g_{m}> = {ip}");
        }
    }
}

#[test]
fn beam_gram_matches_quadrature() {
    let gamma = 1.0 / 15.0;
    let sys = build_beam(6, gamma, 1.0).unwrap();
    let g = sys.gram().as_matrix();
    for i in 0..sys.n_state() {
        for j in 0..sys.n_state() {
            let want = energy_inner(&f_vec(gamma, beam_mode(j)), &f_vec(gamma, beam_mode(i)));
            assert!((g[(i, j)] - want).norm() < 1e-9 * want.norm().max(1.0), "G[{i},{j}]");
        }
    }
}

#[test]
fn beam_projection_round_trip() {
    let gamma = 1.0 / 15.0;
    let sys = build_beam(5, gamma, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let z0 = random_real_vec(&mut rng, 5);
    let zd = random_real_vec(&mut rng, 5);
    let x = beam_project_initial(&sys, &z0, &zd).unwrap();
    // projection coefficients are ⟨x, g_n⟩ computed by quadrature
    for (i, &coef) in x.iter().enumerate() {
        let n = beam_mode(i);
        let k = n.unsigned_abs() as usize - 1;
        let xv = BeamVector { nu: beam_nu(k + 1), pos: z0[k], vel: zd[k] };
        let want = energy_inner(&xv, &g_vec(gamma, n));
        assert!((coef - want).norm() < 1e-10);
    }
    // Σ c_n f_n reproduces the deflection and velocity coefficients
    for k in 0..5 {
        let (im, ip) = (beam_index(-(k as i64 + 1)), beam_index(k as i64 + 1));
        let fm = f_vec(gamma, -(k as i64 + 1));
        let fp = f_vec(gamma, k as i64 + 1);
        let pos = x[im] * fm.pos + x[ip] * fp.pos;
        let vel = x[im] * fm.vel + x[ip] * fp.vel;
        assert!((pos - z0[k]).norm() < 1e-12 && (vel - zd[k]).norm() < 1e-12);
    }
    // the Gram norm equals the energy norm Σ ν⁴|z_k|² + |ż_k|²
    let energy: f64 = (0..5).map(|k| beam_nu(k + 1).powi(4) * z0[k].norm_sqr() + zd[k].norm_sqr()).sum();
    assert!((sys.state_norm(&x).powi(2) - energy).abs() < 1e-10 * energy);
}

#[test]
fn case_study_beam_initial_coefficients() {
    let a = beam_sine_coefficients(|xi| 1.0 - (PI * xi).cos(), 3);
    for (k, ak) in a.iter().enumerate() {
        let nu = beam_nu(k + 1);
        let want = -SQRT_2 * PI * PI / (nu * (nu * nu - PI * PI));
        assert!((ak.re - want).abs() < 1e-10);
    }
}

#[test]
fn simulation_is_exact_between_events() {
    let sys = build_heat_cascade(6, &CascadeParams::default()).unwrap();
    let x0 = cascade_constant_initial(&sys, -1.0);
    let spec = EtmSpec::capped(EtmVariant::SampleRelativeCapped, 0.3, 1.0);
    let (traj, log) = simulate(&sys, &spec, &x0, 3.0, 0.05, None).unwrap();
    let times = log.times();
    let closed: Vec<(f64, Vec<C64>)> = traj.segments.iter().map(|s| (s.t_k, s.x_k.clone())).collect();
    for w in closed.windows(2) {
        let (t0, x0) = (&w[0].0, &w[0].1);
        let (t1, x1) = (&w[1].0, &w[1].1);
        let u = sys.input(x0);
        let bu = sys.b().mat_vec(&u);
        let approx = rk4(sys.a(), &bu, x0, t1 - t0, 1e-5);
        assert!(rel_err(x1, &approx) < 1e-7);
    }
    assert!(times.len() >= 3);
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let y = traj.state_at(&sys, *t).unwrap();
        assert!(rel_err(&y, x) < 1e-12);
    }
}
