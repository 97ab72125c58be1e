use std::f64::consts::PI;
use std::sync::Arc;

use burgers_lab::estimates::*;
use burgers_lab::fit::log_log_slope;
use burgers_lab::forcing::NoForcing;
use burgers_lab::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid(kind: GridKind, n: usize) -> Arc<Grid> {
    Arc::new(make_grid(kind, n).unwrap())
}

fn forced() -> Forcing {
    Forcing::separable(SpatialProfile::sine(1, 2.0), Envelope::cos(1.0)).unwrap()
}

#[test]
fn unforced_l2_decay_needs_no_absorbing_term() {
    let g = grid(GridKind::Dirichlet, 64);
    let u0 = Field::from_fn(g, 0.0, |x| (PI * x).sin() + 0.5 * (3.0 * PI * x).sin());
    let tr = solve(&u0, 0.0, 1.0, &NoForcing, &SolverConfig::new(1e-3, "cn-ab2"), 10).unwrap();
    let r = certify_l2_decay(&tr, &Forcing::zero()).unwrap();
    assert!(r.pass, "worst {}", r.worst_margin());
    assert_eq!(r.constant("c_abs"), Some(0.0));
}

#[test]
fn forced_l2_absorbing_constant_is_within_young_limit() {
    let g = grid(GridKind::Dirichlet, 64);
    let u0 = Field::from_fn(g, 0.0, |x| 2.0 * (2.0 * PI * x).sin());
    let f = forced();
    let tr = solve(&u0, 0.0, 4.0, &f, &SolverConfig::new(1e-3, "cn-ab2"), 10).unwrap();
    let r = certify_l2_decay(&tr, &f).unwrap();
    assert!(r.pass);
    let c_abs = r.constant("c_abs").unwrap();
    assert!(c_abs > 0.0 && c_abs <= r.constant("c_abs_young_limit").unwrap(), "c_abs {c_abs}");
}

#[test]
fn unforced_h1_decay_rate_tracks_eigenvalue() {
    let n = 64;
    let g = grid(GridKind::Dirichlet, n);
    let u0 = Field::from_fn(g, 0.0, |x| 0.1 * (PI * x).sin());
    let tr = solve(&u0, 0.0, 1.0, &NoForcing, &SolverConfig::new(1e-3, "cn-ab2"), 10).unwrap();
    let r = certify_h1_decay(&tr).unwrap();
    assert!(r.pass);
    assert_eq!(r.constant("c_abs"), Some(0.0));
    let two_lambda = 2.0 * dirichlet_first_eigenvalue(n).unwrap();
    let c = r.constant("c_decay").unwrap();
    assert!(c <= two_lambda * 1.01 && c >= two_lambda * 0.9, "c_decay {c} vs {two_lambda}");
}

#[test]
fn large_amplitude_h1_bound_is_feasible() {
    let g = grid(GridKind::Dirichlet, 128);
    let u0 = Field::from_fn(g, 0.0, |x| 5.0 * 2f64.sqrt() * (PI * x).sin());
    assert!((u0.norm(NormKind::L2) - 5.0).abs() < 1e-10);
    let f = forced();
    let tr = solve(&u0, 0.0, 2.0, &f, &SolverConfig::new(5e-4, "cn-ab2"), 10).unwrap();
    let r = certify_h1_decay(&tr).unwrap();
    assert!(r.pass && r.margins.iter().all(|m| *m >= 0.0));
    assert!(r.constant("envelope_looseness").unwrap() > 1e3);
}

#[test]
fn dissipative_radius_is_independent_of_initial_size() {
    let g = grid(GridKind::Dirichlet, 64);
    let cfg = SolverConfig::new(1e-3, "cn-ab2");
    let f = forced();
    let trajs: Vec<Trajectory> = [0.1, 1.0, 5.0]
        .iter()
        .map(|&target| {
            let amp = target * 2f64.sqrt() / PI;
            let u0 = Field::from_fn(g.clone(), 0.0, |x| amp * (PI * x).sin());
            solve(&u0, 0.0, 8.0, &f, &cfg, 20).unwrap()
        })
        .collect();
    let r = dissipative_radius_check(&trajs, 3.0).unwrap();
    assert!(r.pass, "spread {:?}", r.constant("radius_spread"));
    let zero: Vec<Trajectory> = trajs
        .iter()
        .map(|t| solve(t.first(), 0.0, 4.0, &NoForcing, &cfg, 20).unwrap())
        .collect();
    let r = dissipative_radius_check(&zero, 3.0).unwrap();
    assert!(r.pass && r.constant("radius_max").unwrap() <= 1e-8);
}

#[test]
fn smooth_data_has_bounded_gradient() {
    let g = grid(GridKind::Dirichlet, 128);
    let u0 = Field::from_fn(g, 0.0, |x| 0.5 * (PI * x).sin());
    let eps = [0.1, 0.03, 0.01, 0.003, 0.001];
    let cfg = SolverConfig::new(1e-4, "imex-euler");
    let r = certify_smoothing(&u0, &NoForcing, &eps, &cfg).unwrap();
    assert!(r.pass);
    assert!(r.constant("exponent").unwrap().abs() < 0.3);
    assert!(certify_smoothing(&u0, &NoForcing, &[0.01, 0.0005], &cfg).is_err());
    assert!(certify_smoothing(&u0, &NoForcing, &[0.001, 0.01], &cfg).is_err());
}

/// Sine coefficients of nodal data, then `||u_x(eps)||` of the continuous
/// heat semigroup, which governs small data.
fn heat_gradient_norms(u0: &Field, eps: &[f64]) -> Vec<f64> {
    let g = u0.grid();
    let n = g.n();
    let b: Vec<f64> = (1..n)
        .map(|k| {
            2.0 * g.h()
                * g.nodes()
                    .iter()
                    .zip(u0.values())
                    .map(|(x, v)| v * (k as f64 * PI * x).sin())
                    .sum::<f64>()
        })
        .collect();
    eps.iter()
        .map(|&e| {
            b.iter()
                .enumerate()
                .map(|(i, bk)| {
                    let k = (i + 1) as f64 * PI;
                    0.5 * k * k * bk * bk * (-2.0 * k * k * e).exp()
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

#[test]
fn smoothing_exponent_matches_heat_semigroup() {
    let g = grid(GridKind::Dirichlet, 256);
    let cfg = SolverConfig::new(1e-4, "imex-euler");
    let eps: Vec<f64> = (0..=8).map(|i| 10f64.powf(-1.0 - 2.0 * i as f64 / 8.0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let noise: Vec<f64> = (0..g.len()).map(|_| 1e-3 * rng.random_range(-1.0..1.0)).collect();
    for u0 in [rough_field(&g, 10).scaled(1e-3), Field::new(g.clone(), noise, 0.0).unwrap()] {
        let r = certify_smoothing(&u0, &NoForcing, &eps, &cfg).unwrap();
        let oracle = log_log_slope(&eps, &heat_gradient_norms(&u0, &eps)).unwrap().slope;
        let p = r.constant("exponent").unwrap();
        assert!((p - oracle).abs() < 0.03, "exponent {p} vs heat {oracle}");
        assert!(r.pass);
    }
}

#[test]
fn interpolation_sweep() {
    for kind in [GridKind::Dirichlet, GridKind::PeriodicMeanFree] {
        let g = grid(kind, 128);
        let fields = random_smooth_fields(&g, 1000, 6, 99);
        let (i1, i2) = certify_interpolation(&fields);
        assert!(i1.pass && i2.pass, "{kind:?}");
        assert_eq!(i1.margins.len(), 1000);
        assert!(certify_poincare(&fields).unwrap().pass);
    }
}

#[test]
fn lipschitz_ratio_in_linear_regime() {
    let g = grid(GridKind::Dirichlet, 64);
    let cfg = SolverConfig::new(1e-3, "cn-ab2");
    let tau = 0.1;
    let u0 = Field::from_fn(g.clone(), 0.0, |x| 1e-3 * (PI * x).sin());
    let delta = Field::from_fn(g, 0.0, |x| 1e-3 * (PI * x).sin());
    let r = certify_lipschitz(&u0, &delta, tau, &NoForcing, &cfg, 2).unwrap();
    let expected = (-PI * PI * tau).exp();
    let d = r.constant("lipschitz_constant").unwrap();
    assert!((d / expected - 1.0).abs() < 0.2, "{d} vs {expected}");
    assert!(r.pass);
}

#[test]
fn lipschitz_ratio_stabilises_for_forced_pair() {
    let g = grid(GridKind::Dirichlet, 64);
    let cfg = SolverConfig::new(1e-3, "cn-ab2");
    let u0 = Field::from_fn(g.clone(), 0.0, |x| 0.5 * (2.0 * PI * x).sin());
    let delta = Field::from_fn(g, 0.0, |x| 0.1 * (3.0 * PI * x).sin());
    let r = certify_lipschitz(&u0, &delta, 0.5, &forced(), &cfg, 3).unwrap();
    assert!(r.pass, "{:?}", r);
    assert!(r.constant("ratio_spread").unwrap() <= 0.1);
}

#[test]
fn l1_contraction_for_both_boundary_conditions() {
    let cfg = SolverConfig::new(1e-3, "cn-ab2");
    let g = grid(GridKind::Dirichlet, 64);
    let f = forced();
    let u = solve(&Field::zeros(g.clone(), 0.0), 0.0, 2.0, &f, &cfg, 1).unwrap();
    let v0 = Field::from_fn(g, 0.0, |x| 0.5 * (2.0 * PI * x).sin());
    let v = solve(&v0, 0.0, 2.0, &f, &cfg, 1).unwrap();
    let r = certify_l1_contraction(&u, &v).unwrap();
    assert!(r.pass);
    assert!(r.constant("l1_rate").unwrap() < 0.0);
    assert!(certify_l1_contraction(&u, &u).unwrap().margins.iter().all(|m| *m == 0.0));

    let g = grid(GridKind::PeriodicMeanFree, 64);
    let fp = Forcing::separable(SpatialProfile::sine(2, 2.0), Envelope::cos(2.0 * PI)).unwrap();
    let u0 = Field::from_fn(g.clone(), 0.0, |x| 0.5 * (2.0 * PI * x).sin());
    let v0 = Field::from_fn(g, 0.0, |x| 0.5 * (4.0 * PI * x).cos());
    let pair = solve_pair(&u0, &v0, 0.0, 0.5, &fp, &cfg, 1).unwrap();
    assert!(certify_l1_contraction_pair(&pair).unwrap().pass);
}

#[test]
fn energy_inequality_per_step() {
    let g = grid(GridKind::Dirichlet, 64);
    let f = forced();
    let u0 = Field::from_fn(g, 0.0, |x| 0.5 * (PI * x).sin());
    let tr = solve(&u0, 0.0, 0.5, &f, &SolverConfig::new(1e-3, "imex-euler"), 1).unwrap();
    let r = certify_l2_energy(&tr, &f).unwrap();
    assert!(r.pass, "worst {}", r.worst_margin());
    let cn = solve(&u0, 0.0, 0.1, &f, &SolverConfig::new(1e-3, "cn-ab2"), 1).unwrap();
    assert!(certify_l2_energy(&cn, &f).is_err());
}

#[test]
fn mean_free_identity_reduction() {
    let g = grid(GridKind::PeriodicMeanFree, 32);
    let f = Forcing::separable(SpatialProfile::sine(2, 1.0), Envelope::cos(1.0)).unwrap();
    let u0 = Field::from_fn(g.clone(), 0.0, |x| (2.0 * PI * x).sin());
    let red = mean_free_reduce(&f, &u0).unwrap();
    for [_, a, b, c] in red.data.samples(&[0.0, 0.5, 1.0]) {
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15 && c.abs() < 1e-15);
    }
    let tr = solve(&red.v0, 0.0, 0.2, &red.forcing, &SolverConfig::new(1e-3, "cn-ab2"), 50).unwrap();
    let back = reconstruct_from_reduced(&tr, &red.data).unwrap();
    for (a, b) in back.snapshots().iter().zip(tr.snapshots()) {
        assert!(a.sub(b).unwrap().max_abs() < 1e-14);
    }
}

#[test]
fn pure_mean_evolution() {
    let g = grid(GridKind::PeriodicMeanFree, 32);
    let f = Forcing::separable(SpatialProfile::constant(1.0), Envelope::constant(1.0)).unwrap();
    let red = mean_free_reduce(&f, &Field::zeros(g.clone(), 0.0)).unwrap();
    assert!(red.forcing.sample(0.7, &g).unwrap().iter().all(|v| v.abs() < 1e-15));
    let [_, a, b, c] = red.data.samples(&[2.0])[0];
    assert_eq!((a, b, c), (1.0, 2.0, 2.0));
    let tr = solve(&red.v0, 0.0, 1.0, &red.forcing, &SolverConfig::new(0.01, "cn-ab2"), 10).unwrap();
    let u = reconstruct_from_reduced(&tr, &red.data).unwrap();
    for s in u.snapshots() {
        assert!(s.values().iter().all(|v| (v - s.time()).abs() < 1e-12));
    }
}

#[test]
fn reduce_then_reconstruct_is_spectrally_exact() {
    let g = grid(GridKind::PeriodicMeanFree, 32);
    let f = Forcing::separable(SpatialProfile::constant(1.0), Envelope::cos(2.0)).unwrap();
    let red = mean_free_reduce(&f, &Field::zeros(g.clone(), 0.0)).unwrap();
    let t = 0.8;
    let v = Field::from_fn(g.clone(), t, |x| (2.0 * PI * x).sin() + 0.3 * (6.0 * PI * x).cos());
    let u = reconstruct_field(&v, &red.data).unwrap();
    let (beta, gamma) = (red.data.beta_at(t), red.data.gamma_at(t));
    for (x, val) in g.nodes().iter().zip(u.values()) {
        let y = x - gamma;
        let exact = (2.0 * PI * y).sin() + 0.3 * (6.0 * PI * y).cos() + beta;
        assert!((val - exact).abs() < 1e-12);
    }
    let early = Field::zeros(g, -0.1);
    assert!(matches!(reconstruct_field(&early, &red.data), Err(LabError::CoverageGap { .. })));
}

#[test]
fn reduction_paths_are_trapezoid_consistent() {
    let f = Forcing::separable(SpatialProfile::constant(1.0), Envelope::cos(3.0)).unwrap();
    let g = grid(GridKind::PeriodicMeanFree, 8);
    let red = mean_free_reduce(&f, &Field::from_fn(g, 0.0, |_| 0.0)).unwrap();
    for dt in [0.01, 0.005] {
        let times: Vec<f64> = (0..=(1.0 / dt) as usize).map(|i| i as f64 * dt).collect();
        assert!(red.data.consistency_residual(&times) <= 9.0 * dt * dt);
    }
}

#[test]
fn certificate_summary_serializes() {
    let g = grid(GridKind::Dirichlet, 32);
    let fields = random_smooth_fields(&g, 5, 3, 1);
    let r = certify_poincare(&fields).unwrap();
    let json: serde_json::Value = serde_json::from_str(&r.summary_json()).unwrap();
    assert_eq!(json["inequality_id"], "poincare");
    assert_eq!(json["sample_count"], 10);
    assert!(json["fitted_constants"]["lambda_1"].as_f64().unwrap() > 9.0);
}
