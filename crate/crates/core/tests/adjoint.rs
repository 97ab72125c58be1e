use std::f64::consts::PI;
use std::sync::Arc;

use burgers_lab::adjoint::*;
use burgers_lab::forcing::NoForcing;
use burgers_lab::*;

fn grid(kind: GridKind, n: usize) -> Arc<Grid> {
    Arc::new(make_grid(kind, n).unwrap())
}

#[test]
fn zero_coefficient_is_the_heat_equation() {
    let g = grid(GridKind::Dirichlet, 128);
    let cfg = SolverConfig::new(1e-4, "cn-ab2");
    let a = CoefficientPath::constant(&Field::zeros(g.clone(), 0.0), 0.0, 0.1, &cfg).unwrap();
    let z = Field::from_fn(g.clone(), 0.1, |x| (PI * x).sin());
    for adv in ["central", "upwind"] {
        let sol = adjoint_solve(&a, &z, 0.0, 0.1, &cfg, &AdjointOptions::new(adv)).unwrap();
        let exact = Field::from_fn(g.clone(), 0.0, |x| (-PI * PI * 0.1).exp() * (PI * x).sin());
        let err = sol.z_initial().sub(&exact).unwrap().norm(NormKind::Linf);
        assert!(err < 10.0 * (cfg.dt + g.h() * g.h()), "{adv}: {err:e}");
    }
}

#[test]
fn constant_coefficient_advects_the_heat_solution() {
    let g = grid(GridKind::PeriodicMeanFree, 64);
    let cfg = SolverConfig::new(1e-4, "cn-ab2");
    let c = 0.7;
    let tau = 0.05;
    let a = CoefficientPath::constant(&Field::from_fn(g.clone(), 0.0, |_| c), 0.0, tau, &cfg).unwrap();
    let z = Field::from_fn(g.clone(), tau, |x| (2.0 * PI * x).sin());
    let sol = adjoint_solve(&a, &z, 0.0, tau, &cfg, &AdjointOptions::new("central")).unwrap();
    for (s, f) in sol.y.times().iter().zip(sol.y.snapshots()).step_by(50) {
        for (x, v) in g.nodes().iter().zip(f.values()) {
            let exact = (-4.0 * PI * PI * s).exp() * (2.0 * PI * (x + c * s)).sin();
            assert!((v - exact).abs() < 1e-5, "tau {s}: {v} vs {exact}");
        }
    }
}

#[test]
fn heat_flow_from_sign_data_strictly_decreases_sup() {
    let g = grid(GridKind::PeriodicMeanFree, 64);
    let cfg = SolverConfig::new(1e-3, "cn-ab2");
    let a = CoefficientPath::constant(&Field::zeros(g.clone(), 0.0), 0.0, 0.2, &cfg).unwrap();
    let w = Field::from_fn(g.clone(), 0.2, |x| (2.0 * PI * x).sin());
    let z = sign_indicator(&w);
    let sol = adjoint_solve(&a, &z, 0.0, 0.2, &cfg, &AdjointOptions::new("upwind")).unwrap();
    let r = max_principle_check(&sol.y);
    assert!(r.pass());
    assert!(r.strict.unwrap().min_drop > 0.0);
    let sups: Vec<f64> = sol.y.snapshots().iter().map(|s| s.max_abs()).collect();
    assert!(sups.windows(2).all(|p| p[1] < p[0]));
}

#[test]
fn constants_are_invariant_and_exempt_from_strict_decay() {
    let g = grid(GridKind::PeriodicMeanFree, 16);
    let cfg = SolverConfig::new(1e-2, "cn-ab2");
    let a = CoefficientPath::constant(&Field::zeros(g.clone(), 0.0), 0.0, 0.5, &cfg).unwrap();
    let one = Field::from_fn(g.clone(), 0.5, |_| 1.0);
    let sol = adjoint_solve(&a, &one, 0.0, 0.5, &cfg, &AdjointOptions::new("central")).unwrap();
    let r = max_principle_check(&sol.y);
    assert!(r.strict.is_none() && r.weak_pass);
    for s in sol.y.snapshots() {
        assert!((s.max_abs() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn duality_gap_refines_for_unforced_dirichlet_pair() {
    let mut gaps = Vec::new();
    for level in 0..3 {
        let g = grid(GridKind::Dirichlet, 32 << level);
        let cfg = SolverConfig::new(0.01 / (1 << level) as f64, "cn-ab2");
        let u0 = Field::from_fn(g.clone(), 0.0, |x| 0.1 * (PI * x).sin());
        let v0 = Field::from_fn(g, 0.0, |x| 0.1 * (2.0 * PI * x).sin());
        let u = solve(&u0, 0.0, 0.2, &NoForcing, &cfg, 1).unwrap();
        let v = solve(&v0, 0.0, 0.2, &NoForcing, &cfg, 1).unwrap();
        gaps.push(duality_gap(&u, &v, 0.0, 0.2, &cfg, &AdjointOptions::new("central")).unwrap());
    }
    assert!(gaps.windows(2).all(|p| p[0] / p[1] > 3.0), "gaps {gaps:?}");
}

#[test]
fn forced_dirichlet_l1_decay() {
    let g = grid(GridKind::Dirichlet, 64);
    let cfg = SolverConfig::new(1e-3, "cn-ab2");
    let f = Forcing::separable(SpatialProfile::sine(1, 2.0), Envelope::cos(1.0)).unwrap();
    let u0 = Field::zeros(g.clone(), 0.0);
    let v0 = Field::from_fn(g, 0.0, |x| 0.5 * (2.0 * PI * x).sin());
    let pair = solve_pair(&u0, &v0, 0.0, 3.0, &f, &cfg, 10).unwrap();
    let r = l1_decay_bound_pair(&pair).unwrap();
    assert!(r.l1_fit.slope < 0.0 && r.l1_fit.r_squared >= 0.99, "{:?}", r.l1_fit);
    assert!(r.interpolation_pass);
    let same = solve_pair(&u0, &u0, 0.0, 0.5, &f, &cfg, 10).unwrap();
    assert!(matches!(l1_decay_bound_pair(&same), Err(LabError::DegenerateFit(_))));
}

#[test]
fn barrier_margin_is_nonincreasing_in_tau() {
    let p = BarrierParams::new(1.0).unwrap();
    for x in [0.1, 0.5, 0.9] {
        let r: Vec<f64> = (0..20)
            .map(|i| barrier_residual(x, 0.1 * i as f64, -1.0, &p).unwrap())
            .collect();
        assert!(r.windows(2).all(|w| w[1] <= w[0]));
    }
    for x in [0.0, 0.3, 1.0] {
        assert!(barrier_eval(x, 0.0, &p).unwrap() >= 1.0);
        assert!(barrier_eval(x, 5.0, &p).unwrap() > 0.0);
    }
}
