use std::f64::consts::PI;
use std::sync::Arc;

use burgers_lab::attractor::*;
use burgers_lab::forcing::NoForcing;
use burgers_lab::process::steady::steady_state;
use burgers_lab::*;

fn grid(kind: GridKind, n: usize) -> Arc<Grid> {
    Arc::new(make_grid(kind, n).unwrap())
}

#[test]
fn unforced_bundle_collapses_after_three_time_units() {
    let g = grid(GridKind::Dirichlet, 64);
    let cfg = SolverConfig::new(1e-3, "cn-ab2");
    let seeds = default_seeds(&g, 2, 5);
    let r = pullback_bundle(0.0, &[-0.5, -1.0, -3.0, -4.0], &seeds, &NoForcing, &cfg, None).unwrap();
    let d = r.diameters(NormKind::L2);
    assert!(d.windows(2).all(|p| p[1] < p[0]));
    assert!(d[2] <= 1e-6 && d[3] <= 1e-6);
    let fit = r.fit.unwrap();
    assert!(fit.slope < 0.0);
}

#[test]
fn forced_periodic_diameters_decrease_and_approach_reference() {
    let g = grid(GridKind::PeriodicMeanFree, 64);
    let cfg = SolverConfig::new(1e-3, "cn-ab2");
    let f = Forcing::separable(SpatialProfile::sine(2, 3.0), Envelope::cos(2.0 * PI)).unwrap();
    let e = eternal_trajectory((-1.0, 0.0), &g, &f, &cfg, 1e-10, 20, 10).unwrap();
    let reference = e.trajectory.last().clone();
    let seeds = default_seeds(&g, 3, 8);
    let t0s = [-0.05, -0.1, -0.2, -0.4, -0.8];
    let r = pullback_bundle(0.0, &t0s, &seeds, &f, &cfg, Some(&reference)).unwrap();
    let d = r.diameters(NormKind::H1semi);
    assert!(d.windows(2).all(|p| p[1] < p[0]), "{d:?}");
    let sd: Vec<f64> = r.entries.iter().map(|x| x.semidistance.unwrap()).collect();
    assert!(sd.windows(2).all(|p| p[1] < p[0]), "{sd:?}");
    assert!(sd[4] < 1e-8);
}

#[test]
fn eternal_trajectory_of_autonomous_forcing_is_the_steady_state() {
    let g = grid(GridKind::PeriodicMeanFree, 32);
    let cfg = SolverConfig::new(1e-3, "cn-ab2");
    let f = Forcing::separable(SpatialProfile::cosine(2, 2.0), Envelope::constant(1.0)).unwrap();
    let tol = 1e-6;
    let e = eternal_trajectory((0.0, 0.5), &g, &f, &cfg, tol, 40, 50).unwrap();
    let ss = steady_state(&f, &g, &cfg).unwrap();
    for s in e.trajectory.snapshots() {
        assert!(s.sub(&ss).unwrap().norm(NormKind::H1semi) <= 10.0 * tol);
    }
}

#[test]
fn doubling_the_horizon_does_not_move_the_eternal_trajectory() {
    let g = grid(GridKind::Dirichlet, 64);
    let cfg = SolverConfig::new(1e-3, "cn-ab2");
    let f = Forcing::separable(SpatialProfile::sine(1, 2.0), Envelope::cos(1.0)).unwrap();
    let tol = 1e-8;
    let e = eternal_trajectory((0.0, 1.0), &g, &f, &cfg, tol, 40, 10).unwrap();
    let t0 = -2.0 * e.k as f64;
    let far = solve(&Field::zeros(g.clone(), t0), t0, 1.0, &f, &cfg, 10).unwrap().restrict(0.0, 1.0);
    assert_eq!(far.len(), e.trajectory.len());
    for (a, b) in far.snapshots().iter().zip(e.trajectory.snapshots()) {
        assert!(a.sub(b).unwrap().norm(NormKind::H1semi) <= tol);
    }
}

#[test]
fn forward_attraction_towards_the_eternal_solution() {
    let g = grid(GridKind::PeriodicMeanFree, 64);
    let cfg = SolverConfig::new(1e-3, "cn-ab2");
    let f = Forcing::separable(SpatialProfile::sine(2, 2.0), Envelope::cos(2.0 * PI)).unwrap();
    let u0 = Field::from_fn(g.clone(), 0.0, |x| (4.0 * PI * x).cos());
    let v0 = Field::zeros(g, 0.0);
    let pair = solve_pair(&u0, &v0, 0.0, 1.0, &f, &cfg, 20).unwrap();
    let l2 = pair.w.series(NormKind::L2);
    let skip = l2.len() / 5;
    assert!(l2[skip..].windows(2).all(|p| p[1] < p[0]));
    assert!(l2[l2.len() - 1] < 1e-6 * l2[0]);
}

#[test]
fn quasi_periodic_eternal_trajectory_is_not_periodic() {
    let g = grid(GridKind::PeriodicMeanFree, 32);
    let cfg = SolverConfig::new(1e-3, "cn-ab2");
    let f = Forcing::new(
        vec![
            ForcingTerm {
                profile: SpatialProfile::sine(2, 1.0),
                envelope: Envelope::QuasiPeriodic {
                    omega1: 2.0 * PI,
                    omega2: 2.0 * PI * 2f64.sqrt(),
                },
            },
        ],
        true,
    )
    .unwrap();
    let e = eternal_trajectory((0.0, 2.0), &g, &f, &cfg, 1e-6, 20, 10).unwrap();
    assert!(periodicity_check(&e.trajectory, 1.0).unwrap() > 1e-2);
}
