//! Stationary solutions of `-u_xx + u u_x = f` by Newton's method.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::{laplacian, norm_of, project_mean_free, Field, NormKind};
use crate::forcing::{Forcing, Source};
use crate::grid::Grid;

use super::nonlinear::{bilinear_term, burgers_term};
use super::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonSummary {
    pub iterations: usize,
    pub residual: f64,
}

fn residual(grid: &Grid, u: &[f64], f: &[f64], dealias: bool) -> Vec<f64> {
    let lu = laplacian(grid, u);
    let nu = burgers_term(grid, u, dealias);
    let r: Vec<f64> = (0..u.len()).map(|j| -lu[j] + nu[j] - f[j]).collect();
    if grid.is_periodic() {
        project_mean_free(&r)
    } else {
        r
    }
}

/// Dense Jacobian `-L + B(u, .)`. On periodic grids it acts on mean-free
/// directions and the constant mode is pinned by `11^T / n`.
fn jacobian(grid: &Grid, u: &[f64], dealias: bool) -> DMatrix<f64> {
    let n = u.len();
    let periodic = grid.is_periodic();
    let mut jac = DMatrix::<f64>::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let dir = if periodic { project_mean_free(&e) } else { e.clone() };
        let le = laplacian(grid, &dir);
        let be = bilinear_term(grid, u, &dir, dealias);
        let mut col: Vec<f64> = (0..n).map(|i| -le[i] + be[i]).collect();
        if periodic {
            col = project_mean_free(&col);
            col.iter_mut().for_each(|c| *c += 1.0 / n as f64);
        }
        jac.set_column(j, &DVector::from_vec(col));
    }
    jac
}

fn newton_update(grid: &Grid, u: &[f64], r: &[f64], dealias: bool) -> Result<Vec<f64>> {
    let jac = jacobian(grid, u, dealias);
    let rhs = DVector::from_iterator(r.len(), r.iter().map(|v| -v));
    let delta = jac
        .lu()
        .solve(&rhs)
        .ok_or_else(|| LabError::LinearSolveFailure("singular Newton Jacobian".into()))?;
    let mut delta: Vec<f64> = delta.iter().copied().collect();
    if grid.is_periodic() {
        delta = project_mean_free(&delta);
    }
    Ok(u.iter().zip(&delta).map(|(a, b)| a + b).collect())
}

/// Steady state together with the Newton iteration count and final residual.
pub fn steady_state_with_summary(
    f: &Forcing,
    grid: &Arc<Grid>,
    cfg: &SolverConfig,
) -> Result<(Field, NewtonSummary)> {
    if !f.is_autonomous() {
        return Err(LabError::InvalidForcing(
            "steady states need constant temporal envelopes".into(),
        ));
    }
    let rhs = f.sample(0.0, grid)?;
    let rhs = if grid.is_periodic() { project_mean_free(&rhs) } else { rhs };
    let n = grid.len();
    // One Newton step from zero solves the linear problem -u_xx = f.
    let zero = vec![0.0; n];
    let mut u = newton_update(grid, &zero, &residual(grid, &zero, &rhs, cfg.dealias), cfg.dealias)?;
    let mut res = norm_of(grid, &residual(grid, &u, &rhs, cfg.dealias), NormKind::L2);
    let mut iterations = 0;
    while res > cfg.newton_tol {
        if iterations >= cfg.newton_max_iter || !res.is_finite() {
            return Err(LabError::NewtonDivergence {
                iterations,
                residual: res,
            });
        }
        let r = residual(grid, &u, &rhs, cfg.dealias);
        u = newton_update(grid, &u, &r, cfg.dealias)?;
        res = norm_of(grid, &residual(grid, &u, &rhs, cfg.dealias), NormKind::L2);
        iterations += 1;
    }
    Ok((
        Field::new(grid.clone(), u, 0.0)?,
        NewtonSummary {
            iterations,
            residual: res,
        },
    ))
}

/// Solves `-u_xx + N(u) = f` for an autonomous forcing.
pub fn steady_state(f: &Forcing, grid: &Arc<Grid>, cfg: &SolverConfig) -> Result<Field> {
    steady_state_with_summary(f, grid, cfg).map(|(u, _)| u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::{Envelope, SpatialProfile};
    use crate::grid::{make_grid, GridKind, GridSpec};
    use std::f64::consts::PI;

    #[test]
    fn zero_forcing_gives_zero() {
        for kind in [GridKind::Dirichlet, GridKind::PeriodicMeanFree] {
            let g = Arc::new(make_grid(kind, 16).unwrap());
            let u = steady_state(&Forcing::zero(), &g, &SolverConfig::new(0.01, "cn-ab2")).unwrap();
            assert_eq!(u.max_abs(), 0.0);
        }
    }

    #[test]
    fn recovers_manufactured_state() {
        let cfg = SolverConfig::new(0.01, "cn-ab2");
        for kind in [GridKind::Dirichlet, GridKind::PeriodicMeanFree] {
            let g = Arc::new(make_grid(kind, 32).unwrap());
            let exact = match kind {
                GridKind::Dirichlet => g.sample(|x| 0.2 * (PI * x).sin() + 0.1 * (2.0 * PI * x).sin()),
                GridKind::PeriodicMeanFree => {
                    g.sample(|x| 0.2 * (2.0 * PI * x).sin() + 0.1 * (4.0 * PI * x).cos())
                }
            };
            let lu = laplacian(&g, &exact);
            let nu = burgers_term(&g, &exact, cfg.dealias);
            let values: Vec<f64> = (0..exact.len()).map(|j| -lu[j] + nu[j]).collect();
            let profile = SpatialProfile::Tabulated {
                grid: GridSpec { kind, n: 32 },
                values,
            };
            let f = Forcing::new(
                vec![crate::forcing::ForcingTerm {
                    profile,
                    envelope: Envelope::constant(1.0),
                }],
                g.is_periodic(),
            )
            .unwrap();
            let (u, summary) = steady_state_with_summary(&f, &g, &cfg).unwrap();
            assert!(summary.residual <= cfg.newton_tol);
            let err = u.values().iter().zip(&exact).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err < 10.0 * cfg.newton_tol, "{kind:?}: {err}");
        }
    }

    #[test]
    fn rejects_time_dependent_forcing() {
        let g = Arc::new(make_grid(GridKind::Dirichlet, 16).unwrap());
        let f = Forcing::separable(SpatialProfile::sine(1, 1.0), Envelope::cos(1.0)).unwrap();
        assert!(steady_state(&f, &g, &SolverConfig::new(0.01, "cn-ab2")).is_err());
    }
}
