//! Energy-consistent discretizations of `u u_x`.
//!
//! Dirichlet grids use the skew-symmetric split `(u Du + D(u^2)) / 3` with
//! the central difference `D`, whose discrete inner product with `u`
//! vanishes identically. Periodic grids use the pseudo-spectral product,
//! optionally Galerkin-truncated by the 2/3 rule, followed by removal of
//! the mean.
//!
//! Both constructions are quadratic, so `N(u) - N(v)` equals a bilinear
//! form `B(a, w)` in `a = (u + v) / 2` and `w = u - v`. The solver uses that
//! identity to propagate differences of solutions without cancellation.

use crate::error::Result;
use crate::fd;
use crate::field::{project_mean_free, Field};
use crate::grid::{Grid, GridKind};
use crate::spectral;

pub(crate) fn burgers_term(grid: &Grid, u: &[f64], dealias: bool) -> Vec<f64> {
    match grid.kind() {
        GridKind::Dirichlet => {
            let h = grid.h();
            let du = fd::central(u, h);
            let sq: Vec<f64> = u.iter().map(|v| v * v).collect();
            let dsq = fd::central(&sq, h);
            (0..u.len())
                .map(|j| (u[j] * du[j] + dsq[j]) / 3.0)
                .collect()
        }
        GridKind::PeriodicMeanFree => {
            if dealias {
                let k = spectral::dealias_cutoff(grid.n());
                let uk = spectral::truncate(u, k);
                let du = spectral::derivative(&uk, 1);
                let prod: Vec<f64> = uk.iter().zip(&du).map(|(a, b)| a * b).collect();
                project_mean_free(&spectral::truncate(&prod, k))
            } else {
                let du = spectral::derivative(u, 1);
                let prod: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a * b).collect();
                project_mean_free(&prod)
            }
        }
    }
}

/// `B(a, w)` with `N(a + w/2) - N(a - w/2) = B(a, w)`; also the Jacobian of
/// `N` at `a` applied to `w`.
pub(crate) fn bilinear_term(grid: &Grid, a: &[f64], w: &[f64], dealias: bool) -> Vec<f64> {
    match grid.kind() {
        GridKind::Dirichlet => {
            let h = grid.h();
            let da = fd::central(a, h);
            let dw = fd::central(w, h);
            let aw: Vec<f64> = a.iter().zip(w).map(|(x, y)| x * y).collect();
            let daw = fd::central(&aw, h);
            (0..a.len())
                .map(|j| (a[j] * dw[j] + w[j] * da[j]) / 3.0 + 2.0 * daw[j] / 3.0)
                .collect()
        }
        GridKind::PeriodicMeanFree => {
            let (a, w) = if dealias {
                let k = spectral::dealias_cutoff(grid.n());
                (spectral::truncate(a, k), spectral::truncate(w, k))
            } else {
                (a.to_vec(), w.to_vec())
            };
            let da = spectral::derivative(&a, 1);
            let dw = spectral::derivative(&w, 1);
            let prod: Vec<f64> = (0..a.len()).map(|j| a[j] * dw[j] + w[j] * da[j]).collect();
            if dealias {
                let k = spectral::dealias_cutoff(grid.n());
                project_mean_free(&spectral::truncate(&prod, k))
            } else {
                project_mean_free(&prod)
            }
        }
    }
}

/// Discrete `u u_x` for the given field.
pub fn nonlinear_term(u: &Field, dealias: bool) -> Field {
    let values = burgers_term(u.grid(), u.values(), dealias);
    Field::new(u.grid().clone(), values, u.time()).expect("length preserved")
}

/// Jacobian of [`nonlinear_term`] at `u` applied to `direction`.
pub fn nonlinear_jacobian_apply(u: &Field, direction: &Field, dealias: bool) -> Result<Field> {
    let values = bilinear_term(u.grid(), u.values(), direction.values(), dealias);
    u.with_values(values)
}
