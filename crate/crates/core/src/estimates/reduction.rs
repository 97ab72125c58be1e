//! Removal of the spatial mean on periodic grids.
//!
//! With `beta(t)` the mean of `u` and `gamma' = beta`, the field
//! `v(x, t) = u(x + gamma(t), t) - beta(t)` is mean-free and solves the
//! same equation with forcing `f(x + gamma(t), t) - alpha(t)`.

use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::field::{project_mean_free, Field};
use crate::forcing::{Forcing, Source};
use crate::grid::Grid;
use crate::process::Trajectory;
use crate::spectral;

#[derive(Debug, Clone)]
pub struct ReductionData {
    pub t0: f64,
    pub beta0: f64,
    pub forcing: Forcing,
}

impl ReductionData {
    pub fn alpha_at(&self, t: f64) -> f64 {
        self.forcing.spatial_mean(t)
    }

    pub fn beta_at(&self, t: f64) -> f64 {
        self.beta0 + self.forcing.mean_integral(self.t0, t)
    }

    pub fn gamma_at(&self, t: f64) -> f64 {
        self.beta0 * (t - self.t0) + self.forcing.mean_double_integral(self.t0, t)
    }

    /// `(t, alpha, beta, gamma)` rows.
    pub fn samples(&self, times: &[f64]) -> Vec<[f64; 4]> {
        times
            .iter()
            .map(|&t| [t, self.alpha_at(t), self.beta_at(t), self.gamma_at(t)])
            .collect()
    }

    /// Largest deviation of `beta, gamma` from trapezoid quadrature of
    /// `alpha, beta` on the given increasing times.
    pub fn consistency_residual(&self, times: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        let mut beta_q = self.beta_at(times[0]);
        let mut gamma_q = self.gamma_at(times[0]);
        for w in times.windows(2) {
            let dt = w[1] - w[0];
            let b_prev = self.beta_at(w[0]);
            beta_q += 0.5 * dt * (self.alpha_at(w[0]) + self.alpha_at(w[1]));
            gamma_q += 0.5 * dt * (b_prev + self.beta_at(w[1]));
            worst = worst
                .max((beta_q - self.beta_at(w[1])).abs())
                .max((gamma_q - self.gamma_at(w[1])).abs());
        }
        worst
    }
}

/// `f(x + gamma(t), t) - alpha(t)` on a periodic grid.
#[derive(Debug, Clone)]
pub struct ShiftedForcing {
    data: ReductionData,
}

impl Source for ShiftedForcing {
    fn sample(&self, t: f64, grid: &Grid) -> Result<Vec<f64>> {
        if !grid.is_periodic() {
            return Err(LabError::WrongGridKind { expected: "periodic" });
        }
        let raw = self.data.forcing.sample_raw(t, grid)?;
        let shifted = spectral::shift(&raw, -self.data.gamma_at(t));
        Ok(project_mean_free(&shifted))
    }

    fn is_zero(&self) -> bool {
        self.data.forcing.terms().is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ReducedProblem {
    pub data: ReductionData,
    pub forcing: ShiftedForcing,
    pub v0: Field,
}

/// Splits periodic data `u0` (any mean) and forcing `f` into the mean-free problem.
pub fn mean_free_reduce(f: &Forcing, u0: &Field) -> Result<ReducedProblem> {
    if !u0.grid().is_periodic() {
        return Err(LabError::WrongGridKind { expected: "periodic" });
    }
    let data = ReductionData {
        t0: u0.time(),
        beta0: u0.mean(),
        forcing: f.clone(),
    };
    let v0 = u0.with_values(project_mean_free(u0.values()))?;
    Ok(ReducedProblem {
        forcing: ShiftedForcing { data: data.clone() },
        data,
        v0,
    })
}

/// `u(x, t) = v(x - gamma(t), t) + beta(t)`.
pub fn reconstruct_field(v: &Field, data: &ReductionData) -> Result<Field> {
    let t = v.time();
    if t < data.t0 {
        return Err(LabError::CoverageGap { t });
    }
    let beta = data.beta_at(t);
    let values = spectral::shift(v.values(), data.gamma_at(t))
        .into_iter()
        .map(|x| x + beta)
        .collect();
    Field::new(Arc::clone(v.grid()), values, t)
}

/// Reconstructs `u` at every sample of a reduced trajectory.
pub fn reconstruct_from_reduced(v: &Trajectory, data: &ReductionData) -> Result<Trajectory> {
    let snaps = v
        .snapshots()
        .iter()
        .map(|s| reconstruct_field(s, data))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::from_snapshots(v.config().clone(), snaps)
}
