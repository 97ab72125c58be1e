//! Observed orders of accuracy from refinement sequences.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::NormKind;
use crate::fit::{log_log_slope, LinearFit};
use crate::grid::{make_grid, Grid, GridKind};

use super::manufactured::{manufactured_forcing, ExactSolution};
use super::{solve, SolverConfig};

/// A manufactured problem on `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub exact: ExactSolution,
    pub kind: GridKind,
    pub t0: f64,
    pub t1: f64,
    /// Drops the nonlinearity from both the forcing and the solver.
    #[serde(default)]
    pub linear: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    /// `h` for spatial studies, `dt` for temporal ones.
    pub parameters: Vec<f64>,
    pub errors: Vec<f64>,
    pub fit: LinearFit,
}

impl OrderReport {
    pub fn order(&self) -> f64 {
        self.fit.slope
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub spatial: OrderReport,
    pub temporal: OrderReport,
}

const MIN_LEVELS: usize = 3;

fn check_levels(len: usize) -> Result<()> {
    if len < MIN_LEVELS {
        return Err(LabError::TooFewSamples {
            needed: MIN_LEVELS,
            got: len,
        });
    }
    Ok(())
}

impl ConvergenceStudy {
    fn config(&self, cfg: &SolverConfig) -> SolverConfig {
        SolverConfig {
            linear_only: self.linear,
            ..cfg.clone()
        }
    }

    fn final_state(&self, grid: &Arc<Grid>, cfg: &SolverConfig) -> Result<Vec<f64>> {
        let f = manufactured_forcing(self.exact, self.kind, self.linear)?;
        let u0 = self.exact.sample(grid, self.t0)?;
        let n_steps = ((self.t1 - self.t0) / cfg.dt).ceil() as usize;
        let tr = solve(&u0, self.t0, self.t1, &f, &self.config(cfg), n_steps.max(1))?;
        Ok(tr.last().values().to_vec())
    }

    /// L2 error at `t1` against the exact solution for each resolution.
    pub fn spatial_order(&self, resolutions: &[usize], cfg: &SolverConfig) -> Result<OrderReport> {
        check_levels(resolutions.len())?;
        let mut hs = Vec::new();
        let mut errors = Vec::new();
        for &n in resolutions {
            let grid = Arc::new(make_grid(self.kind, n)?);
            let u = self.final_state(&grid, cfg)?;
            let exact = self.exact.sample(&grid, self.t1)?;
            let diff = exact.with_values(u)?.sub(&exact)?;
            hs.push(grid.h());
            errors.push(diff.norm(NormKind::L2));
        }
        let fit = log_log_slope(&hs, &errors)?;
        Ok(OrderReport {
            parameters: hs,
            errors,
            fit,
        })
    }

    /// L2 difference at `t1` to a run with step `min(dts) / refinement`, on a
    /// fixed grid, so that spatial error cancels.
    pub fn temporal_order(
        &self,
        n: usize,
        dts: &[f64],
        refinement: usize,
        cfg: &SolverConfig,
    ) -> Result<OrderReport> {
        check_levels(dts.len())?;
        let grid = Arc::new(make_grid(self.kind, n)?);
        let finest = dts.iter().copied().fold(f64::INFINITY, f64::min);
        let reference = self.final_state(&grid, &cfg.with_dt(finest / refinement.max(2) as f64))?;
        let reference = crate::field::Field::new(grid.clone(), reference, self.t1)?;
        let mut errors = Vec::new();
        for &dt in dts {
            let u = self.final_state(&grid, &cfg.with_dt(dt))?;
            errors.push(reference.with_values(u)?.sub(&reference)?.norm(NormKind::L2));
        }
        let fit = log_log_slope(dts, &errors)?;
        Ok(OrderReport {
            parameters: dts.to_vec(),
            errors,
            fit,
        })
    }
}

/// Spatial order over `resolutions` at `cfg.dt`, and temporal order over
/// `dts` on the finest resolution.
pub fn convergence_study(
    study: &ConvergenceStudy,
    resolutions: &[usize],
    dts: &[f64],
    cfg: &SolverConfig,
) -> Result<ConvergenceReport> {
    let spatial = study.spatial_order(resolutions, cfg)?;
    let finest = resolutions.iter().copied().max().unwrap_or(0);
    let temporal = study.temporal_order(finest, dts, 16, cfg)?;
    Ok(ConvergenceReport { spatial, temporal })
}
