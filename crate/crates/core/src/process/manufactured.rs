//! Closed-form exact solutions and the forcing that produces them.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::Field;
use crate::forcing::Source;
use crate::grid::{Grid, GridKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExactSolution {
    Zero,
    /// `amplitude * exp(-rate t) * sin(k pi x)`
    DecayingSine { amplitude: f64, k: u32, rate: f64 },
    /// `amplitude * sin(k pi x - omega t)`
    TravelingWave { amplitude: f64, k: u32, omega: f64 },
}

impl ExactSolution {
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match *self {
            ExactSolution::Zero => 0.0,
            ExactSolution::DecayingSine { amplitude, k, rate } => {
                amplitude * (-rate * t).exp() * (k as f64 * PI * x).sin()
            }
            ExactSolution::TravelingWave { amplitude, k, omega } => {
                amplitude * (k as f64 * PI * x - omega * t).sin()
            }
        }
    }

    /// `u_t - u_xx`, and `u u_x` separately.
    fn residual_parts(&self, x: f64, t: f64) -> (f64, f64) {
        match *self {
            ExactSolution::Zero => (0.0, 0.0),
            ExactSolution::DecayingSine { amplitude, k, rate } => {
                let kp = k as f64 * PI;
                let e = (-rate * t).exp();
                let linear = amplitude * e * (kp * kp - rate) * (kp * x).sin();
                let nonlinear = 0.5 * amplitude * amplitude * kp * e * e * (2.0 * kp * x).sin();
                (linear, nonlinear)
            }
            ExactSolution::TravelingWave { amplitude, k, omega } => {
                let kp = k as f64 * PI;
                let theta = kp * x - omega * t;
                let linear = -amplitude * omega * theta.cos() + amplitude * kp * kp * theta.sin();
                let nonlinear = 0.5 * amplitude * amplitude * kp * (2.0 * theta).sin();
                (linear, nonlinear)
            }
        }
    }

    /// Right-hand side `u_t + u u_x - u_xx`, or `u_t - u_xx` when `linear`.
    pub fn forcing_at(&self, x: f64, t: f64, linear: bool) -> f64 {
        let (l, n) = self.residual_parts(x, t);
        if linear {
            l
        } else {
            l + n
        }
    }

    pub fn check_compatible(&self, kind: GridKind) -> Result<()> {
        match (*self, kind) {
            (ExactSolution::Zero, _) => Ok(()),
            (ExactSolution::DecayingSine { k: 0, .. }, _) => Ok(()),
            (ExactSolution::DecayingSine { .. }, GridKind::Dirichlet) => Ok(()),
            (ExactSolution::DecayingSine { k, .. } | ExactSolution::TravelingWave { k, .. }, GridKind::PeriodicMeanFree) => {
                if k % 2 == 0 {
                    Ok(())
                } else {
                    Err(LabError::BoundaryConditionViolation(format!(
                        "sin({k} pi x) is not 1-periodic"
                    )))
                }
            }
            (ExactSolution::TravelingWave { amplitude, omega, .. }, GridKind::Dirichlet) => {
                if amplitude == 0.0 {
                    Ok(())
                } else {
                    Err(LabError::BoundaryConditionViolation(format!(
                        "traveling wave does not vanish at x = 0 (omega = {omega})"
                    )))
                }
            }
        }
    }

    pub fn sample(&self, grid: &Arc<Grid>, t: f64) -> Result<Field> {
        self.check_compatible(grid.kind())?;
        Ok(Field::from_fn(grid.clone(), t, |x| self.eval(x, t)))
    }
}

/// Forcing evaluator for a manufactured solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedForcing {
    pub exact: ExactSolution,
    pub linear: bool,
}

impl Source for ManufacturedForcing {
    fn sample(&self, t: f64, grid: &Grid) -> Result<Vec<f64>> {
        self.exact.check_compatible(grid.kind())?;
        Ok(grid.sample(|x| self.exact.forcing_at(x, t, self.linear)))
    }

    fn is_zero(&self) -> bool {
        self.exact == ExactSolution::Zero
    }
}

/// Forcing that makes `exact` a solution on grids of kind `kind`.
pub fn manufactured_forcing(exact: ExactSolution, kind: GridKind, linear: bool) -> Result<ManufacturedForcing> {
    exact.check_compatible(kind)?;
    Ok(ManufacturedForcing { exact, linear })
}
