//! Snapshots on a grid and their discrete norms.
//!
//! Quadrature is the rectangle rule `h * sum`. Derivative norms use the
//! three-point stencils on Dirichlet grids and exact spectral
//! differentiation on periodic grids.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fd;
use crate::grid::{Grid, GridKind};
use crate::spectral;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    L2,
    L1,
    Linf,
    /// `||u_x||`
    H1semi,
    /// `||u_xx||`
    H2semi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
    time: f64,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values, time })
    }

    pub fn zeros(grid: Arc<Grid>, time: f64) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values, time }
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(grid: Arc<Grid>, time: f64, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.sample(f);
        Self { grid, values, time }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Field::new(self.grid.clone(), values, self.time)
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    fn check_grid(&self, other: &Field) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(LabError::GridMismatch)
        }
    }

    /// `self + scale * other`, keeping the time of `self`.
    pub fn axpy(&self, scale: f64, other: &Field) -> Result<Field> {
        self.check_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + scale * b)
            .collect();
        Ok(Field {
            grid: self.grid.clone(),
            values,
            time: self.time,
        })
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.axpy(-1.0, other)
    }

    pub fn scaled(&self, s: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
            time: self.time,
        }
    }

    /// Discrete inner product `h * sum u_j v_j`.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        self.check_grid(other)?;
        Ok(inner(self.grid.h(), &self.values, &other.values))
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        norm_of(&self.grid, &self.values, kind)
    }

    /// `h * sum u_j`.
    pub fn mean(&self) -> f64 {
        self.grid.h() * self.values.iter().sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }

    /// Writes `x,value` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,value")?;
        for (x, v) in self.grid.nodes().iter().zip(&self.values) {
            writeln!(out, "{x},{v}")?;
        }
        Ok(())
    }
}

pub(crate) fn inner(h: f64, a: &[f64], b: &[f64]) -> f64 {
    h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// First derivative with the grid's stencil.
pub fn derivative(grid: &Grid, values: &[f64]) -> Vec<f64> {
    match grid.kind() {
        GridKind::Dirichlet => fd::central(values, grid.h()),
        GridKind::PeriodicMeanFree => spectral::derivative(values, 1),
    }
}

/// Second derivative with the grid's stencil.
pub fn laplacian(grid: &Grid, values: &[f64]) -> Vec<f64> {
    match grid.kind() {
        GridKind::Dirichlet => fd::laplacian(values, grid.h()),
        GridKind::PeriodicMeanFree => spectral::laplacian(values),
    }
}

pub(crate) fn norm_of(grid: &Grid, values: &[f64], kind: NormKind) -> f64 {
    let h = grid.h();
    match kind {
        NormKind::L2 => inner(h, values, values).sqrt(),
        NormKind::L1 => h * values.iter().map(|v| v.abs()).sum::<f64>(),
        NormKind::Linf => max_abs(values),
        NormKind::H1semi => match grid.kind() {
            GridKind::Dirichlet => fd::dirichlet_energy(values, h).sqrt(),
            GridKind::PeriodicMeanFree => {
                let d = spectral::derivative(values, 1);
                inner(h, &d, &d).sqrt()
            }
        },
        NormKind::H2semi => {
            let d = laplacian(grid, values);
            inner(h, &d, &d).sqrt()
        }
    }
}

pub fn norm(field: &Field, kind: NormKind) -> f64 {
    field.norm(kind)
}

/// Removes the discrete mean of a periodic field.
pub fn mean_free_project(field: &Field) -> Result<Field> {
    if !field.grid.is_periodic() {
        return Err(LabError::WrongGridKind {
            expected: "periodic-meanfree",
        });
    }
    Ok(Field {
        grid: field.grid.clone(),
        values: project_mean_free(&field.values),
        time: field.time,
    })
}

pub(crate) fn project_mean_free(values: &[f64]) -> Vec<f64> {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| v - mean).collect()
}
