//! Uniform grids on the unit interval.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    /// Homogeneous Dirichlet data; unknowns are the `n - 1` interior nodes.
    Dirichlet,
    /// 1-periodic, mean-free; unknowns are the `n` nodes `j / n`, `j = 0..n`.
    PeriodicMeanFree,
}

impl GridKind {
    pub fn label(self) -> &'static str {
        match self {
            GridKind::Dirichlet => "dirichlet",
            GridKind::PeriodicMeanFree => "periodic-meanfree",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    kind: GridKind,
    n: usize,
    h: f64,
    nodes: Vec<f64>,
}

/// Serialized form of a [`Grid`]; the nodes are rebuilt on load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kind: GridKind,
    pub n: usize,
}

impl TryFrom<GridSpec> for Grid {
    type Error = LabError;

    fn try_from(spec: GridSpec) -> Result<Self> {
        Grid::new(spec.kind, spec.n)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec { kind: g.kind, n: g.n }
    }
}

impl Grid {
    pub fn new(kind: GridKind, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(LabError::ResolutionTooSmall { n });
        }
        if kind == GridKind::PeriodicMeanFree && n % 2 != 0 {
            return Err(LabError::OddPeriodicResolution { n });
        }
        let h = 1.0 / n as f64;
        let nodes = match kind {
            GridKind::Dirichlet => (1..n).map(|j| j as f64 * h).collect(),
            GridKind::PeriodicMeanFree => (0..n).map(|j| j as f64 * h).collect(),
        };
        Ok(Self { kind, n, h, nodes })
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            kind: self.kind,
            n: self.n,
        }
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of unknowns carried by a field on this grid.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_periodic(&self) -> bool {
        self.kind == GridKind::PeriodicMeanFree
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }
}

pub fn make_grid(kind: GridKind, n: usize) -> Result<Grid> {
    Grid::new(kind, n)
}
