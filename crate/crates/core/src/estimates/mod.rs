//! Numerical certificates for the a priori estimates, and the reduction of
//! periodic problems with non-zero mean to mean-free ones.
//!
//! Generic constants are fitted per run and recorded. Analytic inequalities
//! carry a `(1 + 10h)` discretization factor inside the margins; `slack` is
//! the absolute round-off allowance on top of that.

mod certificates;
mod reduction;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::{project_mean_free, Field, NormKind};
use crate::grid::{Grid, GridKind};

pub use certificates::*;
pub use reduction::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityId {
    L2Energy,
    L2Decay,
    H1Decay,
    Smoothing,
    #[serde(rename = "interpolation-1")]
    Interpolation1,
    #[serde(rename = "interpolation-2")]
    Interpolation2,
    Poincare,
    Lipschitz,
    L1Contraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub inequality_id: InequalityId,
    /// `bound - quantity` per sample, discretization factor included.
    pub margins: Vec<f64>,
    pub fitted_constants: BTreeMap<String, f64>,
    pub pass: bool,
    pub slack: f64,
}

/// Compact JSON form of a [`CertificateReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub inequality_id: InequalityId,
    pub pass: bool,
    pub slack: f64,
    pub fitted_constants: BTreeMap<String, f64>,
    pub worst_margin: f64,
    pub sample_count: usize,
}

impl CertificateReport {
    pub(crate) fn new(
        inequality_id: InequalityId,
        margins: Vec<f64>,
        fitted_constants: BTreeMap<String, f64>,
        slack: f64,
    ) -> Self {
        let pass = margins.iter().all(|m| *m >= -slack);
        Self {
            inequality_id,
            margins,
            fitted_constants,
            pass,
            slack,
        }
    }

    pub fn worst_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.fitted_constants.get(name).copied()
    }

    pub fn summary(&self) -> CertificateSummary {
        CertificateSummary {
            inequality_id: self.inequality_id,
            pass: self.pass,
            slack: self.slack,
            fitted_constants: self.fitted_constants.clone(),
            worst_margin: self.worst_margin(),
            sample_count: self.margins.len(),
        }
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary()).expect("summary serializes")
    }
}

/// Smallest eigenvalue of the three-point Dirichlet Laplacian
/// `tridiag(-1, 2, -1) / h^2` of size `n - 1`, by Sturm-sequence bisection.
pub fn dirichlet_first_eigenvalue(n: usize) -> Result<f64> {
    if n < 4 {
        return Err(LabError::ResolutionTooSmall { n });
    }
    let m = n - 1;
    let h2 = 1.0 / (n as f64 * n as f64);
    let below = |x: f64| -> usize {
        let mut count = 0;
        let mut d = 1.0_f64;
        for i in 0..m {
            let off = if i == 0 { 0.0 } else { 1.0 / (h2 * h2) };
            d = 2.0 / h2 - x - off / d;
            if d == 0.0 {
                d = -f64::EPSILON / h2;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let (mut lo, mut hi) = (0.0, 4.0 / h2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Discrete Poincaré eigenvalue `lambda_1` with `lambda_1 ||v||^2 <= ||v_x||^2`.
pub fn poincare_eigenvalue(grid: &Grid) -> Result<f64> {
    match grid.kind() {
        GridKind::Dirichlet => dirichlet_first_eigenvalue(grid.n()),
        GridKind::PeriodicMeanFree => Ok(4.0 * std::f64::consts::PI * std::f64::consts::PI),
    }
}

/// Random field with coefficients of fixed size `k^{-1/2}` and random
/// signs (Dirichlet) or phases (periodic), which sits at the edge of `L^2`
/// as the resolution grows; normalized to `||u|| = 1`.
pub fn rough_field(grid: &std::sync::Arc<Grid>, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n();
    let pi = std::f64::consts::PI;
    let mut values = vec![0.0; grid.len()];
    match grid.kind() {
        GridKind::Dirichlet => {
            for k in 1..n {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let a = sign / (k as f64).sqrt();
                for (v, x) in values.iter_mut().zip(grid.nodes()) {
                    *v += a * (k as f64 * pi * x).sin();
                }
            }
        }
        GridKind::PeriodicMeanFree => {
            for k in 1..n / 2 {
                let phase = rng.random_range(0.0..2.0 * pi);
                let s = 1.0 / (k as f64).sqrt();
                for (v, x) in values.iter_mut().zip(grid.nodes()) {
                    *v += s * (2.0 * pi * k as f64 * x + phase).sin();
                }
            }
            values = project_mean_free(&values);
        }
    }
    let field = Field::new(grid.clone(), values, 0.0).expect("grid length");
    let norm = field.norm(NormKind::L2);
    field.scaled(1.0 / norm)
}

/// Random trigonometric polynomials with at most `modes` modes and
/// geometrically decaying amplitudes, compatible with the grid kind.
pub fn random_smooth_fields(grid: &std::sync::Arc<Grid>, count: usize, modes: usize, seed: u64) -> Vec<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = std::f64::consts::PI;
    (0..count)
        .map(|_| {
            let coeffs: Vec<(f64, f64)> = (1..=modes)
                .map(|k| {
                    let s = 0.7_f64.powi(k as i32 - 1);
                    (s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal))
                })
                .collect();
            let values = grid.sample(|x| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, (a, b))| {
                        let k = (i + 1) as f64;
                        match grid.kind() {
                            GridKind::Dirichlet => a * (k * pi * x).sin(),
                            GridKind::PeriodicMeanFree => {
                                a * (2.0 * k * pi * x).cos() + b * (2.0 * k * pi * x).sin()
                            }
                        }
                    })
                    .sum()
            });
            let values = if grid.is_periodic() { project_mean_free(&values) } else { values };
            Field::new(grid.clone(), values, 0.0).expect("grid length")
        })
        .collect()
}
