//! Discretizations of the adjoint advection term `a y_x`.

use std::sync::OnceLock;

use crate::fd;
use crate::grid::{Grid, GridKind};
use crate::process::scheme::Diffusion;
use crate::registry::{Named, Registry};
use crate::spectral;

pub trait AdvectionScheme: Named + Send + Sync {
    /// Explicit term `a y_x` at one time level.
    fn apply(&self, grid: &Grid, a: &[f64], y: &[f64], dealias: bool) -> Vec<f64>;

    /// Diffusion operator paired with this advection.
    fn diffusion(&self) -> Diffusion;

    /// True when forward-Euler advection plus implicit diffusion is monotone
    /// under the step restriction `dt |a| <= h`.
    fn monotone(&self) -> bool;
}

/// First-order upwinding with three-point diffusion.
#[derive(Debug, Default)]
pub struct Upwind;

impl Named for Upwind {
    fn name(&self) -> &'static str {
        "upwind"
    }
}

impl AdvectionScheme for Upwind {
    fn apply(&self, grid: &Grid, a: &[f64], y: &[f64], _dealias: bool) -> Vec<f64> {
        fd::upwind_advection(a, y, grid.h(), grid.is_periodic())
    }

    fn diffusion(&self) -> Diffusion {
        Diffusion::ThreePoint
    }

    fn monotone(&self) -> bool {
        true
    }
}

/// Negative transpose of the forward difference operator `B(a, .)`, so that
/// the semi-discrete duality pairing is conserved exactly.
#[derive(Debug, Default)]
pub struct Central;

impl Named for Central {
    fn name(&self) -> &'static str {
        "central"
    }
}

impl AdvectionScheme for Central {
    fn apply(&self, grid: &Grid, a: &[f64], y: &[f64], dealias: bool) -> Vec<f64> {
        match grid.kind() {
            GridKind::Dirichlet => {
                let h = grid.h();
                let ay: Vec<f64> = a.iter().zip(y).map(|(p, q)| p * q).collect();
                let day = fd::central(&ay, h);
                let da = fd::central(a, h);
                let dy = fd::central(y, h);
                (0..y.len())
                    .map(|j| (day[j] - y[j] * da[j]) / 3.0 + 2.0 * a[j] * dy[j] / 3.0)
                    .collect()
            }
            GridKind::PeriodicMeanFree => {
                if dealias {
                    let k = spectral::dealias_cutoff(grid.n());
                    let ak = spectral::truncate(a, k);
                    let dy = spectral::derivative(&spectral::truncate(y, k), 1);
                    let prod: Vec<f64> = ak.iter().zip(&dy).map(|(p, q)| p * q).collect();
                    spectral::truncate(&prod, k)
                } else {
                    let n = y.len() as f64;
                    let mean = y.iter().sum::<f64>() / n;
                    let yc: Vec<f64> = y.iter().map(|v| v - mean).collect();
                    let ay: Vec<f64> = a.iter().zip(&yc).map(|(p, q)| p * q).collect();
                    let day = spectral::derivative(&ay, 1);
                    let da = spectral::derivative(a, 1);
                    (0..y.len()).map(|j| day[j] - da[j] * yc[j]).collect()
                }
            }
        }
    }

    fn diffusion(&self) -> Diffusion {
        Diffusion::Native
    }

    fn monotone(&self) -> bool {
        false
    }
}

pub fn advection_schemes() -> &'static Registry<dyn AdvectionScheme> {
    static REG: OnceLock<Registry<dyn AdvectionScheme>> = OnceLock::new();
    REG.get_or_init(|| {
        Registry::<dyn AdvectionScheme>::new("advection scheme")
            .with(Box::new(Upwind))
            .with(Box::new(Central))
    })
}

pub fn advection_scheme(name: &str) -> crate::error::Result<&'static dyn AdvectionScheme> {
    advection_schemes().get(name)
}
