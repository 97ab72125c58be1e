//! IMEX time schemes: implicit unit-viscosity diffusion, explicit remainder.
//!
//! A scheme only sees the current state, the explicit term evaluated at the
//! current time level and, for multistep schemes, the previous explicit
//! term. The same schemes drive the Burgers solver, the difference
//! equation and the adjoint problem.

use std::sync::OnceLock;

use crate::error::Result;
use crate::fd;
use crate::grid::{Grid, GridKind};
use crate::registry::{Named, Registry};
use crate::spectral;

/// Explicit term kept from the previous step.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitHistory {
    pub term: Vec<f64>,
    pub dt: f64,
}

/// Discrete second derivative used for the implicit part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Diffusion {
    /// The grid's own stencil: three-point (Dirichlet) or spectral (periodic).
    #[default]
    Native,
    /// Three-point stencil on every grid; its resolvent is entrywise
    /// nonnegative, which monotone schemes need.
    ThreePoint,
}

impl Diffusion {
    pub fn apply(self, grid: &Grid, v: &[f64]) -> Vec<f64> {
        match (self, grid.kind()) {
            (Diffusion::Native, _) => crate::field::laplacian(grid, v),
            (Diffusion::ThreePoint, GridKind::Dirichlet) => fd::laplacian(v, grid.h()),
            (Diffusion::ThreePoint, GridKind::PeriodicMeanFree) => fd::periodic_laplacian(v, grid.h()),
        }
    }

    /// Solves `(I - c L) x = rhs`.
    pub fn solve(self, grid: &Grid, c: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        match (self, grid.kind()) {
            (_, GridKind::Dirichlet) => fd::solve_shifted_laplacian(c, grid.h(), rhs),
            (Diffusion::Native, GridKind::PeriodicMeanFree) => Ok(spectral::solve_shifted_laplacian(c, rhs)),
            (Diffusion::ThreePoint, GridKind::PeriodicMeanFree) => {
                Ok(spectral::solve_shifted_fd_laplacian(c, grid.h(), rhs))
            }
        }
    }
}

pub trait TimeScheme: Named + Send + Sync {
    /// Formal order of accuracy in time.
    fn order(&self) -> u32;

    /// Advances `u` by `dt` with the given diffusion operator, where
    /// `explicit` is the explicit term at the current time level.
    fn advance_with(
        &self,
        diffusion: Diffusion,
        grid: &Grid,
        u: &[f64],
        explicit: &[f64],
        history: Option<&ExplicitHistory>,
        dt: f64,
    ) -> Result<Vec<f64>>;

    fn advance(
        &self,
        grid: &Grid,
        u: &[f64],
        explicit: &[f64],
        history: Option<&ExplicitHistory>,
        dt: f64,
    ) -> Result<Vec<f64>> {
        self.advance_with(Diffusion::Native, grid, u, explicit, history, dt)
    }
}

/// Backward Euler diffusion with forward Euler explicit terms.
#[derive(Debug, Default)]
pub struct ImexEuler;

impl Named for ImexEuler {
    fn name(&self) -> &'static str {
        "imex-euler"
    }
}

impl TimeScheme for ImexEuler {
    fn order(&self) -> u32 {
        1
    }

    fn advance_with(
        &self,
        diffusion: Diffusion,
        grid: &Grid,
        u: &[f64],
        explicit: &[f64],
        _history: Option<&ExplicitHistory>,
        dt: f64,
    ) -> Result<Vec<f64>> {
        let rhs: Vec<f64> = u.iter().zip(explicit).map(|(a, e)| a + dt * e).collect();
        diffusion.solve(grid, dt, &rhs)
    }
}

/// Crank-Nicolson diffusion with variable-step Adams-Bashforth-2 explicit
/// terms. Without history the explicit part is forward Euler.
#[derive(Debug, Default)]
pub struct CnAb2;

impl Named for CnAb2 {
    fn name(&self) -> &'static str {
        "cn-ab2"
    }
}

impl TimeScheme for CnAb2 {
    fn order(&self) -> u32 {
        2
    }

    fn advance_with(
        &self,
        diffusion: Diffusion,
        grid: &Grid,
        u: &[f64],
        explicit: &[f64],
        history: Option<&ExplicitHistory>,
        dt: f64,
    ) -> Result<Vec<f64>> {
        let lu = diffusion.apply(grid, u);
        let rhs: Vec<f64> = match history {
            Some(prev) => {
                let omega = dt / prev.dt;
                let a = 1.0 + 0.5 * omega;
                let b = -0.5 * omega;
                (0..u.len())
                    .map(|j| u[j] + 0.5 * dt * lu[j] + dt * (a * explicit[j] + b * prev.term[j]))
                    .collect()
            }
            None => (0..u.len()).map(|j| u[j] + 0.5 * dt * lu[j] + dt * explicit[j]).collect(),
        };
        diffusion.solve(grid, 0.5 * dt, &rhs)
    }
}

pub fn time_schemes() -> &'static Registry<dyn TimeScheme> {
    static REG: OnceLock<Registry<dyn TimeScheme>> = OnceLock::new();
    REG.get_or_init(|| {
        Registry::<dyn TimeScheme>::new("time scheme")
            .with(Box::new(ImexEuler))
            .with(Box::new(CnAb2))
    })
}

pub fn time_scheme(name: &str) -> Result<&'static dyn TimeScheme> {
    time_schemes().get(name)
}
