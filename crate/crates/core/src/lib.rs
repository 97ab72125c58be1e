//! Numerical laboratory for the forced viscous Burgers equation
//! `u_t + u u_x - u_xx = f` on `(0, 1)`.
//!
//! The crate provides the discrete process, pullback attractor experiments,
//! the adjoint (dual) problem with its maximum principle, and numerical
//! certificates for the energy estimates.

pub mod adjoint;
pub mod attractor;
pub mod error;
pub mod estimates;
pub mod fd;
pub mod field;
pub mod fit;
pub mod forcing;
pub mod grid;
pub mod process;
pub mod registry;
pub mod report;
pub mod spectral;

pub use error::{LabError, Result};
pub use field::{Field, NormKind};
pub use forcing::{Envelope, Forcing, ForcingTerm, Source, SpatialProfile};
pub use grid::{make_grid, Grid, GridKind};
pub use process::{solve, solve_family, solve_pair, step, SolverConfig, Trajectory};
