//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};
use std::sync::Arc;

use burgers_lab::estimates::rough_field;
use burgers_lab::field::mean_free_project;
use burgers_lab::forcing::ForcingSpec;
use burgers_lab::grid::GridSpec;
use burgers_lab::{make_grid, Field, Forcing, Grid, NormKind, SolverConfig, SpatialProfile};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; when present it must name the scenario being run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub grid: GridSpec,
    #[serde(default)]
    pub forcing: ForcingSpec,
    pub solver: SolverConfig,
    #[serde(default)]
    pub initial: InitialCondition,
    /// Scenario parameters, checked by the scenario.
    #[serde(default)]
    pub params: toml::Table,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("burgers-lab-out")
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    #[default]
    Zero,
    /// Sum of profiles; the mean is removed on periodic grids.
    Profiles { terms: Vec<SpatialProfile> },
    /// Rough random data from the run seed, scaled to the given `L^2` norm.
    Rough {
        #[serde(default = "one")]
        norm: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl InitialCondition {
    pub fn build(&self, grid: &Arc<Grid>, seed: u64, t0: f64) -> CliResult<Field> {
        let field = match self {
            InitialCondition::Zero => Field::zeros(grid.clone(), t0),
            InitialCondition::Profiles { terms } => {
                let mut values = vec![0.0; grid.len()];
                for p in terms {
                    if grid.is_periodic() && !p.periodic_compatible() {
                        return Err(CliError::Config(format!("initial profile {p:?} is not 1-periodic")));
                    }
                    for (v, s) in values.iter_mut().zip(p.sample(grid).map_err(CliError::config)?) {
                        *v += s;
                    }
                }
                let f = Field::new(grid.clone(), values, t0).map_err(CliError::config)?;
                if grid.is_periodic() {
                    mean_free_project(&f).map_err(CliError::config)?
                } else {
                    f
                }
            }
            InitialCondition::Rough { norm } => {
                if !(*norm >= 0.0) {
                    return Err(CliError::Config("rough initial norm must be non-negative".into()));
                }
                let f = rough_field(grid, seed);
                f.scaled(norm / f.norm(NormKind::L2)).with_time(t0)
            }
        };
        Ok(field)
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(CliError::config)?;
        cfg.solver.validate().map_err(CliError::config)?;
        Ok(cfg)
    }

    pub fn grid(&self) -> CliResult<Arc<Grid>> {
        Ok(Arc::new(make_grid(self.grid.kind, self.grid.n).map_err(CliError::config)?))
    }

    /// The forcing, checked against the grid unless `general` allows any
    /// mean on periodic grids.
    pub fn forcing(&self, grid: &Grid, general: bool) -> CliResult<Forcing> {
        let f = Forcing::new(self.forcing.terms.clone(), self.forcing.mean_free).map_err(CliError::config)?;
        if general && grid.is_periodic() {
            f.mean_removed().map_err(CliError::config)?.check_compatible(grid).map_err(CliError::config)?;
        } else {
            f.check_compatible(grid).map_err(CliError::config)?;
        }
        Ok(f)
    }

    /// Scenario parameters with unknown keys rejected.
    pub fn params<T: DeserializeOwned>(&self) -> CliResult<T> {
        toml::Value::Table(self.params.clone())
            .try_into()
            .map_err(|e| CliError::Config(format!("params: {e}")))
    }
}
