//! Batch driver: resolves a TOML experiment config, runs one registered
//! scenario and writes its artifacts plus a `manifest.json`.

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;

use std::path::PathBuf;

use serde_json::json;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use output::Artifacts;
pub use scenarios::{catalog, scenario_for_command, scenarios, Outcome, Scenario};

/// Overrides taken from the command line or environment.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

/// Result of a finished run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub scenario: &'static str,
    pub dir: PathBuf,
    pub outcome: Outcome,
}

impl RunSummary {
    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.outcome.pass() {
            0
        } else {
            1
        }
    }
}

fn resolve(command: &str, opts: &RunOptions) -> CliResult<(&'static dyn Scenario, ExperimentConfig)> {
    let scenario = scenario_for_command(command)
        .ok_or_else(|| CliError::Config(format!("unknown command `{command}`")))?;
    let mut cfg = match &opts.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => return Err(CliError::Config("no config file (--config or BURGERS_LAB_CONFIG)".into())),
    };
    if let Some(name) = &cfg.scenario {
        if name != scenario.name() {
            return Err(CliError::Config(format!(
                "config names scenario `{name}` but command `{command}` runs `{}`",
                scenario.name()
            )));
        }
    }
    if let Some(out) = &opts.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    Ok((scenario, cfg))
}

/// Runs the scenario behind `command`. Configuration errors are reported
/// before anything is written.
pub fn run(command: &str, opts: &RunOptions) -> CliResult<RunSummary> {
    let (scenario, cfg) = resolve(command, opts)?;
    let job = scenario.prepare(&cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(CliError::config)?;
    let mut out = Artifacts::create(&cfg.output_dir)?;
    let stale = cfg.output_dir.join("diagnostic.json");
    if stale.exists() {
        std::fs::remove_file(stale)?;
    }
    let result = pool.install(|| job.execute(&mut out));
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let diagnostic = json!({
                "scenario": scenario.name(),
                "error": e.to_string(),
                "config": cfg,
                "params": job.params(),
            });
            // The original error matters more than a failed diagnostic write.
            let _ = out.json("diagnostic.json", &diagnostic);
            return Err(e);
        }
    };
    let manifest = json!({
        "scenario": scenario.name(),
        "reference": scenario.reference(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "params": job.params(),
        "artifacts": out.written(),
        "checks": outcome.checks,
        "pass": outcome.pass(),
    });
    out.json("manifest.json", &manifest)?;
    Ok(RunSummary {
        scenario: scenario.name(),
        dir: cfg.output_dir.clone(),
        outcome,
    })
}
