//! Artifact writing for one run directory.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use burgers_lab::process::persist::{save_trajectory, write_trajectory_csv};
use burgers_lab::Trajectory;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub struct Artifacts {
    dir: PathBuf,
    written: Vec<String>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    fn record(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.into()))?;
        let path = self.record(name);
        fs::write(path, text + "\n")?;
        Ok(())
    }

    /// CSV with a header and one row per record.
    pub fn csv<R>(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = R>) -> CliResult<()>
    where
        R: IntoIterator,
        R::Item: std::fmt::Display,
    {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            let cells: Vec<String> = row.into_iter().map(|c| c.to_string()).collect();
            let _ = writeln!(text, "{}", cells.join(","));
        }
        let path = self.record(name);
        fs::write(path, text)?;
        Ok(())
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> CliResult<()> {
        let path = self.record(name);
        fs::write(path, data)?;
        Ok(())
    }

    /// Binary container plus the long-format `t,x,u` CSV.
    pub fn trajectory(&mut self, stem: &str, traj: &Trajectory) -> CliResult<()> {
        let path = self.record(&format!("{stem}.traj"));
        save_trajectory(traj, &path)?;
        let path = self.record(&format!("{stem}.csv"));
        let mut out = std::io::BufWriter::new(fs::File::create(path)?);
        write_trajectory_csv(traj, &mut out)?;
        out.flush()?;
        Ok(())
    }
}
