//! Trajectory files.
//!
//! Binary layout: the 8-byte magic `BLTRAJ\0\x01`, a little-endian `u64`
//! header length, a JSON header, then one block of little-endian `f64`
//! values per snapshot.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::Field;
use crate::grid::{Grid, GridSpec};

use super::{SolverConfig, Trajectory};

const MAGIC: &[u8; 8] = b"BLTRAJ\0\x01";
const FORMAT: &str = "burgers-lab-trajectory";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    grid: GridSpec,
    config: SolverConfig,
    times: Vec<f64>,
    node_count: usize,
}

pub fn write_trajectory<W: Write>(traj: &Trajectory, mut out: W) -> Result<()> {
    let header = Header {
        format: FORMAT.to_string(),
        version: VERSION,
        grid: traj.grid().spec(),
        config: traj.config().clone(),
        times: traj.times().to_vec(),
        node_count: traj.grid().len(),
    };
    let json = serde_json::to_vec(&header).map_err(|e| LabError::Format(e.to_string()))?;
    out.write_all(MAGIC)?;
    out.write_all(&(json.len() as u64).to_le_bytes())?;
    out.write_all(&json)?;
    let mut block = Vec::with_capacity(8 * header.node_count);
    for snap in traj.snapshots() {
        block.clear();
        for v in snap.values() {
            block.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&block)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trajectory<R: Read>(mut input: R) -> Result<Trajectory> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(LabError::Format("not a trajectory file".into()));
    }
    let mut len = [0u8; 8];
    input.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len);
    if len > (1 << 32) {
        return Err(LabError::Format(format!("implausible header length {len}")));
    }
    let mut json = vec![0u8; len as usize];
    input.read_exact(&mut json)?;
    let header: Header = serde_json::from_slice(&json).map_err(|e| LabError::Format(e.to_string()))?;
    if header.format != FORMAT || header.version != VERSION {
        return Err(LabError::Format(format!(
            "unsupported container {} v{}",
            header.format, header.version
        )));
    }
    let grid = std::sync::Arc::new(Grid::try_from(header.grid)?);
    if grid.len() != header.node_count {
        return Err(LabError::Format("node count disagrees with grid".into()));
    }
    let mut buf = vec![0u8; 8 * header.node_count];
    let mut snapshots = Vec::with_capacity(header.times.len());
    for &t in &header.times {
        input.read_exact(&mut buf)?;
        let values = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        snapshots.push(Field::new(grid.clone(), values, t)?);
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(LabError::Format("trailing bytes after last snapshot".into()));
    }
    Trajectory::from_snapshots(header.config, snapshots)
}

pub fn save_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_trajectory(traj, std::io::BufWriter::new(file))
}

pub fn load_trajectory(path: &Path) -> Result<Trajectory> {
    let file = std::fs::File::open(path)?;
    read_trajectory(std::io::BufReader::new(file))
}

/// Long-format CSV with columns `t,x,u`.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut out: W) -> Result<()> {
    writeln!(out, "t,x,u")?;
    for snap in traj.snapshots() {
        for (x, u) in traj.grid().nodes().iter().zip(snap.values()) {
            writeln!(out, "{},{},{}", snap.time(), x, u)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridKind};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn build(kind: GridKind, n: usize, data: &[Vec<f64>]) -> Trajectory {
        let g = Arc::new(make_grid(kind, n).unwrap());
        let cfg = SolverConfig::new(0.01, "imex-euler");
        let snaps = data
            .iter()
            .enumerate()
            .map(|(i, v)| Field::new(g.clone(), v.clone(), 0.5 * i as f64).unwrap())
            .collect();
        Trajectory::from_snapshots(cfg, snaps).unwrap()
    }

    proptest! {
        #[test]
        fn binary_round_trip(values in proptest::collection::vec(proptest::collection::vec(-1e6f64..1e6, 7), 1..6)) {
            let traj = build(GridKind::Dirichlet, 8, &values);
            let mut bytes = Vec::new();
            write_trajectory(&traj, &mut bytes).unwrap();
            let back = read_trajectory(bytes.as_slice()).unwrap();
            prop_assert_eq!(back, traj);
        }
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let traj = build(GridKind::PeriodicMeanFree, 4, &[vec![1.0, -1.0, 1.0, -1.0]]);
        let mut bytes = Vec::new();
        write_trajectory(&traj, &mut bytes).unwrap();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(read_trajectory(bad.as_slice()), Err(LabError::Format(_))));
        bytes.pop();
        assert!(read_trajectory(bytes.as_slice()).is_err());
    }

    #[test]
    fn csv_is_long_format() {
        let traj = build(GridKind::Dirichlet, 4, &[vec![0.0, 1.0, 0.0], vec![0.0, 0.5, 0.0]]);
        let mut out = Vec::new();
        write_trajectory_csv(&traj, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x,u");
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[2], "0,0.5,1");
        assert_eq!(lines[5], "0.5,0.5,0.5");
    }
}
