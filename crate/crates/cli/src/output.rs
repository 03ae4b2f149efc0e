//! CSV and JSON artifacts. Floats are written with 17 significant digits
//! so they read back to the same doubles.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use selmut_core::{Grid1D, Result, SweepPoint, Trajectory};

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn row(values: impl IntoIterator<Item = f64>) -> String {
    let cells: Vec<String> = values.into_iter().map(float).collect();
    cells.join(",")
}

/// `t, rho, rho_1, …, rho_K`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let regions = traj.regions.first().map_or(0, Vec::len);
    let mut out = String::from("t,rho");
    for i in 1..=regions {
        let _ = write!(out, ",rho_{i}");
    }
    out.push('\n');
    for k in 0..traj.len() {
        let values = [traj.times[k], traj.rho[k]]
            .into_iter()
            .chain(traj.regions[k].iter().copied());
        out.push_str(&row(values));
        out.push('\n');
    }
    out
}

/// `x, <column>` over the grid.
pub fn profile_csv(grid: &Grid1D, values: &[f64], column: &str) -> String {
    let mut out = format!("x,{column}\n");
    for (x, v) in grid.nodes().into_iter().zip(values) {
        out.push_str(&row([x, *v]));
        out.push('\n');
    }
    out
}

/// `<key>, lambda, lambda2, gamma, fraction_1, …` for eigen runs and sweeps.
pub fn eigen_csv(key: &str, points: &[SweepPoint]) -> String {
    let peaks = points.first().map_or(0, |p| p.peak_fractions.len());
    let mut out = format!("{key},lambda,lambda2,gamma");
    for i in 1..=peaks {
        let _ = write!(out, ",fraction_{i}");
    }
    out.push('\n');
    for p in points {
        let values = [p.epsilon, p.lambda, p.lambda2, p.gamma]
            .into_iter()
            .chain(p.peak_fractions.iter().copied());
        out.push_str(&row(values));
        out.push('\n');
    }
    out
}

pub fn snapshot_name(t: f64) -> String {
    format!("snapshot_{t}.csv")
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

/// Trajectory and snapshot CSVs for a finished run.
pub fn write_trajectory(dir: &Path, traj: &Trajectory) -> Result<Vec<PathBuf>> {
    let mut paths = vec![write(dir, "trajectory.csv", &trajectory_csv(traj))?];
    for snap in &traj.snapshots {
        let csv = profile_csv(&traj.grid, &snap.density, "n");
        paths.push(write(dir, &snapshot_name(snap.time), &csv)?);
    }
    Ok(paths)
}
