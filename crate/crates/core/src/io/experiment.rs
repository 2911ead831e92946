//! Runs a config into an output directory, and the δt sweep.
//!
//! A run directory holds `diagnostics.csv`, `snapshot_NNNNN.vtk` for every
//! `snapshot_stride`-th step (step 0 excluded) and `manifest.toml`. Nothing
//! time- or host-dependent is written, so reruns are byte-identical.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::config::{RunConfig, ScheduleEntry};
use crate::io::diagnostics::write_diagnostics;
use crate::io::units::Duration;
use crate::io::vtk::write_vtk_snapshot;
use crate::steppers::{run_simulation_with, StepDiagnostics};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";
pub const SWEEP_SUMMARY_FILE: &str = "sweep_summary.csv";

pub fn snapshot_name(step: usize) -> String {
    format!("snapshot_{step:05}.vtk")
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub diagnostics: Vec<StepDiagnostics<f64>>,
    pub snapshots: Vec<PathBuf>,
}

impl RunOutput {
    pub fn final_index(&self) -> f64 {
        self.diagnostics.last().map_or(0.0, |d| d.oscillation_index)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    program: &'static str,
    version: &'static str,
    steps: usize,
    final_time_s: f64,
    final_oscillation_index: f64,
    final_label: &'static str,
    diagnostics: &'static str,
    snapshots: Vec<String>,
    config: &'a RunConfig,
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Runs `cfg` and writes its outputs into `dir` (created if needed).
pub fn run_to_directory(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    cfg.validate()?;
    let scenario = cfg.scenario()?;
    let scheme = cfg.scheme_config(&scenario);
    let schedule = cfg.schedule()?;
    create_dir(dir)?;
    let stride = cfg.output.snapshot_stride;
    let mut diagnostics = Vec::new();
    let mut snapshots = Vec::new();
    run_simulation_with(&scenario, &scheme, &schedule, |state, diag| {
        diagnostics.push(*diag);
        if stride > 0 && state.step > 0 && state.step % stride == 0 {
            let path = dir.join(snapshot_name(state.step));
            write_vtk_snapshot(state, &scenario.mesh, &path)?;
            snapshots.push(path);
        }
        Ok(())
    })?;
    write_diagnostics(&diagnostics, &dir.join(DIAGNOSTICS_FILE))?;
    let last = diagnostics.last().copied().expect("initial diagnostics are always recorded");
    let manifest = Manifest {
        program: "porostab",
        version: env!("CARGO_PKG_VERSION"),
        steps: last.step,
        final_time_s: last.time,
        final_oscillation_index: last.oscillation_index,
        final_label: cfg.analysis.label(last.oscillation_index),
        diagnostics: DIAGNOSTICS_FILE,
        snapshots: snapshots.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect(),
        config: cfg,
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
    let path = dir.join(MANIFEST_FILE);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(RunOutput { dir: dir.to_path_buf(), diagnostics, snapshots })
}

/// One point of a δt sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub dt: f64,
    pub steps: usize,
    pub output: RunOutput,
}

impl SweepPoint {
    pub fn max_index(&self) -> f64 {
        self.output.diagnostics.iter().skip(1).map(|d| d.oscillation_index).fold(0.0, f64::max)
    }

    pub fn mean_index(&self) -> f64 {
        let d = &self.output.diagnostics[1..];
        if d.is_empty() {
            return 0.0;
        }
        d.iter().map(|d| d.oscillation_index).sum::<f64>() / d.len() as f64
    }
}

/// Config for one sweep point: the same total time as `cfg`'s schedule,
/// covered with steps of `dt` (rounded to the nearest whole step count).
pub fn sweep_point_config(cfg: &RunConfig, dt: f64) -> Result<RunConfig> {
    let total = cfg.total_time();
    if !(total > 0.0) {
        return Err(Error::config("sweep-dt needs a schedule to fix the total simulated time"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::config(format!("sweep-dt: time step must be positive, got {dt}")));
    }
    let steps = ((total / dt).round() as usize).max(1);
    let mut point = cfg.clone();
    point.schedule = vec![ScheduleEntry { dt: Duration(dt), steps }];
    Ok(point)
}

pub fn sweep_dir_name(index: usize, dt: f64) -> String {
    format!("dt_{index:02}_{dt}s")
}

/// Runs one simulation per δt concurrently, each into its own subdirectory,
/// then writes `sweep_summary.csv`.
pub fn sweep_dt(cfg: &RunConfig, dts: &[f64], dir: &Path) -> Result<Vec<SweepPoint>> {
    if dts.is_empty() {
        return Err(Error::config("sweep-dt: empty list of time steps"));
    }
    let configs = dts.iter().map(|&dt| sweep_point_config(cfg, dt)).collect::<Result<Vec<_>>>()?;
    create_dir(dir)?;
    let results: Vec<Result<RunOutput>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .zip(dts)
            .enumerate()
            .map(|(i, (c, &dt))| {
                let sub = dir.join(sweep_dir_name(i, dt));
                scope.spawn(move || run_to_directory(c, &sub))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p))).collect()
    });
    let mut points = Vec::with_capacity(dts.len());
    for ((r, c), &dt) in results.into_iter().zip(&configs).zip(dts) {
        points.push(SweepPoint { dt, steps: c.schedule[0].steps, output: r? });
    }
    let mut out = String::from("dt_s,steps,final_index,max_index,mean_index,label\n");
    for p in &points {
        let _ = writeln!(
            out,
            "{:.16e},{},{:.16e},{:.16e},{:.16e},{}",
            p.dt,
            p.steps,
            p.output.final_index(),
            p.max_index(),
            p.mean_index(),
            cfg.analysis.label(p.output.final_index())
        );
    }
    let path = dir.join(SWEEP_SUMMARY_FILE);
    std::fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
    Ok(points)
}
