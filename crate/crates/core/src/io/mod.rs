//! Configuration files, VTK snapshots, CSV diagnostics and run directories.

pub mod config;
pub mod diagnostics;
pub mod experiment;
pub mod units;
pub mod vn_grid;
pub mod vtk;

pub use config::{parse_config, Overrides, RunConfig};
pub use diagnostics::{read_diagnostics, write_diagnostics};
pub use experiment::{run_to_directory, sweep_dt, RunOutput, SweepPoint};
pub use units::{parse_duration, Duration};
pub use vtk::{read_vtk_snapshot, write_vtk_snapshot, VtkSnapshot};
