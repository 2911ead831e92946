use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use porostab::analysis::{checkerboard_certificate, oscillation_index, stability_sweep};
use porostab::io::config::SchemeKind;
use porostab::io::vn_grid::{parse_vn_grid, write_sweep_csv};
use porostab::io::{parse_config, read_vtk_snapshot, run_to_directory, sweep_dt, Duration, Overrides, RunConfig};
use porostab::materials::StabilizationConfig;
use porostab::{Error, Result};

/// Output root used when neither `--out` nor `[output] dir` is given.
const OUT_ENV: &str = "POROSTAB_OUT";

#[derive(Parser)]
#[command(name = "porostab", version, about = "Poromechanics stability experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation, writing VTK snapshots, diagnostics.csv and manifest.toml.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// fim or fs
        #[arg(long)]
        scheme: Option<SchemeKind>,
        /// Time step with unit suffix (s, d, mo, y); needs --steps.
        #[arg(long)]
        dt: Option<Duration>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum)]
        stab: Option<OnOff>,
        /// Stabilization constant.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat a run for several time steps over the same simulated time.
    SweepDt {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        scheme: Option<SchemeKind>,
        /// Comma-separated list, e.g. 1d,0.1d,0.01d
        #[arg(long, value_delimiter = ',', required = true)]
        dts: Vec<Duration>,
        #[arg(long, value_enum)]
        stab: Option<OnOff>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Amplification factors over a (theta, dt, tau) grid file.
    VnSweep {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that the checkerboard pressure is in the null space of the coupling transpose.
    CertifyNullspace {
        #[arg(long)]
        config: PathBuf,
    },
    /// Oscillation index of a snapshot's pressure.
    Index {
        #[arg(long)]
        vtk: PathBuf,
        /// Comma-separated region ids; all cells when omitted.
        #[arg(long, value_delimiter = ',')]
        mask: Vec<usize>,
    },
}

const CERTIFY_TOL: f64 = 1e-12;

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// `--out`, then `[output] dir`, then `$POROSTAB_OUT/<config stem>`, then `out/<config stem>`.
fn output_dir(cfg: &RunConfig, config_path: &Path) -> PathBuf {
    if let Some(dir) = &cfg.output.dir {
        return dir.clone();
    }
    let root = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"));
    let stem = config_path.file_stem().map(|s| s.to_os_string()).unwrap_or_else(|| "run".into());
    root.join(stem)
}

fn overrides(scheme: Option<SchemeKind>, stab: Option<OnOff>, c: Option<f64>, out: Option<PathBuf>) -> Overrides {
    Overrides { scheme, stabilization: stab.map(|s| matches!(s, OnOff::On)), c, out, ..Default::default() }
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { config, scheme, dt, steps, stab, c, out } => {
            let o = Overrides { dt, steps, ..overrides(scheme, stab, c, out) };
            let cfg = load_config(&config)?.apply(&o)?;
            let dir = output_dir(&cfg, &config);
            let run = run_to_directory(&cfg, &dir)?;
            let last = run.diagnostics.last().expect("run records the initial state");
            println!(
                "{}: {} steps, t = {:e} s, oscillation index {:.6} ({}), {} snapshots",
                dir.display(),
                last.step,
                last.time,
                last.oscillation_index,
                cfg.analysis.label(last.oscillation_index),
                run.snapshots.len()
            );
        }
        Command::SweepDt { config, scheme, dts, stab, c, out } => {
            let cfg = load_config(&config)?.apply(&overrides(scheme, stab, c, out))?;
            let dir = output_dir(&cfg, &config);
            let dts: Vec<f64> = dts.iter().map(|d| d.seconds()).collect();
            for p in sweep_dt(&cfg, &dts, &dir)? {
                println!("dt = {:e} s, {} steps: final index {:.6}, max {:.6}", p.dt, p.steps, p.output.final_index(), p.max_index());
            }
            println!("summary: {}", dir.join(porostab::io::experiment::SWEEP_SUMMARY_FILE).display());
        }
        Command::VnSweep { grid, out } => {
            let text = std::fs::read_to_string(&grid).map_err(|e| Error::config(format!("{}: {e}", grid.display())))?;
            let rows = stability_sweep(&parse_vn_grid(&text)?)?;
            write_sweep_csv(&rows, &out)?;
            let max = rows.iter().map(|r| r.gamma).fold(0.0, f64::max);
            println!("{} rows, max gamma {max:.17e}", rows.len());
        }
        Command::CertifyNullspace { config } => {
            let cfg = load_config(&config)?;
            let scenario = cfg.scenario()?;
            let sys = scenario.assemble(&StabilizationConfig::disabled())?;
            let cert = checkerboard_certificate(&scenario.mesh, &sys.b, None)?;
            println!("checkerboard residual {:e} over {} interior displacement dofs", cert.residual, cert.checked_dofs);
            if !(cert.residual <= CERTIFY_TOL) {
                return Err(Error::Certification(format!("residual {:e} exceeds {CERTIFY_TOL:e}", cert.residual)));
            }
        }
        Command::Index { vtk, mask } => {
            let snap = read_vtk_snapshot(&vtk)?;
            let cells = if mask.is_empty() { vec![true; snap.mesh.n_cells()] } else { snap.mesh.cells_in_regions(&mask) };
            let index = oscillation_index(&snap.pressure, &snap.mesh, &cells)?;
            println!("{index:.16e}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
