//! Grid files for the Von Neumann sweep.
//!
//! ```toml
//! m_biot = "incompressible"   # or Pa
//! b = 1.0
//! k_dr = 5e9
//! k = 1e-13
//! mu = 1e-3
//! dx = 1.0
//! theta_count = 16            # uniform in (0, π]; or `thetas = [...]`
//! dts = ["0.01d", "1d"]
//! taus = [0.0, 1e-11]
//! ```

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{SweepGrid, SweepRow, VonNeumannParams};
use crate::error::{Error, Result};
use crate::io::config::ModulusValue;
use crate::io::units::Duration;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VnGridConfig {
    pub m_biot: ModulusValue,
    pub b: f64,
    pub k_dr: f64,
    pub k: f64,
    pub mu: f64,
    pub dx: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_count: Option<usize>,
    pub dts: Vec<Duration>,
    pub taus: Vec<f64>,
}

impl VnGridConfig {
    pub fn grid(&self) -> Result<SweepGrid<f64>> {
        let thetas = match (&self.thetas, self.theta_count) {
            (Some(t), None) => t.clone(),
            (None, Some(n)) if n > 0 => (1..=n).map(|i| std::f64::consts::PI * i as f64 / n as f64).collect(),
            (None, Some(_)) => return Err(Error::config("theta_count: must be at least 1")),
            _ => return Err(Error::config("give exactly one of thetas or theta_count")),
        };
        if thetas.is_empty() || self.dts.is_empty() || self.taus.is_empty() {
            return Err(Error::config("thetas, dts and taus must be nonempty"));
        }
        let base = VonNeumannParams {
            m_biot: self.m_biot.0,
            b: self.b,
            k_dr: self.k_dr,
            k: self.k,
            mu: self.mu,
            dx: self.dx,
            dt: self.dts[0].seconds(),
            tau: self.taus[0],
            theta: thetas[0],
        };
        base.validate()?;
        Ok(SweepGrid { base, thetas, dts: self.dts.iter().map(|d| d.seconds()).collect(), taus: self.taus.clone() })
    }
}

pub fn parse_vn_grid(text: &str) -> Result<SweepGrid<f64>> {
    let cfg: VnGridConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    cfg.grid()
}

pub fn render_sweep_csv(rows: &[SweepRow<f64>]) -> String {
    let mut out = String::from("theta,dt,tau,gamma\n");
    for r in rows {
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", r.theta, r.dt, r.tau, r.gamma);
    }
    out
}

pub fn write_sweep_csv(rows: &[SweepRow<f64>], path: &Path) -> Result<()> {
    std::fs::write(path, render_sweep_csv(rows)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::stability_sweep;

    const GRID: &str = "m_biot = \"incompressible\"\nb = 1.0\nk_dr = 5e9\nk = 0.0\nmu = 1e-3\ndx = 1.0\n\
                        theta_count = 4\ndts = [\"1d\", 3600]\ntaus = [0.0]\n";

    #[test]
    fn undrained_unstabilized_grid_is_all_ones() {
        let rows = stability_sweep(&parse_vn_grid(GRID).unwrap()).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| r.gamma == 1.0));
        let csv = render_sweep_csv(&rows);
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.lines().skip(1).all(|l| l.ends_with(",1.0000000000000000e0")));
    }

    #[test]
    fn theta_spec_must_be_unique() {
        let both = format!("{GRID}thetas = [1.0]\n");
        assert!(parse_vn_grid(&both).is_err());
    }
}
