//! Per-step diagnostics as CSV.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::steppers::StepDiagnostics;

pub const DIAGNOSTICS_HEADER: &str = "step,time_s,dt_s,oscillation_index_masked,max_p,min_p,divu_norm,mass_residual";

pub fn render_diagnostics(rows: &[StepDiagnostics<f64>]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::config("no diagnostics to write"));
    }
    let mut out = String::from(DIAGNOSTICS_HEADER);
    out.push('\n');
    for d in rows {
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            d.step, d.time, d.dt, d.oscillation_index, d.max_p, d.min_p, d.divu_norm, d.mass_residual
        );
    }
    Ok(out)
}

pub fn write_diagnostics(rows: &[StepDiagnostics<f64>], path: &Path) -> Result<()> {
    let text = render_diagnostics(rows)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a file written by [`write_diagnostics`].
pub fn read_diagnostics(path: &Path) -> Result<Vec<StepDiagnostics<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(DIAGNOSTICS_HEADER) {
        return Err(Error::Parse(format!("{}: unexpected CSV header", path.display())));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::Parse(format!("{}: line {}: malformed row", path.display(), i + 2));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 8 {
                return Err(bad());
            }
            let r = |k: usize| f[k].parse::<f64>().map_err(|_| bad());
            Ok(StepDiagnostics {
                step: f[0].parse().map_err(|_| bad())?,
                time: r(1)?,
                dt: r(2)?,
                oscillation_index: r(3)?,
                max_p: r(4)?,
                min_p: r(5)?,
                divu_norm: r(6)?,
                mass_residual: r(7)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        let d = StepDiagnostics { step: 1, time: 0.1, dt: 0.1, oscillation_index: 1.0 / 3.0, max_p: 2.0, min_p: -2.0, divu_norm: 0.0, mass_residual: 1e-300 };
        let text = render_diagnostics(&[d, d]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], DIAGNOSTICS_HEADER);
        assert!(lines[1].starts_with("1,1.0000000000000001e-1,"));
        assert!(render_diagnostics(&[]).is_err());
    }
}
