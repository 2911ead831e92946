//! Legacy ASCII VTK structured-grid snapshots.
//!
//! Layout: `DATASET STRUCTURED_GRID`, points with x fastest, then
//! `CELL_DATA` (`pressure` Pa, `porosity`, `region`, `sigma_v` Pa) and
//! `POINT_DATA` (`displacement` m). Reals use `{:.16e}` (17 significant
//! digits), so values read back bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::StructuredMesh;
use crate::steppers::State;

fn push_real(out: &mut String, v: f64) {
    let _ = writeln!(out, "{v:.16e}");
}

/// The snapshot text; identical inputs give identical bytes.
pub fn render_vtk_snapshot(state: &State<f64>, mesh: &StructuredMesh<f64>) -> Result<String> {
    let nc = mesh.n_cells();
    let nn = mesh.n_nodes();
    if state.p.len() != nc || state.u.len() != 3 * nn || state.phi.len() != nc || state.sigma_v.len() != nc {
        return Err(Error::config("state does not match the mesh"));
    }
    let [px, py, pz] = mesh.node_counts();
    let mut out = String::with_capacity(64 * (4 * nc + 6 * nn));
    out.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(out, "porostab step {} time {:.16e}", state.step, state.time);
    out.push_str("ASCII\nDATASET STRUCTURED_GRID\n");
    let _ = writeln!(out, "DIMENSIONS {px} {py} {pz}");
    let _ = writeln!(out, "POINTS {nn} double");
    for n in 0..nn {
        let [x, y, z] = mesh.node_coords(n);
        let _ = writeln!(out, "{x:.16e} {y:.16e} {z:.16e}");
    }
    let _ = writeln!(out, "CELL_DATA {nc}");
    for (name, field) in [("pressure", &state.p), ("porosity", &state.phi)] {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        field.iter().for_each(|&v| push_real(&mut out, v));
    }
    out.push_str("SCALARS region int 1\nLOOKUP_TABLE default\n");
    for &r in &mesh.region_of_cell {
        let _ = writeln!(out, "{r}");
    }
    out.push_str("SCALARS sigma_v double 1\nLOOKUP_TABLE default\n");
    state.sigma_v.iter().for_each(|&v| push_real(&mut out, v));
    let _ = writeln!(out, "POINT_DATA {nn}");
    out.push_str("VECTORS displacement double\n");
    for u in state.u.chunks_exact(3) {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", u[0], u[1], u[2]);
    }
    Ok(out)
}

pub fn write_vtk_snapshot(state: &State<f64>, mesh: &StructuredMesh<f64>, path: &Path) -> Result<()> {
    let text = render_vtk_snapshot(state, mesh)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// What [`read_vtk_snapshot`] recovers from a file written here.
#[derive(Debug, Clone, PartialEq)]
pub struct VtkSnapshot {
    pub step: usize,
    pub time: f64,
    pub mesh: StructuredMesh<f64>,
    pub pressure: Vec<f64>,
    pub porosity: Vec<f64>,
    pub sigma_v: Vec<f64>,
    pub displacement: Vec<f64>,
}

struct Tokens<'a> {
    iter: std::iter::Peekable<std::str::SplitWhitespace<'a>>,
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> Result<&'a str> {
        self.iter.next().ok_or_else(|| Error::Parse("vtk: unexpected end of file".into()))
    }
    fn expect(&mut self, word: &str) -> Result<()> {
        let t = self.next()?;
        if t != word {
            return Err(Error::Parse(format!("vtk: expected '{word}', found '{t}'")));
        }
        Ok(())
    }
    fn parse<V: std::str::FromStr>(&mut self) -> Result<V> {
        let t = self.next()?;
        t.parse().map_err(|_| Error::Parse(format!("vtk: cannot parse '{t}'")))
    }
    fn reals(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.parse()).collect()
    }
}

fn read_err(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    }
}

/// Reads a snapshot written by [`write_vtk_snapshot`]. Uniform spacing is
/// assumed and recovered from the points.
pub fn read_vtk_snapshot(path: &Path) -> Result<VtkSnapshot> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_vtk_snapshot(&text).map_err(|e| read_err(path, e))
}

pub fn parse_vtk_snapshot(text: &str) -> Result<VtkSnapshot> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if !header.starts_with("# vtk DataFile") {
        return Err(Error::Parse("vtk: missing header".into()));
    }
    let title = lines.next().unwrap_or_default();
    let (step, time) = {
        let w: Vec<&str> = title.split_whitespace().collect();
        match w.as_slice() {
            ["porostab", "step", s, "time", t] => (
                s.parse().map_err(|_| Error::Parse("vtk: bad step in title".into()))?,
                t.parse().map_err(|_| Error::Parse("vtk: bad time in title".into()))?,
            ),
            _ => (0, 0.0),
        }
    };
    let rest: String = lines.collect::<Vec<_>>().join("\n");
    let mut tk = Tokens { iter: rest.split_whitespace().peekable() };
    tk.expect("ASCII")?;
    tk.expect("DATASET")?;
    tk.expect("STRUCTURED_GRID")?;
    tk.expect("DIMENSIONS")?;
    let dims: [usize; 3] = [tk.parse()?, tk.parse()?, tk.parse()?];
    if dims.iter().any(|&d| d < 2) {
        return Err(Error::Parse("vtk: every dimension needs at least two points".into()));
    }
    tk.expect("POINTS")?;
    let nn: usize = tk.parse()?;
    tk.next()?;
    if nn != dims[0] * dims[1] * dims[2] {
        return Err(Error::Parse("vtk: point count does not match DIMENSIONS".into()));
    }
    let pts = tk.reals(3 * nn)?;
    let origin = [pts[0], pts[1], pts[2]];
    let node = |i: usize, j: usize, k: usize| 3 * (i + dims[0] * (j + dims[1] * k));
    let spacing = [pts[node(1, 0, 0)] - origin[0], pts[node(0, 1, 0) + 1] - origin[1], pts[node(0, 0, 1) + 2] - origin[2]];

    let counts = [dims[0] - 1, dims[1] - 1, dims[2] - 1];
    let nc = counts[0] * counts[1] * counts[2];
    tk.expect("CELL_DATA")?;
    if tk.parse::<usize>()? != nc {
        return Err(Error::Parse("vtk: cell count does not match DIMENSIONS".into()));
    }
    let mut pressure = None;
    let mut porosity = None;
    let mut sigma_v = None;
    let mut region: Option<Vec<usize>> = None;
    let mut displacement = None;
    while let Some(word) = tk.iter.next() {
        match word {
            "SCALARS" => {
                let name = tk.next()?;
                let ty = tk.next()?;
                tk.next()?;
                tk.expect("LOOKUP_TABLE")?;
                tk.next()?;
                if ty == "int" {
                    let v = (0..nc).map(|_| tk.parse()).collect::<Result<Vec<usize>>>()?;
                    if name == "region" {
                        region = Some(v);
                    }
                } else {
                    let v = tk.reals(nc)?;
                    match name {
                        "pressure" => pressure = Some(v),
                        "porosity" => porosity = Some(v),
                        "sigma_v" => sigma_v = Some(v),
                        _ => {}
                    }
                }
            }
            "POINT_DATA" => {
                if tk.parse::<usize>()? != nn {
                    return Err(Error::Parse("vtk: POINT_DATA count does not match".into()));
                }
            }
            "VECTORS" => {
                let name = tk.next()?;
                tk.next()?;
                let v = tk.reals(3 * nn)?;
                if name == "displacement" {
                    displacement = Some(v);
                }
            }
            other => return Err(Error::Parse(format!("vtk: unexpected token '{other}'"))),
        }
    }
    let missing = |n: &str| Error::Parse(format!("vtk: no '{n}' array"));
    let region = region.ok_or_else(|| missing("region"))?;
    let mesh = StructuredMesh::build(counts, spacing, |i, j, k| region[i + counts[0] * (j + counts[1] * k)])?.with_origin(origin);
    Ok(VtkSnapshot {
        step,
        time,
        mesh,
        pressure: pressure.ok_or_else(|| missing("pressure"))?,
        porosity: porosity.ok_or_else(|| missing("porosity"))?,
        sigma_v: sigma_v.ok_or_else(|| missing("sigma_v"))?,
        displacement: displacement.ok_or_else(|| missing("displacement"))?,
    })
}
