//! Boundary tractions, volumetric sources and body forces.

use crate::error::{Error, Result};
use crate::materials::MaterialSet;
use crate::mesh::{Side, StructuredMesh};
use crate::scalar::Real;

/// Scalar function of time.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeFunction<T> {
    Constant(T),
    /// `amplitude · sin(2π t / period)`
    Sine { amplitude: T, period: T },
    /// `base(t)` up to `after`, then the constant `value`.
    Frozen { base: Box<TimeFunction<T>>, after: T, value: T },
}

impl<T: Real> TimeFunction<T> {
    pub fn eval(&self, t: T) -> T {
        match self {
            TimeFunction::Constant(v) => *v,
            TimeFunction::Sine { amplitude, period } => *amplitude * (T::lit(2.0) * T::PI() * t / *period).sin(),
            TimeFunction::Frozen { base, after, value } => {
                if t > *after {
                    *value
                } else {
                    base.eval(t)
                }
            }
        }
    }
}

/// Total force `total_force(t)` spread as a uniform traction along `direction` over one boundary plane.
#[derive(Debug, Clone, PartialEq)]
pub struct TractionLoad<T> {
    pub side: Side,
    pub direction: [T; 3],
    pub total_force: TimeFunction<T>,
}

/// Fluid mass injection split equally among `cells`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceTerm<T> {
    pub cells: Vec<usize>,
    /// kg/s, positive for injection.
    pub mass_rate: T,
    /// Active while `t ≤ duration`; always active when `None`.
    pub duration: Option<T>,
}

impl<T: Real> SourceTerm<T> {
    pub fn is_active(&self, t: T) -> bool {
        match self.duration {
            None => true,
            // tolerate the rounding of accumulated step times
            Some(d) => t <= d * (T::one() + T::lit(1e-12)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoadSpec<T> {
    pub tractions: Vec<TractionLoad<T>>,
    pub sources: Vec<SourceTerm<T>>,
    /// Gravitational acceleration vector (m/s²), off when `None`.
    pub body_force: Option<[T; 3]>,
}

/// Right-hand sides at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct Loads<T> {
    /// Nodal forces (N), `3·n_nodes`.
    pub q_u: Vec<T>,
    /// Volumetric sources (m³/s) per cell.
    pub q_p: Vec<T>,
}

impl<T: Real> LoadSpec<T> {
    pub fn validate(&self, mesh: &StructuredMesh<T>) -> Result<()> {
        for tr in &self.tractions {
            if mesh.select_boundary(tr.side).faces.is_empty() {
                return Err(Error::config(format!("traction on empty boundary set {}", tr.side)));
            }
            if tr.direction.iter().any(|d| !d.is_finite()) {
                return Err(Error::config("traction direction must be finite"));
            }
        }
        for s in &self.sources {
            if s.cells.is_empty() {
                return Err(Error::config("source term has no cells"));
            }
            if let Some(&c) = s.cells.iter().find(|&&c| c >= mesh.n_cells()) {
                return Err(Error::config(format!("source cell {c} outside the mesh ({} cells)", mesh.n_cells())));
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, mesh: &StructuredMesh<T>, materials: &MaterialSet<T>, t: T) -> Result<Loads<T>> {
        self.validate(mesh)?;
        let mut q_u = vec![T::zero(); 3 * mesh.n_nodes()];
        let mut q_p = vec![T::zero(); mesh.n_cells()];
        let quarter = T::lit(0.25);
        for tr in &self.tractions {
            let sel = mesh.select_boundary(tr.side);
            let traction = tr.total_force.eval(t) / sel.total_area();
            for f in &sel.faces {
                // ∫ N_a dA = A/4 for each node of a bilinear face
                let share = traction * f.area * quarter;
                for &n in &f.nodes {
                    for i in 0..3 {
                        q_u[3 * n + i] += share * tr.direction[i];
                    }
                }
            }
        }
        for s in &self.sources {
            if !s.is_active(t) {
                continue;
            }
            let share = s.mass_rate / T::from_usize_lossy(s.cells.len());
            for &c in &s.cells {
                q_p[c] += share / materials.region(mesh.region_of_cell[c]).rho_f;
            }
        }
        if let Some(g) = self.body_force {
            let eighth = mesh.cell_volume() * T::lit(0.125);
            for c in 0..mesh.n_cells() {
                let m = materials.region(mesh.region_of_cell[c]);
                let rho = (T::one() - m.phi0) * m.rho_s + m.phi0 * m.rho_f;
                for n in mesh.cell_nodes(c) {
                    for i in 0..3 {
                        q_u[3 * n + i] += rho * g[i] * eighth;
                    }
                }
            }
        }
        Ok(Loads { q_u, q_p })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::RegionMaterial;

    #[test]
    fn sine_quarter_period() {
        let day = 86_400.0;
        let f = TimeFunction::<f64>::Sine { amplitude: -100.0, period: 10.0 * day };
        assert!((f.eval(2.5 * day) + 100.0).abs() < 1e-12);
        assert!(f.eval(5.0 * day).abs() < 1e-12);
        let frozen = TimeFunction::Frozen { base: Box::new(f), after: 100.0 * day, value: -100.0 };
        assert_eq!(frozen.eval(101.0 * day), -100.0);
    }

    #[test]
    fn injection_split() {
        let mesh = StructuredMesh::build([4, 1, 1], [1.0, 1.0, 1.0], |_, _, _| 0).unwrap();
        let mats = MaterialSet::new(vec![RegionMaterial::new("r", 5.0e9, 0.25)]).unwrap();
        let spec = LoadSpec { sources: vec![SourceTerm { cells: vec![0, 1, 2, 3], mass_rate: 1.0, duration: Some(10.0) }], ..Default::default() };
        let l = spec.evaluate(&mesh, &mats, 1.0).unwrap();
        assert_eq!(l.q_p, vec![2.5e-4; 4]);
        assert_eq!(spec.evaluate(&mesh, &mats, 11.0).unwrap().q_p, vec![0.0; 4]);
    }

    #[test]
    fn traction_total_force() {
        let mesh = StructuredMesh::build([20, 1, 20], [0.05, 0.05, 0.05], |_, _, _| 0).unwrap();
        let mats = MaterialSet::new(vec![RegionMaterial::new("r", 5.0e9, 0.25)]).unwrap();
        let spec = LoadSpec {
            tractions: vec![TractionLoad { side: Side::ZPlus, direction: [0.0, 0.0, 1.0], total_force: TimeFunction::Constant(-100.0) }],
            ..Default::default()
        };
        let l = spec.evaluate(&mesh, &mats, 0.0).unwrap();
        let fz: f64 = (0..mesh.n_nodes()).map(|n| l.q_u[3 * n + 2]).sum();
        assert!((fz + 100.0).abs() < 1e-10);
        assert!(l.q_u.iter().step_by(3).all(|&f| f == 0.0));
    }
}
