//! Benchmark scenarios: a cantilever slab under sinusoidal top load and the
//! staircase channel/barrier injection problem.

mod cantilever;
mod staircase;

pub use cantilever::{build_cantilever, CantileverOptions};
pub use staircase::{build_staircase, StaircaseOptions, CHANNEL, BARRIER};

use crate::assembly::{AssembledSystem, DirichletSet, LoadSpec, Loads};
use crate::error::{Error, Result};
use crate::materials::{MaterialSet, StabilizationConfig};
use crate::mesh::{Side, StructuredMesh};
use crate::scalar::Real;

/// Mechanical condition on one boundary plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechanicalBc {
    /// Traction-free (possibly loaded by a traction in the load spec).
    Free,
    /// All displacement components zero.
    Fixed,
    /// Normal displacement zero.
    Roller,
}

impl MechanicalBc {
    pub fn token(self) -> &'static str {
        match self {
            MechanicalBc::Free => "free",
            MechanicalBc::Fixed => "fixed",
            MechanicalBc::Roller => "roller",
        }
    }
}

/// One condition class per boundary side, in `Side::ALL` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryConditions {
    pub sides: [MechanicalBc; 6],
}

impl BoundaryConditions {
    pub fn all_free() -> Self {
        BoundaryConditions { sides: [MechanicalBc::Free; 6] }
    }

    pub fn set(mut self, side: Side, bc: MechanicalBc) -> Self {
        self.sides[side as usize] = bc;
        self
    }

    pub fn get(&self, side: Side) -> MechanicalBc {
        self.sides[side as usize]
    }

    /// Homogeneous Dirichlet set; nodes on several constrained sides collect all constraints.
    pub fn dirichlet<T: Real>(&self, mesh: &StructuredMesh<T>) -> Result<DirichletSet<T>> {
        let mut entries = Vec::new();
        for side in Side::ALL {
            let comps: &[usize] = match self.get(side) {
                MechanicalBc::Free => &[],
                MechanicalBc::Fixed => &[0, 1, 2],
                MechanicalBc::Roller => match side.axis() {
                    0 => &[0],
                    1 => &[1],
                    _ => &[2],
                },
            };
            if comps.is_empty() {
                continue;
            }
            for n in mesh.select_boundary(side).nodes {
                for &i in comps {
                    entries.push((3 * n + i, T::zero()));
                }
            }
        }
        DirichletSet::new(entries)
    }
}

/// Everything needed to run one benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub name: String,
    pub mesh: StructuredMesh<T>,
    pub materials: MaterialSet<T>,
    pub boundary: BoundaryConditions,
    pub loads: LoadSpec<T>,
    pub initial_pressure: T,
    /// Regions the oscillation index is measured over.
    pub index_regions: Vec<usize>,
    /// Regions stabilized when stabilization is switched on.
    pub stabilization_regions: Vec<usize>,
}

impl<T: Real> Scenario<T> {
    pub fn validate(&self) -> Result<()> {
        for &r in self.index_regions.iter().chain(&self.stabilization_regions) {
            if r >= self.materials.len() {
                return Err(Error::config(format!("region id {r} has no material")));
            }
        }
        self.loads.validate(&self.mesh)?;
        if !self.initial_pressure.is_finite() {
            return Err(Error::config("initial pressure must be finite"));
        }
        Ok(())
    }

    pub fn dirichlet(&self) -> Result<DirichletSet<T>> {
        self.boundary.dirichlet(&self.mesh)
    }

    pub fn assemble(&self, stab: &StabilizationConfig<T>) -> Result<AssembledSystem<T>> {
        self.validate()?;
        AssembledSystem::assemble(&self.mesh, &self.materials, stab, self.dirichlet()?)
    }

    /// Hexahedral stabilization (`c`) over the scenario's stabilization regions.
    pub fn stabilization(&self, c: T) -> StabilizationConfig<T> {
        StabilizationConfig { enabled: true, c, region_mask: self.stabilization_regions.clone() }
    }

    pub fn loads_at(&self, t: T) -> Result<Loads<T>> {
        self.loads.evaluate(&self.mesh, &self.materials, t)
    }

    pub fn index_mask(&self) -> Vec<bool> {
        self.mesh.cells_in_regions(&self.index_regions)
    }

    pub fn region_mask(&self, regions: &[usize]) -> Vec<bool> {
        self.mesh.cells_in_regions(regions)
    }
}
