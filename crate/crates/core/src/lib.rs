//! Single-phase poromechanics on structured hexahedral grids.
//!
//! Q1 displacements are coupled to cell-centred pressures (two-point flux
//! finite volumes). Time stepping is backward Euler, either fully implicit or
//! with the fixed-stress split, optionally with pressure-jump stabilization.
//! The `analysis` module carries the stability diagnostics.
//!
//! Everything numerical is generic over [`Real`]; the aliases below fix `f64`.

pub mod analysis;
pub mod assembly;
pub mod cases;
pub mod error;
pub mod io;
pub mod linsolve;
pub mod materials;
pub mod mesh;
pub mod scalar;
pub mod steppers;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Mesh = mesh::StructuredMesh<f64>;
pub type Material = materials::RegionMaterial<f64>;
pub type Materials = materials::MaterialSet<f64>;
pub type Stabilization = materials::StabilizationConfig<f64>;
pub type Matrix = linsolve::CsrMatrix<f64>;
pub type System = assembly::AssembledSystem<f64>;
pub type Scenario = cases::Scenario<f64>;
pub type SimState = steppers::State<f64>;
pub type Scheme = steppers::SchemeConfig<f64>;
