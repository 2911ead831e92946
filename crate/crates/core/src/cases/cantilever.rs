use crate::assembly::{LoadSpec, TimeFunction, TractionLoad};
use crate::cases::{BoundaryConditions, MechanicalBc, Scenario};
use crate::error::{Error, Result};
use crate::materials::{MaterialSet, Modulus, RegionMaterial};
use crate::mesh::{Side, StructuredMesh};
use crate::scalar::Real;

const DAY: f64 = 86_400.0;

/// Overrides for the cantilever; `Default` gives the benchmark values.
#[derive(Debug, Clone, PartialEq)]
pub struct CantileverOptions<T> {
    /// Cells along x and z.
    pub nx: usize,
    pub nz: usize,
    pub length: T,
    pub height: T,
    /// Slab thickness along y (one cell).
    pub thickness: T,
    pub k_dr: T,
    pub nu: T,
    pub k_s: Modulus<T>,
    pub k_f: Modulus<T>,
    pub phi0: T,
    pub permeability: T,
    pub viscosity: T,
    pub rho_f: T,
    /// Peak total top force (N); the load is `−force·sin(2πt/period)`.
    pub force: T,
    pub period: T,
    /// After this time the load is held at `−force`.
    pub freeze_at: Option<T>,
}

impl<T: Real> Default for CantileverOptions<T> {
    fn default() -> Self {
        CantileverOptions {
            nx: 20,
            nz: 20,
            length: T::one(),
            height: T::one(),
            thickness: T::lit(0.05),
            k_dr: T::lit(5.0e9),
            nu: T::lit(0.25),
            k_s: Modulus::Incompressible,
            k_f: Modulus::Incompressible,
            phi0: T::lit(0.05),
            permeability: T::zero(),
            viscosity: T::lit(1.0e-3),
            rho_f: T::lit(1000.0),
            force: T::lit(100.0),
            period: T::lit(10.0 * DAY),
            freeze_at: None,
        }
    }
}

/// Plane-strain slab clamped on x−, y-rollers on both faces, loaded on z+.
pub fn build_cantilever<T: Real>(opts: &CantileverOptions<T>) -> Result<Scenario<T>> {
    if opts.nx == 0 || opts.nz == 0 {
        return Err(Error::config("cantilever cell counts must be positive"));
    }
    if !(opts.period > T::zero()) {
        return Err(Error::config("load period must be positive"));
    }
    let spacing = [opts.length / T::from_usize_lossy(opts.nx), opts.thickness, opts.height / T::from_usize_lossy(opts.nz)];
    let mesh = StructuredMesh::build([opts.nx, 1, opts.nz], spacing, |_, _, _| 0)?;
    let mut m = RegionMaterial::new("skeleton", opts.k_dr, opts.nu);
    m.k_s = opts.k_s;
    m.k_f = opts.k_f;
    m.phi0 = opts.phi0;
    m.permeability = opts.permeability;
    m.viscosity = opts.viscosity;
    m.rho_f = opts.rho_f;
    let materials = MaterialSet::new(vec![m])?;

    let sine = TimeFunction::Sine { amplitude: -opts.force, period: opts.period };
    let total_force = match opts.freeze_at {
        Some(after) => TimeFunction::Frozen { base: Box::new(sine), after, value: -opts.force },
        None => sine,
    };
    let loads = LoadSpec { tractions: vec![TractionLoad { side: Side::ZPlus, direction: [T::zero(), T::zero(), T::one()], total_force }], ..Default::default() };
    let boundary = BoundaryConditions::all_free()
        .set(Side::XMinus, MechanicalBc::Fixed)
        .set(Side::YMinus, MechanicalBc::Roller)
        .set(Side::YPlus, MechanicalBc::Roller);
    let scenario = Scenario {
        name: "cantilever".into(),
        mesh,
        materials,
        boundary,
        loads,
        initial_pressure: T::zero(),
        index_regions: vec![0],
        stabilization_regions: vec![0],
    };
    scenario.validate()?;
    Ok(scenario)
}
