//! Spiral channel embedded in an impermeable barrier.
//!
//! The horizontal plane is split into quadrants `q0 = (lo x, lo y)`,
//! `q1 = (hi x, lo y)`, `q2 = (hi x, hi y)`, `q3 = (lo x, hi y)` and the
//! height into four layers. Layer `L` is channel in `q_L ∪ q_{L+1 mod 4}`,
//! so consecutive layers share one quadrant and the channel climbs in a
//! spiral. Fluid is injected at the bottom of `q0`.

use crate::assembly::{LoadSpec, SourceTerm};
use crate::cases::{BoundaryConditions, MechanicalBc, Scenario};
use crate::error::{Error, Result};
use crate::materials::{MaterialSet, RegionMaterial};
use crate::mesh::{Side, StructuredMesh};
use crate::scalar::Real;

pub const CHANNEL: usize = 0;
pub const BARRIER: usize = 1;

const YEAR: f64 = 365.0 * 86_400.0;

#[derive(Debug, Clone, PartialEq)]
pub struct StaircaseOptions<T> {
    /// Cells per axis; must be a positive multiple of 4.
    pub n: usize,
    pub cell_size: T,
    pub k_dr: T,
    pub nu: T,
    pub channel_permeability: T,
    pub channel_phi0: T,
    pub barrier_phi0: T,
    pub viscosity: T,
    pub rho_f: T,
    /// kg/s
    pub injection_rate: T,
    pub injection_duration: T,
}

impl<T: Real> Default for StaircaseOptions<T> {
    fn default() -> Self {
        StaircaseOptions {
            n: 12,
            cell_size: T::lit(50.0),
            k_dr: T::lit(5.0e9),
            nu: T::lit(0.25),
            channel_permeability: T::lit(9.8e-13),
            channel_phi0: T::lit(0.2),
            barrier_phi0: T::lit(0.05),
            viscosity: T::lit(1.0e-3),
            rho_f: T::lit(1000.0),
            injection_rate: T::one(),
            injection_duration: T::lit(30.0 * YEAR),
        }
    }
}

/// Quadrant index of column `(i, j)` on an `n×n` plane.
fn quadrant(i: usize, j: usize, n: usize) -> usize {
    let (hx, hy) = (i >= n / 2, j >= n / 2);
    match (hx, hy) {
        (false, false) => 0,
        (true, false) => 1,
        (true, true) => 2,
        (false, true) => 3,
    }
}

/// Region id of cell `(i, j, k)` on an `n³` grid.
pub fn staircase_region(i: usize, j: usize, k: usize, n: usize) -> usize {
    let layer = (4 * k) / n;
    let q = quadrant(i, j, n);
    if q == layer || q == (layer + 1) % 4 {
        CHANNEL
    } else {
        BARRIER
    }
}

pub fn build_staircase<T: Real>(opts: &StaircaseOptions<T>) -> Result<Scenario<T>> {
    let n = opts.n;
    if n == 0 || n % 4 != 0 {
        return Err(Error::config(format!("staircase layout needs a cell count divisible by 4, got {n}")));
    }
    let h = opts.cell_size;
    let mesh = StructuredMesh::build([n, n, n], [h, h, h], |i, j, k| staircase_region(i, j, k, n))?;

    let mut channel = RegionMaterial::new("channel", opts.k_dr, opts.nu);
    channel.permeability = opts.channel_permeability;
    channel.phi0 = opts.channel_phi0;
    channel.viscosity = opts.viscosity;
    channel.rho_f = opts.rho_f;
    let mut barrier = RegionMaterial::new("barrier", opts.k_dr, opts.nu);
    barrier.phi0 = opts.barrier_phi0;
    barrier.viscosity = opts.viscosity;
    barrier.rho_f = opts.rho_f;
    let materials = MaterialSet::new(vec![channel, barrier])?;

    // 2×2 patch at the centre of q0 in the bottom layer
    let c = n / 4;
    let lo = c.saturating_sub(1);
    let cells = vec![mesh.cell_index(lo, lo, 0), mesh.cell_index(c, lo, 0), mesh.cell_index(lo, c, 0), mesh.cell_index(c, c, 0)];
    let loads = LoadSpec {
        sources: vec![SourceTerm { cells, mass_rate: opts.injection_rate, duration: Some(opts.injection_duration) }],
        ..Default::default()
    };
    let mut boundary = BoundaryConditions::all_free();
    for side in [Side::XMinus, Side::XPlus, Side::YMinus, Side::YPlus, Side::ZMinus] {
        boundary = boundary.set(side, MechanicalBc::Roller);
    }
    let scenario = Scenario {
        name: "staircase".into(),
        mesh,
        materials,
        boundary,
        loads,
        initial_pressure: T::zero(),
        index_regions: vec![BARRIER],
        stabilization_regions: vec![BARRIER],
    };
    scenario.validate()?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble_tpfa;

    #[test]
    fn two_regions_and_sealed_barrier() {
        let s = build_staircase::<f64>(&StaircaseOptions::default()).unwrap();
        assert_eq!(s.mesh.region_ids(), vec![CHANNEL, BARRIER]);
        let t = assemble_tpfa(&s.mesh, &s.materials).unwrap();
        for f in s.mesh.interior_faces() {
            let r = f.right.unwrap();
            if s.mesh.region_of_cell[f.left] == BARRIER || s.mesh.region_of_cell[r] == BARRIER {
                assert_eq!(t.get(f.left, r), 0.0);
            }
        }
        // half of every layer is channel
        let channel = s.mesh.region_of_cell.iter().filter(|&&r| r == CHANNEL).count();
        assert_eq!(channel, 12 * 12 * 12 / 2);
    }

    #[test]
    fn injection_cells_are_channel() {
        let s = build_staircase::<f64>(&StaircaseOptions::default()).unwrap();
        let cells = &s.loads.sources[0].cells;
        assert_eq!(cells.len(), 4);
        for &c in cells {
            assert_eq!(s.mesh.region_of_cell[c], CHANNEL);
            assert_eq!(s.mesh.cell_ijk(c)[2], 0);
        }
        let q = s.loads_at(1.0).unwrap().q_p;
        assert!(cells.iter().all(|&c| q[c] == 2.5e-4));
    }

    #[test]
    fn channel_climbs_through_shared_quadrants() {
        let n = 8;
        for layer in 0..3 {
            let k_lo = layer * n / 4 + n / 4 - 1;
            let shared = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).any(|(i, j)| {
                staircase_region(i, j, k_lo, n) == CHANNEL && staircase_region(i, j, k_lo + 1, n) == CHANNEL
            });
            assert!(shared);
        }
    }

    #[test]
    fn bad_layout_rejected() {
        let opts = StaircaseOptions { n: 10, ..Default::default() };
        assert!(build_staircase::<f64>(&opts).is_err());
    }
}
