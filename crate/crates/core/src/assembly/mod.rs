//! Discrete operators of the coupled system
//!
//! ```text
//! A u − Bᵀ p = Q_u
//! B u̇ + D ṗ + T p + S ṗ = Q_p
//! ```
//!
//! with displacement dofs numbered `3·node + component` and one pressure per cell.

mod element;
mod loads;

pub use element::{ElementStiffness, HexElement};
pub use loads::{LoadSpec, Loads, SourceTerm, TimeFunction, TractionLoad};

use crate::error::{Error, Result};
use crate::linsolve::{CsrMatrix, TripletBuilder};
use crate::materials::{compute_tau, MaterialSet, StabilizationConfig};
use crate::mesh::StructuredMesh;
use crate::scalar::Real;

/// Prescribed displacement dofs, sorted by dof with no duplicates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DirichletSet<T> {
    entries: Vec<(usize, T)>,
}

impl<T: Real> DirichletSet<T> {
    /// Merges `(dof, value)` pairs. The same dof may appear repeatedly only with the same value.
    pub fn new(mut entries: Vec<(usize, T)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, T)> = Vec::with_capacity(entries.len());
        for (d, v) in entries {
            match out.last() {
                Some(&(ld, lv)) if ld == d => {
                    if lv != v {
                        return Err(Error::config(format!("dof {d} prescribed twice with different values ({lv} and {v})")));
                    }
                }
                _ => out.push((d, v)),
            }
        }
        Ok(DirichletSet { entries: out })
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mask(&self, n_dofs: usize) -> Vec<bool> {
        let mut m = vec![false; n_dofs];
        for &(d, _) in &self.entries {
            m[d] = true;
        }
        m
    }

    /// Writes the prescribed values into `u`.
    pub fn impose(&self, u: &mut [T]) {
        for &(d, v) in &self.entries {
            u[d] = v;
        }
    }
}

/// Per-cell material coefficients gathered from the region tags.
#[derive(Debug, Clone, PartialEq)]
pub struct CellCoefficients<T> {
    pub volume: Vec<T>,
    pub biot: Vec<T>,
    pub k_dr: Vec<T>,
    pub inv_n: Vec<T>,
    pub inv_m: Vec<T>,
    pub phi0: Vec<T>,
    /// `φ₀/K_f`
    pub phi0_over_kf: Vec<T>,
}

impl<T: Real> CellCoefficients<T> {
    pub fn gather(mesh: &StructuredMesh<T>, materials: &MaterialSet<T>) -> Result<Self> {
        check_regions(mesh, materials)?;
        let n = mesh.n_cells();
        let v = mesh.cell_volume();
        let mut c = CellCoefficients {
            volume: vec![v; n],
            biot: Vec::with_capacity(n),
            k_dr: Vec::with_capacity(n),
            inv_n: Vec::with_capacity(n),
            inv_m: Vec::with_capacity(n),
            phi0: Vec::with_capacity(n),
            phi0_over_kf: Vec::with_capacity(n),
        };
        for &r in &mesh.region_of_cell {
            let m = materials.region(r);
            let d = materials.derived(r);
            c.biot.push(d.biot);
            c.k_dr.push(m.k_dr);
            c.inv_n.push(d.inv_n);
            c.inv_m.push(d.inv_m);
            c.phi0.push(m.phi0);
            c.phi0_over_kf.push(m.phi0 * m.k_f.compliance());
        }
        Ok(c)
    }
}

fn check_regions<T: Real>(mesh: &StructuredMesh<T>, materials: &MaterialSet<T>) -> Result<()> {
    if let Some(&r) = mesh.region_of_cell.iter().find(|&&r| r >= materials.len()) {
        return Err(Error::config(format!("cell region {r} has no material (only {} defined)", materials.len())));
    }
    Ok(())
}

/// Unconstrained Q1 elasticity stiffness, `(3·n_nodes)²`.
pub fn assemble_stiffness_unconstrained<T: Real>(mesh: &StructuredMesh<T>, materials: &MaterialSet<T>) -> Result<CsrMatrix<T>> {
    check_regions(mesh, materials)?;
    let pieces = HexElement::new(mesh.spacing()).stiffness()?;
    let per_region: Vec<Vec<[T; 24]>> = (0..materials.len())
        .map(|r| {
            let d = materials.derived(r);
            pieces.combine(d.lame, d.shear)
        })
        .collect();
    let n = 3 * mesh.n_nodes();
    let mut tb = TripletBuilder::with_capacity(n, n, mesh.n_cells() * 576);
    for c in 0..mesh.n_cells() {
        let ke = &per_region[mesh.region_of_cell[c]];
        let nodes = mesh.cell_nodes(c);
        for (a, &na) in nodes.iter().enumerate() {
            for i in 0..3 {
                let row = &ke[3 * a + i];
                for (b, &nb) in nodes.iter().enumerate() {
                    for j in 0..3 {
                        tb.push(3 * na + i, 3 * nb + j, row[3 * b + j]);
                    }
                }
            }
        }
    }
    Ok(tb.build())
}

/// Stiffness with the Dirichlet dofs eliminated symmetrically (unit diagonal).
pub fn assemble_stiffness<T: Real>(
    mesh: &StructuredMesh<T>,
    materials: &MaterialSet<T>,
    dirichlet: &DirichletSet<T>,
) -> Result<CsrMatrix<T>> {
    let mut a = assemble_stiffness_unconstrained(mesh, materials)?;
    let mut dummy = vec![T::zero(); a.nrows()];
    a.apply_dirichlet(dirichlet.entries(), &mut dummy);
    Ok(a)
}

/// Coupling `B(e, 3a+i) = b_e ∫_e ∂N_a/∂x_i dV`.
pub fn assemble_coupling<T: Real>(mesh: &StructuredMesh<T>, materials: &MaterialSet<T>) -> Result<CsrMatrix<T>> {
    check_regions(mesh, materials)?;
    let g = HexElement::new(mesh.spacing()).divergence_integrals();
    let mut tb = TripletBuilder::with_capacity(mesh.n_cells(), 3 * mesh.n_nodes(), 24 * mesh.n_cells());
    for c in 0..mesh.n_cells() {
        let b = materials.derived(mesh.region_of_cell[c]).biot;
        for (a, &na) in mesh.cell_nodes(c).iter().enumerate() {
            for i in 0..3 {
                tb.push(c, 3 * na + i, b * g[a][i]);
            }
        }
    }
    Ok(tb.build())
}

fn laplacian_from_faces<T: Real>(n: usize, weights: impl Iterator<Item = (usize, usize, T)>) -> CsrMatrix<T> {
    let mut tb = TripletBuilder::new(n, n);
    for c in 0..n {
        // keep the diagonal in the pattern even for isolated cells
        tb.push(c, c, T::zero());
    }
    for (l, r, w) in weights {
        if w != T::zero() {
            tb.push(l, l, w);
            tb.push(r, r, w);
            tb.push(l, r, -w);
            tb.push(r, l, -w);
        }
    }
    tb.build()
}

/// Interior-face transmissibility `t = (t_L t_R)/(t_L + t_R)` with half
/// transmissibilities `t_c = (κ_c/μ_c)·A/(d/2)`. Zero when either side is impermeable.
pub fn face_transmissibility<T: Real>(k_l: T, mu_l: T, k_r: T, mu_r: T, area: T, distance: T) -> T {
    let half = distance * T::lit(0.5);
    let tl = k_l / mu_l * area / half;
    let tr = k_r / mu_r * area / half;
    if tl == T::zero() || tr == T::zero() {
        return T::zero();
    }
    tl * tr / (tl + tr)
}

/// TPFA operator with no-flow boundaries.
pub fn assemble_tpfa<T: Real>(mesh: &StructuredMesh<T>, materials: &MaterialSet<T>) -> Result<CsrMatrix<T>> {
    check_regions(mesh, materials)?;
    let weights = mesh.interior_faces().map(|f| {
        let r = f.right.expect("interior face");
        let ml = materials.region(mesh.region_of_cell[f.left]);
        let mr = materials.region(mesh.region_of_cell[r]);
        (f.left, r, face_transmissibility(ml.permeability, ml.viscosity, mr.permeability, mr.viscosity, f.area, f.distance))
    });
    Ok(laplacian_from_faces(mesh.n_cells(), weights))
}

/// `τ` per region id; zero outside the stabilization mask or when disabled.
pub fn region_tau<T: Real>(materials: &MaterialSet<T>, stab: &StabilizationConfig<T>) -> Result<Vec<T>> {
    stab.validate()?;
    (0..materials.len())
        .map(|r| {
            if stab.is_inactive() || !stab.region_mask.contains(&r) {
                Ok(T::zero())
            } else {
                let d = materials.derived(r);
                compute_tau(d.lame, d.shear, stab.c)
            }
        })
        .collect()
}

/// Jump stabilization `S`: weight `τ_face·V_face` on interior faces whose two
/// cells are both masked; `τ_face` is the mean of the two regions' τ and
/// `V_face` the mean of the two cell volumes.
pub fn assemble_stabilization<T: Real>(
    mesh: &StructuredMesh<T>,
    materials: &MaterialSet<T>,
    stab: &StabilizationConfig<T>,
) -> Result<CsrMatrix<T>> {
    check_regions(mesh, materials)?;
    let tau = region_tau(materials, stab)?;
    let inactive = stab.is_inactive();
    let half = T::lit(0.5);
    let v = mesh.cell_volume();
    let weights = mesh.interior_faces().filter_map(|f| {
        let r = f.right.expect("interior face");
        let (rl, rr) = (mesh.region_of_cell[f.left], mesh.region_of_cell[r]);
        if inactive || !stab.region_mask.contains(&rl) || !stab.region_mask.contains(&rr) {
            return None;
        }
        let v_face = half * (v + v);
        Some((f.left, r, half * (tau[rl] + tau[rr]) * v_face))
    });
    Ok(laplacian_from_faces(mesh.n_cells(), weights))
}

/// Node traversal with the axis having the fewest nodes running fastest.
fn node_sweep<T: Real>(mesh: &StructuredMesh<T>) -> Vec<usize> {
    let counts = mesh.node_counts();
    let mut axes = [0usize, 1, 2];
    axes.sort_by_key(|&a| counts[a]);
    let mut order = Vec::with_capacity(mesh.n_nodes());
    for c2 in 0..counts[axes[2]] {
        for c1 in 0..counts[axes[1]] {
            for c0 in 0..counts[axes[0]] {
                let mut ijk = [0usize; 3];
                ijk[axes[0]] = c0;
                ijk[axes[1]] = c1;
                ijk[axes[2]] = c2;
                order.push(mesh.node_index(ijk[0], ijk[1], ijk[2]));
            }
        }
    }
    order
}

/// Elimination order (`perm[new] = old`) for displacement-only systems.
pub fn displacement_ordering<T: Real>(mesh: &StructuredMesh<T>) -> Vec<usize> {
    node_sweep(mesh).into_iter().flat_map(|n| [3 * n, 3 * n + 1, 3 * n + 2]).collect()
}

/// Elimination order for the coupled `[u; p]` system: nodes in a banded sweep,
/// each cell pressure placed right after the last of its eight nodes so that no
/// zero pivot is met when the pressure block vanishes.
pub fn saddle_ordering<T: Real>(mesh: &StructuredMesh<T>) -> Vec<usize> {
    let n_u = 3 * mesh.n_nodes();
    let mut perm = Vec::with_capacity(n_u + mesh.n_cells());
    for n in node_sweep(mesh) {
        perm.extend([3 * n, 3 * n + 1, 3 * n + 2]);
        let [i, j, k] = mesh.node_ijk(n);
        if i > 0 && j > 0 && k > 0 {
            perm.push(n_u + mesh.cell_index(i - 1, j - 1, k - 1));
        }
    }
    perm
}

/// Every time-independent operator of one scenario.
#[derive(Debug, Clone)]
pub struct AssembledSystem<T> {
    pub n_nodes: usize,
    pub n_cells: usize,
    /// Stiffness before Dirichlet elimination.
    pub a: CsrMatrix<T>,
    pub b: CsrMatrix<T>,
    pub t: CsrMatrix<T>,
    pub s: CsrMatrix<T>,
    /// Diagonal of `D_fim = V/M`.
    pub d_fim: Vec<T>,
    /// Diagonal of `D_fs = V (1/M + b²/K_dr)`.
    pub d_fs: Vec<T>,
    pub cells: CellCoefficients<T>,
    pub dirichlet: DirichletSet<T>,
}

impl<T: Real> AssembledSystem<T> {
    pub fn assemble(
        mesh: &StructuredMesh<T>,
        materials: &MaterialSet<T>,
        stab: &StabilizationConfig<T>,
        dirichlet: DirichletSet<T>,
    ) -> Result<Self> {
        let n_u = 3 * mesh.n_nodes();
        if let Some(&(d, _)) = dirichlet.entries().last() {
            if d >= n_u {
                return Err(Error::config(format!("Dirichlet dof {d} out of range ({n_u} displacement dofs)")));
            }
        }
        let cells = CellCoefficients::gather(mesh, materials)?;
        let d_fim = cells.volume.iter().zip(&cells.inv_m).map(|(&v, &im)| v * im).collect();
        let d_fs = (0..mesh.n_cells())
            .map(|c| cells.volume[c] * (cells.inv_m[c] + cells.biot[c] * cells.biot[c] / cells.k_dr[c]))
            .collect();
        Ok(AssembledSystem {
            n_nodes: mesh.n_nodes(),
            n_cells: mesh.n_cells(),
            a: assemble_stiffness_unconstrained(mesh, materials)?,
            b: assemble_coupling(mesh, materials)?,
            t: assemble_tpfa(mesh, materials)?,
            s: assemble_stabilization(mesh, materials, stab)?,
            d_fim,
            d_fs,
            cells,
            dirichlet,
        })
    }

    pub fn n_u(&self) -> usize {
        3 * self.n_nodes
    }

    /// Cell-averaged volumetric strain `ε_e = (B u)_e / (b_e V_e)`.
    pub fn volumetric_strain(&self, u: &[T]) -> Vec<T> {
        let bu = self.b.mul_vec(u);
        bu.iter().enumerate().map(|(c, &v)| v / (self.cells.biot[c] * self.cells.volume[c])).collect()
    }

    /// `σ_v = K_dr ε_v − b p` per cell.
    pub fn volumetric_stress(&self, eps_v: &[T], p: &[T]) -> Vec<T> {
        (0..self.n_cells).map(|c| self.cells.k_dr[c] * eps_v[c] - self.cells.biot[c] * p[c]).collect()
    }

    pub fn has_stabilization(&self) -> bool {
        self.s.values().iter().any(|v| *v != T::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::RegionMaterial;

    fn unit_materials(kappa: f64) -> MaterialSet<f64> {
        let mut m = RegionMaterial::new("r", 5.0e9, 0.25);
        m.permeability = kappa;
        m.viscosity = 1.0;
        MaterialSet::new(vec![m]).unwrap()
    }

    #[test]
    fn two_cell_transmissibility() {
        let mesh = StructuredMesh::build([2, 1, 1], [1.0, 1.0, 1.0], |_, _, _| 0).unwrap();
        let t = assemble_tpfa(&mesh, &unit_materials(1.0)).unwrap();
        assert_eq!(t.get(0, 1), -1.0);
        assert_eq!(t.get(0, 0), 1.0);
    }

    #[test]
    fn impermeable_has_no_transmissibility() {
        let mesh = StructuredMesh::build([3, 2, 1], [1.0, 1.0, 1.0], |_, _, _| 0).unwrap();
        let t = assemble_tpfa(&mesh, &unit_materials(0.0)).unwrap();
        assert_eq!(t.max_abs(), 0.0);
    }

    #[test]
    fn unit_cube_divergence() {
        let mesh = StructuredMesh::build([1, 1, 1], [1.0, 1.0, 1.0], |_, _, _| 0).unwrap();
        let b = assemble_coupling(&mesh, &unit_materials(0.0)).unwrap();
        let u: Vec<f64> = (0..8).flat_map(|n| [mesh.node_coords(n)[0], 0.0, 0.0]).collect();
        assert!((b.mul_vec(&u)[0] - 1.0).abs() < 1e-15);
        let translation: Vec<f64> = (0..8).flat_map(|_| [0.3, -1.0, 2.0]).collect();
        assert!(b.mul_vec(&translation)[0].abs() < 1e-15);
    }

    #[test]
    fn saddle_ordering_is_a_permutation() {
        let mesh = StructuredMesh::<f64>::build([3, 1, 2], [1.0, 1.0, 1.0], |_, _, _| 0).unwrap();
        let mut perm = saddle_ordering(&mesh);
        let n = 3 * mesh.n_nodes() + mesh.n_cells();
        let pos_of_cell0 = perm.iter().position(|&d| d == 3 * mesh.n_nodes()).unwrap();
        for node in mesh.cell_nodes(0) {
            assert!(perm.iter().position(|&d| d == 3 * node).unwrap() < pos_of_cell0);
        }
        perm.sort_unstable();
        assert_eq!(perm, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn conflicting_dirichlet_rejected() {
        assert!(DirichletSet::new(vec![(1, 0.0), (1, 1.0)]).is_err());
        let d = DirichletSet::new(vec![(4, 0.0), (1, 0.0), (4, 0.0)]).unwrap();
        assert_eq!(d.entries(), &[(1, 0.0), (4, 0.0)]);
    }

    #[test]
    fn stabilization_needs_both_cells_masked() {
        let mesh = StructuredMesh::build([3, 1, 1], [1.0, 1.0, 1.0], |i, _, _| usize::from(i == 2)).unwrap();
        let mats = MaterialSet::new(vec![RegionMaterial::new("a", 5.0e9, 0.25), RegionMaterial::new("b", 5.0e9, 0.25)]).unwrap();
        let s = assemble_stabilization(&mesh, &mats, &StabilizationConfig::hexahedral(vec![0])).unwrap();
        let tau: f64 = 1.875e-11;
        assert!((s.get(0, 1) + tau).abs() < 1e-25);
        assert_eq!(s.get(1, 2), 0.0);
        let off = assemble_stabilization(&mesh, &mats, &StabilizationConfig::disabled()).unwrap();
        assert_eq!(off.max_abs(), 0.0);
    }
}
