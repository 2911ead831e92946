//! Stability diagnostics: the 1D amplification factor, the checkerboard
//! oscillation index and null-space certificates of the coupling operator.

mod von_neumann;

pub use von_neumann::{amplification_factor, stability_sweep, SweepGrid, SweepRow, VonNeumannParams};

use crate::error::{Error, Result};
use crate::linsolve::CsrMatrix;
use crate::mesh::StructuredMesh;
use crate::scalar::Real;

/// Index above which a field is called oscillatory.
pub const OSCILLATORY_THRESHOLD: f64 = 0.5;
/// Index below which a field is called smooth.
pub const SMOOTH_THRESHOLD: f64 = 0.1;

fn jump_quotient<T: Real>(p: &[T], mesh: &StructuredMesh<T>, mask: &[bool]) -> (T, T) {
    let mut jumps = T::zero();
    for f in mesh.interior_faces() {
        let r = f.right.expect("interior face");
        if mask[f.left] && mask[r] {
            let d = p[f.left] - p[r];
            jumps += d * d;
        }
    }
    let (mut sum, mut count) = (T::zero(), 0usize);
    for (c, &v) in p.iter().enumerate() {
        if mask[c] {
            sum += v;
            count += 1;
        }
    }
    let mean = sum / T::from_usize_lossy(count);
    let var = p.iter().zip(mask).filter(|(_, &m)| m).map(|(&v, _)| (v - mean) * (v - mean)).sum();
    (jumps, var)
}

/// Face-jump energy over cell variance inside `mask`, relative to the same
/// ratio for the checkerboard. Checkerboard gives 1, smooth fields are near 0,
/// a constant field gives 0. Clamped to `[0, 1]`.
pub fn oscillation_index<T: Real>(p: &[T], mesh: &StructuredMesh<T>, mask: &[bool]) -> Result<T> {
    if p.len() != mesh.n_cells() || mask.len() != mesh.n_cells() {
        return Err(Error::config("pressure field and mask must have one entry per cell"));
    }
    if !mask.iter().any(|&m| m) {
        return Err(Error::config("oscillation index: empty region mask"));
    }
    let (cb_jumps, cb_var) = jump_quotient(&mesh.checkerboard_vector(), mesh, mask);
    if cb_jumps == T::zero() || cb_var == T::zero() {
        return Err(Error::config("oscillation index: no interior face inside the mask"));
    }
    let (jumps, var) = jump_quotient(p, mesh, mask);
    if var == T::zero() {
        return Ok(T::zero());
    }
    let index = (jumps / var) / (cb_jumps / cb_var);
    Ok(index.max(T::zero()).min(T::one()))
}

/// Displacement dofs of nodes strictly inside the grid along every axis that
/// has at least two cells (a single-layer axis imposes no condition). With a
/// mask, every cell touching the node must be masked as well.
pub fn interior_node_dofs<T: Real>(mesh: &StructuredMesh<T>, cell_mask: Option<&[bool]>) -> Vec<usize> {
    let counts = mesh.counts();
    let mut dofs = Vec::new();
    for n in 0..mesh.n_nodes() {
        let ijk = mesh.node_ijk(n);
        let inside = (0..3).all(|a| counts[a] < 2 || (ijk[a] > 0 && ijk[a] < counts[a]));
        if !inside {
            continue;
        }
        if let Some(mask) = cell_mask {
            if !touching_cells(mesh, ijk).iter().all(|&c| mask[c]) {
                continue;
            }
        }
        dofs.extend([3 * n, 3 * n + 1, 3 * n + 2]);
    }
    dofs
}

fn touching_cells<T: Real>(mesh: &StructuredMesh<T>, ijk: [usize; 3]) -> Vec<usize> {
    let counts = mesh.counts();
    let range = |a: usize| {
        let lo = ijk[a].saturating_sub(1);
        let hi = ijk[a].min(counts[a] - 1);
        lo..=hi
    };
    let mut cells = Vec::with_capacity(8);
    for k in range(2) {
        for j in range(1) {
            for i in range(0) {
                cells.push(mesh.cell_index(i, j, k));
            }
        }
    }
    cells
}

/// `max_d |(Bᵀ p_mode)_d|` over the given displacement dofs.
pub fn nullspace_residual<T: Real>(b: &CsrMatrix<T>, p_mode: &[T], dofs: &[usize]) -> T {
    let g = b.mul_transpose_vec(p_mode);
    dofs.iter().fold(T::zero(), |m, &d| m.max(g[d].abs()))
}

/// Checkerboard certificate restricted to `mask` (all cells when `None`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate<T> {
    pub residual: T,
    pub checked_dofs: usize,
}

pub fn checkerboard_certificate<T: Real>(mesh: &StructuredMesh<T>, b: &CsrMatrix<T>, mask: Option<&[bool]>) -> Result<Certificate<T>> {
    let dofs = interior_node_dofs(mesh, mask);
    if dofs.is_empty() {
        return Err(Error::Certification("no interior displacement dofs to certify".into()));
    }
    let mut mode = mesh.checkerboard_vector();
    if let Some(m) = mask {
        for (v, &inside) in mode.iter_mut().zip(m) {
            if !inside {
                *v = T::zero();
            }
        }
    }
    Ok(Certificate { residual: nullspace_residual(b, &mode, &dofs), checked_dofs: dofs.len() })
}
