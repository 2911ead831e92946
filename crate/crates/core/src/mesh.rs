//! Structured hexahedral grids.
//!
//! Cells, nodes and faces are numbered lexicographically with `i` (x) running
//! fastest, then `j` (y), then `k` (z). Local node numbering inside a cell is
//! the usual trilinear-brick convention:
//!
//! ```text
//!        7-------6
//!       /|      /|
//!      4-------5 |        z
//!      | 3-----|-2        |  y
//!      |/      |/         | /
//!      0-------1          |/___ x
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Offsets (in units of one cell) of the eight local nodes of a hexahedron.
pub const HEX_NODE_OFFSETS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

/// One of the six axis-aligned boundary planes of the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    XMinus,
    XPlus,
    YMinus,
    YPlus,
    ZMinus,
    ZPlus,
}

impl Side {
    pub const ALL: [Side; 6] = [Side::XMinus, Side::XPlus, Side::YMinus, Side::YPlus, Side::ZMinus, Side::ZPlus];

    pub fn axis(self) -> usize {
        match self {
            Side::XMinus | Side::XPlus => 0,
            Side::YMinus | Side::YPlus => 1,
            Side::ZMinus | Side::ZPlus => 2,
        }
    }

    pub fn is_plus(self) -> bool {
        matches!(self, Side::XPlus | Side::YPlus | Side::ZPlus)
    }

    pub fn token(self) -> &'static str {
        match self {
            Side::XMinus => "x-",
            Side::XPlus => "x+",
            Side::YMinus => "y-",
            Side::YPlus => "y+",
            Side::ZMinus => "z-",
            Side::ZPlus => "z+",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Side::ALL
            .into_iter()
            .find(|side| side.token() == s.trim())
            .ok_or_else(|| Error::config(format!("invalid boundary side '{s}' (expected one of x-, x+, y-, y+, z-, z+)")))
    }
}

/// A cell face: interior faces join two cells, boundary faces one.
#[derive(Debug, Clone, PartialEq)]
pub struct Face<T> {
    pub left: usize,
    /// Neighbour across the face, `None` on the domain boundary.
    pub right: Option<usize>,
    /// Boundary plane for boundary faces.
    pub side: Option<Side>,
    pub axis: usize,
    pub area: T,
    /// Centre-to-centre distance for interior faces, centre-to-face distance on the boundary.
    pub distance: T,
    /// Unit normal pointing from `left` to `right` (outward on the boundary).
    pub normal: [T; 3],
    /// The four grid nodes spanning the face.
    pub nodes: [usize; 4],
}

impl<T> Face<T> {
    pub fn is_interior(&self) -> bool {
        self.right.is_some()
    }
}

/// Faces and nodes lying on one boundary plane.
#[derive(Debug, Clone)]
pub struct BoundarySelection<T> {
    pub side: Side,
    pub faces: Vec<Face<T>>,
    pub nodes: Vec<usize>,
}

impl<T: Real> BoundarySelection<T> {
    pub fn total_area(&self) -> T {
        self.faces.iter().map(|f| f.area).sum()
    }
}

/// Axis-aligned structured hexahedral grid with uniform spacing per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredMesh<T> {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dx: T,
    pub dy: T,
    pub dz: T,
    pub origin: [T; 3],
    pub region_of_cell: Vec<usize>,
    faces: Vec<Face<T>>,
}

impl<T: Real> StructuredMesh<T> {
    /// Builds the grid and tags every cell `(i, j, k)` with `region_fn(i, j, k)`.
    pub fn build(
        counts: [usize; 3],
        spacing: [T; 3],
        region_fn: impl Fn(usize, usize, usize) -> usize,
    ) -> Result<Self> {
        let [nx, ny, nz] = counts;
        if counts.contains(&0) {
            return Err(Error::config(format!("cell counts must be positive, got {nx}x{ny}x{nz}")));
        }
        for (name, h) in ["dx", "dy", "dz"].iter().zip(spacing) {
            if !(h > T::zero()) || !h.is_finite() {
                return Err(Error::config(format!("{name} must be positive and finite, got {h}")));
            }
        }
        let mut mesh = StructuredMesh {
            nx,
            ny,
            nz,
            dx: spacing[0],
            dy: spacing[1],
            dz: spacing[2],
            origin: [T::zero(); 3],
            region_of_cell: Vec::with_capacity(nx * ny * nz),
            faces: Vec::new(),
        };
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    mesh.region_of_cell.push(region_fn(i, j, k));
                }
            }
        }
        mesh.faces = mesh.enumerate_faces();
        Ok(mesh)
    }

    pub fn with_origin(mut self, origin: [T; 3]) -> Self {
        self.origin = origin;
        self
    }

    pub fn counts(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn spacing(&self) -> [T; 3] {
        [self.dx, self.dy, self.dz]
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn n_nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1) * (self.nz + 1)
    }

    pub fn node_counts(&self) -> [usize; 3] {
        [self.nx + 1, self.ny + 1, self.nz + 1]
    }

    #[inline]
    pub fn cell_index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }

    #[inline]
    pub fn cell_ijk(&self, c: usize) -> [usize; 3] {
        [c % self.nx, (c / self.nx) % self.ny, c / (self.nx * self.ny)]
    }

    #[inline]
    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        i + (self.nx + 1) * (j + (self.ny + 1) * k)
    }

    #[inline]
    pub fn node_ijk(&self, n: usize) -> [usize; 3] {
        let (px, py) = (self.nx + 1, self.ny + 1);
        [n % px, (n / px) % py, n / (px * py)]
    }

    pub fn cell_nodes(&self, c: usize) -> [usize; 8] {
        let [i, j, k] = self.cell_ijk(c);
        HEX_NODE_OFFSETS.map(|[a, b, d]| self.node_index(i + a, j + b, k + d))
    }

    pub fn cell_volume(&self) -> T {
        self.dx * self.dy * self.dz
    }

    pub fn cell_center(&self, c: usize) -> [T; 3] {
        let ijk = self.cell_ijk(c);
        let h = self.spacing();
        let half = T::lit(0.5);
        [0, 1, 2].map(|a| self.origin[a] + (T::from_usize_lossy(ijk[a]) + half) * h[a])
    }

    pub fn node_coords(&self, n: usize) -> [T; 3] {
        let ijk = self.node_ijk(n);
        let h = self.spacing();
        [0, 1, 2].map(|a| self.origin[a] + T::from_usize_lossy(ijk[a]) * h[a])
    }

    /// All faces: interior faces first (x, then y, then z normal), then boundary faces by side.
    pub fn faces(&self) -> &[Face<T>] {
        &self.faces
    }

    pub fn interior_faces(&self) -> impl Iterator<Item = &Face<T>> {
        self.faces.iter().filter(|f| f.is_interior())
    }

    pub fn boundary_faces(&self) -> impl Iterator<Item = &Face<T>> {
        self.faces.iter().filter(|f| !f.is_interior())
    }

    /// Faces and nodes on one boundary plane.
    pub fn select_boundary(&self, side: Side) -> BoundarySelection<T> {
        let faces: Vec<Face<T>> = self.boundary_faces().filter(|f| f.side == Some(side)).cloned().collect();
        let axis = side.axis();
        let level = if side.is_plus() { self.counts()[axis] } else { 0 };
        let nodes = (0..self.n_nodes()).filter(|&n| self.node_ijk(n)[axis] == level).collect();
        BoundarySelection { side, faces, nodes }
    }

    /// `(-1)^(i+j+k)` on every cell.
    pub fn checkerboard_vector(&self) -> Vec<T> {
        (0..self.n_cells())
            .map(|c| {
                let [i, j, k] = self.cell_ijk(c);
                if (i + j + k) % 2 == 0 {
                    T::one()
                } else {
                    -T::one()
                }
            })
            .collect()
    }

    /// Cells whose region id is in `regions`.
    pub fn cells_in_regions(&self, regions: &[usize]) -> Vec<bool> {
        self.region_of_cell.iter().map(|r| regions.contains(r)).collect()
    }

    pub fn region_ids(&self) -> Vec<usize> {
        let mut ids = self.region_of_cell.clone();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    fn face_nodes(&self, c: usize, axis: usize, plus: bool) -> [usize; 4] {
        let [i, j, k] = self.cell_ijk(c);
        let base = [i, j, k];
        let mut out = [0; 4];
        let (a1, a2) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for (slot, (o1, o2)) in [(0, 0), (1, 0), (1, 1), (0, 1)].into_iter().enumerate() {
            let mut ijk = base;
            ijk[axis] += usize::from(plus);
            ijk[a1] += o1;
            ijk[a2] += o2;
            out[slot] = self.node_index(ijk[0], ijk[1], ijk[2]);
        }
        out
    }

    fn enumerate_faces(&self) -> Vec<Face<T>> {
        let h = self.spacing();
        let areas = [h[1] * h[2], h[0] * h[2], h[0] * h[1]];
        let counts = self.counts();
        let unit = |axis: usize, sign: T| {
            let mut n = [T::zero(); 3];
            n[axis] = sign;
            n
        };
        let mut faces = Vec::new();
        for axis in 0..3 {
            for c in 0..self.n_cells() {
                let ijk = self.cell_ijk(c);
                if ijk[axis] + 1 < counts[axis] {
                    let mut nb = ijk;
                    nb[axis] += 1;
                    faces.push(Face {
                        left: c,
                        right: Some(self.cell_index(nb[0], nb[1], nb[2])),
                        side: None,
                        axis,
                        area: areas[axis],
                        distance: h[axis],
                        normal: unit(axis, T::one()),
                        nodes: self.face_nodes(c, axis, true),
                    });
                }
            }
        }
        for side in Side::ALL {
            let axis = side.axis();
            let level = if side.is_plus() { counts[axis] - 1 } else { 0 };
            let sign = if side.is_plus() { T::one() } else { -T::one() };
            for c in 0..self.n_cells() {
                if self.cell_ijk(c)[axis] == level {
                    faces.push(Face {
                        left: c,
                        right: None,
                        side: Some(side),
                        axis,
                        area: areas[axis],
                        distance: h[axis] * T::lit(0.5),
                        normal: unit(axis, sign),
                        nodes: self.face_nodes(c, axis, side.is_plus()),
                    });
                }
            }
        }
        faces
    }
}
