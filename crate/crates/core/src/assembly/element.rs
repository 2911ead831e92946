//! Trilinear (Q1) brick element on an axis-aligned cell.

use crate::error::{Error, Result};
use crate::mesh::HEX_NODE_OFFSETS;
use crate::scalar::Real;

/// `±1/√3`
const GAUSS_2: f64 = 0.577_350_269_189_625_8;

/// Geometry of one axis-aligned brick of size `h = [dx, dy, dz]`.
#[derive(Debug, Clone, Copy)]
pub struct HexElement<T> {
    pub h: [T; 3],
}

/// Stiffness split by modulus: `K_e = λ·k_lambda + G·k_shear`.
#[derive(Debug, Clone)]
pub struct ElementStiffness<T> {
    pub k_lambda: Vec<[T; 24]>,
    pub k_shear: Vec<[T; 24]>,
}

impl<T: Real> ElementStiffness<T> {
    pub fn combine(&self, lame: T, shear: T) -> Vec<[T; 24]> {
        self.k_lambda
            .iter()
            .zip(&self.k_shear)
            .map(|(kl, kg)| {
                let mut row = [T::zero(); 24];
                for c in 0..24 {
                    row[c] = lame * kl[c] + shear * kg[c];
                }
                row
            })
            .collect()
    }
}

fn reference_sign<T: Real>(offset: usize) -> T {
    if offset == 1 {
        T::one()
    } else {
        -T::one()
    }
}

impl<T: Real> HexElement<T> {
    pub fn new(h: [T; 3]) -> Self {
        HexElement { h }
    }

    pub fn volume(&self) -> T {
        self.h[0] * self.h[1] * self.h[2]
    }

    /// Jacobian determinant of the map from `[-1, 1]³`.
    pub fn jacobian_det(&self) -> T {
        self.volume() / T::lit(8.0)
    }

    /// Physical gradients of the eight shape functions at reference point `xi`.
    pub fn shape_gradients(&self, xi: [T; 3]) -> [[T; 3]; 8] {
        let one = T::one();
        let eighth = T::lit(0.125);
        let mut g = [[T::zero(); 3]; 8];
        for (a, off) in HEX_NODE_OFFSETS.iter().enumerate() {
            let s: [T; 3] = [reference_sign(off[0]), reference_sign(off[1]), reference_sign(off[2])];
            let f = [one + s[0] * xi[0], one + s[1] * xi[1], one + s[2] * xi[2]];
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                g[a][i] = eighth * s[i] * f[j] * f[k] * T::lit(2.0) / self.h[i];
            }
        }
        g
    }

    /// `∫_e ∂N_a/∂x_i dV`, evaluated in closed form: `±(h_j h_k)/4`.
    pub fn divergence_integrals(&self) -> [[T; 3]; 8] {
        let quarter = T::lit(0.25);
        let faces = [self.h[1] * self.h[2], self.h[0] * self.h[2], self.h[0] * self.h[1]];
        HEX_NODE_OFFSETS.map(|off| [0, 1, 2].map(|i| reference_sign::<T>(off[i]) * faces[i] * quarter))
    }

    /// 24×24 stiffness pieces by 2×2×2 Gauss quadrature; local dof `3a + i`.
    pub fn stiffness(&self) -> Result<ElementStiffness<T>> {
        let det = self.jacobian_det();
        if !(det > T::zero()) {
            return Err(Error::config(format!("degenerate element: Jacobian determinant {det}")));
        }
        let g = T::lit(GAUSS_2);
        let mut k_lambda = vec![[T::zero(); 24]; 24];
        let mut k_shear = vec![[T::zero(); 24]; 24];
        for gp in HEX_NODE_OFFSETS {
            let xi = [0, 1, 2].map(|i| reference_sign::<T>(gp[i]) * g);
            let grads = self.shape_gradients(xi);
            // unit weights in 2-point Gauss
            for a in 0..8 {
                for b in 0..8 {
                    let ga = grads[a];
                    let gb = grads[b];
                    let dot = ga[0] * gb[0] + ga[1] * gb[1] + ga[2] * gb[2];
                    for i in 0..3 {
                        for j in 0..3 {
                            // λ (div v)(div u)
                            k_lambda[3 * a + i][3 * b + j] += det * ga[i] * gb[j];
                            // 2G ε(v):ε(u) = G (∂_j v_i ∂_j u_i + ∂_i v_j ∂_j u_i)
                            let mut v = ga[j] * gb[i];
                            if i == j {
                                v += dot;
                            }
                            k_shear[3 * a + i][3 * b + j] += det * v;
                        }
                    }
                }
            }
        }
        Ok(ElementStiffness { k_lambda, k_shear })
    }
}
