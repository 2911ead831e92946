//! Amplification factor of the explicit fixed-stress scheme with jump
//! stabilization for the 1D drained problem.

use crate::error::{Error, Result};
use crate::materials::Modulus;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonNeumannParams<T> {
    /// Biot modulus `M` (Pa).
    pub m_biot: Modulus<T>,
    pub b: T,
    pub k_dr: T,
    /// Permeability (m²).
    pub k: T,
    pub mu: T,
    pub dx: T,
    pub dt: T,
    pub tau: T,
    /// Wave angle in `[0, π]`.
    pub theta: T,
}

impl<T: Real> VonNeumannParams<T> {
    pub fn validate(&self) -> Result<()> {
        let z = T::zero();
        if !(self.dx > z && self.dt > z) {
            return Err(Error::config("dx and dt must be positive"));
        }
        if !(self.tau >= z && self.k >= z) {
            return Err(Error::config("tau and k must be non-negative"));
        }
        if !(self.mu > z && self.k_dr > z && self.b > z) {
            return Err(Error::config("mu, K_dr and b must be positive"));
        }
        if let Modulus::Finite(m) = self.m_biot {
            if !(m > z) {
                return Err(Error::config("Biot modulus must be positive"));
            }
        }
        if !(self.theta >= z && self.theta <= T::PI()) {
            return Err(Error::config(format!("theta = {} outside [0, pi]", self.theta)));
        }
        Ok(())
    }
}

/// Nonzero root `γ` of the amplification matrix determinant:
///
/// ```text
///            δx²μ(K_dr/M + b²) + 2μK_dr δx³ τ (1 − cos θ)
/// γ = ─────────────────────────────────────────────────────────────────────
///     δx²μ(K_dr/M + b²) + 2K_dr δt k (1 − cos θ) + 2μK_dr δx³ τ (1 − cos θ)
/// ```
///
/// i.e. the usual closed form divided through by `M`, so `M = ∞` is exact.
pub fn amplification_factor<T: Real>(p: &VonNeumannParams<T>) -> Result<T> {
    p.validate()?;
    let two = T::lit(2.0);
    let one_minus_cos = T::one() - p.theta.cos();
    let dx2 = p.dx * p.dx;
    let num = dx2 * p.mu * (p.k_dr * p.m_biot.compliance() + p.b * p.b) + two * p.mu * p.k_dr * dx2 * p.dx * p.tau * one_minus_cos;
    let drain = two * p.k_dr * p.dt * p.k * one_minus_cos;
    Ok(num / (num + drain))
}

/// Axes of a stability sweep. Every other parameter is fixed by `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid<T> {
    pub base: VonNeumannParams<T>,
    pub thetas: Vec<T>,
    pub dts: Vec<T>,
    pub taus: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub theta: T,
    pub dt: T,
    pub tau: T,
    pub gamma: T,
}

/// Evaluates γ over the tensor grid (θ slowest, τ fastest) and checks `γ ≤ 1`.
pub fn stability_sweep<T: Real>(grid: &SweepGrid<T>) -> Result<Vec<SweepRow<T>>> {
    let mut rows = Vec::with_capacity(grid.thetas.len() * grid.dts.len() * grid.taus.len());
    for &theta in &grid.thetas {
        for &dt in &grid.dts {
            for &tau in &grid.taus {
                let params = VonNeumannParams { theta, dt, tau, ..grid.base };
                let gamma = amplification_factor(&params)?;
                if gamma > T::one() {
                    return Err(Error::Certification(format!("gamma = {gamma} > 1 at theta={theta}, dt={dt}, tau={tau}")));
                }
                rows.push(SweepRow { theta, dt, tau, gamma });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> VonNeumannParams<f64> {
        VonNeumannParams {
            m_biot: Modulus::Finite(1.0e10),
            b: 1.0,
            k_dr: 5.0e9,
            k: 1.0e-13,
            mu: 1.0e-3,
            dx: 1.0,
            dt: 86_400.0,
            tau: 0.0,
            theta: std::f64::consts::PI,
        }
    }

    #[test]
    fn constant_mode_is_neutral() {
        let p = VonNeumannParams { theta: 0.0, tau: 1e-11, ..base() };
        assert_eq!(amplification_factor(&p).unwrap(), 1.0);
    }

    #[test]
    fn undrained_is_neutral() {
        for theta in [0.1, 1.0, 3.0] {
            let p = VonNeumannParams { k: 0.0, theta, ..base() };
            assert_eq!(amplification_factor(&p).unwrap(), 1.0);
        }
    }

    #[test]
    fn incompressible_limit_matches_large_modulus() {
        let inf = VonNeumannParams { m_biot: Modulus::Incompressible, ..base() };
        let big = VonNeumannParams { m_biot: Modulus::Finite(1.0e30), ..base() };
        let (a, b) = (amplification_factor(&inf).unwrap(), amplification_factor(&big).unwrap());
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn undivided_form_agrees() {
        let p = VonNeumannParams { tau: 1.875e-11, theta: 2.0, ..base() };
        let m = 1.0e10;
        let c = 1.0 - p.theta.cos();
        let (dx, mu, k, dt, kd, b, tau) = (p.dx, p.mu, p.k, p.dt, p.k_dr, p.b, p.tau);
        let num = dx * dx * mu * (kd + m * b * b) + 2.0 * mu * kd * m * dx.powi(3) * tau * c;
        let den = num + 2.0 * kd * m * dt * k * c;
        let g = amplification_factor(&p).unwrap();
        assert!((g - num / den).abs() <= 1e-14 * g);
    }

    #[test]
    fn invalid_theta() {
        let p = VonNeumannParams { theta: 4.0, ..base() };
        assert!(amplification_factor(&p).is_err());
    }
}
