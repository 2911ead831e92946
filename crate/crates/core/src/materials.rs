//! Poroelastic and fluid constants per region.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A bulk modulus that may be exactly infinite (incompressible constituent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Modulus<T> {
    Finite(T),
    Incompressible,
}

impl<T: Real> Modulus<T> {
    /// `1/K`, exactly zero for an incompressible constituent.
    pub fn compliance(self) -> T {
        match self {
            Modulus::Finite(k) => T::one() / k,
            Modulus::Incompressible => T::zero(),
        }
    }

    pub fn is_incompressible(self) -> bool {
        matches!(self, Modulus::Incompressible)
    }
}

/// Constants of one material region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMaterial<T> {
    pub name: String,
    /// Drained bulk modulus (Pa).
    pub k_dr: T,
    pub nu: T,
    /// Solid grain bulk modulus.
    pub k_s: Modulus<T>,
    /// Fluid bulk modulus.
    pub k_f: Modulus<T>,
    pub phi0: T,
    /// Isotropic permeability (m²).
    pub permeability: T,
    /// Fluid viscosity (Pa·s).
    pub viscosity: T,
    pub rho_f: T,
    pub rho_s: T,
}

/// Quantities derived from a [`RegionMaterial`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedModuli<T> {
    pub shear: T,
    pub lame: T,
    pub biot: T,
    /// `1/N = (b - φ₀)/K_s`
    pub inv_n: T,
    /// `1/M = 1/N + φ₀/K_f`
    pub inv_m: T,
}

impl<T: Real> RegionMaterial<T> {
    /// Water-saturated defaults used by the benchmark builders.
    pub fn new(name: impl Into<String>, k_dr: T, nu: T) -> Self {
        RegionMaterial {
            name: name.into(),
            k_dr,
            nu,
            k_s: Modulus::Incompressible,
            k_f: Modulus::Incompressible,
            phi0: T::lit(0.05),
            permeability: T::zero(),
            viscosity: T::lit(1.0e-3),
            rho_f: T::lit(1000.0),
            rho_s: T::lit(2700.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::config(format!("region '{}': {what}", self.name)));
        if !(self.k_dr > T::zero()) {
            return bad("drained bulk modulus must be positive");
        }
        if self.nu >= T::lit(0.5) {
            return bad("Poisson ratio >= 0.5 (incompressible skeleton) is not supported");
        }
        if !(self.nu > -T::one()) {
            return bad("Poisson ratio must exceed -1");
        }
        if !(self.phi0 > T::zero() && self.phi0 < T::one()) {
            return bad("reference porosity must lie in (0, 1)");
        }
        if !(self.permeability >= T::zero()) {
            return bad("permeability must be non-negative");
        }
        if !(self.viscosity > T::zero()) || !(self.rho_f > T::zero()) {
            return bad("fluid viscosity and density must be positive");
        }
        for (label, m) in [("K_s", self.k_s), ("K_f", self.k_f)] {
            if let Modulus::Finite(k) = m {
                if !(k > T::zero()) || !k.is_finite() {
                    return bad(&format!("{label} must be positive and finite (use Incompressible for infinity)"));
                }
            }
        }
        let b = T::one() - self.k_dr * self.k_s.compliance();
        if !(b > T::zero() && b <= T::one()) {
            return bad("Biot coefficient 1 - K_dr/K_s must lie in (0, 1]");
        }
        Ok(())
    }

    /// Shear and Lamé moduli, Biot coefficient and storage compliances.
    pub fn derive_moduli(&self) -> Result<DerivedModuli<T>> {
        self.validate()?;
        let (one, two, three) = (T::one(), T::lit(2.0), T::lit(3.0));
        let shear = three * self.k_dr * (one - two * self.nu) / (two * (one + self.nu));
        let lame = self.k_dr - two * shear / three;
        let biot = match self.k_s {
            Modulus::Incompressible => one,
            Modulus::Finite(ks) => one - self.k_dr / ks,
        };
        let inv_n = (biot - self.phi0) * self.k_s.compliance();
        let inv_m = inv_n + self.phi0 * self.k_f.compliance();
        Ok(DerivedModuli { shear, lame, biot, inv_n, inv_m })
    }
}

/// Materials indexed by region id.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialSet<T> {
    regions: Vec<RegionMaterial<T>>,
    derived: Vec<DerivedModuli<T>>,
}

impl<T: Real> MaterialSet<T> {
    pub fn new(regions: Vec<RegionMaterial<T>>) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::config("at least one material region is required"));
        }
        let derived = regions.iter().map(RegionMaterial::derive_moduli).collect::<Result<_>>()?;
        Ok(MaterialSet { regions, derived })
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn region(&self, id: usize) -> &RegionMaterial<T> {
        &self.regions[id]
    }

    pub fn derived(&self, id: usize) -> &DerivedModuli<T> {
        &self.derived[id]
    }

    pub fn regions(&self) -> &[RegionMaterial<T>] {
        &self.regions
    }

    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.regions.iter().position(|r| r.name == name)
    }
}

/// Pressure-jump stabilization settings.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizationConfig<T> {
    pub enabled: bool,
    /// Element-topology constant (1 for hexahedra).
    pub c: T,
    /// Region ids where stabilization applies; a face is stabilized only if both cells are listed.
    pub region_mask: Vec<usize>,
}

impl<T: Real> StabilizationConfig<T> {
    pub fn disabled() -> Self {
        StabilizationConfig { enabled: false, c: T::one(), region_mask: Vec::new() }
    }

    pub fn hexahedral(region_mask: Vec<usize>) -> Self {
        StabilizationConfig { enabled: true, c: T::one(), region_mask }
    }

    pub fn validate(&self) -> Result<()> {
        if self.enabled && !(self.c > T::zero()) {
            return Err(Error::config("stabilization constant c must be positive when enabled"));
        }
        Ok(())
    }

    /// True when the operator would be identically zero.
    pub fn is_inactive(&self) -> bool {
        !self.enabled || self.c == T::zero() || self.region_mask.is_empty()
    }
}

/// Stabilization parameter `τ = c · 9 / (32 (λ + 4G))` in Pa⁻¹.
pub fn compute_tau<T: Real>(lame: T, shear: T, c: T) -> Result<T> {
    let denom = lame + T::lit(4.0) * shear;
    if !(denom > T::zero()) {
        return Err(Error::config(format!("lambda + 4G must be positive, got {denom}")));
    }
    if c < T::zero() {
        return Err(Error::config("stabilization constant c must be non-negative"));
    }
    Ok(c * T::lit(9.0) / (T::lit(32.0) * denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cantilever_moduli() {
        let m = RegionMaterial::<f64>::new("skeleton", 5.0e9, 0.25);
        let d = m.derive_moduli().unwrap();
        assert!((d.shear - 3.0e9).abs() < 1e-3);
        assert!((d.lame - 3.0e9).abs() < 1e-3);
        assert_eq!(d.biot, 1.0);
        assert_eq!(d.inv_n, 0.0);
        assert_eq!(d.inv_m, 0.0);
    }

    #[test]
    fn field_scale_shear() {
        let d = RegionMaterial::<f64>::new("aquifer", 9.4e9, 0.25).derive_moduli().unwrap();
        assert!((d.shear - 5.64e9).abs() / 5.64e9 < 1e-14);
    }

    #[test]
    fn compressible_constituents() {
        let mut m = RegionMaterial::<f64>::new("drained", 5.0e9, 0.25);
        m.k_s = Modulus::Finite(40.0e9);
        m.k_f = Modulus::Finite(2.0e9);
        let d = m.derive_moduli().unwrap();
        assert!((d.biot - 0.875).abs() < 1e-15);
        let inv_n = (0.875 - 0.05) / 40.0e9;
        assert!((d.inv_n - inv_n).abs() / inv_n < 1e-14);
        assert!((d.inv_m - (inv_n + 0.05 / 2.0e9)).abs() / d.inv_m < 1e-14);
    }

    #[test]
    fn incompressible_skeleton_rejected() {
        let m = RegionMaterial::<f64>::new("bad", 5.0e9, 0.5);
        assert!(matches!(m.derive_moduli(), Err(Error::Config(_))));
    }

    #[test]
    fn tau_examples() {
        assert!((compute_tau::<f64>(3.0e9, 3.0e9, 1.0).unwrap() - 1.875e-11).abs() < 1e-25);
        assert_eq!(compute_tau::<f64>(3.0e9, 3.0e9, 0.0).unwrap(), 0.0);
        assert!((compute_tau::<f64>(3.0e9, 3.0e9, 3.0).unwrap() - 5.625e-11).abs() < 1e-25);
        assert!(compute_tau(-5.0e9, 1.0e9, 1.0).is_err());
    }

    #[test]
    fn single_precision_moduli() {
        let d = RegionMaterial::<f32>::new("s", 5.0e9, 0.25).derive_moduli().unwrap();
        assert!((d.shear / 3.0e9 - 1.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn tau_is_linear_in_c(lame in 1.0e8f64..1.0e11, shear in 1.0e8f64..1.0e11, c in 0.0f64..10.0, alpha in 0.0f64..10.0) {
            let scaled = compute_tau(lame, shear, alpha * c).unwrap();
            let base = alpha * compute_tau(lame, shear, c).unwrap();
            prop_assert!((scaled - base).abs() <= 1e-14 * base.abs().max(1e-30));
        }

        #[test]
        fn bulk_modulus_round_trip(k in 1.0e6f64..1.0e12, nu in -0.99f64..0.499) {
            let d = RegionMaterial::new("r", k, nu).derive_moduli().unwrap();
            let rebuilt = d.lame + 2.0 * d.shear / 3.0;
            prop_assert!((rebuilt - k).abs() <= 1e-12 * k);
        }
    }
}
