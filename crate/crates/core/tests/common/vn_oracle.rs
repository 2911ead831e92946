//! Exact amplification factor of the explicit fixed-stress step with jump
//! stabilization, computed from the fully discrete 1D equations
//!
//! flow at cell j:
//!   (1/M + b²/K)(pⁿ⁺¹ − pⁿ)/δt − (b²/K)(pⁿ − pⁿ⁻¹)/δt
//!   + b/(δt δx) [(u_{j+½} − u_{j−½})ⁿ − (u_{j+½} − u_{j−½})ⁿ⁻¹]
//!   − k/(μ δx²) Δ₂pⁿ⁺¹ − τ δx/δt Δ₂(pⁿ⁺¹ − pⁿ) = 0
//! mechanics at node j − ½:
//!   −K/δx (u_{j−3/2} − 2u_{j−½} + u_{j+½}) − b (p_{j−1} − p_j) = 0
//!
//! with `Δ₂` the plain second difference. Substituting `p = P γⁿ e^{ijθ}`,
//! `u = U γⁿ e^{i(j−½)θ}` gives a 2×2 matrix whose entries are Laurent
//! polynomials in `z = e^{iθ/2}`. The determinant is formed exactly over the
//! rationals, reduced with `z^{2m} + z^{−2m} = 2 T_m(cos θ)`, and its nonzero
//! root in γ is returned. `cos θ` enters as the exact value of `1 − c`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

type Q = BigRational;

fn q(v: f64) -> Q {
    Q::from_float(v).expect("finite input")
}

#[derive(Clone, Debug, Default)]
struct Laurent(BTreeMap<i32, Q>);

impl Laurent {
    fn constant(v: Q) -> Self {
        Laurent::monomial(0, v)
    }
    fn monomial(k: i32, v: Q) -> Self {
        let mut m = BTreeMap::new();
        if !v.is_zero() {
            m.insert(k, v);
        }
        Laurent(m)
    }
    fn add(&self, o: &Laurent) -> Laurent {
        let mut m = self.0.clone();
        for (k, v) in &o.0 {
            let e = m.entry(*k).or_insert_with(Q::zero);
            *e += v;
        }
        m.retain(|_, v| !v.is_zero());
        Laurent(m)
    }
    fn scale(&self, s: &Q) -> Laurent {
        Laurent(self.0.iter().map(|(k, v)| (*k, v * s)).filter(|(_, v)| !v.is_zero()).collect())
    }
    fn sub(&self, o: &Laurent) -> Laurent {
        self.add(&o.scale(&-Q::one()))
    }
    fn mul(&self, o: &Laurent) -> Laurent {
        let mut out = Laurent::default();
        for (a, x) in &self.0 {
            for (b, y) in &o.0 {
                out = out.add(&Laurent::monomial(a + b, x * y));
            }
        }
        out
    }
    /// Value on the unit circle for a real, even-power polynomial.
    fn evaluate(&self, cos_theta: &Q) -> Q {
        let mut total = Q::zero();
        for (&k, v) in &self.0 {
            assert!(k % 2 == 0, "odd power of e^(iθ/2) survived");
            let m = k.unsigned_abs() / 2;
            let other = self.0.get(&-k).cloned().unwrap_or_else(Q::zero);
            assert!(&other == v, "determinant is not real");
            // each of z^{2m}, z^{−2m} contributes T_m(cos θ)
            total += v * chebyshev(m, cos_theta);
        }
        total
    }
}

fn chebyshev(m: u32, x: &Q) -> Q {
    let (mut a, mut b) = (Q::one(), x.clone());
    if m == 0 {
        return a;
    }
    for _ in 1..m {
        let next = Q::from_integer(BigInt::from(2)) * x * &b - &a;
        a = b;
        b = next;
    }
    b
}

/// Inputs in f64; `one_minus_cos` is `1 − cos θ` exactly as the caller computed it.
pub struct Inputs {
    pub inv_m: f64,
    pub b: f64,
    pub k_dr: f64,
    pub k: f64,
    pub mu: f64,
    pub dx: f64,
    pub dt: f64,
    pub tau: f64,
    pub one_minus_cos: f64,
}

fn determinant(p: &Inputs, g: &Q) -> Q {
    let (inv_m, b, kd, k, mu, dx, dt, tau) = (q(p.inv_m), q(p.b), q(p.k_dr), q(p.k), q(p.mu), q(p.dx), q(p.dt), q(p.tau));
    let one = Q::one();
    let two = Q::from_integer(BigInt::from(2));
    let z = |k: i32| Laurent::monomial(k, Q::one());
    // Δ₂ e^{ijθ} / e^{ijθ} = z⁻² − 2 + z²
    let lap = z(-2).add(&Laurent::constant(-two.clone())).add(&z(2));
    // (u_{j+½} − u_{j−½}) / e^{ijθ} for u = U e^{i(j−½)θ}:  z − z⁻¹
    let grad = z(1).sub(&z(-1));
    let g2 = g * g;
    let storage = (&inv_m + &b * &b / &kd) * (&g2 - g) / &dt - (&b * &b / &kd) * (g - &one) / &dt;
    let a11 = Laurent::constant(storage)
        .sub(&lap.scale(&(&k / (&mu * &dx * &dx) * &g2)))
        .sub(&lap.scale(&(&tau * &dx / &dt * (&g2 - g))));
    let a12 = grad.scale(&(&b / (&dt * &dx) * (g - &one)));
    // mechanics divided by e^{i(j−½)θ}: p_{j−1} − p_j → z⁻¹ − z
    let a21 = z(-1).sub(&z(1)).scale(&-b.clone());
    let a22 = lap.scale(&(-kd / &dx));
    let det = a11.mul(&a22).sub(&a12.mul(&a21));
    det.evaluate(&(one - q(p.one_minus_cos)))
}

/// Nonzero root of the determinant (which is `γ · (c₁ + c₂ γ)`), or `None`
/// when the determinant vanishes identically.
pub fn exact_root(p: &Inputs) -> Option<f64> {
    let d0 = determinant(p, &Q::zero());
    assert!(d0.is_zero(), "γ = 0 is always a root");
    let one = Q::one();
    let two = Q::from_integer(BigInt::from(2));
    let l1 = determinant(p, &one);
    let l2 = determinant(p, &two) / &two;
    let c2 = &l2 - &l1;
    let c1 = &l1 - &c2;
    if c2.is_zero() {
        return None;
    }
    (-c1 / c2).to_f64()
}
