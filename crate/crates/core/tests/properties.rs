use proptest::prelude::*;

use porostab::analysis::{amplification_factor, oscillation_index, VonNeumannParams};
use porostab::io::units::Duration;
use porostab::linsolve::{solve, CsrMatrix};
use porostab::materials::Modulus;
use porostab::mesh::StructuredMesh;

fn vn(inv_m: f64, k: f64, dt: f64, tau: f64, theta: f64) -> VonNeumannParams<f64> {
    VonNeumannParams {
        m_biot: if inv_m == 0.0 { Modulus::Incompressible } else { Modulus::Finite(1.0 / inv_m) },
        b: 0.8,
        k_dr: 5.0e9,
        k,
        mu: 1e-3,
        dx: 0.5,
        dt,
        tau,
        theta,
    }
}

proptest! {
    #[test]
    fn gamma_stays_in_the_unit_interval(
        inv_m in prop_oneof![Just(0.0), 1e-12..1e-9f64],
        k in 0.0..1e-12f64,
        dt in 1.0..1e8f64,
        tau in 0.0..1e-10f64,
        theta in 0.0..=std::f64::consts::PI,
    ) {
        let g = amplification_factor(&vn(inv_m, k, dt, tau, theta)).unwrap();
        prop_assert!((0.0..=1.0).contains(&g));
    }

    #[test]
    fn gamma_falls_with_dt_and_rises_with_tau(
        k in 1e-15..1e-12f64,
        dt in 1.0..1e7f64,
        tau in 0.0..1e-10f64,
        theta in 0.05..=std::f64::consts::PI,
    ) {
        let g = |dt, tau| amplification_factor(&vn(1e-10, k, dt, tau, theta)).unwrap();
        prop_assert!(g(2.0 * dt, tau) <= g(dt, tau));
        prop_assert!(g(dt, tau + 1e-11) >= g(dt, tau));
        prop_assert!(g(dt, tau) < 1.0);
    }

    #[test]
    fn index_is_affine_invariant(
        seed in proptest::collection::vec(-1.0..1.0f64, 24),
        scale in prop_oneof![-1e6..-1e-3f64, 1e-3..1e6f64],
        shift in -1e6..1e6f64,
    ) {
        let mesh = StructuredMesh::build([4, 2, 3], [1.0, 1.0, 1.0], |_, _, _| 0).unwrap();
        let mask = vec![true; 24];
        let a = oscillation_index(&seed, &mesh, &mask).unwrap();
        let q: Vec<f64> = seed.iter().map(|v| scale * v + shift).collect();
        let b = oscillation_index(&q, &mesh, &mask).unwrap();
        prop_assert!((a - b).abs() <= 1e-6, "{} vs {}", a, b);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn durations_round_trip(v in 1e-6..1e12f64) {
        let d = Duration(v);
        prop_assert_eq!(d.to_string().parse::<Duration>().unwrap(), d);
        let days: Duration = format!("{}d", v / 86_400.0).parse().unwrap();
        prop_assert!((days.seconds() - v).abs() <= 1e-12 * v);
    }

    #[test]
    fn spd_solve_has_small_residual(
        n in 2usize..30,
        entries in proptest::collection::vec((0usize..30, 0usize..30, -1.0..1.0f64), 0..80),
        rhs_seed in proptest::collection::vec(-1.0..1.0f64, 30),
    ) {
        // diagonally dominant symmetric matrix
        let mut trip = Vec::new();
        let mut diag = vec![1.0; n];
        for &(i, j, v) in &entries {
            let (i, j) = (i % n, j % n);
            if i != j {
                trip.push((i, j, v));
                trip.push((j, i, v));
                diag[i] += v.abs();
                diag[j] += v.abs();
            }
        }
        for (i, d) in diag.iter().enumerate() {
            trip.push((i, i, *d));
        }
        let a = CsrMatrix::from_triplets(n, n, &trip);
        let b = &rhs_seed[..n];
        let x = solve(&a, b, 1e-12).unwrap();
        let r = a.mul_vec(&x);
        let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let rn = r.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        prop_assert!(rn <= 1e-10 * bn);
    }
}

#[test]
fn checkerboard_has_unit_index_and_constants_zero() {
    let mesh = StructuredMesh::build([3, 1, 5], [1.0, 1.0, 1.0], |_, _, _| 0).unwrap();
    let mask = vec![true; mesh.n_cells()];
    assert_eq!(oscillation_index(&mesh.checkerboard_vector(), &mesh, &mask).unwrap(), 1.0);
    assert_eq!(oscillation_index(&vec![4.0; mesh.n_cells()], &mesh, &mask).unwrap(), 0.0);
}
