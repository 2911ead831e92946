//! Checks against values derived independently of the implementation:
//! closed-form 1D consolidation states, a dense LU solve of the coupled
//! block system, and the exact root of the amplification matrix determinant.

mod common {
    pub mod vn_oracle;
}

use common::vn_oracle::{exact_root, Inputs};
use porostab::assembly::{face_transmissibility, LoadSpec, TimeFunction, TractionLoad};
use porostab::cases::{BoundaryConditions, MechanicalBc, Scenario};
use porostab::linsolve::{solve, CsrMatrix, DenseLu};
use porostab::materials::{MaterialSet, Modulus, RegionMaterial, StabilizationConfig};
use porostab::mesh::{Side, StructuredMesh};
use porostab::steppers::{SchemeConfig, State, Stepper};
use porostab::analysis::{amplification_factor, VonNeumannParams};

const K_DR: f64 = 5.0e9;
const NU: f64 = 0.25;
const FORCE: f64 = 1.0e6;

/// Shear modulus and constrained (oedometric) modulus from `K` and `ν`.
fn moduli() -> (f64, f64) {
    let g = 3.0 * K_DR * (1.0 - 2.0 * NU) / (2.0 * (1.0 + NU));
    (g, K_DR + 4.0 * g / 3.0)
}

/// Laterally confined column `1×1×nz`, bottom on rollers, compressive top load.
fn column(nz: usize, material: RegionMaterial<f64>) -> Scenario<f64> {
    let mesh = StructuredMesh::build([1, 1, nz], [1.0, 1.0, 1.0], |_, _, _| 0).unwrap();
    let mut boundary = BoundaryConditions::all_free();
    for side in [Side::XMinus, Side::XPlus, Side::YMinus, Side::YPlus, Side::ZMinus] {
        boundary = boundary.set(side, MechanicalBc::Roller);
    }
    let loads = LoadSpec {
        tractions: vec![TractionLoad { side: Side::ZPlus, direction: [0.0, 0.0, 1.0], total_force: TimeFunction::Constant(-FORCE) }],
        ..Default::default()
    };
    Scenario {
        name: "column".into(),
        mesh,
        materials: MaterialSet::new(vec![material]).unwrap(),
        boundary,
        loads,
        initial_pressure: 0.0,
        index_regions: vec![0],
        stabilization_regions: vec![0],
    }
}

#[test]
fn drained_column_settlement() {
    let s = column(6, RegionMaterial::new("rock", K_DR, NU));
    let sys = s.assemble(&StabilizationConfig::disabled()).unwrap();
    let initial = State::initial(&sys, 0.0);
    let mut st = Stepper::new(&s.mesh, &sys, SchemeConfig::fully_implicit(), &initial).unwrap();
    let loads = s.loads_at(0.0).unwrap();
    let u = st.solve_mechanics(&vec![0.0; s.mesh.n_cells()], &loads.q_u).unwrap();
    let (_, m_oed) = moduli();
    for n in 0..s.mesh.n_nodes() {
        let z = s.mesh.node_coords(n)[2];
        let expected = -FORCE * z / m_oed;
        assert!((u[3 * n + 2] - expected).abs() <= 1e-12 * FORCE * 6.0 / m_oed, "node {n}");
        assert!(u[3 * n].abs() < 1e-20 && u[3 * n + 1].abs() < 1e-20);
    }
}

#[test]
fn undrained_incompressible_column_carries_load_in_the_fluid() {
    // b = 1, 1/M = 0, κ = 0: the skeleton cannot compact, the fluid takes the load
    let s = column(5, RegionMaterial::new("rock", K_DR, NU));
    let sys = s.assemble(&StabilizationConfig::disabled()).unwrap();
    let initial = State::initial(&sys, 0.0);
    let mut st = Stepper::new(&s.mesh, &sys, SchemeConfig::fully_implicit(), &initial).unwrap();
    let next = st.step_fully_implicit(&initial, 86_400.0, &s.loads_at(86_400.0).unwrap()).unwrap();
    for &p in &next.p {
        assert!((p - FORCE).abs() <= 1e-9 * FORCE, "p = {p}");
    }
    assert!(next.u.iter().all(|v| v.abs() < 1e-9 * FORCE / K_DR));
}

#[test]
fn undrained_compressible_column_skempton_split() {
    let k_f = 2.0e9;
    let phi0 = 0.2;
    let mut m = RegionMaterial::new("rock", K_DR, NU);
    m.k_f = Modulus::Finite(k_f);
    m.phi0 = phi0;
    let s = column(4, m);
    let sys = s.assemble(&StabilizationConfig::disabled()).unwrap();
    let initial = State::initial(&sys, 0.0);
    let mut st = Stepper::new(&s.mesh, &sys, SchemeConfig::fully_implicit(), &initial).unwrap();
    let next = st.step_fully_implicit(&initial, 3600.0, &s.loads_at(3600.0).unwrap()).unwrap();
    let biot_m = k_f / phi0;
    let (_, m_oed) = moduli();
    let eps = -FORCE / (m_oed + biot_m);
    let p = -biot_m * eps;
    for c in 0..s.mesh.n_cells() {
        assert!((next.eps_v[c] - eps).abs() <= 1e-9 * eps.abs());
        assert!((next.p[c] - p).abs() <= 1e-9 * p);
    }
}

#[test]
fn coupled_step_matches_dense_lu() {
    // 2×2×1 undrained patch with sinks of both signs; the monolithic system
    // is rebuilt here in dense form with the constrained rows replaced by identities
    let mesh = StructuredMesh::build([2, 2, 1], [0.5, 0.5, 0.25], |_, _, _| 0).unwrap();
    let mut m = RegionMaterial::new("rock", K_DR, NU);
    m.permeability = 1e-14;
    let boundary = BoundaryConditions::all_free().set(Side::ZMinus, MechanicalBc::Fixed).set(Side::XMinus, MechanicalBc::Roller);
    let loads = LoadSpec {
        tractions: vec![TractionLoad { side: Side::XPlus, direction: [0.6, 0.0, 0.8], total_force: TimeFunction::Constant(-250.0) }],
        sources: vec![porostab::assembly::SourceTerm { cells: vec![0], mass_rate: 1e-3, duration: None }],
        body_force: None,
    };
    let s = Scenario { name: "patch".into(), mesh, materials: MaterialSet::new(vec![m]).unwrap(), boundary, loads, initial_pressure: 0.0, index_regions: vec![0], stabilization_regions: vec![0] };
    let sys = s.assemble(&StabilizationConfig::disabled()).unwrap();
    let initial = State::initial(&sys, 0.0);
    let dt = 7200.0;
    let loads = s.loads_at(dt).unwrap();
    let mut st = Stepper::new(&s.mesh, &sys, SchemeConfig::fully_implicit(), &initial).unwrap();
    let next = st.step_fully_implicit(&initial, dt, &loads).unwrap();

    let n_u = sys.n_u();
    let n = n_u + sys.n_cells;
    let (a, b, t) = (sys.a.to_dense(), sys.b.to_dense(), sys.t.to_dense());
    let fixed = sys.dirichlet.mask(n_u);
    let mut rows = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n_u {
        if fixed[i] {
            rows[i][i] = 1.0;
            continue;
        }
        for j in 0..n_u {
            if !fixed[j] {
                rows[i][j] = a[i][j];
            }
        }
        for c in 0..sys.n_cells {
            rows[i][n_u + c] = -b[c][i];
        }
        rhs[i] = loads.q_u[i];
    }
    // flow: B u + δt T p = δt q  (1/M = 0, uⁿ = 0, pⁿ = 0)
    for c in 0..sys.n_cells {
        for j in 0..n_u {
            if !fixed[j] {
                rows[n_u + c][j] = b[c][j];
            }
        }
        for d in 0..sys.n_cells {
            rows[n_u + c][n_u + d] = dt * t[c][d];
        }
        rhs[n_u + c] = dt * loads.q_p[c];
    }
    let x = DenseLu::from_rows(&rows).unwrap().solve(&rhs);
    let pmax = x[n_u..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let umax = x[..n_u].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(pmax > 0.0 && umax > 0.0);
    for c in 0..sys.n_cells {
        assert!((next.p[c] - x[n_u + c]).abs() <= 1e-9 * pmax, "cell {c}");
    }
    for i in 0..n_u {
        assert!((next.u[i] - x[i]).abs() <= 1e-9 * umax, "dof {i}");
    }
}

#[test]
fn laplacian_solve_matches_tridiagonal_formula() {
    // -u'' = 1 on (0, 1), u(0) = u(1) = 0: the discrete solution equals the
    // continuous one at the nodes, h² i (n − i) / 2
    let n = 40;
    let h = 1.0 / n as f64;
    let mut trip = Vec::new();
    for i in 0..n - 1 {
        trip.push((i, i, 2.0));
        if i > 0 {
            trip.push((i, i - 1, -1.0));
            trip.push((i - 1, i, -1.0));
        }
    }
    let a = CsrMatrix::from_triplets(n - 1, n - 1, &trip);
    let rhs = vec![h * h; n - 1];
    let x = solve(&a, &rhs, 1e-12).unwrap();
    for (i, v) in x.iter().enumerate() {
        let k = (i + 1) as f64;
        let exact = h * h * k * (n as f64 - k) / 2.0;
        assert!((v - exact).abs() <= 1e-13, "{i}");
    }
}

#[test]
fn transmissibility_of_a_heterogeneous_pair() {
    // two half-cells in series: 1/T = (d/2)/(k₁ A/μ) + (d/2)/(k₂ A/μ)
    let (k1, k2, mu, area, d): (f64, f64, f64, f64, f64) = (1e-12, 4e-14, 1e-3, 2.5, 0.4);
    let series = 1.0 / ((d / 2.0) * mu / (k1 * area) + (d / 2.0) * mu / (k2 * area));
    let t = face_transmissibility(k1, mu, k2, mu, area, d);
    assert!((t - series).abs() <= 1e-14 * series);
    assert_eq!(face_transmissibility(k1, mu, 0.0, mu, area, d), 0.0);
}

#[test]
fn amplification_factor_matches_determinant_root() {
    let base = VonNeumannParams {
        m_biot: Modulus::Finite(1.0e10),
        b: 1.0,
        k_dr: 5.0e9,
        k: 1e-13,
        mu: 1e-3,
        dx: 1.0,
        dt: 86_400.0,
        tau: 0.0,
        theta: std::f64::consts::PI,
    };
    for tau in [0.0, 1e-12, 1.875e-11] {
        for m_biot in [Modulus::Finite(1.0e10), Modulus::Incompressible] {
            let p = VonNeumannParams { tau, m_biot, ..base };
            let g = amplification_factor(&p).unwrap();
            let inv_m = match m_biot {
                Modulus::Finite(m) => 1.0 / m,
                Modulus::Incompressible => 0.0,
            };
            let inputs = Inputs { inv_m, b: p.b, k_dr: p.k_dr, k: p.k, mu: p.mu, dx: p.dx, dt: p.dt, tau, one_minus_cos: 1.0 - p.theta.cos() };
            let oracle = exact_root(&inputs).unwrap();
            assert!((g - oracle).abs() <= 1e-12 * oracle, "tau {tau}: {g} vs {oracle}");
        }
    }
}
