//! Backward-Euler time stepping: fully implicit, fixed-stress split (explicit
//! or iterated, stress-rate or porosity form) and the undrained Uzawa update.
//!
//! Flow equations are multiplied by `δt` before assembly, so every pressure
//! operator below is in m³/Pa.

mod run;

pub use run::{run_simulation, run_simulation_with, StepDiagnostics, Trajectory};

use crate::assembly::{saddle_ordering, displacement_ordering, AssembledSystem, Loads};
use crate::error::{Error, Result};
use crate::linsolve::{CsrMatrix, Factorization, TripletBuilder};
use crate::materials::StabilizationConfig;
use crate::mesh::StructuredMesh;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    FullyImplicit,
    FixedStress,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsForm {
    /// Frozen total-stress rate in the flow accumulation.
    StressRate,
    /// Linearized porosity update in the flow accumulation.
    Porosity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig<T> {
    pub scheme: Scheme,
    /// Flow/mechanics passes per step; 1 is the explicit scheme.
    pub fs_iterations: usize,
    pub fs_form: FsForm,
    pub stabilization: StabilizationConfig<T>,
}

impl<T: Real> SchemeConfig<T> {
    pub fn fully_implicit() -> Self {
        SchemeConfig { scheme: Scheme::FullyImplicit, fs_iterations: 1, fs_form: FsForm::StressRate, stabilization: StabilizationConfig::disabled() }
    }

    pub fn explicit_fixed_stress() -> Self {
        SchemeConfig { scheme: Scheme::FixedStress, ..Self::fully_implicit() }
    }

    pub fn with_stabilization(mut self, stab: StabilizationConfig<T>) -> Self {
        self.stabilization = stab;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.fs_iterations == 0 {
            return Err(Error::config("fs_iterations must be at least 1"));
        }
        self.stabilization.validate()
    }
}

/// Fields at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T> {
    pub step: usize,
    pub time: T,
    pub u: Vec<T>,
    pub p: Vec<T>,
    /// Porosity `φ`.
    pub phi: Vec<T>,
    /// `φ − φ₀`, kept separately to avoid cancellation.
    pub dphi: Vec<T>,
    pub eps_v: Vec<T>,
    pub sigma_v: Vec<T>,
}

impl<T: Real> State<T> {
    /// Zero displacement (Dirichlet values imposed) and uniform pressure `p0`.
    pub fn initial(sys: &AssembledSystem<T>, p0: T) -> Self {
        let mut u = vec![T::zero(); sys.n_u()];
        sys.dirichlet.impose(&mut u);
        let p = vec![p0; sys.n_cells];
        let eps_v = sys.volumetric_strain(&u);
        let sigma_v = sys.volumetric_stress(&eps_v, &p);
        State { step: 0, time: T::zero(), u, p, phi: sys.cells.phi0.clone(), dphi: vec![T::zero(); sys.n_cells], eps_v, sigma_v }
    }

    fn from_fields(sys: &AssembledSystem<T>, step: usize, time: T, u: Vec<T>, p: Vec<T>, dphi: Vec<T>) -> Self {
        let eps_v = sys.volumetric_strain(&u);
        let sigma_v = sys.volumetric_stress(&eps_v, &p);
        let phi = sys.cells.phi0.iter().zip(&dphi).map(|(&a, &b)| a + b).collect();
        State { step, time, u, p, phi, dphi, eps_v, sigma_v }
    }
}

/// Drives one scenario's operators through time, caching factorizations.
#[derive(Debug)]
pub struct Stepper<'a, T> {
    sys: &'a AssembledSystem<T>,
    cfg: SchemeConfig<T>,
    /// Reference pressure and strain of the porosity law.
    p_ref: Vec<T>,
    eps_ref: Vec<T>,
    saddle_perm: Vec<usize>,
    disp_perm: Vec<usize>,
    mechanics: Option<Factorization<T>>,
    flow: Option<(T, Factorization<T>)>,
    coupled: Option<(T, Factorization<T>)>,
}

impl<'a, T: Real> Stepper<'a, T> {
    pub fn new(mesh: &StructuredMesh<T>, sys: &'a AssembledSystem<T>, cfg: SchemeConfig<T>, initial: &State<T>) -> Result<Self> {
        cfg.validate()?;
        if mesh.n_cells() != sys.n_cells || mesh.n_nodes() != sys.n_nodes {
            return Err(Error::config("mesh does not match the assembled system"));
        }
        Ok(Stepper {
            sys,
            cfg,
            p_ref: initial.p.clone(),
            eps_ref: initial.eps_v.clone(),
            saddle_perm: saddle_ordering(mesh),
            disp_perm: displacement_ordering(mesh),
            mechanics: None,
            flow: None,
            coupled: None,
        })
    }

    pub fn config(&self) -> &SchemeConfig<T> {
        &self.cfg
    }

    pub fn system(&self) -> &AssembledSystem<T> {
        self.sys
    }

    fn check_dt(dt: T) -> Result<()> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::config(format!("time step must be positive, got {dt}")));
        }
        Ok(())
    }

    fn check_loads(&self, loads: &Loads<T>) -> Result<()> {
        if loads.q_u.len() != self.sys.n_u() || loads.q_p.len() != self.sys.n_cells {
            return Err(Error::config("load vectors do not match the system dimensions"));
        }
        Ok(())
    }

    /// Advances by one step with the configured scheme; `prev` is level `n − 1`.
    pub fn step(&mut self, state: &State<T>, prev: &State<T>, dt: T, loads: &Loads<T>) -> Result<State<T>> {
        match self.cfg.scheme {
            Scheme::FullyImplicit => self.step_fully_implicit(state, dt, loads),
            Scheme::FixedStress => self.step_fixed_stress(state, prev, dt, loads),
        }
    }

    /// `(1/N)(p − p₀) + b(ε − ε₀)` per cell.
    fn porosity_change(&self, p: &[T], eps: &[T]) -> Vec<T> {
        let c = &self.sys.cells;
        (0..self.sys.n_cells).map(|e| c.inv_n[e] * (p[e] - self.p_ref[e]) + c.biot[e] * (eps[e] - self.eps_ref[e])).collect()
    }

    /// Porosity change predicted by the flow step from the mechanics state `(p*, ε*)`.
    fn predicted_porosity_change(&self, p: &[T], p_star: &[T], eps_star: &[T]) -> Vec<T> {
        let c = &self.sys.cells;
        (0..self.sys.n_cells)
            .map(|e| {
                let b = c.biot[e];
                c.inv_n[e] * (p[e] - self.p_ref[e]) + b * (eps_star[e] - self.eps_ref[e]) + b * b / c.k_dr[e] * (p[e] - p_star[e])
            })
            .collect()
    }

    fn coupled_factor(&mut self, dt: T) -> Result<&Factorization<T>> {
        if !matches!(&self.coupled, Some((cached, _)) if *cached == dt) {
            let sys = self.sys;
            let n_u = sys.n_u();
            let n = n_u + sys.n_cells;
            let mut tb = TripletBuilder::with_capacity(n, n, sys.a.nnz() + 2 * sys.b.nnz() + sys.t.nnz() + sys.s.nnz() + sys.n_cells);
            tb.push_block(&sys.a, 0, 0, T::one());
            tb.push_block_transposed(&sys.b, 0, n_u, -T::one());
            tb.push_block(&sys.b, n_u, 0, -T::one());
            tb.push_block(&sys.t, n_u, n_u, -dt);
            tb.push_block(&sys.s, n_u, n_u, -T::one());
            for (c, &d) in sys.d_fim.iter().enumerate() {
                tb.push(n_u + c, n_u + c, -d);
            }
            let mut k = tb.build();
            let mut dummy = vec![T::zero(); n];
            k.apply_dirichlet(sys.dirichlet.entries(), &mut dummy);
            self.coupled = Some((dt, Factorization::new(k, Some(&self.saddle_perm))?));
        }
        Ok(&self.coupled.as_ref().expect("factored").1)
    }

    fn mechanics_factor(&mut self) -> Result<&Factorization<T>> {
        if self.mechanics.is_none() {
            let mut a = self.sys.a.clone();
            let mut dummy = vec![T::zero(); a.nrows()];
            a.apply_dirichlet(self.sys.dirichlet.entries(), &mut dummy);
            self.mechanics = Some(Factorization::new(a, Some(&self.disp_perm))?);
        }
        Ok(self.mechanics.as_ref().expect("factored"))
    }

    fn flow_factor(&mut self, dt: T) -> Result<&Factorization<T>> {
        if !matches!(&self.flow, Some((cached, _)) if *cached == dt) {
            let sys = self.sys;
            let m = sys.t.scaled(dt).add_scaled(&sys.s, T::one()).add_scaled(&CsrMatrix::from_diagonal(&sys.d_fs), T::one());
            self.flow = Some((dt, Factorization::new(m, None)?));
        }
        Ok(&self.flow.as_ref().expect("factored").1)
    }

    /// Solves `A u = Q_u + Bᵀ p` with the Dirichlet values imposed.
    pub fn solve_mechanics(&mut self, p: &[T], q_u: &[T]) -> Result<Vec<T>> {
        let sys = self.sys;
        let bt_p = sys.b.mul_transpose_vec(p);
        let mut rhs: Vec<T> = q_u.iter().zip(&bt_p).map(|(&f, &g)| f + g).collect();
        // symmetric elimination: move prescribed values to the right-hand side
        if sys.dirichlet.entries().iter().any(|&(_, v)| v != T::zero()) {
            let mut g = vec![T::zero(); sys.n_u()];
            sys.dirichlet.impose(&mut g);
            let ag = sys.a.mul_vec(&g);
            let fixed = sys.dirichlet.mask(sys.n_u());
            for d in 0..sys.n_u() {
                if !fixed[d] {
                    rhs[d] -= ag[d];
                }
            }
        }
        for &(d, v) in sys.dirichlet.entries() {
            rhs[d] = v;
        }
        self.mechanics_factor()?.solve(&rhs)
    }

    /// Monolithic backward-Euler step of the coupled system.
    pub fn step_fully_implicit(&mut self, state: &State<T>, dt: T, loads: &Loads<T>) -> Result<State<T>> {
        Self::check_dt(dt)?;
        self.check_loads(loads)?;
        let sys = self.sys;
        let n_u = sys.n_u();
        // −[B uⁿ + (D + S) pⁿ + δt Q_p]
        let bu = sys.b.mul_vec(&state.u);
        let sp = sys.s.mul_vec(&state.p);
        let mut rhs = loads.q_u.clone();
        rhs.extend((0..sys.n_cells).map(|c| -(bu[c] + sys.d_fim[c] * state.p[c] + sp[c] + dt * loads.q_p[c])));
        let mut g = vec![T::zero(); n_u + sys.n_cells];
        sys.dirichlet.impose(&mut g);
        if sys.dirichlet.entries().iter().any(|&(_, v)| v != T::zero()) {
            // coupled operator applied to the prescribed values, constrained rows excluded
            let a_g = sys.a.mul_vec(&g[..n_u]);
            let b_g = sys.b.mul_vec(&g[..n_u]);
            let fixed = sys.dirichlet.mask(n_u);
            for d in 0..n_u {
                if !fixed[d] {
                    rhs[d] -= a_g[d];
                }
            }
            for c in 0..sys.n_cells {
                rhs[n_u + c] += b_g[c];
            }
        }
        for &(d, v) in sys.dirichlet.entries() {
            rhs[d] = v;
        }
        let x = self.coupled_factor(dt)?.solve(&rhs)?;
        let (u, p) = (x[..n_u].to_vec(), x[n_u..].to_vec());
        let eps = sys.volumetric_strain(&u);
        let dphi = self.porosity_change(&p, &eps);
        Ok(State::from_fields(sys, state.step + 1, state.time + dt, u, p, dphi))
    }

    /// Fixed-stress step: `fs_iterations` flow/mechanics passes.
    pub fn step_fixed_stress(&mut self, state: &State<T>, prev: &State<T>, dt: T, loads: &Loads<T>) -> Result<State<T>> {
        Self::check_dt(dt)?;
        self.check_loads(loads)?;
        let sys = self.sys;
        let nc = sys.n_cells;
        let c = &sys.cells;
        let sp_n = sys.s.mul_vec(&state.p);
        let mut p_k = state.p.clone();
        let mut u_k = state.u.clone();
        let mut eps_k = state.eps_v.clone();
        let mut sigma_k = state.sigma_v.clone();
        let mut dphi = state.dphi.clone();
        for k in 1..=self.cfg.fs_iterations {
            let mut rhs: Vec<T> = (0..nc).map(|e| dt * loads.q_p[e] + sp_n[e]).collect();
            match self.cfg.fs_form {
                FsForm::StressRate => {
                    let (sig_star, sig_ref) = if k == 1 { (&state.sigma_v, &prev.sigma_v) } else { (&sigma_k, &state.sigma_v) };
                    for e in 0..nc {
                        rhs[e] += sys.d_fs[e] * state.p[e] - c.biot[e] / c.k_dr[e] * c.volume[e] * (sig_star[e] - sig_ref[e]);
                    }
                }
                FsForm::Porosity => {
                    let dphi_ref = if k == 1 { state.dphi.clone() } else { self.porosity_change(&state.p, &state.eps_v) };
                    for e in 0..nc {
                        let b = c.biot[e];
                        // δφᵏ = (1/N + b²/K) pᵏ + offset
                        let offset = -c.inv_n[e] * self.p_ref[e] + b * (eps_k[e] - self.eps_ref[e]) - b * b / c.k_dr[e] * p_k[e];
                        rhs[e] += c.volume[e] * (dphi_ref[e] - offset) + c.volume[e] * c.phi0_over_kf[e] * state.p[e];
                    }
                }
            }
            let p_new = self.flow_factor(dt)?.solve(&rhs)?;
            dphi = self.predicted_porosity_change(&p_new, &p_k, &eps_k);
            u_k = self.solve_mechanics(&p_new, &loads.q_u)?;
            p_k = p_new;
            eps_k = sys.volumetric_strain(&u_k);
            sigma_k = sys.volumetric_stress(&eps_k, &p_k);
        }
        Ok(State::from_fields(sys, state.step + 1, state.time + dt, u_k, p_k, dphi))
    }

    /// Undrained penalty update `pⁿ⁺¹ = pⁿ − K_dr (ε(uⁿ) − ε(u⁰))` followed by
    /// the mechanics solve. Only valid for `b = 1`, `1/M = 0`, `κ = 0`, `S = 0`.
    pub fn uzawa_reference_step(&mut self, state: &State<T>, initial: &State<T>, loads: &Loads<T>, dt: T) -> Result<State<T>> {
        self.check_loads(loads)?;
        let sys = self.sys;
        let c = &sys.cells;
        let strict = c.biot.iter().all(|&b| b == T::one())
            && c.inv_m.iter().all(|&m| m == T::zero())
            && sys.t.values().iter().all(|&v| v == T::zero())
            && !sys.has_stabilization()
            && loads.q_p.iter().all(|&q| q == T::zero());
        if !strict {
            return Err(Error::config(
                "the Uzawa reference update requires b = 1, 1/M = 0, zero permeability, no stabilization and no sources",
            ));
        }
        let p: Vec<T> = (0..sys.n_cells).map(|e| state.p[e] - c.k_dr[e] * (state.eps_v[e] - initial.eps_v[e])).collect();
        let u = self.solve_mechanics(&p, &loads.q_u)?;
        let dphi = self.predicted_porosity_change(&p, &state.p, &state.eps_v);
        Ok(State::from_fields(sys, state.step + 1, state.time + dt, u, p, dphi))
    }

    /// Signed sum over cells of the fully implicit flow residual
    /// `B(u − uⁿ) + D(p − pⁿ) + δt T p + S(p − pⁿ) − δt Q_p` (m³).
    pub fn mass_residual(&self, old: &State<T>, new: &State<T>, dt: T, q_p: &[T]) -> T {
        let sys = self.sys;
        let du: Vec<T> = new.u.iter().zip(&old.u).map(|(&a, &b)| a - b).collect();
        let dp: Vec<T> = new.p.iter().zip(&old.p).map(|(&a, &b)| a - b).collect();
        let bdu = sys.b.mul_vec(&du);
        let tp = sys.t.mul_vec(&new.p);
        let sdp = sys.s.mul_vec(&dp);
        (0..sys.n_cells).map(|c| bdu[c] + sys.d_fim[c] * dp[c] + dt * tp[c] + sdp[c] - dt * q_p[c]).sum()
    }
}
