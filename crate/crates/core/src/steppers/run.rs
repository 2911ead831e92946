use crate::analysis::oscillation_index;
use crate::cases::Scenario;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::steppers::{SchemeConfig, State, Stepper};

/// Per-step scalar diagnostics (step 0 is the initial state).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics<T> {
    pub step: usize,
    pub time: T,
    pub dt: T,
    /// Oscillation index over the scenario's index regions.
    pub oscillation_index: T,
    pub max_p: T,
    pub min_p: T,
    /// `sqrt(Σ V ε_v²)`
    pub divu_norm: T,
    /// Summed fully implicit flow residual of the step (m³).
    pub mass_residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub states: Vec<State<T>>,
    pub diagnostics: Vec<StepDiagnostics<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &State<T> {
        self.states.last().expect("trajectory holds the initial state")
    }
}

fn diagnose<T: Real>(scenario: &Scenario<T>, mask: &[bool], state: &State<T>, dt: T, mass_residual: T) -> Result<StepDiagnostics<T>> {
    let v = scenario.mesh.cell_volume();
    Ok(StepDiagnostics {
        step: state.step,
        time: state.time,
        dt,
        oscillation_index: oscillation_index(&state.p, &scenario.mesh, mask)?,
        max_p: state.p.iter().copied().fold(T::neg_infinity(), T::max),
        min_p: state.p.iter().copied().fold(T::infinity(), T::min),
        divu_norm: state.eps_v.iter().map(|&e| v * e * e).sum::<T>().sqrt(),
        mass_residual,
    })
}

/// Runs the schedule `[(δt, n_steps), ...]`, calling `observe` on the initial
/// state and after every step.
pub fn run_simulation_with<T: Real>(
    scenario: &Scenario<T>,
    cfg: &SchemeConfig<T>,
    schedule: &[(T, usize)],
    mut observe: impl FnMut(&State<T>, &StepDiagnostics<T>) -> Result<()>,
) -> Result<()> {
    cfg.validate()?;
    for &(dt, _) in schedule {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::config(format!("schedule time step must be positive, got {dt}")));
        }
    }
    let sys = scenario.assemble(&cfg.stabilization)?;
    let mask = scenario.index_mask();
    let initial = State::initial(&sys, scenario.initial_pressure);
    let mut stepper = Stepper::new(&scenario.mesh, &sys, cfg.clone(), &initial)?;
    observe(&initial, &diagnose(scenario, &mask, &initial, T::zero(), T::zero())?)?;
    let mut prev = initial.clone();
    let mut current = initial;
    for &(dt, n) in schedule {
        for _ in 0..n {
            let step = current.step + 1;
            let wrap = |e: Error| Error::Step { step, source: Box::new(e) };
            let t_new = current.time + dt;
            let loads = scenario.loads_at(t_new).map_err(wrap)?;
            let next = stepper.step(&current, &prev, dt, &loads).map_err(wrap)?;
            let residual = stepper.mass_residual(&current, &next, dt, &loads.q_p);
            observe(&next, &diagnose(scenario, &mask, &next, dt, residual)?)?;
            prev = std::mem::replace(&mut current, next);
        }
    }
    Ok(())
}

/// Runs the schedule and keeps every state.
pub fn run_simulation<T: Real>(scenario: &Scenario<T>, cfg: &SchemeConfig<T>, schedule: &[(T, usize)]) -> Result<Trajectory<T>> {
    let mut traj = Trajectory { states: Vec::new(), diagnostics: Vec::new() };
    run_simulation_with(scenario, cfg, schedule, |s, d| {
        traj.states.push(s.clone());
        traj.diagnostics.push(*d);
        Ok(())
    })?;
    Ok(traj)
}
