//! Cycle iteration to a time-periodic solution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::hypotheses::{check_hypotheses, HypothesisReport};
use crate::error::{Error, Result};
use crate::model::{Phase, PhaseSchedule};
use crate::pde::domain::Topology;
use crate::pde::stepper::{check_state, StepOptions, Stepper, Unforced};
use crate::pde::switch::{switch, SwitchBlend, SwitchMode, SwitchRecord};
use crate::scalar::Scalar;

/// Which cycles keep snapshots and boundary traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Record {
    Nothing,
    #[default]
    FinalCycle,
    AllCycles,
}

#[derive(Debug, Clone, Copy)]
pub struct PdeOptions<T> {
    pub steps_per_cycle: usize,
    /// Sup-norm tolerance on `P` between successive cycle starts (mmHg).
    pub tol: T,
    pub max_cycles: usize,
    /// Run exactly this many cycles instead of iterating to convergence.
    pub cycles: Option<usize>,
    /// Blend strip width as a fraction of each domain's length.
    pub epsilon_fraction: T,
    pub switch_mode: SwitchMode,
    pub step: StepOptions<T>,
    pub record: Record,
    /// Snapshot every this many steps; phase starts and ends are always kept.
    pub snapshot_every: usize,
}

impl<T: Scalar> Default for PdeOptions<T> {
    fn default() -> Self {
        Self {
            steps_per_cycle: 400,
            tol: T::lit(1e-8),
            max_cycles: 500,
            cycles: None,
            epsilon_fraction: T::lit(0.05),
            switch_mode: SwitchMode::Heart,
            step: StepOptions::default(),
            record: Record::FinalCycle,
            snapshot_every: 0,
        }
    }
}

/// Pressure field of every domain at one instant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdeState<T> {
    pub t: T,
    pub cycle: usize,
    pub phase: Phase,
    pub p: Vec<Vec<T>>,
}

impl<T: Scalar> PdeState<T> {
    /// Boundary unknown of domain `k`: the value at its dynamic end.
    pub fn boundary(&self, topology: &Topology<T>, k: usize) -> T {
        self.p[k][topology.domains[k].dynamic_index(self.phase)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot<T> {
    pub domain: usize,
    pub t: T,
    pub cycle: usize,
    pub phase: Phase,
    pub p: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySample<T> {
    pub domain: usize,
    pub t: T,
    pub phase: Phase,
    pub b: T,
    pub heart_volume: T,
}

/// Monitors over one phase interval of one domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseDiagnostics<T> {
    pub domain: usize,
    pub cycle: usize,
    pub phase: Phase,
    pub t_start: T,
    pub t_end: T,
    /// Largest `|V(t) − V(start)| / |V(start)|` of heart plus vessel volume.
    pub volume_drift: T,
    /// Largest relative change of `Σ w·C·P + σ·C_heart·B`.
    pub invariant_drift: T,
    /// Largest rise of `max P` above its phase-start value (0 if none).
    pub max_rise: T,
    /// Largest fall of `min P` below its phase-start value (0 if none).
    pub min_fall: T,
    pub min_pressure: T,
    pub newton_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwitchEvent<T> {
    pub domain: usize,
    pub cycle: usize,
    pub t: T,
    pub record: SwitchRecord<T>,
}

#[derive(Debug, Clone)]
pub struct PdeRun<T> {
    /// State at the start of the cycle after the last one run.
    pub final_state: PdeState<T>,
    pub cycles_run: usize,
    pub converged: bool,
    pub residual: T,
    pub snapshots: Vec<Snapshot<T>>,
    pub boundary: Vec<BoundarySample<T>>,
    pub phases: Vec<PhaseDiagnostics<T>>,
    pub switches: Vec<SwitchEvent<T>>,
    /// `max − min` of the heart volume over the last cycle, per domain.
    pub heart_volume_swing: Vec<T>,
    /// Heart plus vessel volume of each domain at every cycle start.
    pub cycle_start_volumes: Vec<Vec<T>>,
    /// Hypothesis checks on the initial data, per domain.
    pub hypotheses: Vec<HypothesisReport<T>>,
    pub dt: [T; 2],
}

impl<T: Scalar> PdeRun<T> {
    /// Change of each domain's total volume between the first and the last
    /// cycle start.
    pub fn volume_drift(&self) -> Vec<T> {
        let (Some(first), Some(last)) = (self.cycle_start_volumes.first(), self.cycle_start_volumes.last()) else {
            return Vec::new();
        };
        first.iter().zip(last).map(|(a, b)| *b - *a).collect()
    }

    pub fn max_volume_drift(&self) -> T {
        self.phases.iter().fold(T::zero(), |m, d| m.max(d.volume_drift))
    }

    pub fn max_invariant_drift(&self) -> T {
        self.phases.iter().fold(T::zero(), |m, d| m.max(d.invariant_drift))
    }

    pub fn min_pressure(&self) -> T {
        self.phases.iter().fold(T::infinity(), |m, d| m.min(d.min_pressure))
    }

    pub fn snapshots_of(&self, domain: usize) -> impl Iterator<Item = &Snapshot<T>> {
        self.snapshots.iter().filter(move |s| s.domain == domain)
    }
}

struct Tracker<T> {
    v0: T,
    m0: T,
    m_scale: T,
    max0: T,
    min0: T,
    diag: PhaseDiagnostics<T>,
}

fn extrema<T: Scalar>(p: &[T]) -> (T, T) {
    p.iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

#[derive(Default)]
struct DomainCycle<T> {
    snapshots: Vec<Snapshot<T>>,
    boundary: Vec<BoundarySample<T>>,
    phases: Vec<PhaseDiagnostics<T>>,
    switches: Vec<SwitchEvent<T>>,
    hv_min: Option<T>,
    hv_max: Option<T>,
}

struct Plan<T> {
    schedule: PhaseSchedule<T>,
    steps: [usize; 2],
    dt: [T; 2],
}

/// Iterates full cycles (diastole then systole) on every domain of
/// `topology` until the cycle-start field repeats to within `options.tol`.
pub fn run_periodic<T: Scalar>(
    topology: &Topology<T>,
    schedule: &PhaseSchedule<T>,
    initial: &[Vec<T>],
    options: &PdeOptions<T>,
) -> Result<PdeRun<T>> {
    if !schedule.is_valid() {
        return Err(Error::InvalidInput("phase schedule is invalid".into()));
    }
    if initial.len() != topology.domains.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} initial fields, got {}",
            topology.domains.len(),
            initial.len()
        )));
    }
    if options.steps_per_cycle < 2 {
        return Err(Error::InvalidInput("need at least 2 steps per cycle".into()));
    }
    for (d, p) in topology.domains.iter().zip(initial) {
        if p.len() != d.len() {
            return Err(Error::InvalidInput(format!("initial field for {} has wrong length", d.name)));
        }
        check_state(d, p, T::zero(), options.step.pressure_bound)?;
    }
    let blends = topology
        .domains
        .iter()
        .map(|d| SwitchBlend::for_domain(d, options.epsilon_fraction, options.switch_mode))
        .collect::<Result<Vec<_>>>()?;
    let hypotheses = topology
        .domains
        .iter()
        .zip(initial)
        .map(|(d, p)| check_hypotheses(d, p))
        .collect();

    let n = options.steps_per_cycle;
    let frac = schedule.t_diastole_end / schedule.period;
    let n_dia = (frac * T::from_count(n)).round().to_usize().unwrap_or(1).clamp(1, n - 1);
    let steps = [n_dia, n - n_dia];
    let dt = [
        schedule.duration(Phase::Diastole) / T::from_count(steps[0]),
        schedule.duration(Phase::Systole) / T::from_count(steps[1]),
    ];
    let plan = Plan { schedule: *schedule, steps, dt };

    let mut p: Vec<Vec<T>> = initial.to_vec();
    let mut steppers: Vec<Stepper<T>> = topology
        .domains
        .iter()
        .map(|d| Stepper::new(d.len(), options.step))
        .collect();
    let cap = options.cycles.unwrap_or(options.max_cycles).max(1);
    let mut run = PdeRun {
        final_state: PdeState { t: T::zero(), cycle: 0, phase: Phase::Diastole, p: Vec::new() },
        cycles_run: 0,
        converged: false,
        residual: T::infinity(),
        snapshots: Vec::new(),
        boundary: Vec::new(),
        phases: Vec::new(),
        switches: Vec::new(),
        heart_volume_swing: Vec::new(),
        cycle_start_volumes: Vec::new(),
        hypotheses,
        dt,
    };
    let mut swing = vec![T::zero(); topology.domains.len()];
    for cycle in 0..cap {
        run.cycle_start_volumes.push(
            topology
                .domains
                .iter()
                .zip(&p)
                .map(|(d, f)| d.total_volume(f, Phase::Diastole))
                .collect(),
        );
        let keep = match options.record {
            Record::Nothing => false,
            Record::FinalCycle | Record::AllCycles => true,
        };
        if options.record != Record::AllCycles {
            run.snapshots.clear();
            run.boundary.clear();
        }
        let start = p.clone();
        let outputs: Vec<Result<DomainCycle<T>>> = topology
            .domains
            .par_iter()
            .zip(p.par_iter_mut())
            .zip(steppers.par_iter_mut())
            .zip(blends.par_iter())
            .enumerate()
            .map(|(k, (((d, field), stepper), blend))| {
                domain_cycle(k, d, field, stepper, blend, &plan, cycle, keep, options.snapshot_every)
            })
            .collect();
        for (k, out) in outputs.into_iter().enumerate() {
            let out = out?;
            swing[k] = out.hv_max.unwrap_or(T::zero()) - out.hv_min.unwrap_or(T::zero());
            if keep {
                run.snapshots.extend(out.snapshots);
                run.boundary.extend(out.boundary);
            }
            run.phases.extend(out.phases);
            run.switches.extend(out.switches);
        }
        run.residual = start
            .iter()
            .zip(&p)
            .map(|(a, b)| crate::scalar::sup_diff(a, b))
            .fold(T::zero(), T::max);
        run.cycles_run = cycle + 1;
        let done = match options.cycles {
            Some(k) => run.cycles_run == k,
            None => run.residual < options.tol,
        };
        if done {
            break;
        }
    }
    run.converged = run.residual < options.tol;
    if options.cycles.is_none() && !run.converged {
        return Err(Error::NonConvergence {
            cycles: run.cycles_run,
            residual: run.residual.as_f64(),
        });
    }
    run.heart_volume_swing = swing;
    run.final_state = PdeState {
        t: schedule.period * T::from_count(run.cycles_run),
        cycle: run.cycles_run,
        phase: Phase::Diastole,
        p,
    };
    Ok(run)
}

#[allow(clippy::too_many_arguments)]
fn domain_cycle<T: Scalar>(
    k: usize,
    d: &crate::pde::domain::Domain<T>,
    p: &mut Vec<T>,
    stepper: &mut Stepper<T>,
    blend: &SwitchBlend<T>,
    plan: &Plan<T>,
    cycle: usize,
    keep: bool,
    every: usize,
) -> Result<DomainCycle<T>> {
    let mut out = DomainCycle::default();
    let t_cycle = plan.schedule.period * T::from_count(cycle);
    let starts = [t_cycle, t_cycle + plan.schedule.t_diastole_end];

    let note_heart = |out: &mut DomainCycle<T>, field: &[T], phase: Phase, t: T| {
        let hv = d.heart_volume(field, phase);
        out.hv_min = Some(out.hv_min.map_or(hv, |m| m.min(hv)));
        out.hv_max = Some(out.hv_max.map_or(hv, |m| m.max(hv)));
        if keep {
            out.boundary.push(BoundarySample {
                domain: k,
                t,
                phase,
                b: field[d.dynamic_index(phase)],
                heart_volume: hv,
            });
        }
    };
    let snap = |out: &mut DomainCycle<T>, field: &[T], phase: Phase, t: T| {
        if keep {
            out.snapshots.push(Snapshot { domain: k, t, cycle, phase, p: field.to_vec() });
        }
    };

    for (stage, phase) in [Phase::Diastole, Phase::Systole].into_iter().enumerate() {
        let t0 = starts[stage];
        let dt = plan.dt[stage];
        let nsteps = plan.steps[stage];
        let (min0, max0) = extrema(p);
        let m0 = d.invariant(p, phase);
        let m_scale = {
            let mut s: T = (0..d.len()).map(|i| d.weights[i] * d.c[i] * p[i].abs()).sum();
            s = s + d.heart(phase).compliance * p[d.dynamic_index(phase)].abs();
            s.max(m0.abs())
        };
        let mut tr = Tracker {
            v0: d.total_volume(p, phase),
            m0,
            m_scale,
            max0,
            min0,
            diag: PhaseDiagnostics {
                domain: k,
                cycle,
                phase,
                t_start: t0,
                t_end: t0 + dt * T::from_count(nsteps),
                volume_drift: T::zero(),
                invariant_drift: T::zero(),
                max_rise: T::zero(),
                min_fall: T::zero(),
                min_pressure: min0,
                newton_iterations: 0,
            },
        };
        note_heart(&mut out, p, phase, t0);
        snap(&mut out, p, phase, t0);
        for s in 1..=nsteps {
            let t = t0 + dt * T::from_count(s);
            let iters = stepper.step(d, p, t, dt, phase, &Unforced)?;
            let (lo, hi) = extrema(p);
            let v = d.total_volume(p, phase);
            let m = d.invariant(p, phase);
            let g = &mut tr.diag;
            g.newton_iterations += iters;
            g.volume_drift = g.volume_drift.max(((v - tr.v0) / tr.v0).abs());
            if tr.m_scale > T::zero() {
                g.invariant_drift = g.invariant_drift.max(((m - tr.m0) / tr.m_scale).abs());
            }
            g.max_rise = g.max_rise.max(hi - tr.max0);
            g.min_fall = g.min_fall.max(tr.min0 - lo);
            g.min_pressure = g.min_pressure.min(lo);
            note_heart(&mut out, p, phase, t);
            if s == nsteps || (every > 0 && s % every == 0) {
                snap(&mut out, p, phase, t);
            }
        }
        out.phases.push(tr.diag);
        let t_switch = tr.diag.t_end;
        let next = phase.other();
        let record = switch(d, p, phase, next, blend)?;
        out.switches.push(SwitchEvent { domain: k, cycle, t: t_switch, record });
        note_heart(&mut out, p, next, t_switch);
        if stage == 1 {
            snap(&mut out, p, next, t_switch);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{HeartCoupling, SpatialProfile};
    use crate::pde::domain::FluxSign;

    fn schedule() -> PhaseSchedule<f64> {
        PhaseSchedule::from_heart_rate(60.0, 0.7)
    }

    #[test]
    fn uniform_data_stays_uniform() {
        let prof = SpatialProfile::uniform(41, 1.0, 0.5, 0.004, 0.1, 1.0, 0.04).unwrap();
        let topo = Topology::normal(&prof, &HeartCoupling::uniform(0.01, 0.1), FluxSign::Printed).unwrap();
        let init: Vec<Vec<f64>> = topo.domains.iter().map(|d| vec![9.0; d.len()]).collect();
        let opts = PdeOptions { cycles: Some(3), steps_per_cycle: 40, ..PdeOptions::default() };
        let run = run_periodic(&topo, &schedule(), &init, &opts).unwrap();
        for f in &run.final_state.p {
            assert!(f.iter().all(|&v| (v - 9.0).abs() < 1e-12));
        }
        assert_eq!(run.phases.len(), 12);
        assert_eq!(run.switches.len(), 12);
    }

    #[test]
    fn volume_conserved_within_phases() {
        let prof = SpatialProfile::from_fn(81, 1.0, 0.5, 0.04, |x| (0.003 * (1.0 + x), 0.1, 2.0)).unwrap();
        let topo = Topology::fontan(&prof, &HeartCoupling::fontan(0.005, 0.01, -0.05, 0.0), FluxSign::VolumeConserving)
            .unwrap();
        let init = vec![prof.x.iter().map(|&x| 10.0 + 4.0 * x).collect::<Vec<f64>>()];
        let opts = PdeOptions { cycles: Some(2), steps_per_cycle: 100, ..PdeOptions::default() };
        let run = run_periodic(&topo, &schedule(), &init, &opts).unwrap();
        assert!(run.max_volume_drift() < 1e-12, "{}", run.max_volume_drift());
        assert!(run.max_invariant_drift() < 1e-12);
        assert!(run.heart_volume_swing[0] > 0.0);
    }

    #[test]
    fn cycle_cap_reports_nonconvergence() {
        let prof = SpatialProfile::from_fn(21, 1.0, 0.5, 0.04, |x| (0.003 * (1.0 + x), 0.1, 2.0)).unwrap();
        let topo = Topology::fontan(&prof, &HeartCoupling::fontan(0.005, 0.01, -0.05, 0.0), FluxSign::VolumeConserving)
            .unwrap();
        let init = vec![prof.x.iter().map(|&x| 10.0 + 4.0 * x).collect::<Vec<f64>>()];
        let opts = PdeOptions { max_cycles: 2, steps_per_cycle: 20, ..PdeOptions::default() };
        assert!(matches!(
            run_periodic(&topo, &schedule(), &init, &opts),
            Err(Error::NonConvergence { cycles: 2, .. })
        ));
    }

    #[test]
    fn wrong_initial_length_rejected() {
        let prof = SpatialProfile::uniform(21, 1.0, 0.5, 0.004, 0.1, 1.0, 0.04).unwrap();
        let topo = Topology::fontan(&prof, &HeartCoupling::uniform(0.01, 0.0), FluxSign::Printed).unwrap();
        assert!(run_periodic(&topo, &schedule(), &[vec![1.0; 5]], &PdeOptions::default()).is_err());
    }
}
