//! Cycle-by-cycle integration of the switched single-loop model.
//!
//! Each cycle integrates diastole and then systole. Switch times are known
//! from the schedule, so the only located event is the optional
//! empty-heart stop inside systole. `(Pa, Pv)` are continuous across
//! switches. The heart volume is carried as a third state, integrated
//! from the valve flows, which makes the total-volume identity a real
//! check on the integrator rather than a tautology.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ParameterSet, Phase};
use crate::ode::integrator::{integrate, RkOptions, Step, Stop};
use crate::ode::rhs::{diastole_rhs, flows, heart_volume, systole_empty_rhs, systole_rhs, PhaseRhs};
use crate::scalar::Scalar;

/// Full observable state at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeState<T> {
    pub t: T,
    pub phase: Phase,
    pub pa: T,
    /// Aortic root pressure, upstream of `Ra`.
    pub pa_root: T,
    pub pv: T,
    pub ppv: T,
    pub ph: T,
    pub va: T,
    pub vv: T,
    pub vh: T,
    pub qa: T,
    pub qc: T,
    pub qp: T,
}

/// Summary of one converged cycle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleObservables<T> {
    pub stroke_volume: T,
    pub cardiac_output: T,
    pub pa_min: T,
    pub pa_max: T,
    pub ppv_min: T,
    pub ppv_max: T,
    pub pa_root_min: T,
    pub pa_root_max: T,
    pub vh_min: T,
    pub vh_max: T,
    /// Whether ejection stopped early because the heart emptied.
    pub ejection_truncated: bool,
    #[serde(skip)]
    pub pv_loop: Vec<(T, T)>,
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    /// Run exactly this many cycles instead of iterating to convergence.
    pub cycles: Option<usize>,
    /// Sup-norm tolerance on `(Pa, Pv)` between successive cycle starts (mmHg).
    pub tol: T,
    pub max_cycles: usize,
    pub initial_pa: T,
    pub initial_pv: T,
    pub rk: RkOptions<T>,
    /// Uniform output samples per cycle, in addition to switch instants.
    pub samples_per_cycle: usize,
    /// Close the aortic valve once the heart volume reaches zero.
    pub empty_heart_guard: bool,
    /// Keep every cycle in the trajectory instead of only the last one.
    pub record_all_cycles: bool,
}

impl<T: Scalar> Default for OdeOptions<T> {
    fn default() -> Self {
        Self {
            cycles: None,
            tol: T::lit(1e-8),
            max_cycles: 500,
            initial_pa: T::lit(80.0),
            initial_pv: T::lit(10.0),
            rk: RkOptions::default(),
            samples_per_cycle: 500,
            empty_heart_guard: true,
            record_all_cycles: false,
        }
    }
}

/// Result of [`simulate`].
#[derive(Debug, Clone)]
pub struct OdeRun<T> {
    /// Samples of the final cycle (or every cycle), switch instants doubled
    /// with the pre- and post-switch phase.
    pub trajectory: Vec<OdeState<T>>,
    pub observables: CycleObservables<T>,
    pub cycles_run: usize,
    pub converged: bool,
    /// Sup-norm change of `(Pa, Pv)` over the final cycle.
    pub residual: T,
    /// Largest `|Va + Vv + Vh - VT|` over every accepted step of the run (L).
    pub max_volume_error: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    Filling,
    Ejecting,
    Empty,
}

impl Regime {
    fn phase(self) -> Phase {
        match self {
            Regime::Filling => Phase::Diastole,
            Regime::Ejecting | Regime::Empty => Phase::Systole,
        }
    }

    fn algebraic<T: Scalar>(self, y: &[T; 3], p: &ParameterSet<T>) -> PhaseRhs<T> {
        match self {
            Regime::Filling => diastole_rhs(y[0], y[1], p),
            Regime::Ejecting => systole_rhs(y[0], y[1], p),
            Regime::Empty => systole_empty_rhs(y[0], y[1], p),
        }
    }

    fn rhs<T: Scalar>(self, y: &[T; 3], p: &ParameterSet<T>) -> [T; 3] {
        let r = self.algebraic(y, p);
        let dvh = match self {
            Regime::Filling => (y[1] - r.ppv) / p.rp,
            Regime::Ejecting => -(r.pa_root - y[0]) / p.ra,
            Regime::Empty => T::zero(),
        };
        [r.dpa, r.dpv, dvh]
    }

    fn state<T: Scalar>(self, t: T, y: &[T; 3], p: &ParameterSet<T>) -> OdeState<T> {
        let r = self.algebraic(y, p);
        let (pa, pv, vh) = (y[0], y[1], y[2]);
        let mut q = flows(r.pa_root, pa, pv, r.ppv, p);
        match self {
            Regime::Filling => q.qa = T::zero(),
            Regime::Ejecting => q.qp = T::zero(),
            Regime::Empty => {
                q.qa = T::zero();
                q.qp = T::zero();
            }
        }
        let ph = match self.phase() {
            Phase::Systole => (vh - p.vs0) / p.cs,
            Phase::Diastole => (vh - p.vd0) / p.cd,
        };
        OdeState {
            t,
            phase: self.phase(),
            pa,
            pa_root: r.pa_root,
            pv,
            ppv: r.ppv,
            ph,
            va: p.va0 + p.ca * pa,
            vv: p.vv0 + p.cv * pv,
            vh,
            qa: q.qa,
            qc: q.qc,
            qp: q.qp,
        }
    }
}

struct CycleRunner<'a, T: Scalar> {
    p: &'a ParameterSet<T>,
    o: &'a OdeOptions<T>,
    h: Option<T>,
    max_volume_error: T,
    truncated: bool,
}

impl<'a, T: Scalar> CycleRunner<'a, T> {
    fn volume_error(&self, y: &[T; 3]) -> T {
        let p = self.p;
        (p.va0 + p.ca * y[0] + p.vv0 + p.cv * y[1] + y[2] - p.vt).abs()
    }

    /// Integrates one regime on `[t0, t1]`, pushing samples at the
    /// requested `sample_times` (strictly inside the interval).
    fn advance(
        &mut self,
        regime: Regime,
        t0: T,
        t1: T,
        y0: [T; 3],
        sample_times: &[T],
        out: &mut Vec<OdeState<T>>,
    ) -> Result<(Stop<T, 3>, T)> {
        let p = self.p;
        let guard = self.o.empty_heart_guard && regime == Regime::Ejecting;
        let event = guard.then_some(|y: &[T; 3]| heart_volume(y[0], y[1], p));
        let mut next = sample_times.iter().position(|&s| s > t0).unwrap_or(sample_times.len());
        let mut bad: Option<T> = None;
        let mut max_err = self.max_volume_error;
        let (stop, h) = integrate(
            |y: &[T; 3]| regime.rhs(y, p),
            t0,
            y0,
            t1,
            &self.o.rk,
            self.h,
            event,
            |s: &Step<T, 3>| {
                if s.y1.iter().any(|v| !v.is_finite()) {
                    bad.get_or_insert(s.t1);
                }
                let err = (p.va0 + p.ca * s.y1[0] + p.vv0 + p.cv * s.y1[1] + s.y1[2] - p.vt).abs();
                max_err = max_err.max(err);
                while next < sample_times.len() && sample_times[next] < s.t1 {
                    let ts = sample_times[next];
                    out.push(regime.state(ts, &s.interpolate(ts), p));
                    next += 1;
                }
            },
        )?;
        self.max_volume_error = max_err;
        if let Some(t) = bad {
            return Err(Error::NonphysicalState {
                t: t.as_f64(),
                detail: "non-finite pressure".into(),
            });
        }
        self.h = Some(h);
        Ok((stop, h))
    }

    /// One full cycle starting at `t_start` with state `y`. Returns the
    /// state at the end of systole.
    fn cycle(&mut self, t_start: T, y: [T; 3], out: &mut Vec<OdeState<T>>) -> Result<[T; 3]> {
        let p = self.p;
        let sched = p.schedule();
        let period = sched.period;
        let n = self.o.samples_per_cycle;
        let samples: Vec<T> = (1..n)
            .map(|k| t_start + period * T::from_count(k) / T::from_count(n))
            .collect();
        let t_switch = t_start + sched.t_diastole_end;
        let t_end = t_start + period;

        out.push(Regime::Filling.state(t_start, &y, p));
        let (stop, _) = self.advance(Regime::Filling, t_start, t_switch, y, &samples, out)?;
        let y = stop_state(stop);
        out.push(Regime::Filling.state(t_switch, &y, p));

        self.truncated = false;
        let start_regime = if self.o.empty_heart_guard && heart_volume(y[0], y[1], p) <= T::zero() {
            Regime::Empty
        } else {
            Regime::Ejecting
        };
        out.push(start_regime.state(t_switch, &y, p));
        let (stop, _) = self.advance(start_regime, t_switch, t_end, y, &samples, out)?;
        let y = match stop {
            Stop::Reached { y } => y,
            Stop::Event { t, y } => {
                self.truncated = true;
                out.push(Regime::Ejecting.state(t, &y, p));
                out.push(Regime::Empty.state(t, &y, p));
                let (stop, _) = self.advance(Regime::Empty, t, t_end, y, &samples, out)?;
                stop_state(stop)
            }
        };
        let end_regime = if self.truncated || start_regime == Regime::Empty {
            Regime::Empty
        } else {
            Regime::Ejecting
        };
        out.push(end_regime.state(t_end, &y, p));
        if self.volume_error(&y) > self.max_volume_error {
            self.max_volume_error = self.volume_error(&y);
        }
        Ok(y)
    }
}

fn stop_state<T: Scalar>(stop: Stop<T, 3>) -> [T; 3] {
    match stop {
        Stop::Reached { y } | Stop::Event { y, .. } => y,
    }
}

/// Integrates the model until the cycle-start state repeats to within
/// `options.tol`, or for exactly `options.cycles` cycles.
pub fn simulate<T: Scalar>(params: &ParameterSet<T>, options: &OdeOptions<T>) -> Result<OdeRun<T>> {
    let report = params.validate();
    if !report.is_valid() {
        return Err(Error::InvalidInput(report.summary()));
    }
    let p = params;
    let period = p.schedule().period;
    let (pa0, pv0) = (options.initial_pa, options.initial_pv);
    let mut y = [pa0, pv0, heart_volume(pa0, pv0, p)];
    let mut runner = CycleRunner {
        p,
        o: options,
        h: None,
        max_volume_error: T::zero(),
        truncated: false,
    };
    let cap = options.cycles.unwrap_or(options.max_cycles).max(1);
    let mut trajectory = Vec::new();
    let mut residual = T::infinity();
    let mut cycles_run = 0;
    for k in 0..cap {
        if !options.record_all_cycles {
            trajectory.clear();
        }
        let t_start = period * T::from_count(k);
        let start = y;
        y = runner.cycle(t_start, y, &mut trajectory)?;
        // Close the loop with the post-switch state that starts the next cycle.
        let closing = Regime::Filling.state(t_start + period, &y, p);
        residual = (y[0] - start[0]).abs().max((y[1] - start[1]).abs());
        cycles_run = k + 1;
        if !(residual.is_finite()) {
            return Err(Error::NonphysicalState {
                t: (t_start + period).as_f64(),
                detail: "non-finite cycle residual".into(),
            });
        }
        let done = match options.cycles {
            Some(n) => cycles_run == n,
            None => residual < options.tol,
        };
        if done {
            trajectory.push(closing);
            break;
        }
    }
    let converged = residual < options.tol;
    if options.cycles.is_none() && !converged {
        return Err(Error::NonConvergence {
            cycles: cycles_run,
            residual: residual.as_f64(),
        });
    }
    let observables = observe_cycle(p, final_cycle(&trajectory, period), runner.truncated);
    Ok(OdeRun {
        trajectory,
        observables,
        cycles_run,
        converged,
        residual,
        max_volume_error: runner.max_volume_error,
    })
}

/// The last cycle's samples of a trajectory.
fn final_cycle<T: Scalar>(trajectory: &[OdeState<T>], period: T) -> &[OdeState<T>] {
    let Some(last) = trajectory.last() else {
        return trajectory;
    };
    let start_t = last.t - period;
    let slack = period * T::lit(1e-9);
    let first = trajectory
        .iter()
        .position(|s| s.t >= start_t - slack)
        .unwrap_or(0);
    &trajectory[first..]
}

fn observe_cycle<T: Scalar>(p: &ParameterSet<T>, cycle: &[OdeState<T>], truncated: bool) -> CycleObservables<T> {
    let mm = |f: fn(&OdeState<T>) -> T| {
        cycle.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), s| {
            let v = f(s);
            (lo.min(v), hi.max(v))
        })
    };
    let (vh_min, vh_max) = mm(|s| s.vh);
    let (pa_min, pa_max) = mm(|s| s.pa);
    let (ppv_min, ppv_max) = mm(|s| s.ppv);
    let (pa_root_min, pa_root_max) = mm(|s| s.pa_root);
    let stroke_volume = vh_max - vh_min;
    CycleObservables {
        stroke_volume,
        cardiac_output: stroke_volume * p.heart_rate,
        pa_min,
        pa_max,
        ppv_min,
        ppv_max,
        pa_root_min,
        pa_root_max,
        vh_min,
        vh_max,
        ejection_truncated: truncated,
        pv_loop: pv_loop(cycle),
    }
}

/// Heart pressure–volume pairs `(Vh, Ph)` along a trajectory.
pub fn pv_loop<T: Scalar>(trajectory: &[OdeState<T>]) -> Vec<(T, T)> {
    trajectory.iter().map(|s| (s.vh, s.ph)).collect()
}
