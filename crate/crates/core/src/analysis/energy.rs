//! Gradient energy `y(t) = ½∫q·P_x²` and its decay monitor.

use serde::Serialize;

use crate::analysis::hypotheses::gradient_energy;
use crate::model::Phase;
use crate::pde::domain::Domain;
use crate::pde::periodic::Snapshot;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyConstants<T> {
    pub c1: T,
    pub c2: T,
    pub c3: T,
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

impl<T: Scalar> EnergyConstants<T> {
    pub fn new(domain: &Domain<T>) -> Self {
        let mu = domain.mu;
        let len = domain.length();
        let pi = T::PI();
        let mut sup = T::zero();
        let mut inf = T::infinity();
        for i in 0..domain.len() {
            let (c, a0, n) = (domain.c[i], domain.a0[i], domain.n[i]);
            let a2 = a0 * a0;
            sup = sup.max((T::lit(64.0) * pi * mu * mu * len * c * c / (n * a2 * a2)).abs());
            inf = inf.min(n * a2 / c);
        }
        let c1 = sup.sqrt();
        let c2 = pi / (T::lit(4.0) * mu * len * len) * inf;
        let c3 = T::one() - domain.c_norm1() / domain.heart(Phase::Diastole).compliance;
        Self {
            c1,
            c2,
            c3,
            alpha: c1 * c2,
            beta: T::one() / c1,
            gamma: c3 / c1,
        }
    }

    /// Decay threshold on `y` for `phase`: `β²` in systole, `γ²` in diastole.
    pub fn threshold(&self, phase: Phase) -> T {
        match phase {
            Phase::Systole => self.beta * self.beta,
            Phase::Diastole => self.gamma * self.gamma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergySample<T> {
    pub t: T,
    pub phase: Phase,
    pub y: T,
    /// `∫ C·P_t²`.
    pub a: T,
    /// `C_s·P_t²` at the systolic heart end.
    pub b: T,
    /// `C_d·P_t²` at the diastolic heart end.
    pub d: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayViolation<T> {
    pub t: T,
    pub phase: Phase,
    pub y_before: T,
    pub y_after: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyTrace<T> {
    pub constants: EnergyConstants<T>,
    pub samples: Vec<EnergySample<T>>,
    /// Sample pairs where `y` was below threshold and the monitor applied.
    pub checked_pairs: usize,
    pub violations: Vec<DecayViolation<T>>,
    /// Cycle-length bound from the last systole/diastole pair, if defined.
    pub t_star: Option<T>,
}

/// Builds the trace from consecutive snapshots of one domain. Pairs that
/// straddle a switch or repeat an instant are skipped.
pub fn energy_trace<T: Scalar>(domain: &Domain<T>, snapshots: &[&Snapshot<T>]) -> EnergyTrace<T> {
    let constants = EnergyConstants::new(domain);
    let ys: Vec<T> = snapshots
        .iter()
        .map(|s| T::lit(0.5) * gradient_energy(domain, &s.p))
        .collect();
    let y_max = ys.iter().copied().fold(T::zero(), T::max);
    let slack = T::lit(1e-8) * y_max;
    let i_s = domain.dynamic_index(Phase::Systole);
    let i_d = domain.dynamic_index(Phase::Diastole);
    let c_s = domain.heart(Phase::Systole).compliance;
    let c_d = domain.heart(Phase::Diastole).compliance;

    let mut samples = Vec::new();
    let mut violations = Vec::new();
    let mut checked_pairs = 0;
    for k in 1..snapshots.len() {
        let (s0, s1) = (snapshots[k - 1], snapshots[k]);
        let dt = s1.t - s0.t;
        if s0.phase != s1.phase || !(dt > T::zero()) {
            continue;
        }
        let pt: Vec<T> = s1.p.iter().zip(&s0.p).map(|(a, b)| (*a - *b) / dt).collect();
        let a: T = (0..domain.len()).map(|i| domain.weights[i] * domain.c[i] * pt[i] * pt[i]).sum();
        samples.push(EnergySample {
            t: s1.t,
            phase: s1.phase,
            y: ys[k],
            a,
            b: c_s * pt[i_s] * pt[i_s],
            d: c_d * pt[i_d] * pt[i_d],
        });
        if ys[k - 1] < constants.threshold(s0.phase) {
            checked_pairs += 1;
            if ys[k] > ys[k - 1] + slack {
                violations.push(DecayViolation {
                    t: s1.t,
                    phase: s1.phase,
                    y_before: ys[k - 1],
                    y_after: ys[k],
                });
            }
        }
    }
    let t_star = t_star(&constants, snapshots, &ys);
    EnergyTrace {
        constants,
        samples,
        checked_pairs,
        violations,
        t_star,
    }
}

/// `T* = (2/(αβ))·ln[√y₂(t₁)·(β − √y₁(t₁)) / (κ·√y₁(t₁)·(γ − √y₂(t₁)))]`
/// with `κ = (β − √y₁(0))/(γ − √y₁(0))`, where `y₁` runs over a systole
/// and `y₂` starts right after the following switch.
fn t_star<T: Scalar>(k: &EnergyConstants<T>, snaps: &[&Snapshot<T>], ys: &[T]) -> Option<T> {
    let end = (1..snaps.len())
        .rev()
        .find(|&i| snaps[i - 1].phase == Phase::Systole && snaps[i].phase == Phase::Diastole)?;
    let start = (0..end)
        .rev()
        .take_while(|&i| snaps[i].phase == Phase::Systole)
        .last()?;
    let y1_0 = ys[start].sqrt();
    let y1_t1 = ys[end - 1].sqrt();
    let y2_t1 = ys[end].sqrt();
    let kappa = (k.beta - y1_0) / (k.gamma - y1_0);
    let arg = y2_t1 * (k.beta - y1_t1) / (kappa * y1_t1 * (k.gamma - y2_t1));
    let v = T::lit(2.0) / (k.alpha * k.beta) * arg.ln();
    (v.is_finite() && arg > T::zero()).then_some(v)
}
