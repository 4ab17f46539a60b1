//! Phase switches: moving the heart to the other end of a domain.
//!
//! The field is copied, plus `δ·s(x)` with `s` a cubic smoothstep that is
//! 1 at the new dynamic end and 0 at distance `ε` from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Phase;
use crate::pde::domain::{Domain, End};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchMode {
    /// New boundary value conserves heart volume: `V0 + C·B` is unchanged.
    #[default]
    Heart,
    /// `δ` keeps `Σ w·C·P + σ·C_heart·B` unchanged across the switch.
    MConserving,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwitchBlend<T> {
    pub epsilon: T,
    pub mode: SwitchMode,
}

impl<T: Scalar> SwitchBlend<T> {
    pub fn new(epsilon: T, mode: SwitchMode) -> Result<Self> {
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::InvalidInput(format!("blend width must be positive, got {epsilon}")));
        }
        Ok(Self { epsilon, mode })
    }

    /// Width as a fraction of the domain length.
    pub fn for_domain(domain: &Domain<T>, fraction: T, mode: SwitchMode) -> Result<Self> {
        Self::new(domain.length() * fraction, mode)
    }

    /// `s` at distance `d ≥ 0` from the end.
    pub fn shape(&self, d: T) -> T {
        if d >= self.epsilon {
            return T::zero();
        }
        let u = T::one() - d / self.epsilon;
        u * u * (T::lit(3.0) - T::lit(2.0) * u)
    }

    /// `s` at every node, measured from `end`.
    pub fn profile(&self, domain: &Domain<T>, end: End) -> Vec<T> {
        let xe = domain.x[domain.end_index(end)];
        domain.x.iter().map(|&x| self.shape((x - xe).abs())).collect()
    }
}

/// What a switch did.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwitchRecord<T> {
    pub from: Phase,
    pub to: Phase,
    pub delta: T,
    /// Boundary value at the old dynamic end before the switch.
    pub b_before: T,
    /// Boundary value at the new dynamic end after the switch.
    pub b_after: T,
    pub invariant_before: T,
    pub invariant_after: T,
    pub volume_before: T,
    pub volume_after: T,
}

/// Applies the `from → to` switch to `p` in place.
pub fn switch<T: Scalar>(
    domain: &Domain<T>,
    p: &mut [T],
    from: Phase,
    to: Phase,
    blend: &SwitchBlend<T>,
) -> Result<SwitchRecord<T>> {
    let hf = domain.heart(from);
    let ht = domain.heart(to);
    let i_from = domain.dynamic_index(from);
    let i_to = domain.dynamic_index(to);
    let s = blend.profile(domain, ht.end);
    let invariant_before = domain.invariant(p, from);
    let volume_before = domain.total_volume(p, from);
    let b_before = p[i_from];

    let delta = match blend.mode {
        SwitchMode::Heart => {
            if !(ht.compliance > T::zero()) {
                return Err(Error::InfeasibleBlend {
                    denominator: ht.compliance.as_f64(),
                });
            }
            let b_new = (hf.v0 + hf.compliance * b_before - ht.v0) / ht.compliance;
            b_new - p[i_to]
        }
        SwitchMode::MConserving => {
            let weighted: T = (0..domain.len())
                .map(|i| domain.weights[i] * domain.c[i] * s[i])
                .sum();
            let heart = domain.sigma(to) * ht.compliance;
            let denom = weighted + heart;
            let scale = domain.c_norm1() + ht.compliance;
            if !(denom.abs() > T::lit(1e-14) * scale) {
                return Err(Error::InfeasibleBlend {
                    denominator: denom.as_f64(),
                });
            }
            (invariant_before - domain.invariant(p, to)) / denom
        }
    };
    for (v, &si) in p.iter_mut().zip(&s) {
        if si > T::zero() {
            *v = *v + delta * si;
        }
    }
    Ok(SwitchRecord {
        from,
        to,
        delta,
        b_before,
        b_after: p[i_to],
        invariant_before,
        invariant_after: domain.invariant(p, to),
        volume_before,
        volume_after: domain.total_volume(p, to),
    })
}
