//! Right-hand sides of the reduced single-loop model.
//!
//! The continuous unknowns are the arterial and venous pressures. The
//! heart pressure on the open-valve side is eliminated through the total
//! volume constraint, which is why each phase has its own algebraic line.

use serde::Serialize;

use crate::model::{ParameterSet, Phase};
use crate::scalar::Scalar;

/// Arterial, capillary and pulmonary flow rates (L/min).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Flows<T> {
    pub qa: T,
    pub qc: T,
    pub qp: T,
}

/// Ohmic flows through the three resistances. `pa_root` is the aortic
/// root pressure upstream of `Ra`, `ppv` the pulmonary venous pressure.
pub fn flows<T: Scalar>(pa_root: T, pa: T, pv: T, ppv: T, p: &ParameterSet<T>) -> Flows<T> {
    Flows {
        qa: (pa_root - pa) / p.ra,
        qc: (pa - pv) / p.rc,
        qp: (pv - ppv) / p.rp,
    }
}

/// Time derivatives (mmHg/min) plus the two algebraic pressures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRhs<T> {
    pub dpa: T,
    pub dpv: T,
    pub pa_root: T,
    pub ppv: T,
}

/// Heart volume implied by volume conservation.
#[inline]
pub fn heart_volume<T: Scalar>(pa: T, pv: T, p: &ParameterSet<T>) -> T {
    p.vt - (p.va0 + p.vv0 + p.ca * pa + p.cv * pv)
}

/// Inflow phase: aortic valve shut, so `Qa = 0` and the root pressure
/// equals `Pa`; the heart fills through the pulmonary resistance.
pub fn diastole_rhs<T: Scalar>(pa: T, pv: T, p: &ParameterSet<T>) -> PhaseRhs<T> {
    let ppv = (p.vt - p.va0 - p.ca * pa - p.vv0 - p.cv * pv - p.vd0) / p.cd;
    let qc = (pa - pv) / p.rc;
    let qp = (pv - ppv) / p.rp;
    PhaseRhs {
        dpa: -qc / p.ca,
        dpv: (qc - qp) / p.cv,
        pa_root: pa,
        ppv,
    }
}

/// Outflow phase: pulmonary vein valve shut, so `Qp = 0` and `Ppv = Pv`;
/// the heart empties through `Ra`.
pub fn systole_rhs<T: Scalar>(pa: T, pv: T, p: &ParameterSet<T>) -> PhaseRhs<T> {
    let pa_root = (p.vt - p.va0 - p.ca * pa - p.vv0 - p.cv * pv - p.vs0) / p.cs;
    let qa = (pa_root - pa) / p.ra;
    let qc = (pa - pv) / p.rc;
    PhaseRhs {
        dpa: (qa - qc) / p.ca,
        dpv: qc / p.cv,
        pa_root,
        ppv: pv,
    }
}

/// Systole with the aortic valve closed because the heart is empty:
/// arteries drain into veins and nothing enters or leaves the heart.
pub fn systole_empty_rhs<T: Scalar>(pa: T, pv: T, p: &ParameterSet<T>) -> PhaseRhs<T> {
    let qc = (pa - pv) / p.rc;
    let vh = heart_volume(pa, pv, p);
    PhaseRhs {
        dpa: -qc / p.ca,
        dpv: qc / p.cv,
        pa_root: (vh - p.vs0) / p.cs,
        ppv: pv,
    }
}

/// Heart volume and pressure. The volume is shared by both phases; the
/// pressure jumps at a switch because the compliance changes.
pub fn heart_state<T: Scalar>(pa: T, pv: T, phase: Phase, p: &ParameterSet<T>) -> (T, T) {
    let vh = heart_volume(pa, pv, p);
    let ph = match phase {
        Phase::Systole => (vh - p.vs0) / p.cs,
        Phase::Diastole => (vh - p.vd0) / p.cd,
    };
    (vh, ph)
}
