//! Piecewise-constant single-loop profile that mimics the lumped model.
//!
//! The loop `x ∈ [0, 1]` is split into five segments, read from the
//! systolic heart end:
//!
//! | segment      | span       | role                                   |
//! |--------------|------------|----------------------------------------|
//! | aortic       | [0, 0.1)   | resistor `Ra`                          |
//! | arteries     | [0.1, 0.3) | compliance `Ca`                        |
//! | capillaries  | [0.3, 0.5) | resistor `Rc`                          |
//! | veins        | [0.5, 0.7) | compliance `Cv`                        |
//! | pulmonary    | [0.7, 1]   | resistor `Rp`, ends at the filling heart |
//!
//! With `μ = 1/(8π)` a segment of length `ℓ` and vessel count `N` has
//! resistance `ℓ / (N·A²)`, so resistor segments use `N = ℓ / (R·A0²)`
//! and a near-zero compliance. Compliance segments spread the lumped
//! compliance evenly (`C = C_lump / ℓ`) and use many vessels so their own
//! resistance is negligible.

use crate::error::Result;
use crate::model::{HeartCoupling, ParameterSet, SpatialProfile};
use crate::scalar::Scalar;

/// Segment boundaries of the loop.
pub const SEGMENTS: [f64; 6] = [0.0, 0.1, 0.3, 0.5, 0.7, 1.0];
/// Basal area of every segment.
pub const BASAL_AREA: f64 = 0.1;
/// Compliance density used inside resistor segments.
pub const RESISTOR_COMPLIANCE: f64 = 1e-9;
/// Vessel count in compliance segments.
pub const COMPLIANT_VESSELS: f64 = 100.0;

fn segment_of(x: f64) -> usize {
    SEGMENTS[1..5].iter().take_while(|&&b| x >= b - 1e-12).count()
}

/// Profile and heart coupling for `params` on `nodes` uniform nodes.
/// `L_r` is placed at the artery/capillary boundary; it only matters for
/// two-domain layouts.
pub fn fontan_mimic<T: Scalar>(params: &ParameterSet<T>, nodes: usize) -> Result<(SpatialProfile<T>, HeartCoupling<T>)> {
    let a0 = T::lit(BASAL_AREA);
    let mu = T::one() / (T::lit(8.0) * T::PI());
    let len = |k: usize| T::lit(SEGMENTS[k + 1] - SEGMENTS[k]);
    let resistor = |k: usize, r: T| (T::lit(RESISTOR_COMPLIANCE), a0, len(k) / (r * a0 * a0));
    let table = [
        resistor(0, params.ra),
        (params.ca / len(1), a0, T::lit(COMPLIANT_VESSELS)),
        resistor(2, params.rc),
        (params.cv / len(3), a0, T::lit(COMPLIANT_VESSELS)),
        resistor(4, params.rp),
    ];
    let profile = SpatialProfile::from_fn(nodes, T::one(), T::lit(SEGMENTS[2]), mu, |x| table[segment_of(x.as_f64())])?;
    let coupling = HeartCoupling::fontan(params.cs, params.cd, params.vs0, params.vd0);
    Ok((profile, coupling))
}

/// Initial field matching a lumped state: `pa` on the arterial side,
/// `pv` in the veins, linear ramps across the capillary and pulmonary
/// resistors, and `ppv` at the filling end.
pub fn mimic_initial<T: Scalar>(profile: &SpatialProfile<T>, pa: T, pv: T, ppv: T) -> Vec<T> {
    let s = |k: usize| T::lit(SEGMENTS[k]);
    profile
        .x
        .iter()
        .map(|&x| match segment_of(x.as_f64()) {
            0 | 1 => pa,
            2 => pa + (pv - pa) * (x - s(2)) / (s(3) - s(2)),
            3 => pv,
            _ => pv + (ppv - pv) * (x - s(4)) / (s(5) - s(4)),
        })
        .collect()
}
