//! Checkable hypotheses of the existence results.

use serde::Serialize;

use crate::model::Phase;
use crate::pde::domain::Domain;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypothesisReport<T> {
    pub inf_c: T,
    pub inf_c_positive: bool,
    pub c_norm1: T,
    /// Diastolic heart compliance the norm is compared with.
    pub c_heart: T,
    pub c_norm1_lt_c_heart: bool,
    /// `∫ q(x, P0)·P0_x² dx`.
    pub energy: T,
    /// `(1/(64πμ²|Ω|))·((C_heart − ‖C‖₁)/C_heart²)·inf(N·A0⁴/C²)`.
    pub energy_limit: T,
    pub energy_bound: bool,
    /// `∫ C·P0 dx + C_s·P0` at the systolic dynamic end.
    pub m: T,
    pub m_positive: bool,
}

impl<T: Scalar> HypothesisReport<T> {
    pub fn all_hold(&self) -> bool {
        self.inf_c_positive && self.c_norm1_lt_c_heart && self.energy_bound && self.m_positive
    }
}

/// `Σ_faces q̄·((P_{i+1} − P_i)/h)²·h` with `q̄` the face mean.
pub fn gradient_energy<T: Scalar>(domain: &Domain<T>, p: &[T]) -> T {
    (0..domain.len() - 1)
        .map(|j| {
            let h = domain.x[j + 1] - domain.x[j];
            let k = (domain.q(j, p[j]) + domain.q(j + 1, p[j + 1])) * T::lit(0.5);
            let g = (p[j + 1] - p[j]) / h;
            k * g * g * h
        })
        .sum()
}

/// Evaluates the four hypotheses on `p0`.
pub fn check_hypotheses<T: Scalar>(domain: &Domain<T>, p0: &[T]) -> HypothesisReport<T> {
    let inf_c = domain.c.iter().copied().fold(T::infinity(), T::min);
    let c_norm1 = domain.c_norm1();
    let c_heart = domain.heart(Phase::Diastole).compliance;
    let inf_ratio = (0..domain.len())
        .map(|i| {
            let a2 = domain.a0[i] * domain.a0[i];
            domain.n[i] * a2 * a2 / (domain.c[i] * domain.c[i])
        })
        .fold(T::infinity(), T::min);
    let mu = domain.mu;
    let energy_limit = T::one() / (T::lit(64.0) * T::PI() * mu * mu * domain.length()) * (c_heart - c_norm1)
        / (c_heart * c_heart)
        * inf_ratio;
    let energy = gradient_energy(domain, p0);
    let weighted: T = (0..domain.len()).map(|i| domain.weights[i] * domain.c[i] * p0[i]).sum();
    let m = weighted + domain.heart(Phase::Systole).compliance * p0[domain.dynamic_index(Phase::Systole)];
    HypothesisReport {
        inf_c,
        inf_c_positive: inf_c > T::zero(),
        c_norm1,
        c_heart,
        c_norm1_lt_c_heart: c_norm1 < c_heart,
        energy,
        energy_limit,
        energy_bound: energy <= energy_limit,
        m,
        m_positive: m > T::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::domain::{End, FluxSign, HeartEnd};

    fn constant(c: f64, cls: f64, cld: f64) -> Domain<f64> {
        let m = 21;
        let x = (0..m).map(|i| i as f64 / 20.0).collect();
        Domain::new(
            "c",
            x,
            vec![c; m],
            vec![0.1; m],
            vec![1.0; m],
            0.04,
            HeartEnd { end: End::Left, compliance: cls, v0: 0.0 },
            HeartEnd { end: End::Right, compliance: cld, v0: 0.0 },
            FluxSign::Printed,
        )
        .unwrap()
    }

    #[test]
    fn gradient_energy_grows_with_gradient() {
        let d = constant(0.001, 0.005, 0.01);
        let p1: Vec<f64> = d.x.iter().map(|&x| 5.0 + x).collect();
        let p2: Vec<f64> = d.x.iter().map(|&x| 5.0 + 2.0 * x).collect();
        assert!(gradient_energy(&d, &p2) > gradient_energy(&d, &p1));
        assert_eq!(gradient_energy(&d, &[3.0; 21]), 0.0);
    }
}
