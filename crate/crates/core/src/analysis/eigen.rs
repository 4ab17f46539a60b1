//! Roots of the transcendental relations behind the comparison functions.
//!
//! With `z = λL/d` and `κ = d²·C_heart/(k·L)`, the systolic relation is
//! `tan z = −κz` and the diastolic one `tan z = κz`. Roots are found on
//! the smooth forms `sin z ± κz·cos z`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Phase;
use crate::pde::domain::Domain;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenPair<T> {
    pub lambda: T,
    pub branch: usize,
    pub phase: Phase,
    /// `|sin z ± κz·cos z|` at the root.
    pub residual: T,
}

fn relation<T: Scalar>(phase: Phase, kappa: T, z: T) -> T {
    match phase {
        Phase::Systole => z.sin() + kappa * z * z.cos(),
        Phase::Diastole => z.sin() - kappa * z * z.cos(),
    }
}

fn bracket<T: Scalar>(phase: Phase, kappa: T, branch: usize) -> (T, T) {
    let pi = T::PI();
    let half = pi * T::lit(0.5);
    let n = T::from_count(branch);
    match phase {
        Phase::Systole => (pi * n - half, pi * n),
        Phase::Diastole if kappa > T::one() => {
            let lo = pi * (n - T::one());
            (lo, lo + half)
        }
        Phase::Diastole => (pi * n, pi * n + half),
    }
}

/// Root on `branch` (0 gives `λ = 0`) of the relation for `phase`.
pub fn eigen_lambda<T: Scalar>(phase: Phase, d: T, k: T, c_heart: T, length: T, branch: usize) -> Result<EigenPair<T>> {
    if !(d > T::zero() && k > T::zero() && length > T::zero() && c_heart >= T::zero()) {
        return Err(Error::InvalidInput("eigen_lambda needs d, k, L > 0 and C ≥ 0".into()));
    }
    if branch == 0 {
        return Ok(EigenPair { lambda: T::zero(), branch, phase, residual: T::zero() });
    }
    let kappa = d * d * c_heart / (k * length);
    let f = |z: T| relation(phase, kappa, z);
    let (mut a, mut b) = bracket(phase, kappa, branch);
    // The diastolic first branch with κ > 1 has a trivial root at 0.
    if a == T::zero() {
        a = b * T::lit(1e-9);
    }
    let (mut fa, fb) = (f(a), f(b));
    let z = if fa == T::zero() {
        a
    } else if fb == T::zero() {
        b
    } else {
        if (fa > T::zero()) == (fb > T::zero()) {
            return Err(Error::BranchEmpty {
                phase: phase.to_string(),
                branch,
            });
        }
        for _ in 0..200 {
            let mid = (a + b) * T::lit(0.5);
            if mid <= a || mid >= b {
                break;
            }
            let fm = f(mid);
            if fm == T::zero() {
                a = mid;
                b = mid;
                break;
            }
            if (fm > T::zero()) == (fa > T::zero()) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        if f(a).abs() <= f(b).abs() {
            a
        } else {
            b
        }
    };
    Ok(EigenPair {
        lambda: z * d / length,
        branch,
        phase,
        residual: f(z).abs(),
    })
}

/// `(k₁, d₁, k₂, d₂)`: `k₁ = inf q`, `d₁² = k₁/inf C`, `k₂ = sup q`,
/// `d₂² = k₂/sup C`, with `q` evaluated on the field `p`.
pub fn diffusion_scales<T: Scalar>(domain: &Domain<T>, p: &[T]) -> (T, T, T, T) {
    let q: Vec<T> = (0..domain.len()).map(|i| domain.q(i, p[i])).collect();
    let k1 = q.iter().copied().fold(T::infinity(), T::min);
    let k2 = q.iter().copied().fold(T::zero(), T::max);
    let c_inf = domain.c.iter().copied().fold(T::infinity(), T::min);
    let c_sup = domain.c.iter().copied().fold(T::zero(), T::max);
    (k1, (k1 / c_inf).sqrt(), k2, (k2 / c_sup).sqrt())
}
