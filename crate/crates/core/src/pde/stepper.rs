//! Backward Euler with Newton for one domain.
//!
//! Node `i` carries the balance
//! `cap_i·(P_i − P_i^old)/dt = F_{i+1/2} − F_{i−1/2} + w_i·g_i`,
//! with `F_{i+1/2} = q̄·(P_{i+1} − P_i)/h` and `q̄` the mean of the two
//! nodal conductivities. `cap_i = w_i·C_i`, plus `σ·C_heart` at the node
//! holding the dynamic boundary unknown. A missing face is a no-flux end.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Phase;
use crate::pde::conductivity::Q_FLOOR;
use crate::pde::domain::Domain;
use crate::scalar::Scalar;

/// Source terms, used by manufactured-solution tests.
pub trait Forcing<T> {
    /// Volumetric source density at `(x, t)`.
    fn interior(&self, x: T, t: T) -> T;
    /// Extra flux into the dynamic-end balance.
    fn boundary(&self, _t: T) -> T;
}

/// No sources.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unforced;

impl<T: Scalar> Forcing<T> for Unforced {
    fn interior(&self, _x: T, _t: T) -> T {
        T::zero()
    }

    fn boundary(&self, _t: T) -> T {
        T::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct StepOptions<T> {
    /// Newton stops once `‖δ‖∞ ≤ newton_tol·(1 + ‖P‖∞)`.
    pub newton_tol: T,
    pub newton_max_iter: usize,
    /// States with `|P|` above this are rejected (mmHg).
    pub pressure_bound: T,
}

impl<T: Scalar> Default for StepOptions<T> {
    fn default() -> Self {
        Self {
            newton_tol: T::lit(1e-13),
            newton_max_iter: 30,
            pressure_bound: T::lit(1e5),
        }
    }
}

/// Rejects non-finite, out-of-box, or degenerate states.
pub fn check_state<T: Scalar>(domain: &Domain<T>, p: &[T], t: T, bound: T) -> Result<()> {
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() || v.abs() > bound {
            return Err(Error::NonphysicalState {
                t: t.as_f64(),
                detail: format!("P = {v} at x = {} in {}", domain.x[i], domain.name),
            });
        }
        let q = domain.q(i, v);
        if domain.a0[i] + domain.c[i] * v <= T::zero() || q.as_f64() < Q_FLOOR {
            return Err(Error::DegenerateConductivity {
                node: i,
                x: domain.x[i].as_f64(),
                q: q.as_f64(),
            });
        }
    }
    Ok(())
}

/// Reusable buffers for repeated steps on one domain.
#[derive(Debug, Clone)]
pub struct Stepper<T> {
    pub options: StepOptions<T>,
    old: Vec<T>,
    q: Vec<T>,
    dq: Vec<T>,
    lower: Vec<T>,
    diag: Vec<T>,
    upper: Vec<T>,
    rhs: Vec<T>,
    cprime: Vec<T>,
}

impl<T: Scalar> Stepper<T> {
    pub fn new(nodes: usize, options: StepOptions<T>) -> Self {
        let z = vec![T::zero(); nodes];
        Self {
            options,
            old: z.clone(),
            q: z.clone(),
            dq: z.clone(),
            lower: z.clone(),
            diag: z.clone(),
            upper: z.clone(),
            rhs: z.clone(),
            cprime: z,
        }
    }

    /// Advances `p` from `t_new − dt` to `t_new` in `phase`. Returns the
    /// number of Newton iterations.
    pub fn step<F: Forcing<T>>(
        &mut self,
        domain: &Domain<T>,
        p: &mut [T],
        t_new: T,
        dt: T,
        phase: Phase,
        forcing: &F,
    ) -> Result<usize> {
        let m = domain.len();
        if p.len() != m || self.old.len() != m {
            return Err(Error::InvalidInput("state length does not match domain".into()));
        }
        if !(dt > T::zero()) {
            return Err(Error::InvalidInput("time step must be positive".into()));
        }
        self.old.copy_from_slice(p);
        let dyn_i = domain.dynamic_index(phase);
        let heart_cap = domain.sigma(phase) * domain.heart(phase).compliance;
        let boundary_source = forcing.boundary(t_new);

        let mut last_update = T::infinity();
        for iter in 1..=self.options.newton_max_iter {
            for i in 0..m {
                self.q[i] = domain.q(i, p[i]);
                self.dq[i] = domain.q_dp(i, p[i]);
            }
            for i in 0..m {
                let mut cap = domain.weights[i] * domain.c[i];
                let mut source = domain.weights[i] * forcing.interior(domain.x[i], t_new);
                if i == dyn_i {
                    cap = cap + heart_cap;
                    source = source + boundary_source;
                }
                self.diag[i] = cap / dt;
                self.lower[i] = T::zero();
                self.upper[i] = T::zero();
                self.rhs[i] = -(cap * (p[i] - self.old[i]) / dt - source);
            }
            let half = T::lit(0.5);
            for j in 0..m - 1 {
                let h = domain.x[j + 1] - domain.x[j];
                let k = (self.q[j] + self.q[j + 1]) * half;
                let dp = p[j + 1] - p[j];
                let flux = k * dp / h;
                let df_left = self.dq[j] * half * dp / h - k / h;
                let df_right = self.dq[j + 1] * half * dp / h + k / h;
                // Node j gains +F, node j+1 gains −F.
                self.rhs[j] = self.rhs[j] + flux;
                self.rhs[j + 1] = self.rhs[j + 1] - flux;
                self.diag[j] = self.diag[j] - df_left;
                self.upper[j] = -df_right;
                self.diag[j + 1] = self.diag[j + 1] + df_right;
                self.lower[j + 1] = df_left;
            }
            self.solve(t_new, iter)?;
            let mut update = T::zero();
            let mut scale = T::zero();
            for i in 0..m {
                p[i] = p[i] + self.rhs[i];
                update = update.max(self.rhs[i].abs());
                scale = scale.max(p[i].abs());
            }
            if !update.is_finite() {
                break;
            }
            last_update = update;
            if update <= self.options.newton_tol * (T::one() + scale) {
                check_state(domain, p, t_new, self.options.pressure_bound)?;
                return Ok(iter);
            }
        }
        Err(Error::NewtonFailure {
            t: t_new.as_f64(),
            iterations: self.options.newton_max_iter,
            update: last_update.as_f64(),
        })
    }

    /// Thomas algorithm; the solution overwrites `rhs`.
    fn solve(&mut self, t: T, iter: usize) -> Result<()> {
        let m = self.diag.len();
        let fail = || Error::NewtonFailure {
            t: t.as_f64(),
            iterations: iter,
            update: f64::NAN,
        };
        let mut denom = self.diag[0];
        if denom == T::zero() || !denom.is_finite() {
            return Err(fail());
        }
        self.cprime[0] = self.upper[0] / denom;
        self.rhs[0] = self.rhs[0] / denom;
        for i in 1..m {
            denom = self.diag[i] - self.lower[i] * self.cprime[i - 1];
            if denom == T::zero() || !denom.is_finite() {
                return Err(fail());
            }
            self.cprime[i] = self.upper[i] / denom;
            self.rhs[i] = (self.rhs[i] - self.lower[i] * self.rhs[i - 1]) / denom;
        }
        for i in (0..m - 1).rev() {
            self.rhs[i] = self.rhs[i] - self.cprime[i] * self.rhs[i + 1];
        }
        Ok(())
    }
}
