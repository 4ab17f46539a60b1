//! Adaptive Dormand–Prince 5(4) integrator for small autonomous systems.
//!
//! The state is a fixed-size array. Each accepted step is handed to an
//! observer together with the endpoint derivatives so callers can sample
//! the solution with cubic Hermite interpolation. An optional event
//! function stops the integration where it first crosses from positive to
//! non-positive.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct RkOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Upper bound on the step as a fraction of the interval length.
    pub max_step_fraction: T,
    pub max_steps: usize,
}

impl<T: Scalar> Default for RkOptions<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-10),
            atol: T::lit(1e-12),
            max_step_fraction: T::lit(0.1),
            max_steps: 1_000_000,
        }
    }
}

/// One accepted step, `t0 -> t1`.
#[derive(Debug, Clone, Copy)]
pub struct Step<T, const N: usize> {
    pub t0: T,
    pub y0: [T; N],
    pub f0: [T; N],
    pub t1: T,
    pub y1: [T; N],
    pub f1: [T; N],
}

impl<T: Scalar, const N: usize> Step<T, N> {
    /// Cubic Hermite interpolant of the step at `t` in `[t0, t1]`.
    pub fn interpolate(&self, t: T) -> [T; N] {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * s * s * s - three * s * s + T::one();
        let h10 = s * s * s - two * s * s + s;
        let h01 = -two * s * s * s + three * s * s;
        let h11 = s * s * s - s * s;
        std::array::from_fn(|i| {
            h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i]
        })
    }
}

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop<T, const N: usize> {
    /// Reached the requested end time.
    Reached { y: [T; N] },
    /// The event function crossed zero at `t`.
    Event { t: T, y: [T; N] },
}

// Dormand–Prince tableau. Stage times are not needed for autonomous systems.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<T: Scalar, const N: usize>(y: &[T; N], terms: &[(f64, &[T; N])], h: T) -> [T; N] {
    std::array::from_fn(|i| {
        y[i] + h * terms
            .iter()
            .fold(T::zero(), |acc, (c, k)| acc + T::lit(*c) * k[i])
    })
}

/// Single Dormand–Prince step. Returns `(y1, f1, error estimate)`.
fn dp_step<T: Scalar, const N: usize, F>(f: &F, y: &[T; N], k1: &[T; N], h: T) -> ([T; N], [T; N], [T; N])
where
    F: Fn(&[T; N]) -> [T; N],
{
    let k2 = f(&axpy(y, &[(A21, k1)], h));
    let k3 = f(&axpy(y, &[(A31, k1), (A32, &k2)], h));
    let k4 = f(&axpy(y, &[(A41, k1), (A42, &k2), (A43, &k3)], h));
    let k5 = f(&axpy(y, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
    let k6 = f(&axpy(
        y,
        &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        h,
    ));
    let y1 = axpy(y, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
    let k7 = f(&y1);
    let err: [T; N] = std::array::from_fn(|i| {
        h * (T::lit(E1) * k1[i]
            + T::lit(E3) * k3[i]
            + T::lit(E4) * k4[i]
            + T::lit(E5) * k5[i]
            + T::lit(E6) * k6[i]
            + T::lit(E7) * k7[i])
    });
    (y1, k7, err)
}

fn error_norm<T: Scalar, const N: usize>(err: &[T; N], y0: &[T; N], y1: &[T; N], o: &RkOptions<T>) -> T {
    let sum = (0..N).fold(T::zero(), |acc, i| {
        let scale = o.atol + o.rtol * y0[i].abs().max(y1[i].abs());
        let r = err[i] / scale;
        acc + r * r
    });
    (sum / T::from_count(N)).sqrt()
}

/// Integrates `y' = f(y)` from `t0` to `t_end`.
///
/// `event`, when given, must be positive at `y0`; integration stops at the
/// first point where it becomes non-positive, located by bisection on the
/// step length. `h_init` seeds the step size (a fraction of the interval
/// is used when `None`). Returns the stop condition and the last
/// accepted step size.
#[allow(clippy::too_many_arguments)]
pub fn integrate<T, const N: usize, F, G, O>(
    f: F,
    t0: T,
    y0: [T; N],
    t_end: T,
    options: &RkOptions<T>,
    h_init: Option<T>,
    event: Option<G>,
    mut observe: O,
) -> Result<(Stop<T, N>, T)>
where
    T: Scalar,
    F: Fn(&[T; N]) -> [T; N],
    G: Fn(&[T; N]) -> T,
    O: FnMut(&Step<T, N>),
{
    let span = t_end - t0;
    if span <= T::zero() {
        return Ok((Stop::Reached { y: y0 }, h_init.unwrap_or(span)));
    }
    let h_max = span * options.max_step_fraction;
    let mut h = h_init.unwrap_or(span * T::lit(1e-3)).min(h_max);
    let h_min = span * T::lit(1e-14);
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(&y);
    let mut last_h = h;

    for _ in 0..options.max_steps {
        let remaining = t_end - t;
        if remaining <= h_min {
            return Ok((Stop::Reached { y }, last_h));
        }
        let h_try = h.min(remaining);
        let (y1, k7, err) = dp_step(&f, &y, &k1, h_try);
        let en = error_norm(&err, &y, &y1, options);
        if !en.is_finite() {
            // Non-finite trial: shrink hard and retry.
            h = h_try * T::lit(0.1);
            if h < h_min {
                return Err(Error::StepSizeUnderflow { t: t.as_f64() });
            }
            continue;
        }
        if en <= T::one() {
            let landing = h_try == remaining;
            let t1 = if landing { t_end } else { t + h_try };
            if let Some(g) = event.as_ref() {
                if g(&y1) <= T::zero() {
                    let (te, ye, fe) = locate_event(&f, g, &y, &k1, t, h_try);
                    observe(&Step {
                        t0: t,
                        y0: y,
                        f0: k1,
                        t1: te,
                        y1: ye,
                        f1: fe,
                    });
                    return Ok((Stop::Event { t: te, y: ye }, last_h));
                }
            }
            observe(&Step {
                t0: t,
                y0: y,
                f0: k1,
                t1,
                y1,
                f1: k7,
            });
            t = t1;
            y = y1;
            k1 = k7;
            last_h = h_try;
            if landing {
                return Ok((Stop::Reached { y }, last_h));
            }
        }
        let factor = if en == T::zero() {
            T::lit(5.0)
        } else {
            (T::lit(0.9) * en.powf(T::lit(-0.2))).max(T::lit(0.2)).min(T::lit(5.0))
        };
        h = (h_try * factor).min(h_max);
        if h < h_min {
            return Err(Error::StepSizeUnderflow { t: t.as_f64() });
        }
    }
    Err(Error::StepSizeUnderflow { t: t.as_f64() })
}

/// Bisection on the step length for the first zero of `g` inside a step.
fn locate_event<T, const N: usize, F, G>(f: &F, g: &G, y: &[T; N], k1: &[T; N], t: T, h: T) -> (T, [T; N], [T; N])
where
    T: Scalar,
    F: Fn(&[T; N]) -> [T; N],
    G: Fn(&[T; N]) -> T,
{
    let (mut lo, mut hi) = (T::zero(), h);
    let (mut y_hi, mut f_hi, _) = dp_step(f, y, k1, hi);
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let (ym, fm, _) = dp_step(f, y, k1, mid);
        if g(&ym) <= T::zero() {
            hi = mid;
            y_hi = ym;
            f_hi = fm;
        } else {
            lo = mid;
        }
    }
    (t + hi, y_hi, f_hi)
}
