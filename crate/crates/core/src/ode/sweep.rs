//! Cardiac output as a function of pulmonary resistance.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ParameterSet;
use crate::ode::simulate::{simulate, OdeOptions};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint<T> {
    pub rp: T,
    pub heart_rate: T,
    pub cardiac_output: T,
    pub converged: bool,
    /// Why the point failed, if it did.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Evenly spaced values from `start` to `stop` inclusive.
pub fn rp_grid<T: Scalar>(start: T, stop: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidInput(format!(
            "bad grid: start {start}, stop {stop}, step {step}"
        )));
    }
    let n = ((stop - start) / step + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
    Ok((0..=n).map(|k| start + step * T::from_count(k)).collect())
}

/// Runs every `(heart_rate, rp)` combination to periodic steady state in
/// parallel. Output is ordered by heart rate, then by `rp`. A point whose
/// run fails is kept with `converged = false`, a NaN output and the error.
pub fn sweep_rp<T: Scalar>(
    base: &ParameterSet<T>,
    heart_rates: &[T],
    rps: &[T],
    options: &OdeOptions<T>,
) -> Result<Vec<SweepPoint<T>>> {
    let jobs: Vec<(T, T)> = heart_rates
        .iter()
        .flat_map(|&hr| rps.iter().map(move |&rp| (hr, rp)))
        .collect();
    let opts = OdeOptions {
        samples_per_cycle: options.samples_per_cycle.min(20),
        record_all_cycles: false,
        ..*options
    };
    if heart_rates.is_empty() || rps.is_empty() {
        return Err(Error::InvalidInput("sweep grids must be non-empty".into()));
    }
    let points = jobs
        .par_iter()
        .map(|&(hr, rp)| {
            let p = base.with_heart_rate(hr).with_rp(rp);
            match simulate(&p, &opts) {
                Ok(run) => SweepPoint {
                    rp,
                    heart_rate: hr,
                    cardiac_output: run.observables.cardiac_output,
                    converged: run.converged,
                    error: None,
                },
                Err(e) => SweepPoint {
                    rp,
                    heart_rate: hr,
                    cardiac_output: T::nan(),
                    converged: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect::<Vec<_>>();
    Ok(points)
}

/// Whether `values` decreases strictly from each entry to the next.
pub fn strictly_decreasing<T: Scalar>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Location of the sharpest slope change of a sampled curve: the interior
/// point with the largest divided second difference in magnitude.
pub fn inflection_estimate<T: Scalar>(x: &[T], y: &[T]) -> Option<T> {
    if x.len() != y.len() || x.len() < 3 {
        return None;
    }
    let mut best: Option<(T, T)> = None;
    for i in 1..x.len() - 1 {
        let s_left = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
        let s_right = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        let d2 = ((s_right - s_left) / ((x[i + 1] - x[i - 1]) * T::lit(0.5))).abs();
        if best.map_or(true, |(b, _)| d2 > b) {
            best = Some((d2, x[i]));
        }
    }
    best.map(|(_, xi)| xi)
}
