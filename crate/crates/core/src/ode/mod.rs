//! Lumped switched circulation model.

pub mod integrator;
pub mod rhs;
pub mod simulate;
pub mod sweep;

pub use integrator::RkOptions;
pub use simulate::{pv_loop, simulate, CycleObservables, OdeOptions, OdeRun, OdeState};
pub use sweep::{inflection_estimate, rp_grid, strictly_decreasing, sweep_rp, SweepPoint};
