//! Hypothesis checks, conserved quantities, energy and bound monitors,
//! and the comparison-function eigenvalues.

pub mod bounds;
pub mod eigen;
pub mod energy;
pub mod hypotheses;

pub use bounds::{bounds_check, BoundViolation, BoundsReport};
pub use eigen::{eigen_lambda, EigenPair};
pub use energy::{energy_trace, EnergyConstants, EnergySample, EnergyTrace};
pub use hypotheses::{check_hypotheses, gradient_energy, HypothesisReport};

use crate::model::Phase;
use crate::pde::domain::Domain;
use crate::scalar::Scalar;

/// `∫ C·P dx ± C_heart·B` for `phase`, with the sign of the domain's
/// boundary convention.
pub fn conserved_m<T: Scalar>(domain: &Domain<T>, p: &[T], phase: Phase) -> T {
    domain.invariant(p, phase)
}
