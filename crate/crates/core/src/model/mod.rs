//! Domain types shared by the ODE and PDE engines: parameters, heart
//! coupling constants, the systole/diastole schedule and spatial profiles.

mod params;
mod profile;
mod schedule;

pub use params::{HeartCoupling, ParameterSet, ValidationReport, Violation};
pub use profile::SpatialProfile;
pub use schedule::{Phase, PhaseSchedule};
