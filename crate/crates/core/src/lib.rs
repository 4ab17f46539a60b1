pub mod analysis;
pub mod error;
pub mod io;
pub mod model;
pub mod ode;
pub mod pde;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision aliases for the common types.
pub type Params = model::ParameterSet<f64>;
pub type Coupling = model::HeartCoupling<f64>;
pub type Profile = model::SpatialProfile<f64>;
pub type Schedule = model::PhaseSchedule<f64>;
pub type OdeRun = ode::OdeRun<f64>;
pub type OdeOptions = ode::OdeOptions<f64>;
pub type Domain = pde::Domain<f64>;
pub type Topology = pde::Topology<f64>;
pub type PdeRun = pde::PdeRun<f64>;
pub type PdeOptions = pde::PdeOptions<f64>;
