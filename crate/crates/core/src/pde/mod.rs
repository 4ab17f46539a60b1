//! Switched-boundary nonlinear diffusion model of the circulation.

pub mod conductivity;
pub mod domain;
pub mod lumped;
pub mod periodic;
pub mod stepper;
pub mod switch;

pub use conductivity::{conductivity, conductivity_dp, Q_FLOOR};
pub use domain::{Domain, End, FluxSign, HeartEnd, Topology, TopologyKind};
pub use lumped::{fontan_mimic, mimic_initial};
pub use periodic::{run_periodic, BoundarySample, PdeOptions, PdeRun, PdeState, PhaseDiagnostics, Record, Snapshot, SwitchEvent};
pub use stepper::{check_state, Forcing, StepOptions, Stepper, Unforced};
pub use switch::{switch, SwitchBlend, SwitchMode, SwitchRecord};
