use thiserror::Error;

/// Errors produced by the simulation engines and I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no convergence to a periodic orbit after {cycles} cycles (residual {residual:e})")]
    NonConvergence { cycles: usize, residual: f64 },

    #[error("nonphysical state at t = {t} min: {detail}")]
    NonphysicalState { t: f64, detail: String },

    #[error("Newton iteration failed at t = {t} min after {iterations} iterations (update {update:e})")]
    NewtonFailure { t: f64, iterations: usize, update: f64 },

    #[error("degenerate conductivity q = {q:e} at node {node} (x = {x})")]
    DegenerateConductivity { node: usize, x: f64, q: f64 },

    #[error("switch blend is infeasible: denominator {denominator:e} vanishes")]
    InfeasibleBlend { denominator: f64 },

    #[error("no root of the {phase} relation on branch {branch}")]
    BranchEmpty { phase: String, branch: usize },

    #[error("integrator step size underflow at t = {t} min")]
    StepSizeUnderflow { t: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
