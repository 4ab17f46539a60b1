//! Poiseuille conductivity of a bundle of compliant vessels.

use crate::scalar::Scalar;

/// Conductivity floor below which a state is treated as degenerate.
pub const Q_FLOOR: f64 = 1e-12;

/// `q = N·(A0 + C·P)² / (8πμ)`.
pub fn conductivity<T: Scalar>(c: T, a0: T, n: T, mu: T, p: T) -> T {
    let a = a0 + c * p;
    n * a * a / (T::lit(8.0) * T::PI() * mu)
}

/// `∂q/∂P = 2·N·C·(A0 + C·P) / (8πμ)`.
pub fn conductivity_dp<T: Scalar>(c: T, a0: T, n: T, mu: T, p: T) -> T {
    T::lit(2.0) * n * c * (a0 + c * p) / (T::lit(8.0) * T::PI() * mu)
}
