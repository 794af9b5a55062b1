//! Numerical tolerances shared across the crate.

/// Idempotence / Hermiticity of realized matrices; exact sums of realized matrices.
pub const MATRIX: f64 = 1e-12;
/// Modulus of unimodular field values.
pub const UNIMODULAR: f64 = 1e-12;
/// Per-atom comparison of (x, v) pairs: orthogonality and direction matching.
pub const PAIR: f64 = 1e-9;
/// Modulus check on parsed phases before normalization.
pub const PARSED_PHASE: f64 = 1e-9;
/// Measure identities (sum rules, density identities), relative to `max(1, scale)`.
pub const MEASURE: f64 = 1e-9;
/// Norm law and orthogonality law.
pub const NORM_LAW: f64 = 1e-9;
/// Additivity law on vector values.
pub const ADDITIVITY: f64 = 1e-12;
/// Below this squared norm the splitting problem is treated as the zero vector.
pub const SPLIT_ZERO: f64 = 1e-30;
/// Eigenvalue slack when checking positive semidefiniteness of density blocks.
pub const PSD: f64 = 1e-9;
/// Smallest tolerance a user override may request.
pub const OVERRIDE_FLOOR: f64 = 1e-15;

/// `tol * max(1, scale)`
pub fn scaled(tol: f64, scale: f64) -> f64 {
    tol * scale.abs().max(1.0)
}
