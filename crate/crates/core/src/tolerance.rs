//! Default tolerances. Every operation that compares floating values takes an
//! explicit tolerance; these are the values used when a caller has no opinion.

/// Identities that hold up to rounding (symmetries, round trips, recompositions).
pub const ALGEBRAIC: f64 = 1e-12;

/// Quantities built from finite differences or long integrations.
pub const DIFFERENTIAL: f64 = 1e-6;

/// Tolerance pair carried through suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub algebraic: f64,
    pub differential: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: ALGEBRAIC,
            differential: DIFFERENTIAL,
        }
    }
}

/// `|a - b| / max(|b|, floor)`.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}
