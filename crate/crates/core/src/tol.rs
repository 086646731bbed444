//! Numerical tolerances used across the crate.
//!
//! All geometry is unit-scale: constraint rows are normalized to Euclidean
//! length one on load, so thresholds can be absolute rather than relative.

/// A row with norm at or below this has no usable direction.
/// Binary64 noise floor for unit-scale data.
pub const EPS_ZERO_ROW: f64 = 1e-12;

/// Unit-norm acceptance band for normalized rows and orthonormal bases.
pub const EPS_UNIT: f64 = 1e-12;

/// Tight-constraint detection: `|a_i.x - b_i|` at or below this counts the
/// row as active at `x`. Two orders above elimination noise for n <= 10.
pub const EPS_TIGHT: f64 = 1e-9;

/// Feasibility slack for `Ax <= b` checks.
pub const EPS_FEAS: f64 = 1e-9;

/// Basis matrices with `|det|` at or below this are treated as singular.
pub const EPS_DET: f64 = 1e-10;

/// Points closer than this are the same vertex.
pub const EPS_DUP: f64 = 1e-8;

/// Cone-membership slack on barycentric coefficients.
pub const EPS_COEF: f64 = 1e-10;

/// Relative argmax separation below which a direction is a tie between
/// two vertices (it lies on a cone facet, a measure-zero event).
pub const EPS_ARGMAX_REL: f64 = 1e-12;

/// Abort threshold for the tie rate of direction sampling; a higher rate
/// indicates near-degeneracy or duplicate rows.
pub const MAX_TIE_FRACTION: f64 = 1e-3;

/// Default cap on exhaustive enumeration work (basis subsets, minors).
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;
