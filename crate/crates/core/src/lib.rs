//! Polytope diameter analysis from H-representations.
//!
//! Given a bounded, non-degenerate polytope `P = {x : Ax <= b}`, this crate
//! enumerates its vertices, builds the vertex-edge graph, computes the exact
//! graph diameter, and evaluates an explicit diameter ceiling driven by two
//! condition numbers of the normalized constraint matrix: the largest
//! `(n-1) x (n-1)` sub-determinant and the smallest vertex-basis
//! determinant. The inequality chain behind that ceiling (cone isoperimetry,
//! per-cone surface bounds, neighborhood volume expansion) is checked
//! empirically on the instance via seeded, thread-count-independent
//! Monte-Carlo estimates of spherical-cone volumes and facet areas.

pub mod analysis;
pub mod bounds;
pub mod cones;
pub mod generators;
pub mod hrep;
pub mod numerics;
pub mod polytope;
pub mod report;
mod sampling;
pub mod tol;

pub use analysis::{run_analyze, AnalysisConfig, AnalysisError};
pub use bounds::{condition_numbers, theorem_bound, ConditionNumbers, TheoremBound};
pub use cones::ConeAtlas;
pub use hrep::{parse_hrep, write_hrep};
pub use numerics::Matrix;
pub use polytope::{build_graph, enumerate_vertices, HRepresentation, PolytopeGraph, Vertex};
pub use report::BoundReport;
