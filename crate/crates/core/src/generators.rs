//! Deterministic construction of normalized test polytopes: hypercubes,
//! simplices, regular polygons, cross-polytopes, and random
//! sphere-tangent instances. Generators are pure functions of their
//! parameters.

use num::{BigRational, FromPrimitive};
use thiserror::Error;

use crate::numerics::Matrix;
use crate::polytope::{build_graph, enumerate_vertices, HRepresentation, PolytopeError};
use crate::sampling;

#[derive(Debug, Clone, Error)]
pub enum GeneratorError {
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("no bounded non-degenerate instance found after {attempts} attempts")]
    GenerationFailed { attempts: u32 },
}

fn rational(x: i64) -> BigRational {
    BigRational::from_i64(x).expect("small integer")
}

/// The box `[-1, 1]^n`: rows `+-e_i`, offsets one. Exact.
pub fn hypercube(n: usize) -> HRepresentation {
    assert!(n >= 2);
    let mut rows = Vec::with_capacity(2 * n);
    for i in 0..n {
        for sign in [1i64, -1] {
            let mut row = vec![rational(0); n];
            row[i] = rational(sign);
            rows.push(row);
        }
    }
    HRepresentation::new(Matrix::from_rational_rows(rows), vec![1.0; 2 * n])
        .expect("hypercube shape is valid")
}

/// The standard simplex `{x >= 0, sum(x) <= 1}` in normalized form: rows
/// `-e_i` with offset zero plus the all-ones row scaled to unit norm.
pub fn simplex(n: usize) -> HRepresentation {
    assert!(n >= 2);
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { -1.0 } else { 0.0 }).collect())
        .collect();
    let s = 1.0 / (n as f64).sqrt();
    rows.push(vec![s; n]);
    let mut b = vec![0.0; n];
    b.push(s);
    HRepresentation::new(Matrix::from_rows(rows), b).expect("simplex shape is valid")
}

/// Regular `k`-gon in the plane: unit rows at equal angular spacing,
/// offsets one. Graph diameter is `floor(k / 2)`.
pub fn regular_polygon(k: usize) -> HRepresentation {
    assert!(k >= 3);
    let rows = (0..k)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    HRepresentation::new(Matrix::from_rows(rows), vec![1.0; k])
        .expect("polygon shape is valid")
}

/// The cross-polytope `{x : |x|_1 <= 1}`: all `2^n` sign rows, normalized.
/// Every vertex `+-e_i` has `2^(n-1)` tight rows, so enumeration reports
/// it as degenerate for `n >= 3`; it exists to exercise that error path.
pub fn cross_polytope(n: usize) -> HRepresentation {
    assert!((2..=20).contains(&n));
    let rows: Vec<Vec<BigRational>> = (0..1u32 << n)
        .map(|bits| {
            (0..n).map(|k| rational(if bits >> k & 1 == 1 { -1 } else { 1 })).collect()
        })
        .collect();
    HRepresentation::new(Matrix::from_rational_rows(rows), vec![1.0; 1 << n])
        .expect("cross-polytope shape is valid")
}

/// A validated generator request, the form the command line and bindings
/// hand in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    Hypercube { dim: usize },
    Simplex { dim: usize },
    RegularPolygon { sides: usize },
    CrossPolytope { dim: usize },
    RandomTangent { rows: usize, dim: usize, seed: u64 },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<HRepresentation, GeneratorError> {
        let invalid = |msg: &str| GeneratorError::InvalidParameters(msg.to_string());
        match *self {
            GeneratorSpec::Hypercube { dim } => {
                (dim >= 2).then(|| hypercube(dim)).ok_or_else(|| invalid("hypercube needs dim >= 2"))
            }
            GeneratorSpec::Simplex { dim } => {
                (dim >= 2).then(|| simplex(dim)).ok_or_else(|| invalid("simplex needs dim >= 2"))
            }
            GeneratorSpec::RegularPolygon { sides } => (sides >= 3)
                .then(|| regular_polygon(sides))
                .ok_or_else(|| invalid("polygon needs at least 3 sides")),
            GeneratorSpec::CrossPolytope { dim } => ((2..=20).contains(&dim))
                .then(|| cross_polytope(dim))
                .ok_or_else(|| invalid("cross-polytope needs 2 <= dim <= 20")),
            GeneratorSpec::RandomTangent { rows, dim, seed } => random_tangent(rows, dim, seed),
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            GeneratorSpec::Hypercube { dim } => format!("hypercube dim={dim}"),
            GeneratorSpec::Simplex { dim } => format!("simplex dim={dim}"),
            GeneratorSpec::RegularPolygon { sides } => format!("regular-polygon sides={sides}"),
            GeneratorSpec::CrossPolytope { dim } => format!("cross-polytope dim={dim}"),
            GeneratorSpec::RandomTangent { rows, dim, seed } => {
                format!("random-tangent rows={rows} dim={dim} seed={seed}")
            }
        }
    }
}

/// `m` i.i.d. uniform unit rows with offsets one, every constraint plane
/// tangent to the unit sphere. Draws fresh rows (sub-seeded from
/// `seed`) until the instance is bounded and non-degenerate; identical
/// `(m, n, seed)` give bit-identical output.
pub fn random_tangent(m: usize, n: usize, seed: u64) -> Result<HRepresentation, GeneratorError> {
    if n < 2 || m < 2 * n {
        return Err(GeneratorError::InvalidParameters(format!(
            "need n >= 2 and m >= 2n for boundedness headroom, got m={m}, n={n}"
        )));
    }
    const MAX_ATTEMPTS: u32 = 100;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = sampling::stream_rng(&[seed, sampling::TAG_TANGENT, attempt as u64]);
        let rows: Vec<Vec<f64>> = (0..m).map(|_| sampling::unit_vector(&mut rng, n)).collect();
        let h = HRepresentation::new(Matrix::from_rows(rows), vec![1.0; m])
            .expect("tangent shape is valid");
        match enumerate_vertices(&h).and_then(|vs| build_graph(h.clone(), vs)) {
            Ok(_) => return Ok(h),
            Err(
                PolytopeError::Degenerate { .. }
                | PolytopeError::Unbounded { .. }
                | PolytopeError::EmptyPolytope
                | PolytopeError::InconsistentAdjacency { .. },
            ) => continue,
            Err(other) => {
                return Err(GeneratorError::InvalidParameters(other.to_string()));
            }
        }
    }
    Err(GeneratorError::GenerationFailed { attempts: MAX_ATTEMPTS })
}
