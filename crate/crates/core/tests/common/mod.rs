//! Shared fixtures and independent oracles for the integration suites.

use num::{BigInt, BigRational, FromPrimitive};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use polydiam::generators;
use polydiam::numerics::Matrix;
use polydiam::polytope::{build_graph, enumerate_vertices, HRepresentation, PolytopeGraph};

pub fn graph_of(h: HRepresentation) -> PolytopeGraph {
    let vertices = enumerate_vertices(&h).expect("suite instances are simple");
    build_graph(h, vertices).expect("suite instances are bounded")
}

/// The shared verification instance set: hypercubes (n = 2..4), regular
/// k-gons (k = 4..8), and 25 seeded random tangent-plane polytopes
/// (n = 2..4, m <= 16).
pub fn suite_instances() -> Vec<(String, PolytopeGraph)> {
    let mut out = Vec::new();
    for n in 2..=4 {
        out.push((format!("hypercube n={n}"), graph_of(generators::hypercube(n))));
    }
    for k in 4..=8 {
        out.push((format!("{k}-gon"), graph_of(generators::regular_polygon(k))));
    }
    for i in 0..25u64 {
        let n = 2 + (i as usize % 3);
        let m = (2 * n + 2 + (i as usize % 5)).min(16);
        let seed = 1000 + i;
        let h = generators::random_tangent(m, n, seed).expect("tangent generation succeeds");
        out.push((format!("tangent m={m} n={n} seed={seed}"), graph_of(h)));
    }
    out
}

/// Exact cofactor-expansion determinant over big integers, the
/// independent oracle for elimination-based determinants.
pub fn cofactor_det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 1 {
        return BigInt::from(m[0][0]);
    }
    let mut det = BigInt::from(0);
    for j in 0..n {
        let minor: Vec<Vec<i64>> =
            (1..n).map(|i| (0..n).filter(|&c| c != j).map(|c| m[i][c]).collect()).collect();
        let term = BigInt::from(m[0][j]) * cofactor_det(&minor);
        if j % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

pub fn int_matrix(rows: &[Vec<i64>]) -> Matrix {
    Matrix::from_rational_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| BigRational::from_i64(x).unwrap()).collect())
            .collect(),
    )
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Random matrix with unit-norm rows (Gaussian directions).
pub fn random_unit_rows(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data: Vec<Vec<f64>> = (0..rows)
        .map(|_| {
            loop {
                let v: Vec<f64> =
                    (0..cols).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-8 {
                    break v.into_iter().map(|x| x / norm).collect();
                }
            }
        })
        .collect();
    Matrix::from_rows(data)
}
