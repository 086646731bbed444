//! Normal-cone geometry over the unit ball: direction-to-vertex assignment,
//! Monte-Carlo spherical-cone volumes and facet areas, exact adjugate facet
//! heights, the dockable surface of cone unions, and the inscribed simplex
//! spanned by a vertex basis.
//!
//! Every estimator draws from streams keyed by `(seed, tag, facet
//! identity, chunk index)`, so results are bit-identical for a fixed seed
//! regardless of the rayon worker count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::{self, adjugate, ball_volume, determinant, dot, norm, Matrix};
use crate::polytope::PolytopeGraph;
use crate::sampling;
use crate::tol;

#[derive(Debug, Clone, Error)]
pub enum ConeError {
    #[error("tie rate too high: {ties} ties over {samples} samples signals near-degeneracy")]
    TooManyTies { ties: u64, samples: u64 },
    #[error("basis matrix is singular")]
    SingularBasis,
    #[error("facet generators are rank deficient")]
    RankDeficient,
    #[error("vertex set is empty")]
    EmptySet,
}

impl From<numerics::NumericsError> for ConeError {
    fn from(_: numerics::NumericsError) -> Self {
        ConeError::RankDeficient
    }
}

/// Outcome of maximizing a direction over the vertex set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assignment {
    Vertex(usize),
    /// The two best vertices are separated by less than the argmax
    /// tolerance; the direction lies on a cone facet.
    Tie,
}

/// A sampled unit direction and the vertex whose cone contains it.
#[derive(Debug, Clone)]
pub struct DirectionSample {
    pub direction: Vec<f64>,
    pub assigned: Assignment,
}

/// Vertex maximizing `c . x`, or `Tie` when the top two values are within
/// a scale-relative tolerance of each other. Scale invariance means `c`
/// need not be normalized.
pub fn locate_vertex(graph: &PolytopeGraph, c: &[f64]) -> Assignment {
    argmax_flat(graph.flat_points(), graph.n(), c)
}

fn argmax_flat(points: &[f64], n: usize, c: &[f64]) -> Assignment {
    let mut best = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    let mut best_id = 0;
    let mut scale = 0.0f64;
    for (id, point) in points.chunks_exact(n).enumerate() {
        let value = dot(c, point);
        scale = scale.max(value.abs());
        if value > best {
            second = best;
            best = value;
            best_id = id;
        } else if value > second {
            second = value;
        }
    }
    let eps = tol::EPS_ARGMAX_REL * scale.max(1.0);
    if best - second < eps {
        Assignment::Tie
    } else {
        Assignment::Vertex(best_id)
    }
}

/// Per-vertex spherical-cone volume estimates from one shared direction
/// sample. Volumes are hit fractions scaled by the ball volume, so they
/// sum to `vol(B_n)` exactly.
#[derive(Debug, Clone)]
pub struct VolumeEstimates {
    counts: Vec<u64>,
    samples: u64,
    resampled_ties: u64,
    ball: f64,
}

impl VolumeEstimates {
    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn resampled_ties(&self) -> u64 {
        self.resampled_ties
    }

    pub fn ball_volume(&self) -> f64 {
        self.ball
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `(volume, stderr)` for one vertex cone, binomial error model.
    pub fn vertex_volume(&self, id: usize) -> (f64, f64) {
        self.volume_from_count(self.counts[id])
    }

    /// `(volume, stderr)` for a union of cones; cones tile the ball, so
    /// the union volume is the aggregated hit fraction.
    pub fn set_volume(&self, ids: &[usize]) -> (f64, f64) {
        self.volume_from_count(ids.iter().map(|&v| self.counts[v]).sum())
    }

    fn volume_from_count(&self, count: u64) -> (f64, f64) {
        let p = count as f64 / self.samples as f64;
        (p * self.ball, binomial_stderr(p, self.samples) * self.ball)
    }
}

// Fraction stderr under the binomial model. The fraction is clamped one
// sample away from 0 and 1 so an estimated quantity never claims zero
// uncertainty.
fn binomial_stderr(p: f64, samples: u64) -> f64 {
    let n = samples as f64;
    let p = p.clamp(1.0 / n, 1.0 - 1.0 / n);
    (p * (1.0 - p) / n).sqrt()
}

// Consecutive ties beyond this mean the sample cannot be assigned at all
// (coincident vertices); bail out instead of spinning.
const TIE_RETRY_CAP: u32 = 64;

/// Estimates every spherical-cone volume from `samples` uniform directions
/// (seeded, chunked). Tied directions are resampled and counted; a tie
/// rate above the threshold aborts.
pub fn estimate_cone_volumes(
    graph: &PolytopeGraph,
    samples: u64,
    seed: u64,
) -> Result<VolumeEstimates, ConeError> {
    assert!(samples >= 1_000, "volume estimation needs at least 1000 samples");
    let n = graph.n();
    let nv = graph.vertex_count();

    struct ChunkTally {
        counts: Vec<u64>,
        ties: u64,
        exhausted: bool,
    }

    let flat = graph.flat_points();
    let tallies: Vec<ChunkTally> = sampling::chunks(samples)
        .par_iter()
        .map(|&(chunk, len)| {
            let mut rng = sampling::stream_rng(&[seed, sampling::TAG_CONE_VOLUME, chunk]);
            let mut tally = ChunkTally { counts: vec![0; nv], ties: 0, exhausted: false };
            let mut dir = vec![0.0; n];
            for _ in 0..len {
                let mut assigned = None;
                for _ in 0..TIE_RETRY_CAP {
                    sampling::fill_gaussian(&mut rng, &mut dir);
                    match argmax_flat(flat, n, &dir) {
                        Assignment::Vertex(v) => {
                            assigned = Some(v);
                            break;
                        }
                        Assignment::Tie => tally.ties += 1,
                    }
                }
                match assigned {
                    Some(v) => tally.counts[v] += 1,
                    None => {
                        tally.exhausted = true;
                        return tally;
                    }
                }
            }
            tally
        })
        .collect();

    let mut counts = vec![0u64; nv];
    let mut ties = 0u64;
    for tally in &tallies {
        ties += tally.ties;
        if tally.exhausted {
            return Err(ConeError::TooManyTies { ties, samples });
        }
        for (total, c) in counts.iter_mut().zip(&tally.counts) {
            *total += c;
        }
    }
    if ties as f64 > tol::MAX_TIE_FRACTION * samples as f64 {
        return Err(ConeError::TooManyTies { ties, samples });
    }
    debug_assert_eq!(counts.iter().sum::<u64>(), samples);

    Ok(VolumeEstimates {
        counts,
        samples,
        resampled_ties: ties,
        ball: ball_volume(n).volume,
    })
}

/// Height of the cone facet obtained by dropping generator `dropped` from
/// the basis: the distance from that generator to the hyperplane spanned
/// by the others, `|det(A_v)| / |adj(A_v) column dropped|`.
pub fn facet_height(basis: &Matrix, dropped: usize) -> Result<f64, ConeError> {
    let n = basis.rows();
    assert!(basis.is_square() && dropped < n);
    let det = determinant(basis).abs();
    if det <= tol::EPS_DET {
        return Err(ConeError::SingularBasis);
    }
    let adj = adjugate(basis);
    let column: Vec<f64> = (0..n).map(|i| adj.get(i, dropped)).collect();
    let h = det / norm(&column);
    debug_assert!(
        (h - facet_height_by_projection(basis, dropped)?).abs() <= 1e-9,
        "adjugate height disagrees with the projection route"
    );
    Ok(h)
}

/// Same height through the orthogonal-projection route: the norm of the
/// dropped generator's residual against an orthonormal basis of the other
/// generators. Kept as an independent cross-check of [`facet_height`].
pub fn facet_height_by_projection(basis: &Matrix, dropped: usize) -> Result<f64, ConeError> {
    let n = basis.rows();
    assert!(basis.is_square() && dropped < n);
    let others: Vec<Vec<f64>> =
        (0..n).filter(|&i| i != dropped).map(|i| basis.row(i).to_vec()).collect();
    let q = numerics::orthonormal_subspace_basis(&others)?;
    let mut residual = basis.row(dropped).to_vec();
    for u in &q {
        let c = dot(u, &residual);
        for (r, ui) in residual.iter_mut().zip(u) {
            *r -= c * ui;
        }
    }
    Ok(norm(&residual))
}

/// Area estimate `(value, stderr)`; exact values carry zero stderr.
pub type AreaEstimate = (f64, f64);

/// Measure of the cone facet of `vertex` across the constraint
/// `dropped_row`: the `(n-1)`-dimensional spherical cone spanned by the
/// remaining generators inside their hyperplane.
///
/// For `n == 2` the facet is a unit segment and the result is exact; in
/// higher dimensions the fraction of subspace directions falling inside
/// the cone is estimated and scaled by `vol(B_{n-1})`.
pub fn facet_area(
    graph: &PolytopeGraph,
    vertex: usize,
    dropped_row: usize,
    samples: u64,
    seed: u64,
) -> Result<AreaEstimate, ConeError> {
    let v = graph.vertex(vertex);
    assert!(v.tight_rows.contains(&dropped_row), "dropped row must be tight at the vertex");
    let rest: Vec<usize> =
        v.tight_rows.iter().copied().filter(|&r| r != dropped_row).collect();
    facet_area_by_rows(graph, &rest, samples, seed)
}

fn facet_area_by_rows(
    graph: &PolytopeGraph,
    generator_rows: &[usize],
    samples: u64,
    seed: u64,
) -> Result<AreaEstimate, ConeError> {
    let n = graph.n();
    if n == 2 {
        return Ok((1.0, 0.0));
    }
    let dim = n - 1;
    let generators: Vec<Vec<f64>> =
        generator_rows.iter().map(|&r| graph.hrep().matrix().row(r).to_vec()).collect();
    let basis = numerics::orthonormal_subspace_basis(&generators)?;

    // Coordinates of the generators in the orthonormal basis; membership of
    // a subspace direction reduces to solving for its generator
    // coefficients and requiring them nonnegative.
    let coord_matrix = Matrix::from_rows(
        (0..dim)
            .map(|i| (0..dim).map(|j| dot(&basis[i], &generators[j])).collect())
            .collect(),
    );
    let lu = numerics::LuFactors::factor(&coord_matrix).ok_or(ConeError::RankDeficient)?;

    let facet_key = sampling::mix(
        &generator_rows.iter().map(|&r| r as u64).collect::<Vec<u64>>(),
    );
    let hits: u64 = sampling::chunks(samples)
        .par_iter()
        .map(|&(chunk, len)| {
            let mut rng =
                sampling::stream_rng(&[seed, sampling::TAG_FACET_AREA, facet_key, chunk]);
            let mut hits = 0u64;
            let mut w = vec![0.0; dim];
            let mut coeff = vec![0.0; dim];
            for _ in 0..len {
                sampling::fill_gaussian(&mut rng, &mut w);
                lu.solve_into(&w, &mut coeff);
                // Membership tolerance scales with the raw draw so the
                // test matches the unit-direction formulation exactly.
                let slack = -tol::EPS_COEF * norm(&w);
                if coeff.iter().all(|&c| c >= slack) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();

    let p = hits as f64 / samples as f64;
    let slice = ball_volume(dim).volume;
    Ok((p * slice, binomial_stderr(p, samples) * slice))
}

/// Closed-form facet measure for low dimensions: the unit segment in 2-D,
/// the circular sector `angle / 2` in 3-D. `None` above dimension three.
pub fn facet_area_exact(
    graph: &PolytopeGraph,
    vertex: usize,
    dropped_row: usize,
) -> Option<f64> {
    let n = graph.n();
    let v = graph.vertex(vertex);
    match n {
        2 => Some(1.0),
        3 => {
            let rest: Vec<usize> =
                v.tight_rows.iter().copied().filter(|&r| r != dropped_row).collect();
            let a = graph.hrep().matrix().row(rest[0]);
            let b = graph.hrep().matrix().row(rest[1]);
            let angle = dot(a, b).clamp(-1.0, 1.0).acos();
            Some(angle / 2.0)
        }
        _ => None,
    }
}

/// Dockable surface of the cone union over `ids`: the summed areas of the
/// facets shared between a cone inside the set and one outside. Each
/// polytope edge leaving the set contributes exactly one facet. The full
/// vertex set has an empty boundary and yields zero.
pub fn boundary_area(
    graph: &PolytopeGraph,
    ids: &[usize],
    samples: u64,
    seed: u64,
) -> Result<AreaEstimate, ConeError> {
    if ids.is_empty() {
        return Err(ConeError::EmptySet);
    }
    let inside: std::collections::HashSet<usize> = ids.iter().copied().collect();
    let mut total = 0.0;
    let mut variance = 0.0;
    for &v in ids {
        for &u in graph.neighbors(v) {
            if inside.contains(&u) {
                continue;
            }
            let shared = graph.shared_rows(v, u);
            let (area, stderr) = facet_area_by_rows(graph, &shared, samples, seed)?;
            total += area;
            variance += stderr * stderr;
        }
    }
    Ok((total, variance.sqrt()))
}

/// Volume of the simplex spanned by the origin and the unit generator rows
/// of the basis: `|det| / n!`.
pub fn simplex_volume(basis: &Matrix) -> Result<f64, ConeError> {
    assert!(basis.is_square());
    let det = determinant(basis).abs();
    if det <= tol::EPS_DET {
        return Err(ConeError::SingularBasis);
    }
    Ok(det / factorial(basis.rows()))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Everything measured about one vertex cone.
#[derive(Debug, Clone)]
pub struct ConeStats {
    pub vertex_id: usize,
    pub volume: f64,
    pub volume_stderr: f64,
    /// `(dropped tight row, height)` per facet; exact quantities.
    pub facet_heights: Vec<(usize, f64)>,
    /// `(dropped tight row, area, stderr)` per facet.
    pub facet_areas: Vec<(usize, f64, f64)>,
    /// Sum of the facet areas and its propagated stderr.
    pub dockable_surface: (f64, f64),
    pub simplex_volume: f64,
}

/// Cached cone measurements for a whole polytope: one shared volume
/// sampling pass plus one area estimate per edge facet. All derived
/// quantities (set volumes, boundaries, per-vertex stats) reuse these, so
/// repeated queries agree bit for bit.
#[derive(Debug)]
pub struct ConeAtlas<'g> {
    graph: &'g PolytopeGraph,
    volumes: VolumeEstimates,
    facets: BTreeMap<Vec<usize>, AreaEstimate>,
    stats: Vec<ConeStats>,
}

impl<'g> ConeAtlas<'g> {
    pub fn new(graph: &'g PolytopeGraph, samples: u64, seed: u64) -> Result<Self, ConeError> {
        let volumes = estimate_cone_volumes(graph, samples, seed)?;

        let facet_list: Vec<(Vec<usize>, AreaEstimate)> = graph
            .edges()
            .par_iter()
            .map(|&(v, u)| {
                let key = graph.shared_rows(v, u);
                let est = facet_area_by_rows(graph, &key, samples, seed)?;
                Ok((key, est))
            })
            .collect::<Result<_, ConeError>>()?;
        let facets: BTreeMap<Vec<usize>, AreaEstimate> = facet_list.into_iter().collect();

        let stats = graph
            .vertices()
            .iter()
            .map(|v| {
                let basis = graph.hrep().basis(&v.tight_rows);
                let (volume, volume_stderr) = volumes.vertex_volume(v.id);
                let mut facet_heights = Vec::with_capacity(v.tight_rows.len());
                let mut facet_areas = Vec::with_capacity(v.tight_rows.len());
                let mut area_total = 0.0;
                let mut area_var = 0.0;
                for (pos, &row) in v.tight_rows.iter().enumerate() {
                    let h = facet_height(&basis, pos)?;
                    debug_assert!(h > 0.0 && h <= 1.0 + tol::EPS_UNIT);
                    facet_heights.push((row, h));
                    let key: Vec<usize> =
                        v.tight_rows.iter().copied().filter(|&r| r != row).collect();
                    let &(area, stderr) =
                        facets.get(&key).expect("every vertex facet is an edge facet");
                    facet_areas.push((row, area, stderr));
                    area_total += area;
                    area_var += stderr * stderr;
                }
                Ok(ConeStats {
                    vertex_id: v.id,
                    volume,
                    volume_stderr,
                    facet_heights,
                    facet_areas,
                    dockable_surface: (area_total, area_var.sqrt()),
                    simplex_volume: simplex_volume(&basis)?,
                })
            })
            .collect::<Result<Vec<_>, ConeError>>()?;

        Ok(Self { graph, volumes, facets, stats })
    }

    pub fn graph(&self) -> &PolytopeGraph {
        self.graph
    }

    pub fn ball_volume(&self) -> f64 {
        self.volumes.ball_volume()
    }

    pub fn volumes(&self) -> &VolumeEstimates {
        &self.volumes
    }

    pub fn stats(&self) -> &[ConeStats] {
        &self.stats
    }

    pub fn vertex_stats(&self, id: usize) -> &ConeStats {
        &self.stats[id]
    }

    pub fn set_volume(&self, ids: &[usize]) -> (f64, f64) {
        self.volumes.set_volume(ids)
    }

    /// Boundary of the cone union over `ids`, assembled from the cached
    /// per-facet estimates.
    pub fn boundary(&self, ids: &[usize]) -> Result<AreaEstimate, ConeError> {
        if ids.is_empty() {
            return Err(ConeError::EmptySet);
        }
        let inside: std::collections::HashSet<usize> = ids.iter().copied().collect();
        let mut total = 0.0;
        let mut variance = 0.0;
        for &v in ids {
            for &u in self.graph.neighbors(v) {
                if inside.contains(&u) {
                    continue;
                }
                let key = self.graph.shared_rows(v, u);
                let &(area, stderr) = self.facets.get(&key).expect("edge facet cached");
                total += area;
                variance += stderr * stderr;
            }
        }
        Ok((total, variance.sqrt()))
    }
}
