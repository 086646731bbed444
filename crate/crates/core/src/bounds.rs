//! Condition numbers of the constraint matrix, the explicit diameter
//! ceiling they imply, and empirical verification of the inequality chain
//! behind it on concrete instances: a cone isoperimetric lower bound
//! (lemma 1), a per-cone surface-to-volume upper bound (lemma 2), and a
//! neighborhood volume expansion step (lemma 3).
//!
//! Monte-Carlo quantities carry a `3 * stderr` slack on the estimated
//! side of each inequality; exact quantities (facet heights, determinants)
//! carry none.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::cones::{ConeAtlas, ConeError};
use crate::numerics::{self, ball_volume, minor_max_with_budget};
use crate::polytope::PolytopeGraph;
use crate::tol;

#[derive(Debug, Clone, Error)]
pub enum BoundsError {
    #[error("condition numbers out of range: delta={delta}, det_star={det_star}")]
    InvalidConditionNumbers { delta: f64, det_star: f64 },
    #[error("set volume {volume} exceeds half the ball volume {half} beyond sampling error")]
    PreconditionVolume { volume: f64, half: f64 },
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
}

/// The two condition numbers driving the diameter ceiling: the largest
/// `(n-1) x (n-1)` sub-determinant of the normalized rows and the smallest
/// vertex-basis determinant.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionNumbers {
    pub delta: f64,
    /// Minimum of `|det(A_v)|` over vertex bases.
    pub det_star: f64,
    /// Minimum over all nonzero `n x n` row minors, when the full scan was
    /// requested; never larger than `det_star`.
    pub det_star_all_minors: Option<f64>,
    pub per_vertex_dets: BTreeMap<usize, f64>,
}

/// Computes both condition numbers. `all_minors` additionally scans every
/// nonzero `n x n` sub-determinant of `A` instead of only vertex bases.
pub fn condition_numbers(
    graph: &PolytopeGraph,
    all_minors: bool,
) -> Result<ConditionNumbers, BoundsError> {
    condition_numbers_with_budget(graph, all_minors, tol::DEFAULT_ENUMERATION_BUDGET)
}

pub fn condition_numbers_with_budget(
    graph: &PolytopeGraph,
    all_minors: bool,
    budget: u128,
) -> Result<ConditionNumbers, BoundsError> {
    let n = graph.n();
    let a = graph.hrep().matrix();
    let delta = minor_max_with_budget(a, n - 1, budget)?;

    let per_vertex_dets: BTreeMap<usize, f64> =
        graph.vertices().iter().map(|v| (v.id, v.basis_det)).collect();
    let det_star = per_vertex_dets
        .values()
        .copied()
        .fold(f64::INFINITY, f64::min);

    let det_star_all_minors = if all_minors {
        Some(min_nonzero_square_minor(graph, budget)?)
    } else {
        None
    };

    debug_assert!(det_star <= 1.0 + tol::EPS_TIGHT, "unit rows bound every basis det by one");
    Ok(ConditionNumbers { delta, det_star, det_star_all_minors, per_vertex_dets })
}

fn min_nonzero_square_minor(graph: &PolytopeGraph, budget: u128) -> Result<f64, BoundsError> {
    use itertools::Itertools;
    let (m, n) = (graph.hrep().m(), graph.n());
    let required = binomial(m, n);
    if required > budget {
        return Err(numerics::NumericsError::SizeTooLarge { required, budget }.into());
    }
    let cols: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    for rows in (0..m).combinations(n) {
        let det = numerics::determinant(&graph.hrep().matrix().submatrix(&rows, &cols)).abs();
        if det > tol::EPS_DET {
            best = best.min(det);
        }
    }
    Ok(best)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    r
}

/// Explicit diameter ceilings from the condition numbers, under the two
/// ball-volume conventions carried in reports.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TheoremBound {
    /// Smallest iteration count violating
    /// `n ln(pi) >= ln(2 det*) + j sqrt(1/(2 pi)) det* / (n^2 delta)`,
    /// the `pi^n / n!` half-ball form.
    pub j_max_paper: u64,
    pub diameter_bound_paper: u64,
    /// Same ceiling with the standard ball volume in place of `pi^n / n!`.
    pub j_max_standard: u64,
    pub diameter_bound_standard: u64,
}

/// Evaluates the diameter ceiling `2 * j_max` for both ball-volume
/// conventions. Requires `delta > 0` and `det_star` in `(0, 1]` (unit
/// rows cap every basis determinant at one).
pub fn theorem_bound(n: usize, delta: f64, det_star: f64) -> Result<TheoremBound, BoundsError> {
    if !(delta > 0.0 && delta.is_finite())
        || !(det_star > 0.0 && det_star <= 1.0 + tol::EPS_TIGHT)
    {
        return Err(BoundsError::InvalidConditionNumbers { delta, det_star });
    }
    let n_f = n as f64;
    // Per-iteration growth exponent: ln(1+c) >= c/2 with
    // c = sqrt(2/pi) det*/(n^2 delta), so the display uses c/2.
    let half_c = (1.0 / (2.0 * PI)).sqrt() * det_star / (n_f * n_f * delta);

    let x_paper = (n_f * PI.ln() - (2.0 * det_star).ln()) / half_c;
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let x_standard = (factorial * ball_volume(n).volume / (2.0 * det_star)).ln() / half_c;

    let ceiling = |x: f64| -> u64 { (x.floor() as u64) + 1 };
    let j_max_paper = ceiling(x_paper);
    let j_max_standard = ceiling(x_standard);
    Ok(TheoremBound {
        j_max_paper,
        diameter_bound_paper: 2 * j_max_paper,
        j_max_standard,
        diameter_bound_standard: 2 * j_max_standard,
    })
}

/// One verified inequality: `lhs` compared against `rhs` with a
/// Monte-Carlo slack of three propagated standard errors.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaCheck {
    pub lemma: u8,
    pub subject: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// Signed margin in the passing direction (nonnegative means the
    /// inequality holds without any slack).
    pub margin: f64,
    pub pass: bool,
}

/// Per-facet exact height check attached to a lemma-2 verification.
#[derive(Debug, Clone, Serialize)]
pub struct HeightCheck {
    pub dropped_row: usize,
    pub height: f64,
    pub lower_bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma2Check {
    pub ratio: LemmaCheck,
    pub heights: Vec<HeightCheck>,
}

impl Lemma2Check {
    pub fn pass(&self) -> bool {
        self.ratio.pass && self.heights.iter().all(|h| h.pass)
    }
}

fn ratio_stderr(num: f64, num_se: f64, den: f64, den_se: f64) -> f64 {
    if num <= 0.0 || den <= 0.0 {
        return f64::INFINITY;
    }
    let r = num / den;
    r * ((num_se / num).powi(2) + (den_se / den).powi(2)).sqrt()
}

fn check_half_ball(atlas: &ConeAtlas, ids: &[usize]) -> Result<(f64, f64), BoundsError> {
    let (volume, stderr) = atlas.set_volume(ids);
    let half = atlas.ball_volume() / 2.0;
    if volume > half + 3.0 * stderr {
        return Err(BoundsError::PreconditionVolume { volume, half });
    }
    Ok((volume, stderr))
}

/// Isoperimetric lower bound for the cone union over `ids` (not
/// necessarily convex): `D(S) / vol(S) >= sqrt(2n / pi)`, admissible only
/// while the union stays at or below half the ball volume.
pub fn verify_lemma1(
    atlas: &ConeAtlas,
    ids: &[usize],
    subject: impl Into<String>,
) -> Result<LemmaCheck, BoundsError> {
    let (volume, vol_se) = check_half_ball(atlas, ids)?;
    let (surface, surf_se) = atlas.boundary(ids)?;
    let ratio = surface / volume;
    let bound = (2.0 * atlas.graph().n() as f64 / PI).sqrt();
    let slack = 3.0 * ratio_stderr(surface, surf_se, volume, vol_se);
    Ok(LemmaCheck {
        lemma: 1,
        subject: subject.into(),
        lhs: ratio,
        rhs: bound,
        slack,
        margin: ratio - bound,
        // Infinite slack means a zero-hit estimate: no statistical power,
        // recorded as inconclusive-pass.
        pass: !slack.is_finite() || ratio >= bound - slack,
    })
}

/// Surface-to-volume upper bound for a single vertex cone:
/// `D(S_v) / vol(S_v) <= n^2.5 delta / det*`, plus the exact per-facet
/// height bound `h_F >= det* / (sqrt(n) delta)` with zero tolerance.
pub fn verify_lemma2(
    atlas: &ConeAtlas,
    cond: &ConditionNumbers,
    vertex: usize,
) -> Result<Lemma2Check, BoundsError> {
    let n = atlas.graph().n() as f64;
    let stats = atlas.vertex_stats(vertex);
    let (surface, surf_se) = stats.dockable_surface;
    let (volume, vol_se) = (stats.volume, stats.volume_stderr);
    let ratio = surface / volume;
    let bound = n.powf(2.5) * cond.delta / cond.det_star;
    let slack = 3.0 * ratio_stderr(surface, surf_se, volume, vol_se);

    let height_floor = cond.det_star / (n.sqrt() * cond.delta);
    let heights = stats
        .facet_heights
        .iter()
        .map(|&(row, h)| HeightCheck {
            dropped_row: row,
            height: h,
            lower_bound: height_floor,
            pass: h >= height_floor,
        })
        .collect();

    Ok(Lemma2Check {
        ratio: LemmaCheck {
            lemma: 2,
            subject: format!("vertex {vertex}"),
            lhs: ratio,
            rhs: bound,
            slack,
            margin: bound - ratio,
            pass: !slack.is_finite() || ratio <= bound + slack,
        },
        heights,
    })
}

/// Expansion step: the cones of the outside neighbors of `ids` hold at
/// least `sqrt(2/pi) det* / (n^2 delta)` times the volume of the union
/// over `ids`, while that union stays at or below half the ball.
pub fn verify_lemma3(
    atlas: &ConeAtlas,
    cond: &ConditionNumbers,
    ids: &[usize],
    subject: impl Into<String>,
) -> Result<LemmaCheck, BoundsError> {
    let (volume, vol_se) = check_half_ball(atlas, ids)?;
    let n = atlas.graph().n() as f64;
    let factor = (2.0 / PI).sqrt() * cond.det_star / (n * n * cond.delta);

    let neighborhood = atlas.graph().neighborhood(ids);
    let (lhs, lhs_se) = atlas.set_volume(&neighborhood);
    let rhs = factor * volume;
    let rhs_se = factor * vol_se;
    let slack = 3.0 * (lhs_se * lhs_se + rhs_se * rhs_se).sqrt();
    Ok(LemmaCheck {
        lemma: 3,
        subject: subject.into(),
        lhs,
        rhs,
        slack,
        margin: lhs - rhs,
        pass: lhs >= rhs - slack,
    })
}

/// One breadth-first frontier with its measured cone volumes.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionRecord {
    pub iteration: usize,
    pub frontier: Vec<usize>,
    pub volume: f64,
    pub volume_stderr: f64,
    pub neighborhood_volume: f64,
    pub neighborhood_stderr: f64,
    /// Expansion floor `sqrt(2/pi) det*/(n^2 delta) * vol(S_I)`.
    pub lemma3_rhs: f64,
    /// `vol(S_{I_j}) / vol(S_{I_{j-1}})`, absent at iteration zero.
    pub growth_factor: Option<f64>,
    pub below_half_ball: bool,
}

/// Two breadth-first frontiers grown simultaneously until they intersect.
/// The shortest path between the endpoints is at most twice the meeting
/// iteration.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionTrace {
    pub from: usize,
    pub to: usize,
    pub distance: usize,
    pub meet_iteration: usize,
    pub frontier_bound: usize,
    pub from_records: Vec<ExpansionRecord>,
    pub to_records: Vec<ExpansionRecord>,
}

/// Runs the two-sided frontier expansion between `u` and `w`, recording
/// per-iteration volumes and growth factors up to the meeting iteration.
pub fn expansion_trace(
    atlas: &ConeAtlas,
    cond: &ConditionNumbers,
    u: usize,
    w: usize,
) -> Result<ExpansionTrace, BoundsError> {
    let graph = atlas.graph();
    let layers_u = graph.bfs_layers(u);
    let layers_w = graph.bfs_layers(w);
    let layer = |layers: &[Vec<usize>], j: usize| -> Vec<usize> {
        layers[j.min(layers.len() - 1)].clone()
    };

    let mut meet = None;
    for j in 0..layers_u.len().max(layers_w.len()) {
        let a = layer(&layers_u, j);
        let b: std::collections::HashSet<usize> = layer(&layers_w, j).into_iter().collect();
        if a.iter().any(|v| b.contains(v)) {
            meet = Some(j);
            break;
        }
    }
    let meet = meet.expect("frontiers of a connected graph always meet");

    let n = graph.n() as f64;
    let factor = (2.0 / PI).sqrt() * cond.det_star / (n * n * cond.delta);
    let half = atlas.ball_volume() / 2.0;
    let record_side = |layers: &[Vec<usize>]| -> Vec<ExpansionRecord> {
        let mut records = Vec::with_capacity(meet + 1);
        let mut previous: Option<f64> = None;
        for j in 0..=meet {
            let ids = layer(layers, j);
            let (volume, volume_stderr) = atlas.set_volume(&ids);
            let neighborhood = graph.neighborhood(&ids);
            let (nv, nv_se) = atlas.set_volume(&neighborhood);
            records.push(ExpansionRecord {
                iteration: j,
                frontier: ids,
                volume,
                volume_stderr,
                neighborhood_volume: nv,
                neighborhood_stderr: nv_se,
                lemma3_rhs: factor * volume,
                growth_factor: previous.map(|p| volume / p),
                below_half_ball: volume <= half,
            });
            previous = Some(volume);
        }
        records
    };

    let distance = graph.distance(u, w);
    debug_assert!(distance <= 2 * meet);
    Ok(ExpansionTrace {
        from: u,
        to: w,
        distance,
        meet_iteration: meet,
        frontier_bound: 2 * meet,
        from_records: record_side(&layers_u),
        to_records: record_side(&layers_w),
    })
}
