//! End-to-end pipeline: normalize, enumerate, build the graph, measure
//! cones, verify the inequality chain, and evaluate the diameter ceiling.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{
    condition_numbers_with_budget, expansion_trace, theorem_bound, verify_lemma1,
    verify_lemma2, verify_lemma3, BoundsError, ExpansionRecord, LemmaCheck,
};
use crate::cones::{ConeAtlas, ConeError};
use crate::generators::GeneratorError;
use crate::hrep::HrepError;
use crate::numerics::{ball_volume, paper_ball_volume};
use crate::polytope::{
    build_graph_with, enumerate_vertices_with, HRepresentation, PolytopeError, PolytopeGraph,
    Tolerances,
};
use crate::report::{BoundReport, ConeStatsReport, FacetReport};
use crate::sampling;
use crate::tol;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Input(#[from] HrepError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error("vertex id {id} out of range (the polytope has {count} vertices)")]
    VertexOutOfRange { id: usize, count: usize },
}

impl AnalysisError {
    /// Process exit code for the outcome class: 2 input, 3 degenerate,
    /// 4 unbounded, 6 generation failure. Verification failures are not
    /// errors; the caller maps them to 5 from the report.
    pub fn exit_code(&self) -> u8 {
        match self {
            AnalysisError::Polytope(PolytopeError::Degenerate { .. }) => 3,
            AnalysisError::Polytope(PolytopeError::Unbounded { .. }) => 4,
            AnalysisError::Cone(ConeError::TooManyTies { .. })
            | AnalysisError::Bounds(BoundsError::Cone(ConeError::TooManyTies { .. })) => 3,
            AnalysisError::Generator(_) => 6,
            _ => 2,
        }
    }
}

/// Which of the three inequality families to verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaSelection {
    pub lemma1: bool,
    pub lemma2: bool,
    pub lemma3: bool,
}

impl LemmaSelection {
    pub fn all() -> Self {
        Self { lemma1: true, lemma2: true, lemma3: true }
    }

    pub fn only(lemma: u8) -> Self {
        Self { lemma1: lemma == 1, lemma2: lemma == 2, lemma3: lemma == 3 }
    }
}

impl Default for LemmaSelection {
    fn default() -> Self {
        Self::all()
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub samples: u64,
    pub seed: u64,
    /// Overrides the tight/feasibility tolerances when set.
    pub tolerance: Option<f64>,
    /// Also scan all nonzero square minors for the condition number.
    pub all_minors: bool,
    /// Uniform noise half-width added to the offsets before analysis.
    pub perturb: Option<f64>,
    pub lemmas: LemmaSelection,
    pub budget: u128,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 0,
            tolerance: None,
            all_minors: false,
            perturb: None,
            lemmas: LemmaSelection::all(),
            budget: tol::DEFAULT_ENUMERATION_BUDGET,
        }
    }
}

impl AnalysisConfig {
    fn tolerances(&self) -> Tolerances {
        match self.tolerance {
            Some(t) => Tolerances { tight: t, feas: t, ..Tolerances::default() },
            None => Tolerances::default(),
        }
    }
}

fn tool_id() -> String {
    format!("polydiam {}", env!("CARGO_PKG_VERSION"))
}

/// Adds seeded uniform noise in `[-sigma, sigma]` to the offsets only;
/// the normalized rows are untouched.
pub fn perturb_offsets(h: HRepresentation, sigma: f64, seed: u64) -> HRepresentation {
    let mut rng = sampling::stream_rng(&[seed, sampling::TAG_PERTURB]);
    let b = h
        .offsets()
        .iter()
        .map(|&bi| bi + rng.random_range(-sigma..=sigma))
        .collect();
    h.with_offsets(b)
}

/// Builds the graph stage shared by every command.
pub fn prepare_graph(
    h: HRepresentation,
    config: &AnalysisConfig,
) -> Result<PolytopeGraph, AnalysisError> {
    let h = match config.perturb {
        Some(sigma) if sigma > 0.0 => perturb_offsets(h, sigma, config.seed),
        _ => h,
    };
    let tols = config.tolerances();
    let vertices = enumerate_vertices_with(&h, &tols, config.budget)?;
    Ok(build_graph_with(h, vertices, &tols)?)
}

/// Runs the full pipeline and assembles the report. Lemma failures are
/// recorded in the report, not raised as errors.
pub fn run_analyze(
    h: HRepresentation,
    config: &AnalysisConfig,
    input: Option<String>,
    command: &str,
) -> Result<BoundReport, AnalysisError> {
    let graph = prepare_graph(h, config)?;
    let (n, m) = (graph.n(), graph.hrep().m());
    let (exact_diameter, witness) = graph.diameter();
    let cond = condition_numbers_with_budget(&graph, config.all_minors, config.budget)?;
    let atlas = ConeAtlas::new(&graph, config.samples, config.seed)?;
    let bound = theorem_bound(n, cond.delta, cond.det_star)?;

    let mut lemma_results: Vec<LemmaCheck> = Vec::new();
    let half = atlas.ball_volume() / 2.0;

    if config.lemmas.lemma1 {
        for v in 0..graph.vertex_count() {
            lemma_results.push(verify_lemma1(&atlas, &[v], format!("vertex {v}"))?);
        }
    }
    if config.lemmas.lemma2 {
        for v in 0..graph.vertex_count() {
            let check = verify_lemma2(&atlas, &cond, v)?;
            lemma_results.push(check.ratio);
            for h in check.heights {
                lemma_results.push(LemmaCheck {
                    lemma: 2,
                    subject: format!("vertex {v} facet {} height", h.dropped_row),
                    lhs: h.height,
                    rhs: h.lower_bound,
                    slack: 0.0,
                    margin: h.height - h.lower_bound,
                    pass: h.pass,
                });
            }
        }
    }

    let trace = expansion_trace(&atlas, &cond, witness.0, witness.1)?;
    let mut layer_checks =
        |records: &[ExpansionRecord], start: usize| -> Result<(), AnalysisError> {
            for record in records {
                // Layers at or above half the ball fall outside the
                // preconditions of both inequalities.
                if record.volume > half {
                    continue;
                }
                let subject = format!("layer {} from {start}", record.iteration);
                if config.lemmas.lemma1 && record.iteration > 0 {
                    lemma_results.push(verify_lemma1(&atlas, &record.frontier, &*subject)?);
                }
                if config.lemmas.lemma3 {
                    lemma_results.push(verify_lemma3(&atlas, &cond, &record.frontier, &*subject)?);
                }
            }
            Ok(())
        };
    layer_checks(&trace.from_records, trace.from)?;
    layer_checks(&trace.to_records, trace.to)?;

    let lemma_failures = lemma_results.iter().filter(|r| !r.pass).count();

    let cone_stats = atlas
        .stats()
        .iter()
        .map(|s| ConeStatsReport {
            vertex: s.vertex_id,
            volume: s.volume,
            volume_stderr: s.volume_stderr,
            simplex_volume: s.simplex_volume,
            dockable_surface: s.dockable_surface.0,
            dockable_stderr: s.dockable_surface.1,
            facets: s
                .facet_heights
                .iter()
                .zip(&s.facet_areas)
                .map(|(&(row, height), &(row2, area, area_stderr))| {
                    debug_assert_eq!(row, row2);
                    FacetReport { dropped_row: row, height, area, area_stderr }
                })
                .collect(),
        })
        .collect();

    Ok(BoundReport {
        tool: tool_id(),
        command: command.to_string(),
        input,
        n,
        m,
        samples: config.samples,
        seed: config.seed,
        perturb_sigma: config.perturb,
        vertex_count: graph.vertex_count(),
        edge_count: graph.edges().len(),
        exact_diameter,
        diameter_witness: witness,
        hirsch_quantity: m - n,
        delta: cond.delta,
        det_star: cond.det_star,
        det_star_all_minors: cond.det_star_all_minors,
        per_vertex_dets: cond.per_vertex_dets.values().copied().collect(),
        paper_ball_volume: paper_ball_volume(n),
        standard_ball_volume: ball_volume(n).volume,
        j_max_paper: bound.j_max_paper,
        diameter_bound_paper: bound.diameter_bound_paper,
        j_max_standard: bound.j_max_standard,
        diameter_bound_standard: bound.diameter_bound_standard,
        tie_count: atlas.volumes().resampled_ties(),
        cone_stats,
        lemma_results,
        lemma_failures,
        expansion: Some(trace),
    })
}

/// Output of the graph-only `diameter` command.
#[derive(Debug, Clone, Serialize)]
pub struct DiameterReport {
    pub tool: String,
    pub command: String,
    pub input: Option<String>,
    pub n: usize,
    pub m: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub exact_diameter: usize,
    pub diameter_witness: (usize, usize),
    pub hirsch_quantity: usize,
}

pub fn run_diameter(
    h: HRepresentation,
    config: &AnalysisConfig,
    input: Option<String>,
) -> Result<DiameterReport, AnalysisError> {
    let graph = prepare_graph(h, config)?;
    let (exact_diameter, diameter_witness) = graph.diameter();
    Ok(DiameterReport {
        tool: tool_id(),
        command: "diameter".into(),
        input,
        n: graph.n(),
        m: graph.hrep().m(),
        vertex_count: graph.vertex_count(),
        edge_count: graph.edges().len(),
        exact_diameter,
        diameter_witness,
        hirsch_quantity: graph.hrep().m() - graph.n(),
    })
}

/// Output of the sampling-free `bound` command.
#[derive(Debug, Clone, Serialize)]
pub struct BoundOnlyReport {
    pub tool: String,
    pub command: String,
    pub input: Option<String>,
    pub n: usize,
    pub m: usize,
    pub delta: f64,
    pub det_star: f64,
    pub det_star_all_minors: Option<f64>,
    pub j_max_paper: u64,
    pub diameter_bound_paper: u64,
    pub j_max_standard: u64,
    pub diameter_bound_standard: u64,
    pub paper_ball_volume: f64,
    pub standard_ball_volume: f64,
    pub hirsch_quantity: usize,
}

pub fn run_bound(
    h: HRepresentation,
    config: &AnalysisConfig,
    input: Option<String>,
) -> Result<BoundOnlyReport, AnalysisError> {
    let graph = prepare_graph(h, config)?;
    let n = graph.n();
    let cond = condition_numbers_with_budget(&graph, config.all_minors, config.budget)?;
    let bound = theorem_bound(n, cond.delta, cond.det_star)?;
    Ok(BoundOnlyReport {
        tool: tool_id(),
        command: "bound".into(),
        input,
        n,
        m: graph.hrep().m(),
        delta: cond.delta,
        det_star: cond.det_star,
        det_star_all_minors: cond.det_star_all_minors,
        j_max_paper: bound.j_max_paper,
        diameter_bound_paper: bound.diameter_bound_paper,
        j_max_standard: bound.j_max_standard,
        diameter_bound_standard: bound.diameter_bound_standard,
        paper_ball_volume: paper_ball_volume(n),
        standard_ball_volume: ball_volume(n).volume,
        hirsch_quantity: graph.hrep().m() - n,
    })
}

/// Output of the `trace` command: the two-sided frontier expansion
/// between explicit vertex ids.
#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub tool: String,
    pub command: String,
    pub input: Option<String>,
    pub n: usize,
    pub m: usize,
    pub samples: u64,
    pub seed: u64,
    pub delta: f64,
    pub det_star: f64,
    pub trace: crate::bounds::ExpansionTrace,
}

pub fn run_trace(
    h: HRepresentation,
    config: &AnalysisConfig,
    input: Option<String>,
    from: usize,
    to: usize,
) -> Result<TraceReport, AnalysisError> {
    let graph = prepare_graph(h, config)?;
    for id in [from, to] {
        if id >= graph.vertex_count() {
            return Err(AnalysisError::VertexOutOfRange { id, count: graph.vertex_count() });
        }
    }
    let cond = condition_numbers_with_budget(&graph, config.all_minors, config.budget)?;
    let atlas = ConeAtlas::new(&graph, config.samples, config.seed)?;
    let trace = expansion_trace(&atlas, &cond, from, to)?;
    Ok(TraceReport {
        tool: tool_id(),
        command: "trace".into(),
        input,
        n: graph.n(),
        m: graph.hrep().m(),
        samples: config.samples,
        seed: config.seed,
        delta: cond.delta,
        det_star: cond.det_star,
        trace,
    })
}
