//! H-representation handling, exhaustive vertex enumeration, degeneracy and
//! boundedness checks, and the vertex-edge graph with exact diameter and
//! breadth-first layers.

use itertools::Itertools;
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::{self, determinant, dot, norm, Matrix};
use crate::tol;

#[derive(Debug, Clone, Error)]
pub enum PolytopeError {
    #[error("constraint shape must satisfy m > n >= 2, got m={m}, n={n}")]
    InvalidShape { m: usize, n: usize },
    #[error("row {0} has near-zero norm")]
    ZeroRow(usize),
    #[error("degenerate vertex at {point:?} with {} tight rows {tight_rows:?}", tight_rows.len())]
    Degenerate { point: Vec<f64>, tight_rows: Vec<usize> },
    #[error("the constraint system has no vertex")]
    EmptyPolytope,
    #[error("enumeration requires {required} basis candidates, budget is {budget}")]
    SizeTooLarge { required: u128, budget: u128 },
    #[error("polyhedron is unbounded: vertex {vertex} has an unblocked edge ray {direction:?}")]
    Unbounded { vertex: usize, direction: Vec<f64> },
    #[error("pivot from vertex {vertex} dropping row {dropped_row} does not land on a known vertex")]
    InconsistentAdjacency { vertex: usize, dropped_row: usize },
}

impl From<numerics::NumericsError> for PolytopeError {
    fn from(e: numerics::NumericsError) -> Self {
        match e {
            numerics::NumericsError::ZeroRow(i) => PolytopeError::ZeroRow(i),
            numerics::NumericsError::SizeTooLarge { required, budget } => {
                PolytopeError::SizeTooLarge { required, budget }
            }
            numerics::NumericsError::RankDeficient { .. } => {
                unreachable!("rank errors do not arise from normalization")
            }
        }
    }
}

/// Enumeration tolerances; the defaults suit unit-scale data (rows are
/// normalized on load).
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Tight-row detection threshold.
    pub tight: f64,
    /// Feasibility slack for `Ax <= b`.
    pub feas: f64,
    /// Singular-basis threshold on `|det|`.
    pub det: f64,
    /// Distance under which two solution points are the same vertex.
    pub dup: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { tight: tol::EPS_TIGHT, feas: tol::EPS_FEAS, det: tol::EPS_DET, dup: tol::EPS_DUP }
    }
}

/// The polytope `P = {x : Ax <= b}` with every row of `A` scaled to unit
/// Euclidean norm.
#[derive(Debug, Clone)]
pub struct HRepresentation {
    a: Matrix,
    b: Vec<f64>,
}

impl HRepresentation {
    /// Normalizes the rows of `a` (dividing `b` accordingly) and validates
    /// the shape `m > n >= 2`.
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self, PolytopeError> {
        let (m, n) = (a.rows(), a.cols());
        if !(m > n && n >= 2) {
            return Err(PolytopeError::InvalidShape { m, n });
        }
        let (a, b) = numerics::normalize_rows(&a, &b)?;
        Ok(Self { a, b })
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn offsets(&self) -> &[f64] {
        &self.b
    }

    /// Replaces the offset vector, keeping the normalized rows.
    pub fn with_offsets(mut self, b: Vec<f64>) -> Self {
        assert_eq!(b.len(), self.m());
        self.b = b;
        self
    }

    /// Largest violation `a_i.x - b_i` over all rows.
    pub fn violation(&self, x: &[f64]) -> f64 {
        (0..self.m())
            .map(|i| dot(self.a.row(i), x) - self.b[i])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Basis matrix of the given rows (square when `rows.len() == n`).
    pub fn basis(&self, rows: &[usize]) -> Matrix {
        let cols: Vec<usize> = (0..self.n()).collect();
        self.a.submatrix(rows, &cols)
    }
}

/// A vertex of the polytope: a feasible point with exactly `n` linearly
/// independent tight rows.
#[derive(Debug, Clone)]
pub struct Vertex {
    pub id: usize,
    pub point: Vec<f64>,
    /// Sorted indices of the rows tight at `point`.
    pub tight_rows: Vec<usize>,
    /// `|det|` of the basis matrix formed by the tight rows.
    pub basis_det: f64,
}

/// Enumerates every vertex by exhausting all `n`-row bases, with the
/// default tolerances and enumeration budget.
pub fn enumerate_vertices(h: &HRepresentation) -> Result<Vec<Vertex>, PolytopeError> {
    enumerate_vertices_with(h, &Tolerances::default(), tol::DEFAULT_ENUMERATION_BUDGET)
}

pub fn enumerate_vertices_with(
    h: &HRepresentation,
    tols: &Tolerances,
    budget: u128,
) -> Result<Vec<Vertex>, PolytopeError> {
    let (m, n) = (h.m(), h.n());
    let required = binomial(m, n);
    if required > budget {
        return Err(PolytopeError::SizeTooLarge { required, budget });
    }

    // Fixed-size chunks keep memory bounded while the per-chunk work runs
    // in parallel; candidate order stays independent of the worker count.
    let mut points: Vec<Vec<f64>> = Vec::new();
    let combos: Vec<Vec<usize>> = (0..m).combinations(n).collect();
    for chunk in combos.chunks(8192) {
        let candidates: Vec<Option<Vec<f64>>> = chunk
            .par_iter()
            .map(|subset| {
                let basis = h.basis(subset);
                if determinant(&basis).abs() <= tols.det {
                    return None;
                }
                let rhs: Vec<f64> = subset.iter().map(|&i| h.b[i]).collect();
                let x = numerics::solve_square(&basis, &rhs)?;
                (h.violation(&x) <= tols.feas).then_some(x)
            })
            .collect();
        for x in candidates.into_iter().flatten() {
            if !points.iter().any(|p| point_distance(p, &x) < tols.dup) {
                points.push(x);
            }
        }
    }

    if points.is_empty() {
        return Err(PolytopeError::EmptyPolytope);
    }

    points.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));

    let mut vertices = Vec::with_capacity(points.len());
    for (id, point) in points.into_iter().enumerate() {
        let tight_rows: Vec<usize> = (0..m)
            .filter(|&i| (dot(h.a.row(i), &point) - h.b[i]).abs() <= tols.tight)
            .collect();
        if tight_rows.len() > n {
            return Err(PolytopeError::Degenerate { point, tight_rows });
        }
        debug_assert_eq!(tight_rows.len(), n);
        let basis_det = determinant(&h.basis(&tight_rows)).abs();
        vertices.push(Vertex { id, point, tight_rows, basis_det });
    }
    Ok(vertices)
}

fn point_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
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

/// The vertex-edge graph of a bounded, non-degenerate polytope. Two
/// vertices are adjacent exactly when they share `n - 1` tight rows.
#[derive(Debug, Clone)]
pub struct PolytopeGraph {
    hrep: HRepresentation,
    vertices: Vec<Vertex>,
    adjacency: Vec<Vec<usize>>,
    /// Vertex coordinates packed row-major for tight argmax scans.
    flat_points: Vec<f64>,
}

/// Builds the graph by pivoting along every edge ray of every vertex and
/// running the ratio test to find the blocking row. A ray no row blocks
/// means the polyhedron is unbounded and the diameter is undefined.
pub fn build_graph(
    hrep: HRepresentation,
    vertices: Vec<Vertex>,
) -> Result<PolytopeGraph, PolytopeError> {
    build_graph_with(hrep, vertices, &Tolerances::default())
}

pub fn build_graph_with(
    hrep: HRepresentation,
    vertices: Vec<Vertex>,
    tols: &Tolerances,
) -> Result<PolytopeGraph, PolytopeError> {
    let n = hrep.n();
    let neighbor_lists: Vec<Result<Vec<usize>, PolytopeError>> = vertices
        .par_iter()
        .map(|v| {
            let mut neighbors = Vec::with_capacity(n);
            for &dropped in &v.tight_rows {
                let remaining: Vec<usize> =
                    v.tight_rows.iter().copied().filter(|&r| r != dropped).collect();
                let ray = edge_ray(&hrep, &remaining, dropped);

                // Ratio test over all rows: first constraint hit along the ray.
                let mut best: Option<(f64, usize)> = None;
                for i in 0..hrep.m() {
                    if v.tight_rows.contains(&i) {
                        continue;
                    }
                    let speed = dot(hrep.a.row(i), &ray);
                    if speed <= tols.det {
                        continue;
                    }
                    let t = (hrep.b[i] - dot(hrep.a.row(i), &v.point)) / speed;
                    if best.is_none_or(|(bt, _)| t < bt) {
                        best = Some((t, i));
                    }
                }
                let Some((t, _)) = best else {
                    return Err(PolytopeError::Unbounded { vertex: v.id, direction: ray });
                };
                let landing: Vec<f64> =
                    v.point.iter().zip(&ray).map(|(p, d)| p + t * d).collect();
                let Some(u) = vertices
                    .iter()
                    .find(|u| point_distance(&u.point, &landing) < tols.dup)
                else {
                    return Err(PolytopeError::InconsistentAdjacency {
                        vertex: v.id,
                        dropped_row: dropped,
                    });
                };
                neighbors.push(u.id);
            }
            neighbors.sort_unstable();
            neighbors.dedup();
            Ok(neighbors)
        })
        .collect();

    let mut adjacency = Vec::with_capacity(vertices.len());
    for list in neighbor_lists {
        adjacency.push(list?);
    }

    // Non-degenerate bounded polytopes give a symmetric n-regular graph.
    for (v, neighbors) in adjacency.iter().enumerate() {
        if neighbors.len() != n || neighbors.contains(&v) {
            return Err(PolytopeError::InconsistentAdjacency { vertex: v, dropped_row: 0 });
        }
        for &u in neighbors {
            if !adjacency[u].contains(&v) {
                return Err(PolytopeError::InconsistentAdjacency { vertex: v, dropped_row: 0 });
            }
        }
    }

    let flat_points = vertices.iter().flat_map(|v| v.point.iter().copied()).collect();
    Ok(PolytopeGraph { hrep, vertices, adjacency, flat_points })
}

/// Direction of the edge defined by the `n - 1` rows in `remaining`,
/// oriented away from the dropped constraint. Components are signed
/// cofactors of the row stack, so the ray is exactly orthogonal to every
/// remaining row.
fn edge_ray(h: &HRepresentation, remaining: &[usize], dropped: usize) -> Vec<f64> {
    let n = h.n();
    let mut d: Vec<f64> = (0..n)
        .map(|j| {
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = determinant(&h.matrix().submatrix(remaining, &cols));
            if j % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
        .collect();
    let speed = dot(h.matrix().row(dropped), &d);
    debug_assert!(speed.abs() > 0.0, "edge ray degenerate for a nonsingular basis");
    if speed > 0.0 {
        for x in &mut d {
            *x = -*x;
        }
    }
    let len = norm(&d);
    d.into_iter().map(|x| x / len).collect()
}

impl PolytopeGraph {
    pub fn hrep(&self) -> &HRepresentation {
        &self.hrep
    }

    pub fn n(&self) -> usize {
        self.hrep.n()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: usize) -> &Vertex {
        &self.vertices[id]
    }

    pub fn neighbors(&self, id: usize) -> &[usize] {
        &self.adjacency[id]
    }

    /// Vertex coordinates packed row-major, `n` values per vertex.
    pub fn flat_points(&self) -> &[f64] {
        &self.flat_points
    }

    /// All edges as ordered pairs `(v, u)` with `v < u`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (v, neighbors) in self.adjacency.iter().enumerate() {
            for &u in neighbors {
                if v < u {
                    edges.push((v, u));
                }
            }
        }
        edges
    }

    /// The tight row of `v` that is not shared with adjacent vertex `u`.
    pub fn dropped_row(&self, v: usize, u: usize) -> usize {
        let tu = &self.vertices[u].tight_rows;
        let dropped: Vec<usize> = self.vertices[v]
            .tight_rows
            .iter()
            .copied()
            .filter(|r| !tu.contains(r))
            .collect();
        assert_eq!(dropped.len(), 1, "adjacent vertices share exactly n - 1 tight rows");
        dropped[0]
    }

    /// Shared tight rows of an edge, the identity of its cone facet.
    pub fn shared_rows(&self, v: usize, u: usize) -> Vec<usize> {
        let tu = &self.vertices[u].tight_rows;
        self.vertices[v].tight_rows.iter().copied().filter(|r| tu.contains(r)).collect()
    }

    fn bfs_distances(&self, start: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertices.len()];
        dist[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in &self.adjacency[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: usize, w: usize) -> usize {
        self.bfs_distances(u)[w]
    }

    /// Exact graph diameter via breadth-first search from every vertex,
    /// with a witness pair realizing it (smallest ids on ties).
    pub fn diameter(&self) -> (usize, (usize, usize)) {
        let per_start: Vec<(usize, usize)> = (0..self.vertices.len())
            .into_par_iter()
            .map(|start| {
                let dist = self.bfs_distances(start);
                let (far, ecc) = dist
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                    .expect("non-empty graph");
                (*ecc, far)
            })
            .collect();
        let mut best = (0, (0, 0));
        for (start, &(ecc, far)) in per_start.iter().enumerate() {
            if ecc > best.0 {
                best = (ecc, (start, far));
            }
        }
        best
    }

    /// Cumulative breadth-first layers from `start`: each layer is the
    /// previous one united with its outside neighbors, ending at the full
    /// vertex set.
    pub fn bfs_layers(&self, start: usize) -> Vec<Vec<usize>> {
        let total = self.vertices.len();
        let mut inside = vec![false; total];
        inside[start] = true;
        let mut current = vec![start];
        let mut layers = vec![current.clone()];
        while current.len() < total {
            let mut next: Vec<usize> = current.clone();
            for &v in &current {
                for &u in &self.adjacency[v] {
                    if !inside[u] {
                        inside[u] = true;
                        next.push(u);
                    }
                }
            }
            next.sort_unstable();
            if next.len() == current.len() {
                break; // disconnected; cannot happen for polytope graphs
            }
            layers.push(next.clone());
            current = next;
        }
        layers
    }

    /// Outside-adjacent vertex set of `ids`.
    pub fn neighborhood(&self, ids: &[usize]) -> Vec<usize> {
        let inside: std::collections::HashSet<usize> = ids.iter().copied().collect();
        let mut out: Vec<usize> = ids
            .iter()
            .flat_map(|&v| self.adjacency[v].iter().copied())
            .filter(|u| !inside.contains(u))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}
