//! Python bindings: the `Polytope` class plus the generator, bound, and
//! analysis entry points. Reports cross the boundary as JSON strings with
//! the same deterministic formatting as the command line.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use polydiam::analysis::{self, AnalysisConfig, LemmaSelection};
use polydiam::generators::GeneratorSpec;
use polydiam::polytope::{build_graph, enumerate_vertices, HRepresentation, PolytopeGraph};
use polydiam::{bounds, cones, hrep, report};

fn to_py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A polytope `{x : Ax <= b}` with unit-norm rows.
#[pyclass(frozen)]
struct Polytope {
    inner: HRepresentation,
}

impl Polytope {
    fn graph(&self) -> PyResult<PolytopeGraph> {
        let vertices = enumerate_vertices(&self.inner).map_err(to_py_err)?;
        build_graph(self.inner.clone(), vertices).map_err(to_py_err)
    }
}

#[pymethods]
impl Polytope {
    /// Parses `.hrep` text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: hrep::parse_hrep(text).map_err(to_py_err)? })
    }

    /// Loads a `.hrep` file.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PyValueError::new_err(format!("{path}: {e}")))?;
        Self::parse(&text)
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Normalized constraint rows.
    fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.inner.m()).map(|i| self.inner.matrix().row(i).to_vec()).collect()
    }

    /// Offset vector `b`.
    fn offsets(&self) -> Vec<f64> {
        self.inner.offsets().to_vec()
    }

    /// All vertex coordinates, in canonical (lexicographic) order.
    fn vertices(&self) -> PyResult<Vec<Vec<f64>>> {
        let vs = enumerate_vertices(&self.inner).map_err(to_py_err)?;
        Ok(vs.into_iter().map(|v| v.point).collect())
    }

    /// Exact graph diameter and a witness vertex-id pair.
    fn diameter(&self) -> PyResult<(usize, (usize, usize))> {
        Ok(self.graph()?.diameter())
    }

    /// Cumulative breadth-first layers of vertex ids from `start`.
    fn bfs_layers(&self, start: usize) -> PyResult<Vec<Vec<usize>>> {
        let graph = self.graph()?;
        if start >= graph.vertex_count() {
            return Err(PyValueError::new_err(format!(
                "vertex id {start} out of range ({} vertices)",
                graph.vertex_count()
            )));
        }
        Ok(graph.bfs_layers(start))
    }

    /// `(delta, det_star)`: the largest order-`(n-1)` minor and the
    /// smallest vertex-basis determinant.
    fn condition_numbers(&self) -> PyResult<(f64, f64)> {
        let graph = self.graph()?;
        let cond = bounds::condition_numbers(&graph, false).map_err(to_py_err)?;
        Ok((cond.delta, cond.det_star))
    }

    /// Spherical-cone volume estimates `(volume, stderr)` per vertex.
    #[pyo3(signature = (samples = 100_000, seed = 0))]
    fn cone_volumes(&self, samples: u64, seed: u64) -> PyResult<Vec<(f64, f64)>> {
        let graph = self.graph()?;
        let est = cones::estimate_cone_volumes(&graph, samples, seed).map_err(to_py_err)?;
        Ok((0..graph.vertex_count()).map(|v| est.vertex_volume(v)).collect())
    }

    /// Serializes back to `.hrep` text.
    fn to_hrep(&self) -> String {
        hrep::write_hrep(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Polytope(m={}, n={})", self.inner.m(), self.inner.n())
    }
}

fn built(spec: GeneratorSpec) -> PyResult<Polytope> {
    Ok(Polytope { inner: spec.build().map_err(to_py_err)? })
}

/// The box `[-1, 1]^dim`.
#[pyfunction]
fn hypercube(dim: usize) -> PyResult<Polytope> {
    built(GeneratorSpec::Hypercube { dim })
}

/// The standard simplex in normalized form.
#[pyfunction]
fn simplex(dim: usize) -> PyResult<Polytope> {
    built(GeneratorSpec::Simplex { dim })
}

/// Regular polygon with `sides` tangent edges.
#[pyfunction]
fn regular_polygon(sides: usize) -> PyResult<Polytope> {
    built(GeneratorSpec::RegularPolygon { sides })
}

/// The unit cross-polytope; degenerate for dim >= 3.
#[pyfunction]
fn cross_polytope(dim: usize) -> PyResult<Polytope> {
    built(GeneratorSpec::CrossPolytope { dim })
}

/// Random polytope with `rows` planes tangent to the unit sphere.
#[pyfunction]
fn random_tangent(rows: usize, dim: usize, seed: u64) -> PyResult<Polytope> {
    built(GeneratorSpec::RandomTangent { rows, dim, seed })
}

/// Diameter ceilings from the condition numbers:
/// `(j_max_paper, bound_paper, j_max_standard, bound_standard)`.
#[pyfunction]
fn theorem_bound(n: usize, delta: f64, det_star: f64) -> PyResult<(u64, u64, u64, u64)> {
    let b = bounds::theorem_bound(n, delta, det_star).map_err(to_py_err)?;
    Ok((b.j_max_paper, b.diameter_bound_paper, b.j_max_standard, b.diameter_bound_standard))
}

/// Runs the full analysis pipeline and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (polytope, samples = 1_000_000, seed = 0, all_minors = false, perturb = None))]
fn analyze(
    polytope: &Polytope,
    samples: u64,
    seed: u64,
    all_minors: bool,
    perturb: Option<f64>,
) -> PyResult<String> {
    let config = AnalysisConfig {
        samples,
        seed,
        all_minors,
        perturb,
        lemmas: LemmaSelection::all(),
        ..AnalysisConfig::default()
    };
    let rep = analysis::run_analyze(polytope.inner.clone(), &config, None, "analyze")
        .map_err(to_py_err)?;
    Ok(report::to_json(&rep))
}

#[pymodule]
fn polydiam_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Polytope>()?;
    m.add_function(wrap_pyfunction!(hypercube, m)?)?;
    m.add_function(wrap_pyfunction!(simplex, m)?)?;
    m.add_function(wrap_pyfunction!(regular_polygon, m)?)?;
    m.add_function(wrap_pyfunction!(cross_polytope, m)?)?;
    m.add_function(wrap_pyfunction!(random_tangent, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_bound, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    Ok(())
}
