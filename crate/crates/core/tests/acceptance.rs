//! Acceptance suite: one test per criterion, each printing one summary
//! line. Heavy criteria serialize through a global gate so wall-clock
//! assertions are stable.

mod common;

use std::f64::consts::PI;
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::Instant;

use polydiam::analysis::{run_analyze, AnalysisConfig};
use polydiam::bounds::{
    condition_numbers, theorem_bound, verify_lemma1, verify_lemma2, verify_lemma3,
};
use polydiam::cones::{
    estimate_cone_volumes, facet_area, facet_area_exact, facet_height,
    facet_height_by_projection, simplex_volume, ConeAtlas,
};
use polydiam::generators;
use polydiam::numerics::{determinant, determinant_exact, Matrix};
use polydiam::report::to_json;

use common::{cofactor_det, graph_of, int_matrix, random_unit_rows, seeded_rng, suite_instances};

const SUITE_SAMPLES: u64 = 50_000;
const SUITE_SEED: u64 = 0;

fn gate() -> MutexGuard<'static, ()> {
    static GATE: OnceLock<Mutex<()>> = OnceLock::new();
    GATE.get_or_init(|| Mutex::new(())).lock().unwrap_or_else(|e| e.into_inner())
}

#[test]
fn a01_hypercubes_exact_quantities_and_runtime() {
    let _gate = gate();
    let config = AnalysisConfig { samples: 1_000_000, ..AnalysisConfig::default() };
    for n in 2..=5 {
        let start = Instant::now();
        let report = run_analyze(generators::hypercube(n), &config, None, "analyze").unwrap();
        let elapsed = start.elapsed();
        assert_eq!(report.exact_diameter, n, "hypercube diameter is n");
        assert_eq!(report.delta, 1.0, "hypercube delta");
        assert_eq!(report.det_star, 1.0, "hypercube det*");
        assert!(
            report.diameter_bound_paper >= n as u64,
            "ceiling 2*j_max covers the diameter"
        );
        assert!(
            elapsed.as_secs_f64() < 10.0,
            "hypercube n={n} took {:.2}s at 1e6 samples",
            elapsed.as_secs_f64()
        );
        println!(
            "criterion 1: hypercube n={n} diameter={} delta={} det*={} 2j_max={} in {:.2}s",
            report.exact_diameter,
            report.delta,
            report.det_star,
            report.diameter_bound_paper,
            elapsed.as_secs_f64()
        );
    }
}

#[test]
fn a02_isoperimetric_lower_bound_suite() {
    let _gate = gate();
    let mut checks = 0usize;
    let mut failures = Vec::new();
    for (name, graph) in suite_instances() {
        let atlas = ConeAtlas::new(&graph, SUITE_SAMPLES, SUITE_SEED).unwrap();
        let half = atlas.ball_volume() / 2.0;
        for v in 0..graph.vertex_count() {
            let check = verify_lemma1(&atlas, &[v], format!("vertex {v}")).unwrap();
            checks += 1;
            if !check.pass {
                failures.push(format!("{name}: {}", check.subject));
            }
        }
        for start in 0..graph.vertex_count() {
            for (j, layer) in graph.bfs_layers(start).iter().enumerate() {
                if atlas.set_volume(layer).0 > half {
                    continue;
                }
                let check =
                    verify_lemma1(&atlas, layer, format!("layer {j} from {start}")).unwrap();
                checks += 1;
                if !check.pass {
                    failures.push(format!("{name}: {}", check.subject));
                }
            }
        }
    }
    assert!(failures.is_empty(), "isoperimetric failures: {failures:?}");
    println!("criterion 2: D(S)/vol(S) >= sqrt(2n/pi) held in all {checks} checks");
}

#[test]
fn a03_surface_ratio_upper_bound_suite() {
    let _gate = gate();
    let mut ratio_checks = 0usize;
    let mut height_checks = 0usize;
    let mut failures = Vec::new();
    for (name, graph) in suite_instances() {
        let atlas = ConeAtlas::new(&graph, SUITE_SAMPLES, SUITE_SEED).unwrap();
        let cond = condition_numbers(&graph, false).unwrap();
        for v in 0..graph.vertex_count() {
            let check = verify_lemma2(&atlas, &cond, v).unwrap();
            ratio_checks += 1;
            if !check.ratio.pass {
                failures.push(format!("{name}: {} ratio", check.ratio.subject));
            }
            for h in &check.heights {
                height_checks += 1;
                // Exact quantities carry zero tolerance.
                if !(h.height >= h.lower_bound) {
                    failures.push(format!(
                        "{name}: vertex {v} facet {} height {} < {}",
                        h.dropped_row, h.height, h.lower_bound
                    ));
                }
            }
        }
    }
    assert!(failures.is_empty(), "surface-ratio failures: {failures:?}");
    println!(
        "criterion 3: D(S_v)/vol(S_v) <= n^2.5*delta/det* held in all {ratio_checks} cones; \
         h_F >= det*/(sqrt(n)*delta) held exactly in all {height_checks} facets"
    );
}

#[test]
fn a04_expansion_suite() {
    let _gate = gate();
    let mut lemma3_checks = 0usize;
    let mut growth_checks = 0usize;
    let mut failures = Vec::new();
    for (name, graph) in suite_instances() {
        let atlas = ConeAtlas::new(&graph, SUITE_SAMPLES, SUITE_SEED).unwrap();
        let cond = condition_numbers(&graph, false).unwrap();
        let n = graph.n() as f64;
        let growth_floor = 1.0 + (2.0 / PI).sqrt() * cond.det_star / (n * n * cond.delta);
        let half = atlas.ball_volume() / 2.0;
        for start in 0..graph.vertex_count() {
            let layers = graph.bfs_layers(start);
            for (j, layer) in layers.iter().enumerate() {
                let (volume, vol_se) = atlas.set_volume(layer);
                if volume > half {
                    continue;
                }
                let check =
                    verify_lemma3(&atlas, &cond, layer, format!("layer {j} from {start}"))
                        .unwrap();
                lemma3_checks += 1;
                if !check.pass {
                    failures.push(format!("{name}: {} expansion", check.subject));
                }
                if let Some(next) = layers.get(j + 1) {
                    let (next_volume, next_se) = atlas.set_volume(next);
                    let growth = next_volume / volume;
                    let slack = 3.0
                        * growth
                        * ((vol_se / volume).powi(2) + (next_se / next_volume).powi(2)).sqrt();
                    growth_checks += 1;
                    if !(growth >= growth_floor - slack) {
                        failures.push(format!(
                            "{name}: growth {growth} < {growth_floor} at layer {j} from {start}"
                        ));
                    }
                }
            }
        }
    }
    assert!(failures.is_empty(), "expansion failures: {failures:?}");
    println!(
        "criterion 4: neighborhood expansion held in all {lemma3_checks} layers; \
         growth floor held in all {growth_checks} steps"
    );
}

#[test]
fn a05_exact_geometry_cross_checks() {
    let _gate = gate();

    // Two-dimensional facets are unit segments, exactly.
    let square = graph_of(generators::hypercube(2));
    for v in square.vertices() {
        for &row in &v.tight_rows {
            assert_eq!(facet_area(&square, v.id, row, 1000, 0).unwrap(), (1.0, 0.0));
        }
    }

    // Three-dimensional facet estimates match the sector closed form.
    let mut sector_checks = 0;
    for graph in [
        graph_of(generators::hypercube(3)),
        graph_of(generators::random_tangent(8, 3, 42).unwrap()),
    ] {
        for v in graph.vertices() {
            for &row in &v.tight_rows {
                let exact = facet_area_exact(&graph, v.id, row).unwrap();
                let (mc, stderr) = facet_area(&graph, v.id, row, 100_000, 0).unwrap();
                assert!(
                    (mc - exact).abs() <= 3.0 * stderr,
                    "sector mismatch: mc={mc} exact={exact} stderr={stderr}"
                );
                sector_checks += 1;
            }
        }
    }

    // Square cone volumes are quarter disks at one million samples.
    let est = estimate_cone_volumes(&square, 1_000_000, 0).unwrap();
    for v in 0..4 {
        let (vol, stderr) = est.vertex_volume(v);
        assert!((vol - PI / 4.0).abs() <= 3.0 * stderr);
    }

    // Inscribed simplex of the identity basis, exactly one half.
    assert_eq!(simplex_volume(&Matrix::identity(2)).unwrap(), 0.5);

    println!(
        "criterion 5: 2-D facets exact, {sector_checks} sector cross-checks, \
         quarter-disk volumes, vol(J_2) = 0.5"
    );
}

#[test]
fn a06_adjugate_height_matches_projection_oracle() {
    let _gate = gate();
    let mut rng = seeded_rng(606);
    let mut bases = 0usize;
    let mut worst = 0.0f64;
    while bases < 1000 {
        let n = 2 + bases % 5;
        let basis = random_unit_rows(&mut rng, n, n);
        // Near-singular draws carry no height information either way.
        if determinant(&basis).abs() <= 1e-6 {
            continue;
        }
        for k in 0..n {
            let adjugate_route = facet_height(&basis, k).unwrap();
            let projection_route = facet_height_by_projection(&basis, k).unwrap();
            let gap = (adjugate_route - projection_route).abs();
            worst = worst.max(gap);
            assert!(gap <= 1e-9, "n={n} k={k}: adjugate {adjugate_route} vs projection {projection_route}");
        }
        bases += 1;
    }
    println!("criterion 6: 1000 random bases, worst |adjugate - projection| = {worst:.3e}");
}

#[test]
fn a07_theorem_bound_integer_match() {
    let _gate = gate();
    // Oracle arithmetic on the closed form, independent of the library.
    let threshold_square = (2.0 * PI.ln() - 2f64.ln()) * 4.0 * (2.0 * PI).sqrt();
    assert!((threshold_square - 16.006).abs() < 1e-3);
    let threshold_cube = (3.0 * PI.ln() - 2f64.ln()) * 9.0 * (2.0 * PI).sqrt();
    assert!((threshold_cube - 61.84).abs() < 5e-3);
    assert_eq!(threshold_square.floor() as u64 + 1, 17);
    assert_eq!(threshold_cube.floor() as u64 + 1, 62);

    assert_eq!(theorem_bound(2, 1.0, 1.0).unwrap().j_max_paper, 17);
    assert_eq!(theorem_bound(3, 1.0, 1.0).unwrap().j_max_paper, 62);
    println!("criterion 7: j_max 17 (square) and 62 (3-cube), exact integer match");
}

#[test]
fn a08_determinant_bareiss_vs_cofactor() {
    let _gate = gate();
    let mut rng = seeded_rng(808);
    use rand::Rng;
    for trial in 0..1000 {
        let n = 2 + trial % 4; // up to 5x5
        let rows: Vec<Vec<i64>> =
            (0..n).map(|_| (0..n).map(|_| rng.random_range(-9..=9)).collect()).collect();
        let oracle = cofactor_det(&rows);
        let bareiss = determinant_exact(&int_matrix(&rows)).unwrap();
        assert!(bareiss.is_integer());
        assert_eq!(bareiss.to_integer(), oracle, "trial {trial}, n={n}");
    }
    println!("criterion 8: Bareiss equals cofactor expansion exactly on 1000 matrices");
}

#[test]
fn a09_error_paths_exit_codes() {
    let _gate = gate();
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_polydiam");

    let octa = dir.path().join("octahedron.hrep");
    let status = std::process::Command::new(bin)
        .args(["generate", "cross-polytope", "--dim", "3", "-o"])
        .arg(&octa)
        .status()
        .unwrap();
    assert!(status.success());
    let status = std::process::Command::new(bin)
        .args(["analyze"])
        .arg(&octa)
        .args(["--samples", "10000"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3), "degenerate exit code");

    let slab = dir.path().join("slab.hrep");
    std::fs::write(&slab, "3 2\n1 0 1\n-1 0 1\n0 1 1\n").unwrap();
    let status = std::process::Command::new(bin)
        .args(["analyze"])
        .arg(&slab)
        .args(["--samples", "10000"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(4), "unbounded exit code");

    let square22 = dir.path().join("square22.hrep");
    std::fs::write(&square22, "2 2\n1 0 1\n0 1 1\n").unwrap();
    let status = std::process::Command::new(bin)
        .args(["analyze"])
        .arg(&square22)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2), "dimension exit code");

    println!("criterion 9: exit codes 3 (degenerate), 4 (unbounded), 2 (input)");
}

#[test]
fn a10_byte_identical_reports_across_worker_counts() {
    let _gate = gate();
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_polydiam");
    let cube = dir.path().join("cube.hrep");
    assert!(std::process::Command::new(bin)
        .args(["generate", "hypercube", "--dim", "3", "-o"])
        .arg(&cube)
        .status()
        .unwrap()
        .success());

    let run = |threads: &str| {
        let out = std::process::Command::new(bin)
            .args(["analyze"])
            .arg(&cube)
            .args(["--samples", "20000", "--seed", "5"])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let first = run("1");
    let second = run("1");
    assert_eq!(first, second, "identical invocations must agree byte for byte");
    let third = run("4");
    assert_eq!(first, third, "worker count must not change the report");

    // The in-process path agrees with itself under different pools too.
    let pooled = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let config = AnalysisConfig { samples: 20_000, ..AnalysisConfig::default() };
            to_json(&run_analyze(generators::hypercube(3), &config, None, "analyze").unwrap())
        })
    };
    assert_eq!(pooled(1), pooled(3));
    println!("criterion 10: byte-identical JSON for repeated runs and 1 vs 4 workers");
}
