#!/usr/bin/env python3
"""Smoke test for the polydiam_py extension module.

Builds the extension if needed, stages it under an importable name, and
exercises the main types and operations end to end.

Usage: python3 python/smoke_test.py
"""

import json
import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
LIB_NAMES = ["libpolydiam_py.so", "libpolydiam_py.dylib", "polydiam_py.dll"]


def find_library():
    for profile in ("release", "debug"):
        for name in LIB_NAMES:
            path = ROOT / "target" / profile / name
            if path.exists():
                return path
    return None


def build_library():
    subprocess.run(
        [
            "cargo", "build", "-p", "polydiam-python", "--release",
            "--features", "extension-module",
        ],
        cwd=ROOT,
        check=True,
    )


library = find_library()
if library is None:
    build_library()
    library = find_library()
assert library is not None, "extension library not found after build"

staging = Path(tempfile.mkdtemp(prefix="polydiam_py_"))
suffix = ".pyd" if library.suffix == ".dll" else ".so"
shutil.copy2(library, staging / f"polydiam_py{suffix}")
sys.path.insert(0, str(staging))

import polydiam_py as pd  # noqa: E402


def check(label, condition):
    status = "ok" if condition else "FAIL"
    print(f"  {status:4} {label}")
    if not condition:
        sys.exit(1)


print(f"loaded {library}")

square = pd.hypercube(2)
check("hypercube(2) shape", (square.m, square.n) == (4, 2))
check("hypercube(2) vertices", len(square.vertices()) == 4)

diameter, witness = square.diameter()
check("square diameter", diameter == 2 and len(witness) == 2)
check("square bfs layer sizes", [len(l) for l in square.bfs_layers(0)] == [1, 3, 4])

delta, det_star = square.condition_numbers()
check("square condition numbers", delta == 1.0 and det_star == 1.0)

j_paper, bound_paper, j_std, bound_std = pd.theorem_bound(2, 1.0, 1.0)
check("theorem bound (square)", (j_paper, bound_paper) == (17, 34))
check("theorem bound (cube)", pd.theorem_bound(3, 1.0, 1.0)[0] == 62)

volumes = square.cone_volumes(samples=100000, seed=0)
quarter = math.pi / 4.0
check(
    "square cone volumes are quarter disks",
    all(abs(vol - quarter) <= 3.0 * err for vol, err in volumes),
)

report = json.loads(pd.analyze(square, samples=100000, seed=0))
check("analyze diameter", report["exact_diameter"] == 2)
check("analyze ceiling", report["j_max_paper"] == 17)
check("analyze inequalities", report["lemma_failures"] == 0)
check(
    "analyze is seed-deterministic",
    pd.analyze(square, samples=100000, seed=0) == pd.analyze(square, samples=100000, seed=0),
)

roundtrip = pd.Polytope.parse(square.to_hrep())
check("hrep round trip", roundtrip.rows() == square.rows())

hexagon = pd.regular_polygon(6)
check("hexagon diameter", hexagon.diameter()[0] == 3)

tangent_a = pd.random_tangent(10, 3, seed=7)
tangent_b = pd.random_tangent(10, 3, seed=7)
check("random tangent determinism", tangent_a.rows() == tangent_b.rows())

try:
    pd.cross_polytope(3).vertices()
    check("octahedron degeneracy detected", False)
except ValueError as err:
    check("octahedron degeneracy detected", "degenerate" in str(err))

try:
    pd.Polytope.parse("2 2\n1 0 1\n0 1 1\n")
    check("dimension validation", False)
except ValueError as err:
    check("dimension validation", "dimension" in str(err))

print("smoke test passed")
