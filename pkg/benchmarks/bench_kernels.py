"""Compare the compiled slicing kernels against the NumPy fallback.

Builds a subdivided icosphere, runs each kernel under both backends,
checks the outputs are bit-identical, and prints timings.

    python3 benchmarks/bench_kernels.py --subdivisions 6 --repeats 20
"""
from __future__ import annotations

import argparse
import importlib
import sys
import time

import numpy as np


def build_icosphere(subdivisions: int, radius: float) -> tuple[np.ndarray, np.ndarray]:
    phi = (1.0 + 5.0 ** 0.5) / 2.0
    raw = np.array([
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ], dtype=np.float64)
    verts = [tuple(v / np.linalg.norm(v)) for v in raw]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    cache: dict[tuple[int, int], int] = {}

    def midpoint(i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        if key not in cache:
            m = np.array(verts[i]) + np.array(verts[j])
            verts.append(tuple(m / np.linalg.norm(m)))
            cache[key] = len(verts) - 1
        return cache[key]

    for _ in range(subdivisions):
        nxt = []
        for i, j, k in faces:
            a, b, c = midpoint(i, j), midpoint(j, k), midpoint(k, i)
            nxt += [(i, a, c), (a, j, b), (b, k, c), (a, b, c)]
        faces = nxt
    return np.array(verts) * radius, np.array(faces, dtype=np.int32)


def best_of(repeats: int, fn, *args):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--subdivisions", type=int, default=6,
                    help="icosphere subdivision level (default 6, ~82k triangles)")
    ap.add_argument("--repeats", type=int, default=20,
                    help="timing repeats, best-of is reported (default 20)")
    args = ap.parse_args(argv)

    try:
        cy = importlib.import_module("sliceroom.kernels._slicing_cy")
    except ImportError:
        print("compiled kernels not built; run pip install -e . first", file=sys.stderr)
        return 1
    npk = importlib.import_module("sliceroom.kernels._slicing_np")

    vertices, triangles = build_icosphere(args.subdivisions, 40.0)
    a, b, c = 0.27, 0.53, 0.80  # arbitrary unit-ish normal, normalized below
    n = (a * a + b * b + c * c) ** 0.5
    a, b, c, d = a / n, b / n, c / n, 7.5
    print(f"mesh: {len(vertices)} vertices, {len(triangles)} triangles")
    print(f"{'kernel':<24}{'numpy':>12}{'cython':>12}{'speedup':>10}")

    cases = [
        ("signed_distances", (vertices, a, b, c, d)),
        ("classify_centroid", (vertices, triangles, a, b, c, d)),
        ("classify_any_vertex", (vertices, triangles, a, b, c, d)),
        ("triangle_cross_products", (vertices, triangles)),
    ]
    for name, call_args in cases:
        t_np, out_np = best_of(args.repeats, getattr(npk, name), *call_args)
        t_cy, out_cy = best_of(args.repeats, getattr(cy, name), *call_args)
        if not np.array_equal(out_np, out_cy):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        print(f"{name:<24}{t_np * 1e3:>10.3f}ms{t_cy * 1e3:>10.3f}ms"
              f"{t_np / t_cy:>9.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
