"""Time the verification kernels under both backends.

    python benchmarks/bench_kernels.py [--repeat 5] [--sizes 1000 10000]

Inputs are Delaunay meshes of uniform random points (built with frontmesh's own
CDT) so the incircle and angle scans see realistic triangle shapes. Each kernel
runs once per backend before timing, which keeps numba compile time out of the
numbers, and the two backends' outputs are checked for agreement.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from frontmesh import _kernels as K
from frontmesh.cdt import triangulate


def make_case(n: int, rng):
    pts = rng.random((n, 2))
    mesh = triangulate(pts)
    tris = mesh.triangles()
    C = mesh.coords()
    px, py = C[:, 0].copy(), C[:, 1].copy()
    # a few hundred short segments stand in for the subsegment set
    m = min(256, n // 2)
    A = rng.random((m, 2))
    B = A + 0.05 * (rng.random((m, 2)) - 0.5)
    V = np.vstack([A, B])
    S = np.column_stack([np.arange(m), np.arange(m) + m])
    probes = rng.random((min(n, 2000), 2))
    return {
        "incircle_scan": (px, py, tris),
        "triangle_angles": (px, py, tris),
        "lfs_pairs": (probes, V, S),
        "segment_crossings": (np.array([0.1, 0.2]), np.array([0.9, 0.7]), A, B),
        "diametral_hits": (np.array([0.5, 0.5]), A, B),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        # scan results may come back in a different order
        ka = sorted(zip(*(x.tolist() for x in a)))
        kb = sorted(zip(*(x.tolist() for x in b)))
        return ka == kb
    return np.allclose(a, b, rtol=1e-12, atol=0.0)


def bench(sizes, repeat: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    backends = ["numpy"] + (["numba"] if K.HAVE_NUMBA else [])
    rows = []
    for n in sizes:
        case = make_case(n, rng)
        for name, args in case.items():
            fn = getattr(K, name)
            timings, outputs = {}, {}
            for b in backends:
                K.set_backend(b)
                outputs[b] = fn(*args)  # warm-up / compile
                timer = timeit.Timer(lambda: fn(*args))
                loops, _ = timer.autorange()
                timings[b] = min(timer.repeat(repeat, loops)) / loops
            agree = len(backends) < 2 or _same(outputs["numpy"], outputs["numba"])
            rows.append((n, name, timings, agree))
    return backends, rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    original = K.backend()
    try:
        backends, rows = bench(args.sizes, args.repeat, args.seed)
    finally:
        K.set_backend(original)

    head = f"{'n':>8} {'kernel':<18}" + "".join(f"{b + ' ms':>12}" for b in backends)
    if len(backends) == 2:
        head += f"{'speedup':>9} agree"
    print(head)
    for n, name, t, agree in rows:
        line = f"{n:>8} {name:<18}" + "".join(f"{1e3 * t[b]:>12.3f}" for b in backends)
        if len(backends) == 2:
            line += f"{t['numpy'] / t['numba']:>8.1f}x {'yes' if agree else 'NO'}"
        print(line)


if __name__ == "__main__":
    main()
