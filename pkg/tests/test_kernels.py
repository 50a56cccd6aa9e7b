"""The numba and numpy backends must agree, and both must agree with the scalar predicates."""
import contextlib

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frontmesh import _kernels
from frontmesh.cdt import triangulate
from frontmesh.geometry import in_diametral_circle, incircle, segments_intersect, triangle_angles

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


@contextlib.contextmanager
def use(name):
    old = _kernels.backend()
    _kernels.set_backend(name)
    try:
        yield
    finally:
        _kernels.set_backend(old)


def both(fn, *args):
    with use("numpy"):
        a = fn(*args)
    with use("numba"):
        b = fn(*args)
    return a, b


def _mesh(seed, n=60, grid=False):
    rng = np.random.default_rng(seed)
    if grid:
        pts = np.unique(rng.integers(0, 5, size=(n, 2)).astype(float), axis=0)
    else:
        pts = rng.uniform(size=(n, 2))
    m = triangulate(pts)
    tris = m.triangles()
    # perturb connectivity so there are real violations to find
    return np.asarray(m.px), np.asarray(m.py), np.roll(tris, 1, axis=0) if seed % 2 else tris, rng


def _resolved(px, py, tris, scan):
    out = set()
    for t, v, c in zip(*map(np.ndarray.tolist, scan)):
        a, b, cc = tris[t]
        if c == 1 or incircle((px[a], py[a]), (px[b], py[b]), (px[cc], py[cc]), (px[v], py[v])) > 0:
            out.add((t, v))
    return out


def _brute(px, py, tris):
    out = set()
    for t, (a, b, c) in enumerate(tris):
        for v in range(len(px)):
            if v in (a, b, c):
                continue
            if incircle((px[a], py[a]), (px[b], py[b]), (px[c], py[c]), (px[v], py[v])) > 0:
                out.add((t, v))
    return out


@given(st.integers(0, 2**32 - 1), st.booleans())
def test_incircle_scan_agrees(seed, grid):
    px, py, tris, rng = _mesh(seed, grid=grid)
    # scramble some triangles into non-Delaunay ones (kept counterclockwise)
    k = min(5, len(tris))
    pick = rng.choice(len(px), size=(k, 3))
    from frontmesh.geometry import orient2d
    extra = [t for t in pick.tolist() if len(set(t)) == 3 and orient2d(*[(px[i], py[i]) for i in t]) > 0]
    tris = np.array(tris.tolist() + extra, dtype=np.int64)
    a, b = both(_kernels.incircle_scan, px, py, tris)
    ra, rb = _resolved(px, py, tris, a), _resolved(px, py, tris, b)
    assert ra == rb == _brute(px, py, tris)


@given(st.integers(0, 2**32 - 1))
def test_lfs_pairs_agree(seed):
    rng = np.random.default_rng(seed)
    V = rng.uniform(size=(12, 2))
    S = np.array([(i, (i + 1) % 6) for i in range(6)] + [(6 + i, 6 + (i + 1) % 6) for i in range(6)])
    P = rng.uniform(-0.5, 1.5, size=(50, 2))
    a, b = both(_kernels.lfs_pairs, P, V, S)
    assert np.allclose(a, b, rtol=1e-14, atol=0)


@given(st.integers(0, 2**32 - 1), st.booleans())
def test_crossings_agree(seed, grid):
    rng = np.random.default_rng(seed)
    pts = rng.integers(0, 4, size=(42, 2)).astype(float) if grid else rng.uniform(size=(42, 2))
    p, q, A, B = pts[0], pts[1], pts[2:22], pts[22:]
    a, b = both(_kernels.segment_crossings, p, q, A, B)
    assert np.array_equal(a, b)
    for k, c in enumerate(a):
        if c != 2:
            assert bool(c) == (segments_intersect(p, q, A[k], B[k])
                               and not any(np.array_equal(x, y) for x in (p, q) for y in (A[k], B[k])))


@given(st.integers(0, 2**32 - 1), st.booleans())
def test_diametral_agree(seed, grid):
    rng = np.random.default_rng(seed)
    pts = rng.integers(0, 4, size=(41, 2)).astype(float) if grid else rng.uniform(size=(41, 2))
    p, A, B = pts[0], pts[1:21], pts[21:]
    a, b = both(_kernels.diametral_hits, p, A, B)
    assert np.array_equal(a, b)
    for k, c in enumerate(a):
        if c != 2:
            assert bool(c) == in_diametral_circle(A[k], B[k], p)


@given(st.integers(0, 2**32 - 1))
def test_angles_agree(seed):
    px, py, tris, _ = _mesh(seed)
    a, b = both(_kernels.triangle_angles, px, py, tris)
    assert np.allclose(a, b, rtol=1e-15, atol=1e-15)
    for row, (i, j, k) in zip(a, tris):
        assert row == pytest.approx(triangle_angles((px[i], py[i]), (px[j], py[j]), (px[k], py[k])), rel=1e-14)


def test_backend_switch():
    with pytest.raises(ValueError):
        _kernels.set_backend("cuda")
    with use("numpy"):
        assert _kernels.backend() == "numpy"


def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path
    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--sizes", "60", "--repeat", "1"])
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 6
    assert all(not line.endswith("NO") for line in out)
