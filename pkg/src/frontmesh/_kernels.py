"""Hot loops of the verification passes, in two interchangeable backends.

``numba`` compiles explicit loops with ``@njit``; ``numpy`` vectorizes the
same arithmetic. Set ``FRONTMESH_NUMBA=0`` (or call :func:`set_backend`) to
force the numpy path. Predicate kernels use the same float error bounds as
:mod:`frontmesh.geometry` and report code 2 for "too close to call"; callers
settle those cases with the exact predicates.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

from .geometry import CCW_ERRBOUND, DOT_ERRBOUND, ICC_ERRBOUND

_backend = "numba" if HAVE_NUMBA and os.environ.get("FRONTMESH_NUMBA", "1") != "0" else "numpy"


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


def optional_njit(*args, **kwargs):
    def deco(fn):
        return njit(*args, **kwargs)(fn) if HAVE_NUMBA else fn
    return deco


# ---------------------------------------------------------------- incircle scan

def _circ_np(px, py, tris):
    ax, ay = px[tris[:, 0]], py[tris[:, 0]]
    bx, by = px[tris[:, 1]] - ax, py[tris[:, 1]] - ay
    cx, cy = px[tris[:, 2]] - ax, py[tris[:, 2]] - ay
    d = 2.0 * (bx * cy - by * cx)
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    with np.errstate(divide="ignore", invalid="ignore"):
        ux = (cy * b2 - by * c2) / d
        uy = (bx * c2 - cx * b2) / d
    r = np.hypot(ux, uy)
    ox, oy = ax + ux, ay + uy
    bad = ~np.isfinite(r) | ~np.isfinite(ox) | ~np.isfinite(oy)
    pad = 1e-7 * (r + np.abs(ox) + np.abs(oy) + 1.0)
    r = np.where(bad, np.inf, r + pad)
    return np.where(bad, 0.0, ox), np.where(bad, 0.0, oy), r


def _incircle_codes_np(ax, ay, bx, by, cx, cy, dx, dy):
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    al = adx * adx + ady * ady
    bl = bdx * bdx + bdy * bdy
    cl = cdx * cdx + cdy * cdy
    det = al * (bdxcdy - cdxbdy) + bl * (cdxady - adxcdy) + cl * (adxbdy - bdxady)
    perm = ((np.abs(bdxcdy) + np.abs(cdxbdy)) * al + (np.abs(cdxady) + np.abs(adxcdy)) * bl
            + (np.abs(adxbdy) + np.abs(bdxady)) * cl)
    bound = ICC_ERRBOUND * perm
    return np.where(det > bound, 1, np.where(-det > bound, 0, 2)).astype(np.int8)


def _incircle_scan_np(px, py, tris):
    order = np.argsort(px, kind="stable")
    xs = px[order]
    ox, oy, r = _circ_np(px, py, tris)
    lo = np.where(np.isinf(r), 0, np.searchsorted(xs, ox - r, side="left"))
    hi = np.where(np.isinf(r), len(xs), np.searchsorted(xs, ox + r, side="right"))
    cnt = hi - lo
    tri_idx = np.repeat(np.arange(len(tris)), cnt)
    offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    v = order[np.repeat(lo, cnt) + offs]
    # y-range filter before the predicate
    keep = np.abs(py[v] - oy[tri_idx]) <= r[tri_idx]
    t = tris[tri_idx]
    keep &= (v != t[:, 0]) & (v != t[:, 1]) & (v != t[:, 2])
    tri_idx, v, t = tri_idx[keep], v[keep], t[keep]
    code = _incircle_codes_np(px[t[:, 0]], py[t[:, 0]], px[t[:, 1]], py[t[:, 1]],
                              px[t[:, 2]], py[t[:, 2]], px[v], py[v])
    m = code != 0
    return tri_idx[m].astype(np.int64), v[m].astype(np.int64), code[m]


@optional_njit(cache=True)
def _incircle_scan_nb(px, py, tris, order, xs):
    nt = tris.shape[0]
    n = xs.shape[0]
    cap = 64
    out_t = np.empty(cap, np.int64)
    out_v = np.empty(cap, np.int64)
    out_c = np.empty(cap, np.int8)
    m = 0
    for t in range(nt):
        i, j, k = tris[t, 0], tris[t, 1], tris[t, 2]
        ax, ay = px[i], py[i]
        bx, by = px[j] - ax, py[j] - ay
        cx, cy = px[k] - ax, py[k] - ay
        d = 2.0 * (bx * cy - by * cx)
        lo, hi = 0, n
        ox, oy, r = 0.0, 0.0, np.inf
        if d != 0.0:
            b2 = bx * bx + by * by
            c2 = cx * cx + cy * cy
            ux = (cy * b2 - by * c2) / d
            uy = (bx * c2 - cx * b2) / d
            r0 = np.sqrt(ux * ux + uy * uy)
            ox, oy = ax + ux, ay + uy
            if np.isfinite(r0) and np.isfinite(ox) and np.isfinite(oy):
                r = r0 + 1e-7 * (r0 + abs(ox) + abs(oy) + 1.0)
                lo = np.searchsorted(xs, ox - r)
                hi = np.searchsorted(xs, ox + r, side="right")
            else:
                ox, oy = 0.0, 0.0
        for s in range(lo, hi):
            v = order[s]
            if v == i or v == j or v == k:
                continue
            if np.isfinite(r) and abs(py[v] - oy) > r:
                continue
            dx, dy = px[v], py[v]
            adx, ady = px[i] - dx, py[i] - dy
            bdx, bdy = px[j] - dx, py[j] - dy
            cdx, cdy = px[k] - dx, py[k] - dy
            bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
            cdxady, adxcdy = cdx * ady, adx * cdy
            adxbdy, bdxady = adx * bdy, bdx * ady
            al = adx * adx + ady * ady
            bl = bdx * bdx + bdy * bdy
            cl = cdx * cdx + cdy * cdy
            det = al * (bdxcdy - cdxbdy) + bl * (cdxady - adxcdy) + cl * (adxbdy - bdxady)
            perm = ((abs(bdxcdy) + abs(cdxbdy)) * al + (abs(cdxady) + abs(adxcdy)) * bl
                    + (abs(adxbdy) + abs(bdxady)) * cl)
            bound = ICC_ERRBOUND * perm
            c = 0
            if det > bound:
                c = 1
            elif not (-det > bound):
                c = 2
            if c == 0:
                continue
            if m == cap:
                cap *= 2
                nt_ = np.empty(cap, np.int64)
                nv_ = np.empty(cap, np.int64)
                nc_ = np.empty(cap, np.int8)
                nt_[:m] = out_t[:m]
                nv_[:m] = out_v[:m]
                nc_[:m] = out_c[:m]
                out_t, out_v, out_c = nt_, nv_, nc_
            out_t[m] = t
            out_v[m] = v
            out_c[m] = c
            m += 1
    return out_t[:m], out_v[:m], out_c[:m]


def incircle_scan(px, py, tris):
    """Triangle/vertex pairs that may violate the empty-circle property.

    Returns ``(tri, vertex, code)`` with code 1 = certainly strictly inside,
    2 = undecided by the float filter.
    """
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    tris = np.ascontiguousarray(tris, dtype=np.int64).reshape(-1, 3)
    if _backend == "numba":
        order = np.argsort(px, kind="stable")
        return _incircle_scan_nb(px, py, tris, order, px[order])
    return _incircle_scan_np(px, py, tris)


# ----------------------------------------------------------- pairwise LFS

def _seg_dist_np(P, A, B):
    d = B - A
    L2 = np.einsum("ij,ij->i", d, d)
    w = P[:, None, :] - A[None, :, :]
    t = np.clip(np.einsum("psj,sj->ps", w, d) / L2, 0.0, 1.0)
    q = A[None, :, :] + t[:, :, None] * d[None, :, :]
    return np.hypot(P[:, None, 0] - q[..., 0], P[:, None, 1] - q[..., 1])


def _lfs_pairs_np(P, V, S):
    A, B = V[S[:, 0]], V[S[:, 1]]
    dv = np.hypot(P[:, None, 0] - V[None, :, 0], P[:, None, 1] - V[None, :, 1])
    ds = _seg_dist_np(P, A, B)
    best = np.full(len(P), np.inf)
    if V.shape[0] >= 2:
        best = np.partition(dv, 1, axis=1)[:, 1]
    for k in range(len(S)):
        m = np.ones(len(V), dtype=bool)
        m[S[k]] = False
        if m.any():
            best = np.minimum(best, np.maximum(ds[:, k], dv[:, m].min(axis=1)))
    adj = ((S[:, 0, None] == S[None, :, 0]) | (S[:, 0, None] == S[None, :, 1])
           | (S[:, 1, None] == S[None, :, 0]) | (S[:, 1, None] == S[None, :, 1]))
    ii, jj = np.nonzero(np.triu(~adj, 1))
    if len(ii):
        best = np.minimum(best, np.maximum(ds[:, ii], ds[:, jj]).min(axis=1))
    return best


@optional_njit(cache=True)
def _lfs_pairs_nb(P, V, S):
    np_, nv, ns = P.shape[0], V.shape[0], S.shape[0]
    out = np.empty(np_)
    dv = np.empty(nv)
    ds = np.empty(ns)
    for p in range(np_):
        x, y = P[p, 0], P[p, 1]
        for v in range(nv):
            dv[v] = np.hypot(x - V[v, 0], y - V[v, 1])
        for k in range(ns):
            ax, ay = V[S[k, 0], 0], V[S[k, 0], 1]
            dx, dy = V[S[k, 1], 0] - ax, V[S[k, 1], 1] - ay
            t = ((x - ax) * dx + (y - ay) * dy) / (dx * dx + dy * dy)
            t = min(max(t, 0.0), 1.0)
            ds[k] = np.hypot(x - (ax + t * dx), y - (ay + t * dy))
        # three smallest vertex distances cover "min over vertices except two"
        i1, i2, i3 = -1, -1, -1
        for v in range(nv):
            if i1 < 0 or dv[v] < dv[i1]:
                i3, i2, i1 = i2, i1, v
            elif i2 < 0 or dv[v] < dv[i2]:
                i3, i2 = i2, v
            elif i3 < 0 or dv[v] < dv[i3]:
                i3 = v
        best = np.inf
        if i2 >= 0:
            best = dv[i2]
        for k in range(ns):
            a, b = S[k, 0], S[k, 1]
            mv = np.inf
            for c in (i1, i2, i3):
                if c >= 0 and c != a and c != b:
                    mv = dv[c]
                    break
            best = min(best, max(ds[k], mv))
        for k in range(ns):
            a, b = S[k, 0], S[k, 1]
            for m in range(k + 1, ns):
                c, d = S[m, 0], S[m, 1]
                if a == c or a == d or b == c or b == d:
                    continue
                best = min(best, max(ds[k], ds[m]))
        out[p] = best
    return out


def lfs_pairs(points, vertices, segments):
    """Pairwise local feature size at many points."""
    P = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 2)
    V = np.ascontiguousarray(vertices, dtype=np.float64).reshape(-1, 2)
    S = np.ascontiguousarray(segments, dtype=np.int64).reshape(-1, 2)
    if _backend == "numba":
        return _lfs_pairs_nb(P, V, S)
    return _lfs_pairs_np(P, V, S)


# ------------------------------------------------------ segment predicates

def _orient_codes_np(ax, ay, bx, by, cx, cy):
    l = (ax - cx) * (by - cy)
    r = (ay - cy) * (bx - cx)
    det = l - r
    bound = CCW_ERRBOUND * (np.abs(l) + np.abs(r))
    # +1 / -1 certain, 0 undecided
    return np.where(det > bound, 1, np.where(-det > bound, -1, 0)).astype(np.int8)


def _crossing_np(p, q, A, B):
    o1 = _orient_codes_np(p[0], p[1], q[0], q[1], A[:, 0], A[:, 1])
    o2 = _orient_codes_np(p[0], p[1], q[0], q[1], B[:, 0], B[:, 1])
    o3 = _orient_codes_np(A[:, 0], A[:, 1], B[:, 0], B[:, 1], p[0], p[1])
    o4 = _orient_codes_np(A[:, 0], A[:, 1], B[:, 0], B[:, 1], q[0], q[1])
    sure = (o1 != 0) & (o2 != 0) & (o3 != 0) & (o4 != 0)
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    return np.where(sure, hit.astype(np.int8), 2).astype(np.int8)


@optional_njit(cache=True)
def _orient_code(ax, ay, bx, by, cx, cy):
    l = (ax - cx) * (by - cy)
    r = (ay - cy) * (bx - cx)
    det = l - r
    bound = CCW_ERRBOUND * (abs(l) + abs(r))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return 0


@optional_njit(cache=True)
def _crossing_nb(p, q, A, B):
    n = A.shape[0]
    out = np.empty(n, np.int8)
    for k in range(n):
        o1 = _orient_code(p[0], p[1], q[0], q[1], A[k, 0], A[k, 1])
        o2 = _orient_code(p[0], p[1], q[0], q[1], B[k, 0], B[k, 1])
        o3 = _orient_code(A[k, 0], A[k, 1], B[k, 0], B[k, 1], p[0], p[1])
        o4 = _orient_code(A[k, 0], A[k, 1], B[k, 0], B[k, 1], q[0], q[1])
        if o1 == 0 or o2 == 0 or o3 == 0 or o4 == 0:
            out[k] = 2
        elif o1 * o2 < 0 and o3 * o4 < 0:
            out[k] = 1
        else:
            out[k] = 0
    return out


def segment_crossings(p, q, A, B):
    """Per segment ``A[k]B[k]``: 1 if it properly crosses ``pq``, 0 if clearly
    disjoint or only on one side, 2 if an orientation was undecided (touching
    and collinear cases land here)."""
    p = np.ascontiguousarray(p, dtype=np.float64)
    q = np.ascontiguousarray(q, dtype=np.float64)
    A = np.ascontiguousarray(A, dtype=np.float64).reshape(-1, 2)
    B = np.ascontiguousarray(B, dtype=np.float64).reshape(-1, 2)
    if _backend == "numba":
        return _crossing_nb(p, q, A, B)
    return _crossing_np(p, q, A, B)


def _diametral_np(p, A, B):
    u = (A[:, 0] - p[0]) * (B[:, 0] - p[0])
    v = (A[:, 1] - p[1]) * (B[:, 1] - p[1])
    dot = u + v
    bound = DOT_ERRBOUND * (np.abs(u) + np.abs(v))
    return np.where(dot < -bound, 1, np.where(dot > bound, 0, 2)).astype(np.int8)


@optional_njit(cache=True)
def _diametral_nb(p, A, B):
    n = A.shape[0]
    out = np.empty(n, np.int8)
    for k in range(n):
        u = (A[k, 0] - p[0]) * (B[k, 0] - p[0])
        v = (A[k, 1] - p[1]) * (B[k, 1] - p[1])
        dot = u + v
        bound = DOT_ERRBOUND * (abs(u) + abs(v))
        if dot < -bound:
            out[k] = 1
        elif dot > bound:
            out[k] = 0
        else:
            out[k] = 2
    return out


def diametral_hits(p, A, B):
    """1 where ``p`` is strictly inside the diametral circle of ``A[k]B[k]``."""
    p = np.ascontiguousarray(p, dtype=np.float64)
    A = np.ascontiguousarray(A, dtype=np.float64).reshape(-1, 2)
    B = np.ascontiguousarray(B, dtype=np.float64).reshape(-1, 2)
    if _backend == "numba":
        return _diametral_nb(p, A, B)
    return _diametral_np(p, A, B)


# ------------------------------------------------------------ angle scan

def _angles_np(px, py, tris):
    out = np.empty((len(tris), 3))
    for c in range(3):
        p, q, r = tris[:, c], tris[:, (c + 1) % 3], tris[:, (c + 2) % 3]
        ux, uy = px[q] - px[p], py[q] - py[p]
        vx, vy = px[r] - px[p], py[r] - py[p]
        out[:, c] = np.arctan2(np.abs(ux * vy - uy * vx), ux * vx + uy * vy)
    return out


@optional_njit(cache=True)
def _angles_nb(px, py, tris):
    n = tris.shape[0]
    out = np.empty((n, 3))
    for t in range(n):
        for c in range(3):
            p, q, r = tris[t, c], tris[t, (c + 1) % 3], tris[t, (c + 2) % 3]
            ux, uy = px[q] - px[p], py[q] - py[p]
            vx, vy = px[r] - px[p], py[r] - py[p]
            out[t, c] = np.arctan2(abs(ux * vy - uy * vx), ux * vx + uy * vy)
    return out


def triangle_angles(px, py, tris):
    """Interior angles, one row per triangle, matching geometry.triangle_angles."""
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    tris = np.ascontiguousarray(tris, dtype=np.int64).reshape(-1, 3)
    if _backend == "numba":
        return _angles_nb(px, py, tris)
    return _angles_np(px, py, tris)
