"""Per-segment feature size functions and a brute-force local feature size.

Along segment ``i`` parameterized by arc length ``x`` in ``[0, l]``, the
feature size ``F(x)`` is the lower envelope of distances to every feature
not adjacent to the segment, capped by the distance to the farther endpoint.
Each envelope piece is either ``Linear`` (``F = b - a*x``) or
``SqrtQuadratic`` (``F = sqrt(x^2 + 2*a*x + b)``).
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .pslg import Pslg


class DegenerateInputError(ValueError):
    """Feature size vanishes somewhere on a segment."""


# -- distance functions -------------------------------------------------------

@dataclass(frozen=True)
class PointDistance:
    """``sqrt((x - a)^2 + b^2)`` on ``[lo, hi]``."""
    a: float
    b: float
    lo: float
    hi: float

    @property
    def domain(self):
        return (self.lo, self.hi)

    def __call__(self, x):
        return np.hypot(np.asarray(x, dtype=float) - self.a, self.b)

    def forms(self):
        return [(self.lo, self.hi, SqrtQuadratic.from_point(self.a, self.b))]


@dataclass(frozen=True)
class LineDistance:
    """``c0 + c1*x`` on the perpendicular band ``[lo, hi]``."""
    c0: float
    c1: float
    lo: float
    hi: float

    @property
    def domain(self):
        return (self.lo, self.hi)

    def __call__(self, x):
        return self.c0 + self.c1 * np.asarray(x, dtype=float)

    def forms(self):
        return [(self.lo, self.hi, Linear(self.c0, -self.c1))]


@dataclass(frozen=True)
class FarthestEndpoint:
    """``max(l - x, x)`` on ``[0, l]``."""
    l: float

    @property
    def domain(self):
        return (0.0, self.l)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.maximum(self.l - x, x)

    def forms(self):
        h = 0.5 * self.l
        return [(0.0, h, Linear(self.l, 1.0)), (h, self.l, Linear(0.0, -1.0))]


DistanceFunction = Union[PointDistance, LineDistance, FarthestEndpoint]


# -- envelope piece forms -----------------------------------------------------

@dataclass(frozen=True)
class Linear:
    """``F(x) = b - a*x``."""
    b: float
    a: float

    def __call__(self, x):
        return self.b - self.a * x

    def deriv(self, x):
        return -self.a + 0.0 * x


@dataclass(frozen=True)
class SqrtQuadratic:
    """``F(x) = sqrt(x^2 + 2*a*x + b)`` stored with ``d = sqrt(b - a^2)``."""
    a: float
    b: float
    d: float

    @classmethod
    def from_point(cls, x0: float, h: float) -> "SqrtQuadratic":
        h = abs(h)
        return cls(-x0, x0 * x0 + h * h, h)

    def __call__(self, x):
        return np.hypot(x + self.a, self.d)

    def deriv(self, x):
        return (x + self.a) / self(x)


Form = Union[Linear, SqrtQuadratic]


@dataclass(frozen=True)
class FeatureSizeFunction:
    breaks: tuple          # x_0 = 0 < x_1 < ... < x_k = l
    forms: tuple           # k forms, one per interval
    segment_length: float

    @property
    def pieces(self):
        return [((self.breaks[j], self.breaks[j + 1]), f) for j, f in enumerate(self.forms)]

    def piece_index(self, x: float) -> int:
        j = bisect.bisect_right(self.breaks, x) - 1
        return min(max(j, 0), len(self.forms) - 1)

    def __call__(self, x):
        return lfs_eval(self, x)


# -- construction ---------------------------------------------------------

def _band(P0, u, c, d, l):
    """Sub-interval of ``[0, l]`` whose perpendicular feet land on segment cd."""
    w = d - c
    L = math.hypot(w[0], w[1])
    w = w / L
    s0 = float(np.dot(P0 - c, w)) / L
    s1 = float(np.dot(u, w)) / L
    if s1 == 0.0:
        return (0.0, l) if 0.0 <= s0 <= 1.0 else None, s0, s1
    xa, xb = -s0 / s1, (1.0 - s0) / s1
    lo, hi = max(0.0, min(xa, xb)), min(l, max(xa, xb))
    if hi <= lo:
        return None, s0, s1
    return (lo, hi), s0, s1


def distance_functions_for(pslg: Pslg, i: int) -> list[DistanceFunction]:
    V = pslg.vertices
    ia, ib = (int(v) for v in pslg.segments[i])
    P0, P1 = V[ia], V[ib]
    l = math.hypot(*(P1 - P0))
    u = (P1 - P0) / l
    nrm = np.array([-u[1], u[0]])
    out: list[DistanceFunction] = []
    for v in range(pslg.n_vertices):
        if v in (ia, ib):
            continue
        r = V[v] - P0
        out.append(PointDistance(float(r @ u), float(abs(r @ nrm)), 0.0, l))
    for k, (c, d) in enumerate(pslg.segments):
        if k == i or {int(c), int(d)} & {ia, ib}:
            continue
        C, D = V[c], V[d]
        band, s0, s1 = _band(P0, u, C, D, l)
        if band is not None:
            lo, hi = band
            # signed distance to the line through cd, sign taken inside the band
            w = (D - C) / math.hypot(*(D - C))
            n = np.array([-w[1], w[0]])
            c0 = float((P0 - C) @ n)
            c1 = float(u @ n)
            mid = 0.5 * (lo + hi)
            if c0 + c1 * mid < 0:
                c0, c1 = -c0, -c1
            out.append(LineDistance(c0, c1, lo, hi))
        # outside the band the nearest point of cd is an endpoint
        for ext_lo, ext_hi in _complement(band, l):
            xm = 0.5 * (ext_lo + ext_hi)
            s = s0 + s1 * xm
            E = C if s < 0.0 else D
            r = E - P0
            out.append(PointDistance(float(r @ u), float(abs(r @ nrm)), ext_lo, ext_hi))
    out.append(FarthestEndpoint(l))
    return out


def _complement(band, l):
    if band is None:
        return [(0.0, l)]
    lo, hi = band
    out = []
    if lo > 0.0:
        out.append((0.0, lo))
    if hi < l:
        out.append((hi, l))
    return out


def _pair_roots(f: Form, g: Form) -> list[float]:
    if isinstance(f, Linear) and isinstance(g, Linear):
        da = f.a - g.a
        return [] if da == 0.0 else [(f.b - g.b) / da]
    if isinstance(f, SqrtQuadratic) and isinstance(g, SqrtQuadratic):
        da = f.a - g.a
        return [] if da == 0.0 else [(g.b - f.b) / (2.0 * da)]
    if isinstance(f, SqrtQuadratic):
        f, g = g, f
    # (b - a x)^2 = x^2 + 2 A x + B
    a, b, A, B = f.a, f.b, g.a, g.b
    qa = a * a - 1.0
    qb = -2.0 * (a * b + A)
    qc = b * b - B
    if abs(qa) < 1e-14:
        return [] if qb == 0.0 else [-qc / qb]
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    q = -0.5 * (qb + math.copysign(sq, qb))
    roots = [q / qa]
    if q != 0.0:
        roots.append(qc / q)
    return roots


def _polish(f: Form, g: Form, x: float, lo: float, hi: float) -> float:
    """Bisect ``f - g`` in a small bracket around ``x`` down to 1e-12."""
    w = 1e-7 * max(1.0, hi - lo)
    a, b = max(lo, x - w), min(hi, x + w)
    fa = float(f(a) - g(a))
    fb = float(f(b) - g(b))
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        return x
    while b - a > 1e-12:
        m = 0.5 * (a + b)
        fm = float(f(m) - g(m))
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def lower_envelope(funcs: Sequence[DistanceFunction], l: float) -> FeatureSizeFunction:
    if not funcs:
        raise ValueError("at least one distance function required")
    l = float(l)
    items = [p for fn in funcs for p in fn.forms() if p[1] > p[0]]
    cands = {0.0, l}
    for lo, hi, _ in items:
        cands.add(min(max(lo, 0.0), l))
        cands.add(min(max(hi, 0.0), l))
    for i in range(len(items)):
        lo1, hi1, f = items[i]
        for j in range(i + 1, len(items)):
            lo2, hi2, g = items[j]
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if hi <= lo or f == g:
                continue
            for r in _pair_roots(f, g):
                if lo < r < hi:
                    cands.add(_polish(f, g, r, lo, hi))
    xs = sorted(cands)
    # drop slivers created by near-duplicate roots
    pts = [xs[0]]
    for x in xs[1:]:
        if x - pts[-1] > 1e-13 * max(1.0, l):
            pts.append(x)
    pts[-1] = l
    if len(pts) < 2:
        pts = [0.0, l]

    breaks = [0.0]
    forms: list[Form] = []
    for x0, x1 in zip(pts[:-1], pts[1:]):
        xm = 0.5 * (x0 + x1)
        best, bv = None, math.inf
        for lo, hi, f in items:
            if lo <= xm <= hi:
                v = float(f(xm))
                if v < bv:
                    best, bv = f, v
        if forms and forms[-1] == best:
            breaks[-1] = x1
        else:
            forms.append(best)
            breaks.append(x1)
    fsf = FeatureSizeFunction(tuple(breaks), tuple(forms), float(l))
    _check_positive(fsf)
    return fsf


def _check_positive(fsf: FeatureSizeFunction):
    for (x0, x1), f in fsf.pieces:
        if isinstance(f, Linear):
            m = min(f(x0), f(x1))
        else:
            xc = min(max(-f.a, x0), x1)
            m = float(f(xc))
        if not m > 0.0:
            raise DegenerateInputError("feature size vanishes on a segment")


def feature_size(pslg: Pslg, i: int) -> FeatureSizeFunction:
    return lower_envelope(distance_functions_for(pslg, i), pslg.segment_length(i))


def all_feature_sizes(pslg: Pslg, threads: int = 1) -> list[FeatureSizeFunction]:
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(lambda i: feature_size(pslg, i), range(pslg.n_segments)))
    return [feature_size(pslg, i) for i in range(pslg.n_segments)]


def lfs_eval(fsf: FeatureSizeFunction, x):
    """Envelope value at ``x`` (scalar or array) in ``[0, l]``."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > fsf.segment_length) or np.any(np.isnan(xa)):
        raise ValueError(f"x outside [0, {fsf.segment_length}]")
    if xa.ndim == 0:
        return float(fsf.forms[fsf.piece_index(float(xa))](float(xa)))
    idx = np.clip(np.searchsorted(fsf.breaks, xa, side="right") - 1, 0, len(fsf.forms) - 1)
    out = np.empty_like(xa)
    for j, f in enumerate(fsf.forms):
        m = idx == j
        if m.any():
            out[m] = f(xa[m])
    return out


# -- brute-force oracle ----------------------------------------------------

def _seg_dist(p, A, B):
    """Distances from ``p`` to each segment ``A[k]B[k]``."""
    d = B - A
    L2 = np.einsum("ij,ij->i", d, d)
    t = np.clip(np.einsum("ij,ij->i", p - A, d) / L2, 0.0, 1.0)
    q = A + t[:, None] * d
    return np.hypot(p[0] - q[:, 0], p[1] - q[:, 1])


def _segment_adjacency(pslg: Pslg) -> np.ndarray:
    S = pslg.segments
    adj = ((S[:, 0, None] == S[None, :, 0]) | (S[:, 0, None] == S[None, :, 1])
           | (S[:, 1, None] == S[None, :, 0]) | (S[:, 1, None] == S[None, :, 1]))
    return adj


def lfs_oracle(pslg: Pslg, p, segment: int | None = None) -> float:
    """Brute-force local feature size at ``p``.

    Without ``segment``: min over nonadjacent feature pairs of the larger
    distance. With ``segment=s`` (``p`` on segment ``s``): distance to the
    nearest feature nonadjacent to ``s``, capped by the farther endpoint.
    """
    p = np.asarray(p, dtype=float)
    V, S = pslg.vertices, pslg.segments
    dv = np.hypot(V[:, 0] - p[0], V[:, 1] - p[1])
    ds = _seg_dist(p, V[S[:, 0]], V[S[:, 1]])
    if segment is not None:
        a, b = (int(v) for v in S[segment])
        vm = np.ones(len(V), dtype=bool)
        vm[[a, b]] = False
        sm = ~_segment_adjacency(pslg)[segment]
        best = max(dv[a], dv[b])
        if vm.any():
            best = min(best, dv[vm].min())
        if sm.any():
            best = min(best, ds[sm].min())
        return float(best)
    best = math.inf
    if len(V) >= 2:
        best = float(np.partition(dv, 1)[1])
    for k, (a, b) in enumerate(S):
        m = np.ones(len(V), dtype=bool)
        m[[a, b]] = False
        if m.any():
            best = min(best, max(ds[k], float(dv[m].min())))
    adj = _segment_adjacency(pslg)
    mx = np.maximum(ds[:, None], ds[None, :])
    mx[adj] = np.inf
    if mx.size:
        best = min(best, float(mx.min()))
    return best


def sample_csv(fsf: FeatureSizeFunction, n: int = 201) -> str:
    xs = np.linspace(0.0, fsf.segment_length, n)
    xs[-1] = fsf.segment_length
    fx = lfs_eval(fsf, xs)
    return "x,F(x)\n" + "".join(f"{x!r},{v!r}\n" for x, v in zip(xs.tolist(), fx.tolist()))
