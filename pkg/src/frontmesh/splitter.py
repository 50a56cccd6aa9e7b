"""Mapping ODE ``M'(t) = F(M(t))`` per segment, split bounds and the split itself.

Every envelope piece has a closed-form solution. Pieces are stored in local
time ``tau = t - t_start`` so that exponentials stay in range:

* ``Linear`` F (``b - a*y``) gives ``y = b/a + c*exp(-a*tau)``, or
  ``y = b*tau + c`` when ``a`` vanishes;
* ``SqrtQuadratic`` F gives ``y = c1*exp(tau) + c2*exp(-tau) - a``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .lfs import DegenerateInputError, FeatureSizeFunction, Linear, lfs_eval
from .pslg import Pslg

log = logging.getLogger(__name__)

LN2 = math.log(2.0)
TWO_LN2 = 2.0 * LN2
_AFFINE_EPS = 1e-12


class ConfigError(ValueError):
    pass


# -- mapping pieces --------------------------------------------------------

@dataclass(frozen=True)
class Exponential:
    a: float
    b: float
    c: float
    y0: float

    def y(self, tau):
        # b/a + c e^{-a tau}, written around y(0) to avoid cancellation
        return self.y0 + self.c * np.expm1(-self.a * tau)

    def dy(self, tau):
        return -self.a * self.c * np.exp(-self.a * tau)


@dataclass(frozen=True)
class Affine:
    b: float
    c: float

    def y(self, tau):
        return self.b * tau + self.c

    def dy(self, tau):
        return self.b + 0.0 * tau


@dataclass(frozen=True)
class Hyperbolic:
    a: float
    c1: float
    c2: float
    y0: float

    def y(self, tau):
        # y(0) + c1 (e^tau - 1) + c2 (e^-tau - 1); both terms are >= 0
        return self.y0 + self.c1 * np.expm1(tau) + self.c2 * np.expm1(-tau)

    def dy(self, tau):
        return self.c1 * np.exp(tau) - self.c2 * np.exp(-tau)


@dataclass(frozen=True)
class MappingPiece:
    t_interval: tuple[float, float]
    x_interval: tuple[float, float]
    form: Exponential | Affine | Hyperbolic

    def y(self, t):
        return self.form.y(t - self.t_interval[0])

    def dy(self, t):
        return self.form.dy(t - self.t_interval[0])


@dataclass(frozen=True)
class MappingFunction:
    pieces: tuple
    t_star: float
    segment_length: float

    def _index(self, t: float) -> int:
        starts = [p.t_interval[0] for p in self.pieces]
        j = int(np.searchsorted(starts, t, side="right")) - 1
        return min(max(j, 0), len(self.pieces) - 1)

    def __call__(self, t):
        return self._apply(t, "y")

    def derivative(self, t):
        return self._apply(t, "dy")

    def _apply(self, t, what):
        ta = np.asarray(t, dtype=float)
        if np.any(ta < 0.0) or np.any(ta > self.t_star * (1 + 1e-12)):
            raise ValueError("t outside [0, t*]")
        if ta.ndim == 0:
            p = self.pieces[self._index(float(ta))]
            v = float(getattr(p, what)(float(ta)))
        else:
            starts = np.array([p.t_interval[0] for p in self.pieces])
            idx = np.clip(np.searchsorted(starts, ta, side="right") - 1, 0, len(self.pieces) - 1)
            v = np.empty_like(ta)
            for j, p in enumerate(self.pieces):
                m = idx == j
                if m.any():
                    v[m] = getattr(p, what)(ta[m])
        if what == "y":
            v = np.clip(v, 0.0, self.segment_length) if np.ndim(v) else min(max(v, 0.0), self.segment_length)
        return v


def _solve_linear(f: Linear, x0: float, x1: float):
    F0 = float(f(x0))
    F1 = float(f(x1))
    if F0 <= 0.0 or F1 <= 0.0:
        raise DegenerateInputError("feature size must be positive")
    dx = x1 - x0
    if abs(f.a) < _AFFINE_EPS:
        form = Affine(F0, x0)
        tau = dx / F0
    else:
        a = f.a
        form = Exponential(a, f.b, -F0 / a, x0)
        tau = -math.log1p(-a * dx / F0) / a
    return form, tau


def _hyper_g(u, F, D):
    """``u + F`` without cancellation."""
    return u + F if u >= 0.0 else D / (F - u)


def _solve_sqrt(f, x0: float, x1: float):
    a, D = f.a, f.d * f.d
    u0, u1 = x0 + a, x1 + a
    F0, F1 = float(f(x0)), float(f(x1))
    if F0 <= 0.0 or F1 <= 0.0:
        raise DegenerateInputError("feature size must be positive")
    # c1 = (u0 + F0)/2 and c2 = (u0 - F0)/2, each computed on its stable side
    c1 = 0.5 * _hyper_g(u0, F0, D)
    c2 = -0.5 * (D / (F0 + u0) if u0 >= 0.0 else F0 - u0)
    form = Hyperbolic(a, c1, c2, x0)
    if u0 >= 0.0:
        tau = math.log(_hyper_g(u1, F1, D) / _hyper_g(u0, F0, D))
    elif u1 <= 0.0:
        tau = math.log((F0 - u0) / (F1 - u1))
    else:
        tau = math.log(_hyper_g(u1, F1, D)) - math.log(_hyper_g(u0, F0, D))
    return form, tau


def _polish_tau(form, x0: float, x1: float, tau: float, scale: float) -> float:
    """Newton, then bisection if Newton misbehaves, on ``y(tau) = x1``."""
    if not math.isfinite(tau) or tau <= 0.0:
        tau = None
    else:
        for _ in range(4):
            r = float(form.y(tau)) - x1
            if abs(r) <= 1e-15 * scale:
                return tau
            d = float(form.dy(tau))
            nt = tau - r / d
            if not (math.isfinite(nt) and nt > 0.0):
                tau = None
                break
            tau = nt
        else:
            if abs(float(form.y(tau)) - x1) <= 1e-12 * scale:
                return tau
            tau = None
    # guarded bisection fallback
    lo, hi = 0.0, 1.0
    while float(form.y(hi)) < x1:
        hi *= 2.0
        if hi > 1e6:
            raise DegenerateInputError("mapping inversion diverged")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(form.y(mid)) < x1:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def solve_mapping(fsf: FeatureSizeFunction) -> MappingFunction:
    pieces = []
    t = 0.0
    L = fsf.segment_length
    for (x0, x1), f in fsf.pieces:
        if isinstance(f, Linear):
            form, tau = _solve_linear(f, x0, x1)
        else:
            form, tau = _solve_sqrt(f, x0, x1)
        tau = _polish_tau(form, x0, x1, tau, L)
        pieces.append(MappingPiece((t, t + tau), (x0, x1), form))
        t += tau
    return MappingFunction(tuple(pieces), t, L)


def reference_length(mapping: MappingFunction) -> float:
    return mapping.t_star


# -- bounds --------------------------------------------------------------

@dataclass(frozen=True)
class SplitBounds:
    n_star: int
    t_min: float
    A_star: float
    B_star: float
    R: float
    required: float = 0.0
    conditions_met: bool = True


def bounds_for(n_star: int, t_min: float, *, allow_nonpositive: bool = False) -> SplitBounds:
    """A* = n*/t_min - 1/(2 ln 2) - 1, B* = n*/t_min + 1, R = B*/A*."""
    A = n_star / t_min - 1.0 / TWO_LN2 - 1.0
    B = n_star / t_min + 1.0
    if A <= 0.0:
        if not allow_nonpositive:
            raise ConfigError(f"n*={n_star} too small: A* = {A:.6g} must be positive")
        return SplitBounds(n_star, t_min, A, B, math.inf)
    return SplitBounds(n_star, t_min, A, B, B / A)


def alpha_of(theta: float) -> float:
    return 1.0 / (2.0 * math.sin(theta))


def required_astar(theta_star: float, mode: str) -> float:
    if not 0.0 < theta_star < math.pi / 6:
        raise ConfigError("α must exceed 1 (theta must lie strictly between 0 and 30 degrees)")
    if mode not in ("truly", "constrained"):
        raise ConfigError(f"unknown mode {mode!r}")
    alpha = alpha_of(theta_star)
    k = alpha / (alpha - 1.0)
    c = 1.0 / LN2 + 2.0            # B* - A* upper bound
    s2 = math.sqrt(2.0)
    reqs = [1.0 / s2 + 1e-9]       # subsegments keep empty diametral circles
    if mode == "truly":
        reqs.append((c + k + 2.0) / (s2 - 1.0))
    else:
        cos_t = math.cos(theta_star)
        reqs.append((c + k + 2.0) / (2.0 * cos_t - 1.0))
        reqs.append((c + k + 1.0 + s2 * cos_t) / (2.0 * cos_t - 1.0) + 1e-9)
    return max(reqs)


def choose_nstar(t_min: float, theta_star: float, mode: str,
                 override: int | None = None) -> SplitBounds:
    """Smallest n* (>= 2) whose A* meets the requirement, or a checked override."""
    req = required_astar(theta_star, mode)
    if override is not None:
        if override < 2:
            raise ConfigError("n* must be at least 2")
        b = bounds_for(override, t_min, allow_nonpositive=True)
        ok = b.A_star >= req
        if not ok:
            log.warning("lemma conditions unsatisfied: A*=%.6g < required %.6g", b.A_star, req)
        return SplitBounds(b.n_star, b.t_min, b.A_star, b.B_star, b.R, req, ok)
    n = max(2, math.ceil((req + 1.0 / TWO_LN2 + 1.0) * t_min))
    while bounds_for(n, t_min, allow_nonpositive=True).A_star < req:
        n += 1
    while n > 2 and bounds_for(n - 1, t_min, allow_nonpositive=True).A_star >= req:
        n -= 1
    b = bounds_for(n, t_min)
    return SplitBounds(b.n_star, b.t_min, b.A_star, b.B_star, b.R, req, True)


# -- split ----------------------------------------------------------------------

@dataclass(frozen=True)
class SegmentSplit:
    n: int
    t: np.ndarray
    x: np.ndarray


@dataclass
class SplitPlan:
    segments: list
    bounds: SplitBounds


@dataclass
class RefinedPslg:
    """Split PSLG plus provenance per vertex.

    ``vertex_segment[v]`` is the input segment a split vertex lies on
    (``-1`` for input vertices); ``vertex_lfs`` caches the feature size.
    """
    pslg: Pslg
    vertex_origin: np.ndarray           # 0 input, 1 split
    vertex_segment: np.ndarray
    vertex_lfs: np.ndarray
    subsegment_parent: np.ndarray
    input_incidence: list = field(default_factory=list)

    def segments_of(self, v: int) -> frozenset:
        """Input segments vertex ``v`` lies on."""
        s = int(self.vertex_segment[v])
        if s >= 0:
            return frozenset((s,))
        return frozenset(self.input_incidence[v]) if v < len(self.input_incidence) else frozenset()


def segment_counts(bounds: SplitBounds, t_stars) -> list[int]:
    # the 1e-9 slack keeps exact multiples of t_min from flooring one short
    return [max(int(math.floor(bounds.n_star * t / bounds.t_min + 1e-9)), 2) for t in t_stars]


def split(pslg: Pslg, bounds: SplitBounds, mappings, fsfs=None) -> tuple[RefinedPslg, SplitPlan]:
    counts = segment_counts(bounds, [m.t_star for m in mappings])
    V = [tuple(v) for v in pslg.vertices]
    origin = [0] * len(V)
    vseg = [-1] * len(V)
    inc = pslg.incident_segments()
    vlfs = []
    for v in range(pslg.n_vertices):
        vals = []
        for s in inc[v]:
            end = 0.0 if pslg.segments[s][0] == v else pslg.segment_length(s)
            vals.append(lfs_eval(fsfs[s], end) if fsfs is not None else math.nan)
        vlfs.append(min(vals) if vals else math.nan)
    vmark = list(pslg.vertex_markers)
    segs, marks, parent, plan = [], [], [], []
    for i, (m, n) in enumerate(zip(mappings, counts)):
        a, b = (int(v) for v in pslg.segments[i])
        ts = np.arange(1, n) * (m.t_star / n)
        xs = np.asarray(m(ts), dtype=float) if n > 1 else np.zeros(0)
        plan.append(SegmentSplit(n, ts, xs))
        P0, P1 = pslg.vertices[a], pslg.vertices[b]
        L = pslg.segment_length(i)
        chain = [a]
        for x in xs:
            s = x / L
            V.append((P0[0] + s * (P1[0] - P0[0]), P0[1] + s * (P1[1] - P0[1])))
            origin.append(1)
            vseg.append(i)
            vlfs.append(lfs_eval(fsfs[i], min(max(x, 0.0), L)) if fsfs is not None else math.nan)
            vmark.append(int(pslg.markers[i]))
            chain.append(len(V) - 1)
        chain.append(b)
        for p, q in zip(chain[:-1], chain[1:]):
            segs.append((p, q))
            marks.append(int(pslg.markers[i]))
            parent.append(i)
    refined = Pslg(np.array(V, dtype=float), np.array(segs, dtype=np.int64),
                   np.array(marks, dtype=np.int64), pslg.holes, np.array(vmark, dtype=np.int64))
    rp = RefinedPslg(refined, np.array(origin), np.array(vseg), np.array(vlfs),
                     np.array(parent), [list(x) for x in inc])
    return rp, SplitPlan(plan, bounds)


def mapping_dump(mapping: MappingFunction, seg: SegmentSplit) -> dict:
    pieces = []
    for p in mapping.pieces:
        f = p.form
        pieces.append({"t": list(p.t_interval), "x": list(p.x_interval),
                       "form": type(f).__name__,
                       "params": {k: getattr(f, k) for k in f.__dataclass_fields__}})
    return {"t_star": mapping.t_star, "pieces": pieces, "n_i": seg.n,
            "positions": [float(x) for x in seg.x]}
