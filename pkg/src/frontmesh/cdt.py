"""Incremental Delaunay / constrained Delaunay triangulation.

Triangles live in flat lists: ``V[3t+i]`` is corner ``i`` of triangle ``t``
(counterclockwise) and ``N[3t+i]`` is the triangle across the edge opposite
that corner. The convex hull is closed off by ghost triangles ``(a, b, GHOST)``
whose exterior lies to the left of ``a -> b``, so insertion outside the hull
and on hull edges needs no special cases.
"""
from __future__ import annotations

import math
import random
from collections import deque

import numpy as np

from . import _kernels
from .geometry import in_diametral_circle, incircle, on_open_segment, orient2d, segments_intersect

GHOST = -1

ORIGIN_INPUT, ORIGIN_SPLIT, ORIGIN_STEINER = 0, 1, 2


class TriangulationError(ValueError):
    pass


class DuplicatePointError(TriangulationError):
    pass


class OutsideDomainError(TriangulationError):
    pass


class ConstraintSplitError(TriangulationError):
    pass


def _ekey(u: int, w: int) -> tuple[int, int]:
    return (u, w) if u < w else (w, u)


class Mesh:
    def __init__(self, seed: int = 0x5EED):
        self.px: list[float] = []
        self.py: list[float] = []
        self.origin: list[int] = []
        self.V: list[int] = []
        self.N: list[int] = []
        self.inside: list[bool] = []
        self.gen: list[int] = []
        self.vt: list[int] = []
        self.constrained: set[tuple[int, int]] = set()
        self.regions_ready = False
        self.last = 0
        self.rng = random.Random(seed)
        self.touched: list[int] = []
        self.skipped: set = set()

    # -- basic accessors ---------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.px)

    @property
    def n_slots(self) -> int:
        return len(self.V) // 3

    def point(self, v: int) -> tuple[float, float]:
        return (self.px[v], self.py[v])

    def tri(self, t: int) -> tuple[int, int, int]:
        b = 3 * t
        return (self.V[b], self.V[b + 1], self.V[b + 2])

    def is_ghost(self, t: int) -> bool:
        b = 3 * t
        return self.V[b] == GHOST or self.V[b + 1] == GHOST or self.V[b + 2] == GHOST

    def real_triangles(self) -> list[int]:
        return [t for t in range(self.n_slots) if not self.is_ghost(t)]

    def domain_triangles(self) -> list[int]:
        return [t for t in self.real_triangles() if self.inside[t]]

    def triangles(self) -> np.ndarray:
        """Vertex triples of the domain triangles (all real ones before classification)."""
        ts = self.domain_triangles() if self.regions_ready else self.real_triangles()
        return np.array([self.tri(t) for t in ts], dtype=np.int64).reshape(-1, 3)

    def edges(self) -> set[tuple[int, int]]:
        out = set()
        for t in self.real_triangles():
            a, b, c = self.tri(t)
            out.update((_ekey(a, b), _ekey(b, c), _ekey(c, a)))
        return out

    def coords(self) -> np.ndarray:
        return np.column_stack([self.px, self.py]) if self.px else np.zeros((0, 2))

    def add_point(self, p, origin: int = ORIGIN_INPUT) -> int:
        x, y = float(p[0]), float(p[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise TriangulationError("non-finite coordinate")
        self.px.append(x)
        self.py.append(y)
        self.origin.append(origin)
        self.vt.append(-1)
        return len(self.px) - 1

    # -- triangle slots -------------------------------------------------------
    def _alloc(self) -> int:
        self.V.extend((GHOST, GHOST, GHOST))
        self.N.extend((-1, -1, -1))
        self.inside.append(True)
        self.gen.append(0)
        return self.n_slots - 1

    def _rewrite(self, slots, tris, inside):
        """Overwrite ``slots`` with ``tris`` and relink against the old outer ring."""
        old = set(slots)
        outer = {}
        for t in slots:
            b = 3 * t
            for i in range(3):
                n = self.N[b + i]
                if n not in old:
                    u, w = self.V[b + (i + 1) % 3], self.V[b + (i + 2) % 3]
                    outer[(u, w)] = n
        while len(slots) < len(tris):
            slots = list(slots) + [self._alloc()]
        mine = {}
        for t, (a, b_, c) in zip(slots, tris):
            base = 3 * t
            self.V[base], self.V[base + 1], self.V[base + 2] = a, b_, c
            self.inside[t] = inside
            self.gen[t] += 1
            for i in range(3):
                u, w = self.V[base + (i + 1) % 3], self.V[base + (i + 2) % 3]
                mine[(u, w)] = (t, i)
            for v in (a, b_, c):
                if v != GHOST:
                    self.vt[v] = t
        for (u, w), (t, i) in mine.items():
            twin = mine.get((w, u))
            if twin is not None:
                self.N[3 * t + i] = twin[0]
                continue
            n = outer[(u, w)]
            self.N[3 * t + i] = n
            nb = 3 * n
            for j in range(3):
                if self.V[nb + (j + 1) % 3] == w and self.V[nb + (j + 2) % 3] == u:
                    self.N[nb + j] = t
                    break
            else:  # pragma: no cover
                raise AssertionError("broken adjacency")
        self.touched.extend(slots)
        return list(slots)

    def corner_of(self, t: int, v: int) -> int:
        b = 3 * t
        for i in range(3):
            if self.V[b + i] == v:
                return i
        raise KeyError(v)

    def ghost_edge(self, t: int) -> tuple[int, int]:
        """The real hull edge ``(a, b)`` of ghost ``t``, exterior on its left."""
        k = self.corner_of(t, GHOST)
        b = 3 * t
        return self.V[b + (k + 1) % 3], self.V[b + (k + 2) % 3]

    # -- predicates on slots -------------------------------------------------
    def in_circle(self, t: int, p) -> int:
        if self.is_ghost(t):
            a, b = self.ghost_edge(t)
            pa, pb = self.point(a), self.point(b)
            o = orient2d(pa, pb, p)
            if o > 0:
                return 1
            if o == 0 and on_open_segment(pa, pb, p):
                return 0
            return -1
        a, b, c = self.tri(t)
        return incircle(self.point(a), self.point(b), self.point(c), p)

    # -- bootstrap ---------------------------------------------------------------
    def _bootstrap(self, a: int, b: int, c: int):
        if orient2d(self.point(a), self.point(b), self.point(c)) < 0:
            b, c = c, b
        tris = [(a, b, c), (b, a, GHOST), (c, b, GHOST), (a, c, GHOST)]
        slots = [self._alloc() for _ in tris]
        mine = {}
        for t, tr in zip(slots, tris):
            base = 3 * t
            self.V[base:base + 3] = list(tr)
            for i in range(3):
                mine[(tr[(i + 1) % 3], tr[(i + 2) % 3])] = (t, i)
            for v in tr:
                if v != GHOST:
                    self.vt[v] = t
        for (u, w), (t, i) in mine.items():
            self.N[3 * t + i] = mine[(w, u)][0]
        self.last = slots[0]

    # -- point location ----------------------------------------------------------
    def _real_start(self, t: int) -> int:
        if t < 0 or t >= self.n_slots:
            t = 0
        if self.is_ghost(t):
            k = self.corner_of(t, GHOST)
            t = self.N[3 * t + k]
        return t

    def locate(self, p, start: int | None = None):
        """``(kind, t, i)`` with kind ``'face'`` (strictly inside ``t``, ghost
        faces meaning outside the hull), ``'edge'`` (on the edge opposite corner
        ``i``) or ``'vertex'`` (``i`` is the coincident vertex)."""
        t = self._real_start(self.last if start is None else start)
        limit = 4 * self.n_slots + 64
        steps = 0
        while True:
            steps += 1
            if steps > limit:
                return self._locate_brute(p)
            b = 3 * t
            if self.V[b] == GHOST or self.V[b + 1] == GHOST or self.V[b + 2] == GHOST:
                k = self.corner_of(t, GHOST)
                u, w = self.V[b + (k + 1) % 3], self.V[b + (k + 2) % 3]
                o = orient2d(self.point(u), self.point(w), p)
                if o > 0:
                    return ("face", t, -1)
                if o == 0 and on_open_segment(self.point(u), self.point(w), p):
                    return ("edge", t, k)
                return self._locate_brute(p)
            r = self.rng.randrange(3)
            moved = False
            zeros = []
            for s in range(3):
                i = (r + s) % 3
                u, w = self.V[b + (i + 1) % 3], self.V[b + (i + 2) % 3]
                o = orient2d(self.point(u), self.point(w), p)
                if o < 0:
                    t = self.N[b + i]
                    moved = True
                    break
                if o == 0:
                    zeros.append(i)
            if moved:
                continue
            return self._classify(t, zeros)

    def _classify(self, t, zeros):
        if not zeros:
            return ("face", t, -1)
        if len(zeros) == 1:
            return ("edge", t, zeros[0])
        i = 3 - zeros[0] - zeros[1]
        return ("vertex", t, self.V[3 * t + i])

    def _locate_brute(self, p):
        for t in range(self.n_slots):
            b = 3 * t
            if self.is_ghost(t):
                continue
            zeros = []
            ok = True
            for i in range(3):
                u, w = self.V[b + (i + 1) % 3], self.V[b + (i + 2) % 3]
                o = orient2d(self.point(u), self.point(w), p)
                if o < 0:
                    ok = False
                    break
                if o == 0:
                    zeros.append(i)
            if ok:
                return self._classify(t, zeros)
        for t in range(self.n_slots):
            if self.is_ghost(t):
                u, w = self.ghost_edge(t)
                o = orient2d(self.point(u), self.point(w), p)
                if o > 0:
                    return ("face", t, -1)
                if o == 0 and on_open_segment(self.point(u), self.point(w), p):
                    return ("edge", t, self.corner_of(t, GHOST))
        raise TriangulationError("point location failed")  # pragma: no cover

    # -- insertion ---------------------------------------------------------------
    def insert_existing(self, v: int, start: int | None = None, *, domain_only=False) -> list[int]:
        """Insert stored vertex ``v``; returns the slots created or modified."""
        p = self.point(v)
        kind, t, i = self.locate(p, start)
        if kind == "vertex":
            raise DuplicatePointError(f"duplicate point {p}")
        if domain_only and (self.is_ghost(t) or not self.inside[t]):
            raise OutsideDomainError(f"point {p} is outside the domain")
        self.touched = []
        inside = self.inside[t]
        if kind == "face":
            a, b, c = self.tri(t)
            self._rewrite([t], [(a, b, v), (b, c, v), (c, a, v)], inside)
        else:
            base = 3 * t
            x = self.V[base + i]
            u, w = self.V[base + (i + 1) % 3], self.V[base + (i + 2) % 3]
            if _ekey(u, w) in self.constrained:
                raise ConstraintSplitError("would split constraint")
            n = self.N[base + i]
            y = self.V[3 * n + 3 - self.corner_of(n, u) - self.corner_of(n, w)]
            if domain_only and self.is_ghost(t) != self.is_ghost(n):
                raise OutsideDomainError(f"point {p} is on the hull")
            self._rewrite([t, n], [(x, u, v), (x, v, w), (y, w, v), (y, v, u)], inside)
        self._legalize(v)
        self.last = self._real_start(self.vt[v])
        return sorted(set(self.touched))

    def insert_vertex(self, p, origin: int = ORIGIN_STEINER, start: int | None = None,
                      *, domain_only: bool = True) -> int:
        """Insert a new point, restoring the (constrained) Delaunay property."""
        kind, t, i = self.locate(p, start)
        if kind == "vertex":
            raise DuplicatePointError(f"duplicate point {tuple(p)}")
        if kind == "edge":
            base = 3 * t
            u, w = self.V[base + (i + 1) % 3], self.V[base + (i + 2) % 3]
            if _ekey(u, w) in self.constrained:
                raise ConstraintSplitError("would split constraint")
        if domain_only and self.regions_ready and (self.is_ghost(t) or not self.inside[t]):
            raise OutsideDomainError(f"point {tuple(p)} is outside the domain")
        v = self.add_point(p, origin)
        try:
            self.insert_existing(v, t)
        except Exception:
            self.px.pop(), self.py.pop(), self.origin.pop(), self.vt.pop()
            raise
        return v

    def _legalize(self, v: int):
        pv = self.point(v)
        stack = [t for t in set(self.touched) if v in self.tri(t)]
        while stack:
            t = stack.pop()
            b = 3 * t
            try:
                k = self.corner_of(t, v)
            except KeyError:
                continue
            u, w = self.V[b + (k + 1) % 3], self.V[b + (k + 2) % 3]
            if u != GHOST and w != GHOST and _ekey(u, w) in self.constrained:
                continue
            n = self.N[b + k]
            s = self.in_circle(n, pv)
            flip = s > 0
            if s == 0 and GHOST not in (u, w) and not self.is_ghost(n):
                # cocircular: keep whichever diagonal has the smaller index pair
                q = self._opposite(n, u, w)
                flip = _ekey(v, q) < _ekey(u, w)
            if flip:
                new = self._flip(t, k)
                stack.extend(new)

    def _opposite(self, n: int, u: int, w: int) -> int:
        b = 3 * n
        for i in range(3):
            x = self.V[b + i]
            if x != u and x != w:
                return x
        raise KeyError((u, w))  # pragma: no cover

    def _flip(self, t: int, k: int) -> list[int]:
        """Flip the edge opposite corner ``k`` of ``t``."""
        b = 3 * t
        p = self.V[b + k]
        u, w = self.V[b + (k + 1) % 3], self.V[b + (k + 2) % 3]
        n = self.N[b + k]
        q = self._opposite(n, u, w)
        return self._rewrite([t, n], [(p, u, q), (p, q, w)], self.inside[t])

    # -- edges and fans ---------------------------------------------------------
    def fan(self, v: int) -> list[int]:
        """Triangles (ghosts included) around vertex ``v`` in rotational order."""
        start = self.vt[v]
        out = []
        t = start
        while True:
            out.append(t)
            k = self.corner_of(t, v)
            t = self.N[3 * t + (k + 1) % 3]
            if t == start or len(out) > self.n_slots:
                break
        return out

    def find_edge(self, u: int, w: int):
        """``(t, i)`` with the directed edge ``u -> w`` opposite corner ``i`` of ``t``."""
        for t in self.fan(u):
            b = 3 * t
            for i in range(3):
                if self.V[b + (i + 1) % 3] == u and self.V[b + (i + 2) % 3] == w:
                    return t, i
        return None

    def has_edge(self, u: int, w: int) -> bool:
        return self.find_edge(u, w) is not None

    # -- constraints ---------------------------------------------------------------
    def insert_constraint(self, a: int, b: int):
        if a == b:
            raise TriangulationError("constraint endpoints must differ")
        if self.has_edge(a, b):
            self.constrained.add(_ekey(a, b))
            return
        pa, pb = self.point(a), self.point(b)
        crossed = self._crossed_edges(a, b)
        for l, r in crossed:
            if _ekey(l, r) in self.constrained:
                raise TriangulationError("constraint crosses an existing constraint")
        queue = deque(crossed)
        new_edges = []
        guard = 0
        while queue:
            guard += 1
            if guard > 100000 + 100 * len(crossed) ** 2:  # pragma: no cover
                raise TriangulationError("constraint insertion did not converge")
            l, r = queue.popleft()
            fe = self.find_edge(l, r)
            if fe is None:
                continue
            t, k = fe
            p = self.V[3 * t + k]
            q = self._opposite(self.N[3 * t + k], l, r)
            pp, pq = self.point(p), self.point(q)
            if orient2d(pp, pq, self.point(l)) * orient2d(pp, pq, self.point(r)) < 0 and \
                    orient2d(self.point(l), self.point(r), pp) * orient2d(self.point(l), self.point(r), pq) < 0:
                self._flip(t, k)
                if p in (a, b) or q in (a, b):
                    new_edges.append((p, q))
                elif orient2d(pa, pb, pp) * orient2d(pa, pb, pq) < 0:
                    queue.append((p, q))
                else:
                    new_edges.append((p, q))
            else:
                queue.append((l, r))
        self.constrained.add(_ekey(a, b))
        self._restore(new_edges)

    def _crossed_edges(self, a: int, b: int) -> list[tuple[int, int]]:
        pa, pb = self.point(a), self.point(b)
        start = None
        for t in self.fan(a):
            if self.is_ghost(t):
                continue
            k = self.corner_of(t, a)
            u, w = self.V[3 * t + (k + 1) % 3], self.V[3 * t + (k + 2) % 3]
            for x in (u, w):
                if orient2d(pa, pb, self.point(x)) == 0 and on_open_segment(pa, pb, self.point(x)):
                    raise ConstraintSplitError("constraint passes through a vertex")
            if orient2d(pa, self.point(u), pb) > 0 and orient2d(pa, self.point(w), pb) < 0:
                start = (t, k, u, w)
                break
        if start is None:
            raise TriangulationError("constraint leaves the triangulation")
        t, k, u, w = start
        r_, l_ = u, w
        out = [(l_, r_)]
        t = self.N[3 * t + k]
        while True:
            y = self._opposite(t, l_, r_)
            if y == b:
                return out
            if y == GHOST:
                raise TriangulationError("constraint leaves the triangulation")
            o = orient2d(pa, pb, self.point(y))
            if o == 0:
                raise ConstraintSplitError("constraint passes through a vertex")
            if o > 0:
                l_ = y
            else:
                r_ = y
            out.append((l_, r_))
            t = self._across(t, l_, r_)

    def _across(self, t: int, u: int, w: int) -> int:
        b = 3 * t
        for i in range(3):
            x = self.V[b + i]
            if x != u and x != w:
                return self.N[b + i]
        raise KeyError((u, w))  # pragma: no cover

    def _restore(self, edges):
        stack = list(edges)
        seen = 0
        while stack:
            seen += 1
            u, w = stack.pop()
            if _ekey(u, w) in self.constrained:
                continue
            fe = self.find_edge(u, w)
            if fe is None:
                continue
            t, k = fe
            n = self.N[3 * t + k]
            if self.is_ghost(t) or self.is_ghost(n):
                continue
            q = self._opposite(n, u, w)
            if self.in_circle(t, self.point(q)) > 0:
                p = self.V[3 * t + k]
                self._flip(t, k)
                stack.extend([(p, u), (u, q), (q, w), (w, p)])

    # -- regions -----------------------------------------------------------------
    def classify_regions(self, holes=()):
        """Flood-fill the exterior from the ghosts and from every hole seed."""
        ns = self.n_slots
        inside = [True] * ns
        seeds = [t for t in range(ns) if self.is_ghost(t)]
        for h in holes:
            kind, t, _ = self.locate((float(h[0]), float(h[1])))
            seeds.append(t)
        stack = list(seeds)
        for t in seeds:
            inside[t] = False
        while stack:
            t = stack.pop()
            b = 3 * t
            for i in range(3):
                u, w = self.V[b + (i + 1) % 3], self.V[b + (i + 2) % 3]
                if u != GHOST and w != GHOST and _ekey(u, w) in self.constrained:
                    continue
                n = self.N[b + i]
                if inside[n]:
                    inside[n] = False
                    stack.append(n)
        self.inside = inside
        self.regions_ready = True

    # -- audit -----------------------------------------------------------------------
    def check_consistency(self) -> list[str]:
        errs = []
        for t in range(self.n_slots):
            b = 3 * t
            for i in range(3):
                n = self.N[b + i]
                u, w = self.V[b + (i + 1) % 3], self.V[b + (i + 2) % 3]
                nb = 3 * n
                ok = any(self.V[nb + (j + 1) % 3] == w and self.V[nb + (j + 2) % 3] == u
                         and self.N[nb + j] == t for j in range(3))
                if not ok:
                    errs.append(f"triangle {t} edge {i} not mirrored")
            if not self.is_ghost(t):
                a, bb, c = self.tri(t)
                if orient2d(self.point(a), self.point(bb), self.point(c)) <= 0:
                    errs.append(f"triangle {t} not counterclockwise")
        for e in self.constrained:
            if not self.has_edge(*e):
                errs.append(f"constrained edge {e} missing")
        return errs


# -- construction ----------------------------------------------------------------

def _hilbert_index(x: int, y: int, order: int) -> int:
    d = 0
    s = 1 << (order - 1)
    while s > 0:
        rx = 1 if x & s else 0
        ry = 1 if y & s else 0
        d += s * s * ((3 * rx) ^ ry)
        if ry == 0:
            if rx == 1:
                x = s - 1 - x
                y = s - 1 - y
            x, y = y, x
        s >>= 1
    return d


def hilbert_order(points: np.ndarray, order: int = 16) -> list[int]:
    pts = np.asarray(points, dtype=float)
    lo = pts.min(axis=0)
    span = max(float((pts.max(axis=0) - lo).max()), 1e-300)
    q = ((pts - lo) / span * ((1 << order) - 1)).astype(np.int64)
    keys = [_hilbert_index(int(a), int(b), order) for a, b in q]
    return sorted(range(len(pts)), key=lambda i: (keys[i], i))


def triangulate(points, origins=None, seed: int = 0x5EED) -> Mesh:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 3:
        raise TriangulationError("need at least 3 points")
    if len({(float(x), float(y)) for x, y in pts}) != len(pts):
        raise DuplicatePointError("duplicate points")
    m = Mesh(seed)
    for k, p in enumerate(pts):
        m.add_point(p, ORIGIN_INPUT if origins is None else int(origins[k]))
    order = hilbert_order(pts)
    a, b = order[0], order[1]
    c = None
    for v in order[2:]:
        if orient2d(m.point(a), m.point(b), m.point(v)) != 0:
            c = v
            break
    if c is None:
        raise TriangulationError("all points are collinear")
    m._bootstrap(a, b, c)
    for v in order:
        if v in (a, b, c):
            continue
        m.insert_existing(v)
    return m


# -- verification -------------------------------------------------------------------

def probe_points(p0, p1, p2) -> list[tuple[float, float]]:
    """Centroid plus the midpoints of the three medians."""
    gx = (p0[0] + p1[0] + p2[0]) / 3.0
    gy = (p0[1] + p1[1] + p2[1]) / 3.0
    out = [(gx, gy)]
    for a, b, c in ((p0, p1, p2), (p1, p2, p0), (p2, p0, p1)):
        mx, my = 0.5 * (b[0] + c[0]), 0.5 * (b[1] + c[1])
        out.append((0.5 * (a[0] + mx), 0.5 * (a[1] + my)))
    return out


def _blocked(mesh: Mesh, v: int, probe, cons: np.ndarray, A: np.ndarray, B: np.ndarray) -> bool:
    keep = (cons[:, 0] != v) & (cons[:, 1] != v)
    if not keep.any():
        return False
    pv = mesh.point(v)
    codes = _kernels.segment_crossings(pv, probe, A[keep], B[keep])
    if (codes == 1).any():
        return True
    for k in np.nonzero(codes == 2)[0]:
        if segments_intersect(pv, probe, A[keep][k], B[keep][k]):
            return True
    return False


def delaunay_violations(mesh: Mesh, mode: str = "truly", tris=None) -> list[tuple[int, int]]:
    """(triangle-row, vertex) pairs breaking the (visibility-restricted) empty circle."""
    if tris is None:
        tris = mesh.triangles()
    tris = np.asarray(tris, dtype=np.int64).reshape(-1, 3)
    if len(tris) == 0:
        return []
    px, py = np.asarray(mesh.px), np.asarray(mesh.py)
    ti, vi, code = _kernels.incircle_scan(px, py, tris)
    bad = []
    for t, v, c in zip(ti.tolist(), vi.tolist(), code.tolist()):
        a, b, cc = (int(x) for x in tris[t])
        if c == 2 and incircle(mesh.point(a), mesh.point(b), mesh.point(cc), mesh.point(v)) <= 0:
            continue
        bad.append((t, v))
    if mode == "truly" or not bad:
        return bad
    cons = np.array(sorted(mesh.constrained), dtype=np.int64).reshape(-1, 2)
    C = mesh.coords()
    A, B = C[cons[:, 0]], C[cons[:, 1]]
    out = []
    for t, v in bad:
        a, b, c = (int(x) for x in tris[t])
        probes = probe_points(mesh.point(a), mesh.point(b), mesh.point(c))
        if not all(_blocked(mesh, v, pr, cons, A, B) for pr in probes):
            out.append((t, v))
    return out


def is_delaunay(mesh: Mesh, mode: str = "truly", tris=None) -> bool:
    if mode not in ("truly", "constrained"):
        raise ValueError(f"unknown mode {mode!r}")
    return not delaunay_violations(mesh, mode, tris)


def pslg_recovered(mesh: Mesh, split_pslg) -> bool:
    edges = mesh.edges()
    return all(_ekey(int(a), int(b)) in edges for a, b in split_pslg.segments)


def missing_subsegments(mesh: Mesh, split_pslg) -> list[int]:
    edges = mesh.edges()
    return [k for k, (a, b) in enumerate(split_pslg.segments) if _ekey(int(a), int(b)) not in edges]


def gabriel_violations(mesh: Mesh, split_pslg) -> list[tuple[int, int]]:
    """(subsegment, vertex) pairs with the vertex strictly inside the diametral circle."""
    C = mesh.coords()
    S = np.asarray(split_pslg.segments)
    A, B = C[S[:, 0]], C[S[:, 1]]
    out = []
    for v in range(mesh.n_vertices):
        codes = _kernels.diametral_hits(C[v], A, B)
        for k in np.nonzero(codes)[0]:
            if codes[k] == 1 or in_diametral_circle(A[k], B[k], C[v]):
                out.append((int(k), v))
    return out
