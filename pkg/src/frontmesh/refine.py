"""Advancing-front off-center refinement.

Skinny triangles are processed in order of their shortest edge. Each one gets
a Steiner point on the perpendicular bisector of that edge, at the off-center
or at the circumcenter if that is closer. Triangles whose shortest edge spans
a small input angle, and is short compared to the local feature size there,
are left alone.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .cdt import ORIGIN_STEINER, GHOST, Mesh
from .geometry import (DegenerateTriangleError, circumcenter, in_diametral_circle, min_angle,
                       orient2d, segments_intersect)
from .splitter import SplitBounds


class EncroachmentError(RuntimeError):
    def __init__(self, msg, stats=None):
        super().__init__(msg)
        self.stats = stats


class NonTerminationError(RuntimeError):
    def __init__(self, msg, stats=None):
        super().__init__(msg)
        self.stats = stats


@dataclass
class RefineConfig:
    theta_star: float
    mode: str
    bounds: SplitBounds
    small_angles: list = field(default_factory=list)
    max_insertions: int = 1_000_000
    strict: bool = False

    def __post_init__(self):
        if not 0.0 < self.theta_star < math.pi / 6:
            raise ValueError("theta must be below 30 degrees")
        if self.mode not in ("truly", "constrained"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def alpha(self) -> float:
        return 1.0 / (2.0 * math.sin(self.theta_star))

    @property
    def beta(self) -> float:
        return 1.0 / (2.0 * math.sin(0.5 * self.theta_star))

    def small_pairs(self) -> set:
        return {frozenset(r.segment_pair) for r in self.small_angles}


@dataclass
class RefineStats:
    insertions: int = 0
    skipped_small_angle: int = 0
    encroachment_events: int = 0
    queue_max: int = 0
    offcenters: int = 0
    circumcenters: int = 0
    events: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"insertions": self.insertions, "skipped_small_angle": self.skipped_small_angle,
                "encroachment_events": self.encroachment_events, "queue_max": self.queue_max,
                "offcenters": self.offcenters, "circumcenters": self.circumcenters}


# -- local geometry ------------------------------------------------------------------

def is_skinny(a, b, c, theta_star: float) -> bool:
    return min_angle(a, b, c) < theta_star


def shortest_edge(mesh: Mesh, tri) -> tuple[int, int, int, float]:
    """``(p, q, r, length)``: shortest edge ``pq`` (ties by index pair), apex ``r``."""
    best = None
    for k in range(3):
        p, q, r = tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]
        pp, pq = mesh.point(p), mesh.point(q)
        l = math.hypot(pq[0] - pp[0], pq[1] - pp[1])
        key = (l, min(p, q), max(p, q))
        if best is None or key < best[0]:
            best = (key, p, q, r, l)
    return best[1], best[2], best[3], best[4]


def offcenter(p, q, hint, theta_star: float) -> tuple[float, float]:
    """Point on the bisector of ``pq``, on the side of ``hint``, where ``pq`` subtends ``theta_star``."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    l = math.hypot(dx, dy)
    if l == 0.0:
        raise DegenerateTriangleError("degenerate edge")
    o = orient2d(p, q, hint)
    if o == 0:
        raise DegenerateTriangleError("hint lies on the edge line")
    nx, ny = -dy / l, dx / l
    if o < 0:
        nx, ny = -nx, -ny
    h = l / (2.0 * math.tan(0.5 * theta_star))
    return (0.5 * (p[0] + q[0]) + h * nx, 0.5 * (p[1] + q[1]) + h * ny)


def steiner_point(p, q, r, theta_star: float) -> tuple[tuple[float, float], str]:
    """Off-center of the shortest edge ``pq``, or the circumcenter when it is nearer."""
    mx, my = 0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])
    l = math.hypot(q[0] - p[0], q[1] - p[1])
    h = l / (2.0 * math.tan(0.5 * theta_star))
    cc = circumcenter(p, q, r)
    dcc = math.hypot(cc[0] - mx, cc[1] - my)
    if dcc < h:
        return (cc[0], cc[1]), "circumcenter"
    return offcenter(p, q, r, theta_star), "offcenter"


class SubsegmentIndex:
    """Coordinates of all subsegments for the encroachment checks."""

    def __init__(self, mesh: Mesh, segments):
        S = np.asarray(segments, dtype=np.int64).reshape(-1, 2)
        C = mesh.coords()
        self.A = np.ascontiguousarray(C[S[:, 0]])
        self.B = np.ascontiguousarray(C[S[:, 1]])

    def crosses(self, g, c) -> bool:
        """Closed segment ``gc`` touches some closed subsegment."""
        codes = _kernels.segment_crossings(g, c, self.A, self.B)
        if (codes == 1).any():
            return True
        for k in np.nonzero(codes == 2)[0]:
            if segments_intersect(g, c, self.A[k], self.B[k]):
                return True
        return False

    def in_diametral(self, c) -> bool:
        codes = _kernels.diametral_hits(c, self.A, self.B)
        if (codes == 1).any():
            return True
        for k in np.nonzero(codes == 2)[0]:
            if in_diametral_circle(self.A[k], self.B[k], c):
                return True
        return False


def check_encroachment(point, tri_points, index: SubsegmentIndex, mode: str) -> bool:
    """Candidate crosses (or lands on) a subsegment as seen from the generating
    triangle's centroid, or, in truly mode, lies strictly inside a diametral circle."""
    a, b, c = tri_points
    g = ((a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0)
    if index.crosses(g, point):
        return True
    return mode == "truly" and index.in_diametral(point)


def across_small_angle(mesh: Mesh, tri, refined, config: RefineConfig, pairs=None) -> bool:
    p, q, _, l = shortest_edge(mesh, tri)
    nv = len(refined.vertex_segment)
    if p >= nv or q >= nv:
        return False
    sp, sq = refined.segments_of(p), refined.segments_of(q)
    if not sp or not sq or sp & sq:
        return False
    pairs = config.small_pairs() if pairs is None else pairs
    if not any(frozenset((s1, s2)) in pairs for s1 in sp for s2 in sq):
        return False
    lfs = max(refined.vertex_lfs[p], refined.vertex_lfs[q])
    return l < lfs / config.bounds.B_star


# -- main loop -----------------------------------------------------------------------

def refine(mesh: Mesh, refined, config: RefineConfig, *, log_events: bool = True):
    """Refine in place; returns ``(mesh, stats)``."""
    stats = RefineStats()
    theta = config.theta_star
    pairs = config.small_pairs()
    index = SubsegmentIndex(mesh, refined.pslg.segments)
    heap: list = []
    skipped: set = set()
    pushed: set = set()

    def consider(t: int):
        if (t, mesh.gen[t]) in pushed or mesh.is_ghost(t) or not mesh.inside[t]:
            return
        pushed.add((t, mesh.gen[t]))
        tri = mesh.tri(t)
        a, b, c = (mesh.point(v) for v in tri)
        if not is_skinny(a, b, c, theta):
            return
        _, _, _, l = shortest_edge(mesh, tri)
        heapq.heappush(heap, (l, tuple(sorted(tri)), t, mesh.gen[t]))

    for t in range(mesh.n_slots):
        consider(t)
    while heap:
        stats.queue_max = max(stats.queue_max, len(heap))
        l, key, t, gen = heapq.heappop(heap)
        if mesh.gen[t] != gen:
            continue
        tri = mesh.tri(t)
        if across_small_angle(mesh, tri, refined, config, pairs):
            stats.skipped_small_angle += 1
            skipped.add(key)
            if log_events:
                stats.events.append({"kind": "skip", "triangle": list(key), "edge_length": l})
            continue
        p, q, r, _ = shortest_edge(mesh, tri)
        pts = tuple(mesh.point(v) for v in tri)
        cand, kind = steiner_point(mesh.point(p), mesh.point(q), mesh.point(r), theta)
        if check_encroachment(cand, pts, index, config.mode):
            stats.encroachment_events += 1
            if log_events:
                stats.events.append({"kind": "encroachment", "triangle": list(key),
                                     "point": list(cand), "choice": kind, "edge_length": l})
            if config.strict:
                raise EncroachmentError(f"Steiner point {cand} encroaches a subsegment", stats)
            continue
        if stats.insertions >= config.max_insertions:
            raise NonTerminationError(
                f"gave up after {stats.insertions} insertions", stats)
        mesh.insert_vertex(cand, ORIGIN_STEINER, start=t)
        stats.insertions += 1
        if kind == "offcenter":
            stats.offcenters += 1
        else:
            stats.circumcenters += 1
        if log_events:
            stats.events.append({"kind": "insert", "triangle": list(key), "point": list(cand),
                                 "choice": kind, "edge_length": l,
                                 "vertex": mesh.n_vertices - 1})
        for s in set(mesh.touched):
            consider(s)
        if mesh.gen[t] == gen:
            # the generating triangle survived (hidden behind a constraint)
            pushed.discard((t, gen))
            consider(t)
    alive = {tuple(sorted(mesh.tri(t))) for t in range(mesh.n_slots)
             if not mesh.is_ghost(t) and mesh.inside[t]}
    mesh.skipped = skipped & alive
    return mesh, stats
