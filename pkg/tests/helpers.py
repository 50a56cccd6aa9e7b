"""Shared constructions for the test suite."""
from __future__ import annotations

import math

import numpy as np

from frontmesh.pslg import Pslg


def wedge(phi_deg: float, arm: float = 1.0) -> Pslg:
    c, s = math.cos(math.radians(phi_deg)), math.sin(math.radians(phi_deg))
    return Pslg.from_lists([(0, 0), (arm, 0), (arm * c, arm * s)], [(0, 1), (1, 2), (2, 0)])


def isolated_segment(length: float = 1.0) -> Pslg:
    return Pslg.from_lists([(0, 0), (length, 0)], [(0, 1)])


def unit_square() -> Pslg:
    return Pslg.from_lists([(0, 0), (1, 0), (1, 1), (0, 1)], [(0, 1), (1, 2), (2, 3), (3, 0)])


def _ring(start: int, k: int):
    return [(start + i, start + (i + 1) % k) for i in range(k)]


def random_holed_polygon(rng: np.random.Generator) -> Pslg:
    """Random rectangle with a random convex hole; every input angle is at least 90 degrees."""
    while True:
        k = int(rng.integers(5, 9))
        gaps = rng.dirichlet(np.full(k, 4.0)) * 2 * math.pi
        if all(gaps[i] + gaps[(i + 1) % k] <= math.radians(170) for i in range(k)):
            break
    r = rng.uniform(0.5, 1.5)
    cx, cy = rng.uniform(-1, 1, size=2)
    ang = rng.uniform(0, 2 * math.pi) + np.concatenate([[0.0], np.cumsum(gaps[:-1])])
    hole = [(cx + r * math.cos(a), cy + r * math.sin(a)) for a in ang]
    lo = (cx - r - rng.uniform(0.2, 1.5), cy - r - rng.uniform(0.2, 1.5))
    hi = (cx + r + rng.uniform(0.2, 1.5), cy + r + rng.uniform(0.2, 1.5))
    outer = [lo, (hi[0], lo[1]), hi, (lo[0], hi[1])]
    segs = _ring(0, 4) + _ring(4, k)
    return Pslg.from_lists(outer + hole, segs, holes=[(cx, cy)])


def random_adjacent_pair(rng: np.random.Generator) -> Pslg:
    """Two segments sharing the origin at a random angle, closed into a triangle-free open chain."""
    phi = rng.uniform(math.radians(62), math.radians(178))
    la, lb = rng.uniform(0.5, 3.0, size=2)
    rot = rng.uniform(0, 2 * math.pi)
    a = (la * math.cos(rot), la * math.sin(rot))
    b = (lb * math.cos(rot + phi), lb * math.sin(rot + phi))
    return Pslg.from_lists([(0.0, 0.0), a, b], [(0, 1), (0, 2)])


def hull_size(points) -> int:
    """Number of strictly convex hull vertices (monotone chain)."""
    pts = sorted(map(tuple, np.asarray(points, dtype=float)))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    return len(chain(pts)[:-1] + chain(pts[::-1])[:-1])


def non_crossing_constraints(points, rng, count):
    """Random vertex pairs whose segments neither cross each other nor pass through a vertex."""
    from frontmesh.geometry import on_open_segment, segments_intersect
    P = [tuple(p) for p in np.asarray(points, dtype=float)]
    out = []
    for _ in range(50 * count):
        if len(out) == count:
            break
        a, b = (int(v) for v in rng.choice(len(P), 2, replace=False))
        if any(on_open_segment(P[a], P[b], P[v]) for v in range(len(P)) if v not in (a, b)):
            continue
        ok = True
        for c, d in out:
            if {a, b} & {c, d}:
                if {a, b} == {c, d}:
                    ok = False
                continue
            if segments_intersect(P[a], P[b], P[c], P[d]):
                ok = False
                break
        if ok:
            out.append((a, b))
    return out
