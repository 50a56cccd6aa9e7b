"""Exact-sign planar predicates and small numeric primitives.

The predicates evaluate in floating point first and only fall back to
rational arithmetic (``fractions.Fraction``, exact for any finite double)
when the result is within the forward error bound of the fast path.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Sequence

_EPS = 2.0 ** -53
CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
ICC_ERRBOUND = (10.0 + 96.0 * _EPS) * _EPS
DOT_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS


class Point2(NamedTuple):
    x: float
    y: float


class Circle(NamedTuple):
    center: Point2
    radius: float


class DegenerateTriangleError(ValueError):
    """Raised for collinear (zero-area) triangles."""


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _orient_exact(a, b, c) -> int:
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def orient2d(a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> int:
    """Sign of twice the signed area of ``abc`` (+1 counterclockwise)."""
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    bound = CCW_ERRBOUND * (abs(detleft) + abs(detright))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return _orient_exact(a, b, c)


def _incircle_exact(a, b, c, d) -> int:
    dx, dy = Fraction(d[0]), Fraction(d[1])
    adx, ady = Fraction(a[0]) - dx, Fraction(a[1]) - dy
    bdx, bdy = Fraction(b[0]) - dx, Fraction(b[1]) - dy
    cdx, cdy = Fraction(c[0]) - dx, Fraction(c[1]) - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    return _sign(det)


def incircle(a, b, c, d) -> int:
    """+1 iff ``d`` is strictly inside the circle through counterclockwise ``abc``."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy)
           + clift * (adxbdy - bdxady))
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    bound = ICC_ERRBOUND * permanent
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return _incircle_exact(a, b, c, d)


def _dot_exact(a, b, p) -> int:
    px, py = Fraction(p[0]), Fraction(p[1])
    return _sign((Fraction(a[0]) - px) * (Fraction(b[0]) - px)
                 + (Fraction(a[1]) - py) * (Fraction(b[1]) - py))


def in_diametral_circle(a, b, p) -> bool:
    """True iff ``p`` lies strictly inside the circle with diameter ``ab``."""
    u = (a[0] - p[0]) * (b[0] - p[0])
    v = (a[1] - p[1]) * (b[1] - p[1])
    dot = u + v
    bound = DOT_ERRBOUND * (abs(u) + abs(v))
    if dot < -bound:
        return True
    if dot > bound:
        return False
    return _dot_exact(a, b, p) < 0


def on_open_segment(a, b, p) -> bool:
    """``p`` collinear with ``ab`` and strictly between the endpoints."""
    if orient2d(a, b, p) != 0:
        return False
    return in_diametral_circle(a, b, p)


def segments_intersect(a, b, c, d) -> bool:
    """Closed segments ``ab`` and ``cd`` share at least one point."""
    o1 = orient2d(a, b, c)
    o2 = orient2d(a, b, d)
    o3 = orient2d(c, d, a)
    o4 = orient2d(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _within_box(a, b, c):
        return True
    if o2 == 0 and _within_box(a, b, d):
        return True
    if o3 == 0 and _within_box(c, d, a):
        return True
    if o4 == 0 and _within_box(c, d, b):
        return True
    return False


def _within_box(a, b, p) -> bool:
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def circumcenter(a, b, c) -> Point2:
    # relative to ``a`` to keep cancellation local
    bx, by = b[0] - a[0], b[1] - a[1]
    cx, cy = c[0] - a[0], c[1] - a[1]
    d = 2.0 * (bx * cy - by * cx)
    if d == 0.0 or orient2d(a, b, c) == 0:
        raise DegenerateTriangleError("collinear triangle has no circumcircle")
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return Point2(a[0] + ux, a[1] + uy)


def circumcircle(a, b, c) -> Circle:
    o = circumcenter(a, b, c)
    r = (math.hypot(o.x - a[0], o.y - a[1]) + math.hypot(o.x - b[0], o.y - b[1])
         + math.hypot(o.x - c[0], o.y - c[1])) / 3.0
    return Circle(o, r)


def triangle_angles(a, b, c) -> tuple[float, float, float]:
    """Interior angles at ``a``, ``b``, ``c`` via atan2 of cross and dot."""
    if orient2d(a, b, c) == 0:
        raise DegenerateTriangleError("degenerate triangle")
    return (_corner(a, b, c), _corner(b, c, a), _corner(c, a, b))


def _corner(p, q, r) -> float:
    ux, uy = q[0] - p[0], q[1] - p[1]
    vx, vy = r[0] - p[0], r[1] - p[1]
    return math.atan2(abs(ux * vy - uy * vx), ux * vx + uy * vy)


def edge_lengths(a, b, c) -> tuple[float, float, float]:
    """Lengths of the edges opposite ``a``, ``b`` and ``c``."""
    return (math.hypot(b[0] - c[0], b[1] - c[1]),
            math.hypot(c[0] - a[0], c[1] - a[1]),
            math.hypot(a[0] - b[0], a[1] - b[1]))


def min_angle(a, b, c) -> float:
    return min(triangle_angles(a, b, c))


def radius_edge_ratio(a, b, c) -> float:
    """Circumradius over shortest edge, ``|a||b||c| / (2 |cross| l_min)``."""
    if orient2d(a, b, c) == 0:
        raise DegenerateTriangleError("degenerate triangle")
    la, lb, lc = edge_lengths(a, b, c)
    cross = abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    return la * lb * lc / (2.0 * cross) / min(la, lb, lc)
