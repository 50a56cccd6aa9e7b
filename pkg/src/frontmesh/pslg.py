"""Planar straight line graph: data model, ``.poly`` ingestion and validation."""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .geometry import on_open_segment, orient2d, segments_intersect


class PolyParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ValueError):
    """The PSLG violates a structural invariant."""


@dataclass(frozen=True)
class Pslg:
    """Input vertices, segments ``(i, j, marker)`` and hole seed points.

    Arrays are made read-only on construction; a Pslg is a value.
    """

    vertices: np.ndarray
    segments: np.ndarray
    markers: np.ndarray
    holes: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    vertex_markers: np.ndarray | None = None

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float).reshape(-1, 2)
        s = np.array(self.segments, dtype=np.int64).reshape(-1, 2)
        m = np.array(self.markers, dtype=np.int64).reshape(-1)
        h = np.array(self.holes, dtype=float).reshape(-1, 2)
        if len(m) != len(s):
            raise ValueError("one marker per segment required")
        if not np.all(np.isfinite(v)) or not np.all(np.isfinite(h)):
            raise ValueError("coordinates must be finite")
        vm = self.vertex_markers
        vm = np.zeros(len(v), dtype=np.int64) if vm is None else np.array(vm, dtype=np.int64)
        for arr in (v, s, m, h, vm):
            arr.flags.writeable = False
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "segments", s)
        object.__setattr__(self, "markers", m)
        object.__setattr__(self, "holes", h)
        object.__setattr__(self, "vertex_markers", vm)

    @classmethod
    def from_lists(cls, vertices, segments, holes=(), vertex_markers=None) -> "Pslg":
        segs, marks = [], []
        for s in segments:
            segs.append((s[0], s[1]))
            marks.append(s[2] if len(s) > 2 else 1)
        return cls(np.asarray(vertices, dtype=float).reshape(-1, 2),
                   np.asarray(segs, dtype=np.int64).reshape(-1, 2),
                   np.asarray(marks, dtype=np.int64), np.asarray(holes, dtype=float),
                   vertex_markers)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    def segment_points(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        a, b = self.segments[i]
        return self.vertices[a], self.vertices[b]

    def segment_length(self, i: int) -> float:
        p, q = self.segment_points(i)
        return math.hypot(q[0] - p[0], q[1] - p[1])

    def point_on_segment(self, i: int, x: float) -> np.ndarray:
        """Point at arc length ``x`` from the first endpoint of segment ``i``."""
        p, q = self.segment_points(i)
        t = x / self.segment_length(i)
        return p + t * (q - p)

    def incident_segments(self) -> list[list[int]]:
        inc: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for k, (a, b) in enumerate(self.segments):
            inc[a].append(k)
            if b != a:
                inc[b].append(k)
        return inc

    def scaled(self, s: float) -> "Pslg":
        return Pslg(self.vertices * s, self.segments, self.markers, self.holes * s,
                    self.vertex_markers)


# -- violations -------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    def message(self) -> str:
        return repr(self)


@dataclass(frozen=True)
class NoSegments(Violation):
    def message(self) -> str:
        return "PSLG must contain at least one segment"


@dataclass(frozen=True)
class IndexOutOfRange(Violation):
    segment: int
    vertex: int


@dataclass(frozen=True)
class DuplicateVertex(Violation):
    first: int
    second: int


@dataclass(frozen=True)
class ZeroLengthSegment(Violation):
    segment: int


@dataclass(frozen=True)
class DuplicateSegment(Violation):
    first: int
    second: int


@dataclass(frozen=True)
class ProperIntersection(Violation):
    first: int
    second: int


@dataclass(frozen=True)
class VertexOnSegment(Violation):
    vertex: int
    segment: int


def validate(pslg: Pslg) -> list[Violation]:
    """All invariant violations of ``pslg``; empty iff the PSLG is valid."""
    out: list[Violation] = []
    n = pslg.n_vertices
    if pslg.n_segments == 0:
        out.append(NoSegments())
    seen: dict[tuple[float, float], int] = {}
    for i, (x, y) in enumerate(pslg.vertices):
        key = (float(x), float(y))
        if key in seen:
            out.append(DuplicateVertex(seen[key], i))
        else:
            seen[key] = i
    good: list[int] = []
    pairs: dict[tuple[int, int], int] = {}
    for k, (a, b) in enumerate(pslg.segments):
        bad = False
        for v in (a, b):
            if not 0 <= v < n:
                out.append(IndexOutOfRange(k, int(v)))
                bad = True
        if bad:
            continue
        if a == b or tuple(pslg.vertices[a]) == tuple(pslg.vertices[b]):
            out.append(ZeroLengthSegment(k))
            continue
        key = (min(a, b), max(a, b))
        if key in pairs:
            out.append(DuplicateSegment(pairs[key], k))
            continue
        pairs[key] = k
        good.append(k)

    V = pslg.vertices
    S = pslg.segments
    for k in good:
        a, b = S[k]
        for v in range(n):
            if v != a and v != b and on_open_segment(V[a], V[b], V[v]):
                out.append(VertexOnSegment(v, k))
    for ii, k1 in enumerate(good):
        a, b = S[k1]
        lo1 = np.minimum(V[a], V[b])
        hi1 = np.maximum(V[a], V[b])
        for k2 in good[ii + 1:]:
            c, d = S[k2]
            if np.any(np.maximum(V[c], V[d]) < lo1) or np.any(np.minimum(V[c], V[d]) > hi1):
                continue
            shared = {a, b} & {c, d}
            if shared:
                # adjacent segments may only meet at the shared endpoint
                s = shared.pop()
                oa = b if a == s else a
                oc = d if c == s else c
                if orient2d(V[s], V[oa], V[oc]) == 0:
                    dx1, dy1 = V[oa] - V[s]
                    dx2, dy2 = V[oc] - V[s]
                    if dx1 * dx2 + dy1 * dy2 > 0:
                        out.append(ProperIntersection(k1, k2))
                continue
            if segments_intersect(V[a], V[b], V[c], V[d]):
                out.append(ProperIntersection(k1, k2))
    return out


def check(pslg: Pslg) -> Pslg:
    """Raise :class:`ValidationError` describing the first violations, else return."""
    v = validate(pslg)
    if v:
        raise ValidationError("; ".join(x.message() for x in v[:5]))
    return pslg


# -- small angles ----------------------------------------------------------

@dataclass(frozen=True)
class SmallAngleRecord:
    apex: int
    segment_pair: tuple[int, int]
    angle: float


def shared_vertex(pslg: Pslg, s1: int, s2: int) -> int:
    a, b = pslg.segments[s1]
    c, d = pslg.segments[s2]
    common = {int(a), int(b)} & {int(c), int(d)}
    if s1 == s2 or len(common) != 1:
        raise ValueError(f"segments {s1} and {s2} are not adjacent")
    return common.pop()


def angle_between_adjacent(pslg: Pslg, s1: int, s2: int) -> float:
    """Angle in (0, pi] between two segments at their shared endpoint."""
    o = shared_vertex(pslg, s1, s2)
    V = pslg.vertices
    p = V[[v for v in pslg.segments[s1] if v != o][0]] - V[o]
    q = V[[v for v in pslg.segments[s2] if v != o][0]] - V[o]
    return math.atan2(abs(p[0] * q[1] - p[1] * q[0]), p[0] * q[0] + p[1] * q[1])


def small_angle_threshold(R: float) -> float:
    if not R >= 1.0:
        raise ValueError("R must be >= 1")
    if math.isinf(R):
        return math.pi / 2
    return math.acos(1.0 / (2.0 * R))


def classify_small_angles(pslg: Pslg, R: float) -> list[SmallAngleRecord]:
    """Adjacent segment pairs meeting at an angle <= arccos(1/(2R))."""
    thr = small_angle_threshold(R)
    out = []
    for v, segs in enumerate(pslg.incident_segments()):
        for i in range(len(segs)):
            for j in range(i + 1, len(segs)):
                s1, s2 = sorted((segs[i], segs[j]))
                phi = angle_between_adjacent(pslg, s1, s2)
                if phi <= thr:
                    out.append(SmallAngleRecord(v, (s1, s2), phi))
    return out


# -- .poly -------------------------------------------------------------------

def _content_lines(text: str) -> Iterable[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _num(tok: str, line: int, kind=float):
    try:
        return kind(tok)
    except ValueError:
        raise PolyParseError(f"expected a number, got {tok!r}", line) from None


def parse_poly(text: str | bytes | io.IOBase) -> Pslg:
    """Parse the Triangle-compatible ``.poly`` subset into a :class:`Pslg`."""
    if hasattr(text, "read"):
        text = text.read()
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = list(_content_lines(text))
    pos = 0

    def take(what: str) -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 0
            raise PolyParseError(f"unexpected end of file, expected {what}", last + 1)
        item = lines[pos]
        pos += 1
        return item

    no, head = take("vertex header")
    if len(head) < 2:
        raise PolyParseError("vertex header needs 'N 2 [A [M]]'", no)
    nv = _num(head[0], no, int)
    dim = _num(head[1], no, int)
    nattr = _num(head[2], no, int) if len(head) > 2 else 0
    has_vm = _num(head[3], no, int) if len(head) > 3 else 0
    if nv <= 0:
        raise PolyParseError("vertices must be listed in the .poly file (N > 0)", no)
    if dim != 2:
        raise PolyParseError(f"dimension must be 2, got {dim}", no)
    if nattr < 0 or has_vm not in (0, 1):
        raise PolyParseError("malformed vertex header", no)

    ids: dict[int, int] = {}
    coords = []
    vmarks = []
    base = None
    for k in range(nv):
        no, tok = take(f"vertex {k}")
        if len(tok) < 3 + nattr + has_vm:
            raise PolyParseError("vertex line too short", no)
        vid = _num(tok[0], no, int)
        if base is None:
            base = vid
            if base not in (0, 1):
                raise PolyParseError("first vertex id must be 0 or 1", no)
        if vid in ids:
            raise PolyParseError(f"duplicate vertex id {vid}", no)
        if vid != base + k:
            raise PolyParseError(f"vertex ids must be consecutive, got {vid}", no)
        ids[vid] = k
        coords.append((_num(tok[1], no), _num(tok[2], no)))
        vmarks.append(_num(tok[3 + nattr], no, int) if has_vm else 0)

    no, head = take("segment header")
    ns = _num(head[0], no, int)
    seg_m = _num(head[1], no, int) if len(head) > 1 else 0
    if ns < 0 or seg_m not in (0, 1):
        raise PolyParseError("malformed segment header", no)
    segs, marks = [], []
    for k in range(ns):
        no, tok = take(f"segment {k}")
        if len(tok) < 3:
            raise PolyParseError("segment line too short", no)
        ends = []
        for t in tok[1:3]:
            v = _num(t, no, int)
            if v not in ids:
                raise PolyParseError(f"segment endpoint {v} out of range", no)
            ends.append(ids[v])
        segs.append(ends)
        marks.append(_num(tok[3], no, int) if seg_m and len(tok) > 3 else 1)

    holes = []
    if pos < len(lines):
        no, head = take("hole header")
        nh = _num(head[0], no, int)
        if nh < 0:
            raise PolyParseError("malformed hole header", no)
        for k in range(nh):
            no, tok = take(f"hole {k}")
            if len(tok) < 3:
                raise PolyParseError("hole line too short", no)
            holes.append((_num(tok[1], no), _num(tok[2], no)))

    if ns == 0:
        raise ValidationError("PSLG must contain at least one segment")
    return Pslg(np.array(coords, dtype=float), np.array(segs, dtype=np.int64).reshape(-1, 2),
                np.array(marks, dtype=np.int64), np.array(holes, dtype=float).reshape(-1, 2),
                np.array(vmarks, dtype=np.int64))


def read_poly(path: str | os.PathLike) -> Pslg:
    with open(path, "rb") as fh:
        return parse_poly(fh.read())


def format_poly(pslg: Pslg) -> str:
    out = [f"{pslg.n_vertices} 2 0 1"]
    for i, (x, y) in enumerate(pslg.vertices):
        out.append(f"{i + 1} {float(x)!r} {float(y)!r} {int(pslg.vertex_markers[i])}")
    out.append(f"{pslg.n_segments} 1")
    for k, ((a, b), m) in enumerate(zip(pslg.segments, pslg.markers)):
        out.append(f"{k + 1} {a + 1} {b + 1} {m}")
    out.append(f"{len(pslg.holes)}")
    for k, (x, y) in enumerate(pslg.holes):
        out.append(f"{k + 1} {float(x)!r} {float(y)!r}")
    return "\n".join(out) + "\n"
