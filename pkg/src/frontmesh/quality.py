"""Post-hoc verification of a refined mesh.

Everything in the report is recomputed from the mesh itself; nothing is
copied from the refinement statistics.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .cdt import ORIGIN_STEINER, Mesh, gabriel_violations, is_delaunay, pslg_recovered
from .refine import RefineConfig, across_small_angle, shortest_edge


def small_angle_bounds(phi: float, R: float) -> tuple[float, float]:
    """Lower bound on the min angle and limit of the max angle across a small angle ``phi``."""
    k = 1.0 if math.isinf(R) else (1.0 + R) / R
    return math.atan(math.sin(phi) / (k - math.cos(phi))), 0.5 * math.pi + 0.5 * phi


def size_ratio_bound(B_star: float, alpha: float) -> float:
    """Size-ratio ceiling ``2 (B* + alpha/(alpha-1) + 1)``."""
    return 2.0 * (B_star + alpha / (alpha - 1.0) + 1.0)


@dataclass
class SmallAngleReport:
    apex: int
    segment_pair: list
    phi: float
    min_angle_bound: float
    max_angle_bound: float
    skipped_triangles: int = 0
    realized_min: float | None = None
    realized_max: float | None = None


@dataclass
class QualityReport:
    vertex_count: int
    triangle_count: int
    min_angle_overall: float
    min_angle_excluding_skipped: float
    max_angle: float
    worst_size_ratio: float
    size_ratio_bound: float
    theta_star: float
    mode: str
    n_star: int
    A_star: float
    B_star: float
    R: float
    conditions_met: bool
    encroachment_events: int
    delaunay_ok: bool
    pslg_conforming: bool
    skipped_triangles: int
    small_angles: list = field(default_factory=list)

    @property
    def min_angle_ok(self) -> bool:
        return self.min_angle_excluding_skipped >= self.theta_star - 1e-12

    @property
    def passed(self) -> bool:
        return (self.delaunay_ok and self.pslg_conforming and self.encroachment_events == 0
                and self.min_angle_ok)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        for k in ("min_angle_overall", "min_angle_excluding_skipped", "max_angle", "theta_star"):
            d[k + "_deg"] = math.degrees(d[k])
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True,
                          default=lambda o: None) + "\n"


def _edge_adjacent_angles(mesh: Mesh, p: int, q: int) -> list[float]:
    out = []
    for u, w in ((p, q), (q, p)):
        fe = mesh.find_edge(u, w)
        if fe is None:
            continue
        t, _ = fe
        if mesh.is_ghost(t) or not mesh.inside[t]:
            continue
        a, b, c = mesh.tri(t)
        ang = _kernels.triangle_angles(np.array([mesh.px[a], mesh.px[b], mesh.px[c]]),
                                       np.array([mesh.py[a], mesh.py[b], mesh.py[c]]),
                                       np.array([[0, 1, 2]]))[0]
        out.append(float(ang.max()))
    return out


def verify(mesh: Mesh, pslg, refined, config: RefineConfig) -> QualityReport:
    tri_ids = mesh.domain_triangles() if mesh.regions_ready else mesh.real_triangles()
    tris = np.array([mesh.tri(t) for t in tri_ids], dtype=np.int64).reshape(-1, 3)
    px, py = np.asarray(mesh.px), np.asarray(mesh.py)
    ang = _kernels.triangle_angles(px, py, tris) if len(tris) else np.zeros((0, 3))
    tmin = ang.min(axis=1) if len(tris) else np.zeros(0)
    theta = config.theta_star
    pairs = config.small_pairs()

    records = {frozenset(r.segment_pair): SmallAngleReport(
        r.apex, list(r.segment_pair), r.angle, *small_angle_bounds(r.angle, config.bounds.R))
        for r in config.small_angles}
    skipped = np.zeros(len(tris), dtype=bool)
    for row in np.nonzero(tmin < theta)[0]:
        tri = tuple(int(v) for v in tris[row])
        if not across_small_angle(mesh, tri, refined, config, pairs):
            continue
        skipped[row] = True
        p, q, _, _ = shortest_edge(mesh, tri)
        sp, sq = refined.segments_of(p), refined.segments_of(q)
        for s1 in sp:
            for s2 in sq:
                rec = records.get(frozenset((s1, s2)))
                if rec is None:
                    continue
                rec.skipped_triangles += 1
                m = float(tmin[row])
                rec.realized_min = m if rec.realized_min is None else min(rec.realized_min, m)
                for a in _edge_adjacent_angles(mesh, p, q):
                    rec.realized_max = a if rec.realized_max is None else max(rec.realized_max, a)

    keep = ~skipped
    min_ex = float(tmin[keep].min()) if keep.any() else math.pi
    # size ratio: brute-force LFS over shortest incident edge
    used = np.unique(tris) if len(tris) else np.zeros(0, dtype=np.int64)
    shortest = np.full(mesh.n_vertices, np.inf)
    for k in range(3):
        a, b = tris[:, k], tris[:, (k + 1) % 3]
        l = np.hypot(px[a] - px[b], py[a] - py[b])
        np.minimum.at(shortest, a, l)
        np.minimum.at(shortest, b, l)
    lfs = _kernels.lfs_pairs(np.column_stack([px[used], py[used]]), pslg.vertices, pslg.segments)
    worst = float((lfs / shortest[used]).max()) if len(used) else 0.0

    # encroachment, recomputed: Steiner vertices off the domain or inside a diametral circle
    steiner = [v for v in range(mesh.n_vertices) if mesh.origin[v] == ORIGIN_STEINER]
    used_set = set(used.tolist())
    enc = sum(1 for v in steiner if v not in used_set)
    if config.mode == "truly":
        enc += sum(1 for _, v in gabriel_violations(mesh, refined.pslg) if mesh.origin[v] == ORIGIN_STEINER)

    b = config.bounds
    return QualityReport(
        vertex_count=len(used),
        triangle_count=len(tris),
        min_angle_overall=float(tmin.min()) if len(tris) else math.pi,
        min_angle_excluding_skipped=min_ex,
        max_angle=float(ang.max()) if len(tris) else 0.0,
        worst_size_ratio=worst,
        size_ratio_bound=size_ratio_bound(b.B_star, config.alpha),
        theta_star=theta,
        mode=config.mode,
        n_star=b.n_star, A_star=b.A_star, B_star=b.B_star,
        R=b.R if math.isfinite(b.R) else None,
        conditions_met=b.conditions_met,
        encroachment_events=enc,
        delaunay_ok=is_delaunay(mesh, config.mode, tris),
        pslg_conforming=pslg_recovered(mesh, refined.pslg),
        skipped_triangles=int(skipped.sum()),
        small_angles=[records[k] for k in sorted(records, key=lambda s: sorted(s))],
    )


def angle_histogram(mesh_or_tris, bins: int = 18, coords=None) -> dict:
    """Counts of per-triangle min and max angles over ``bins`` equal bins of [0, 180] degrees."""
    if isinstance(mesh_or_tris, Mesh):
        mesh = mesh_or_tris
        tris = mesh.triangles()
        px, py = np.asarray(mesh.px), np.asarray(mesh.py)
    else:
        tris = np.asarray(mesh_or_tris, dtype=np.int64).reshape(-1, 3)
        C = np.asarray(coords, dtype=float)
        px, py = C[:, 0], C[:, 1]
    if len(tris) == 0:
        raise ValueError("empty mesh")
    ang = np.degrees(_kernels.triangle_angles(px, py, tris))
    edges = np.linspace(0.0, 180.0, bins + 1)
    mn, _ = np.histogram(ang.min(axis=1), edges)
    mx, _ = np.histogram(ang.max(axis=1), edges)
    return {"edges": edges.tolist(), "min": mn.tolist(), "max": mx.tolist()}
