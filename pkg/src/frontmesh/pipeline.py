"""End-to-end pipeline: feature size, split, triangulate, refine, verify."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .cdt import ORIGIN_SPLIT, Mesh, TriangulationError, missing_subsegments, triangulate
from .lfs import all_feature_sizes
from .pslg import Pslg, check, classify_small_angles
from .quality import QualityReport, verify
from .refine import RefineConfig, RefineStats, refine
from .splitter import SplitBounds, bounds_for, choose_nstar, solve_mapping, split

log = logging.getLogger(__name__)

MAX_DOUBLINGS = 20


class RecoveryError(RuntimeError):
    pass


@dataclass
class MeshResult:
    pslg: Pslg
    refined: object
    plan: object
    fsfs: list
    mappings: list
    bounds: SplitBounds
    mesh: Mesh
    stats: RefineStats
    report: QualityReport
    config: RefineConfig
    doublings: int


def initial_mesh(refined, mode: str, seed: int = 0x5EED) -> Mesh:
    rp = refined.pslg
    origins = [ORIGIN_SPLIT if o else 0 for o in refined.vertex_origin]
    mesh = triangulate(rp.vertices, origins, seed=seed)
    if mode == "constrained":
        for a, b in rp.segments:
            mesh.insert_constraint(int(a), int(b))
    else:
        for a, b in rp.segments:
            if not mesh.has_edge(int(a), int(b)):
                raise TriangulationError("subsegment missing")
            mesh.constrained.add((min(a, b), max(a, b)))
    return mesh


def prepare(pslg: Pslg, theta_deg: float, mode: str = "truly", nstar: int | None = None,
            threads: int = 1):
    """Validate, build feature sizes and mappings, pick split bounds."""
    if not 0.0 < theta_deg < 30.0:
        raise ValueError("theta must be below 30 degrees")
    check(pslg)
    fsfs = all_feature_sizes(pslg, threads)
    mappings = [solve_mapping(f) for f in fsfs]
    t_min = min(m.t_star for m in mappings)
    bounds = choose_nstar(t_min, math.radians(theta_deg), mode, override=nstar)
    return fsfs, mappings, bounds


def split_and_triangulate(pslg, fsfs, mappings, bounds, mode):
    """Split and triangulate; in truly mode double n* until every subsegment is a Delaunay edge."""
    doublings = 0
    while True:
        refined, plan = split(pslg, bounds, mappings, fsfs)
        if mode == "constrained":
            return refined, plan, initial_mesh(refined, mode), bounds, doublings
        mesh = triangulate(refined.pslg.vertices,
                           [ORIGIN_SPLIT if o else 0 for o in refined.vertex_origin])
        missing = missing_subsegments(mesh, refined.pslg)
        if not missing:
            for a, b in refined.pslg.segments:
                mesh.constrained.add((min(int(a), int(b)), max(int(a), int(b))))
            return refined, plan, mesh, bounds, doublings
        if doublings >= MAX_DOUBLINGS:
            raise RecoveryError(f"subsegments still missing after {doublings} doublings")
        doublings += 1
        log.info("%d subsegments missing, doubling n* to %d", len(missing), 2 * bounds.n_star)
        b = bounds_for(2 * bounds.n_star, bounds.t_min, allow_nonpositive=True)
        bounds = SplitBounds(b.n_star, b.t_min, b.A_star, b.B_star, b.R, bounds.required,
                             b.A_star >= bounds.required)


def mesh_pslg(pslg: Pslg, theta_deg: float, mode: str = "truly", nstar: int | None = None,
              strict: bool = False, max_insertions: int = 1_000_000, threads: int = 1,
              log_events: bool = True) -> MeshResult:
    fsfs, mappings, bounds = prepare(pslg, theta_deg, mode, nstar, threads)
    refined, plan, mesh, bounds, doublings = split_and_triangulate(pslg, fsfs, mappings, bounds, mode)
    mesh.classify_regions(pslg.holes)
    small = classify_small_angles(pslg, bounds.R)
    config = RefineConfig(math.radians(theta_deg), mode, bounds, small, max_insertions, strict)
    mesh, stats = refine(mesh, refined, config, log_events=log_events)
    report = verify(mesh, pslg, refined, config)
    return MeshResult(pslg, refined, plan, fsfs, mappings, bounds, mesh, stats, report, config,
                      doublings)
