"""Command-line front end: parse, mesh, verify and write Triangle-style outputs."""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from .lfs import DegenerateInputError, sample_csv
from .pipeline import RecoveryError, mesh_pslg
from .pslg import PolyParseError, ValidationError, read_poly
from .refine import EncroachmentError, NonTerminationError
from .splitter import ConfigError, mapping_dump

log = logging.getLogger("frontmesh")

EXIT_OK, EXIT_INPUT, EXIT_NONTERMINATION, EXIT_VERIFY = 0, 1, 2, 3


# -- file formats --------------------------------------------------------------------

def format_node(coords, markers) -> str:
    coords = np.asarray(coords, dtype=float).reshape(-1, 2)
    lines = [f"{len(coords)} 2 0 1"]
    for i, ((x, y), m) in enumerate(zip(coords, markers), start=1):
        lines.append(f"{i} {x:.17g} {y:.17g} {int(m)}")
    return "\n".join(lines) + "\n"


def format_ele(tris) -> str:
    tris = np.asarray(tris, dtype=np.int64).reshape(-1, 3)
    lines = [f"{len(tris)} 3 0"]
    for i, (a, b, c) in enumerate(tris, start=1):
        lines.append(f"{i} {a + 1} {b + 1} {c + 1}")
    return "\n".join(lines) + "\n"


def _rows(text: str):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].split()
        if line:
            yield line


def parse_node(text: str) -> tuple[np.ndarray, np.ndarray]:
    rows = _rows(text)
    n = int(next(rows)[0])
    coords = np.empty((n, 2))
    markers = np.zeros(n, dtype=np.int64)
    for k in range(n):
        r = next(rows)
        coords[k] = float(r[1]), float(r[2])
        if len(r) > 3:
            markers[k] = int(r[3])
    return coords, markers


def parse_ele(text: str) -> np.ndarray:
    rows = _rows(text)
    n = int(next(rows)[0])
    return np.array([[int(v) - 1 for v in next(rows)[1:4]] for _ in range(n)],
                    dtype=np.int64).reshape(-1, 3)


def emit_svg(mesh, path, subsegments=(), skipped=()) -> None:
    """Triangles as polygons, subsegments as bold lines, skipped triangles shaded."""
    tris = mesh.triangles()
    if len(tris) == 0:
        raise ValueError("empty mesh")
    C = mesh.coords()
    used = C[np.unique(tris)]
    lo, hi = used.min(axis=0), used.max(axis=0)
    pad = 0.05 * max(hi - lo)
    x0, y0 = lo - pad
    w, h = hi - lo + 2 * pad
    skipped = {tuple(sorted(t)) for t in skipped}
    # flip y so the picture is the right way up
    fy = lambda y: y0 + h - (y - y0)  # noqa: E731
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.17g} {y0:.17g} {w:.17g} {h:.17g}">']
    sw = 0.002 * max(w, h)
    for t in tris:
        pts = " ".join(f"{C[v, 0]:.17g},{fy(C[v, 1]):.17g}" for v in t)
        fill = "#f4a582" if tuple(sorted(int(v) for v in t)) in skipped else "none"
        out.append(f'<polygon points="{pts}" fill="{fill}" stroke="black" stroke-width="{sw:.6g}"/>')
    for a, b in np.asarray(subsegments, dtype=np.int64).reshape(-1, 2):
        out.append(f'<line x1="{C[a, 0]:.17g}" y1="{fy(C[a, 1]):.17g}" x2="{C[b, 0]:.17g}" '
                   f'y2="{fy(C[b, 1]):.17g}" stroke="black" stroke-width="{3 * sw:.6g}"/>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


# -- driver --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frontmesh", description=__doc__)
    ap.add_argument("input", help=".poly file")
    ap.add_argument("--angle", type=float, default=25.0, help="target minimum angle in degrees")
    ap.add_argument("--mode", choices=("truly", "constrained"), default="truly")
    ap.add_argument("--nstar", type=int, default=None, help="override the automatic n*")
    ap.add_argument("--strict", action="store_true", help="abort on the first encroachment")
    ap.add_argument("--svg", type=Path, default=None)
    ap.add_argument("--report", type=Path, default=None, help="report path (default <stem>.report.json)")
    ap.add_argument("-o", "--output", type=Path, default=None,
                    help="output prefix (default: input path without suffix)")
    ap.add_argument("--dump-lfs", action="store_true", help="write <stem>.lfs.csv and <stem>.mapping.json")
    ap.add_argument("--dump-events", action="store_true", help="write <stem>.events.jsonl")
    ap.add_argument("--max-insertions", type=int, default=1_000_000)
    ap.add_argument("--threads", type=int, default=1)
    return ap


def _configure_logging():
    level = os.environ.get("FRONTMESH_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _sibling(prefix: Path, suffix: str) -> Path:
    return prefix.with_name(prefix.name + suffix)


def _write_dumps(prefix: Path, res, events: bool, lfs: bool):
    if lfs:
        chunks = []
        for i, f in enumerate(res.fsfs):
            body = sample_csv(f).splitlines()
            chunks.append(f"# segment {i}\n" + "\n".join(body) + "\n")
        _sibling(prefix, ".lfs.csv").write_text("".join(chunks))
        dump = [mapping_dump(m, s) for m, s in zip(res.mappings, res.plan.segments)]
        _sibling(prefix, ".mapping.json").write_text(
            json.dumps(dump, indent=2, sort_keys=True, default=float) + "\n")
    if events:
        with _sibling(prefix, ".events.jsonl").open("w") as fh:
            for e in res.stats.events:
                fh.write(json.dumps(e, sort_keys=True) + "\n")


def run(args) -> int:
    if not 0.0 < args.angle < 30.0:
        print("error: theta must be below 30 degrees", file=sys.stderr)
        return EXIT_INPUT
    src = Path(args.input)
    try:
        pslg = read_poly(src)
        res = mesh_pslg(pslg, args.angle, args.mode, nstar=args.nstar, strict=args.strict,
                        max_insertions=args.max_insertions, threads=args.threads,
                        log_events=args.dump_events)
    except (OSError, PolyParseError, ValidationError, DegenerateInputError, ConfigError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NonTerminationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONTERMINATION
    except (EncroachmentError, RecoveryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY

    prefix = args.output if args.output is not None else src.with_suffix("")
    mesh, refined = res.mesh, res.refined
    nsub = refined.pslg.n_vertices
    markers = [1 if v < nsub else 0 for v in range(mesh.n_vertices)]
    _sibling(prefix, ".node").write_text(format_node(mesh.coords(), markers))
    _sibling(prefix, ".ele").write_text(format_ele(mesh.triangles()))
    report = args.report if args.report is not None else _sibling(prefix, ".report.json")
    report.write_text(res.report.to_json())
    if args.svg is not None:
        emit_svg(mesh, args.svg, refined.pslg.segments, mesh.skipped)
    _write_dumps(prefix, res, args.dump_events, args.dump_lfs)

    r = res.report
    log.info("%d vertices, %d triangles, min angle %.3f deg (excluding skips)",
             r.vertex_count, r.triangle_count, math.degrees(r.min_angle_excluding_skipped))
    if not r.passed:
        print("error: verification failed", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def main(argv=None) -> int:
    _configure_logging()
    return run(build_parser().parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
