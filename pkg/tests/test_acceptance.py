"""Acceptance criteria, each at its stated tolerance.

Every check records a verdict; the terminal summary prints one PASS/FAIL line
per criterion. Checks that a faithful implementation cannot meet are marked
``xfail(strict=True)``: they run, print FAIL, and would flip the suite red if
they ever started passing.
"""
import math

import mpmath as mp
import numpy as np
import pytest

from conftest import record
from frontmesh import CORPUS, load_corpus
from frontmesh.cdt import delaunay_violations, pslg_recovered
from frontmesh.cli import main
from frontmesh.lfs import all_feature_sizes, feature_size, lfs_eval, lfs_oracle
from frontmesh.pipeline import mesh_pslg, prepare, split_and_triangulate
from frontmesh.pslg import angle_between_adjacent, small_angle_threshold, validate
from frontmesh.splitter import bounds_for, reference_length, required_astar, solve_mapping, split
from helpers import isolated_segment, random_adjacent_pair, random_holed_polygon

T0 = 2 * math.log(2)


# 1 -----------------------------------------------------------------------------------

@pytest.mark.parametrize("length", [1e-6, 0.37, 1.0, 7.0, 123.456, 1e6])
def test_c01_reference_length_and_split(length):
    p = isolated_segment(length)
    fsf = feature_size(p, 0)
    m = solve_mapping(fsf)
    err_t = abs(reference_length(m) - T0)
    _, plan = split(p, bounds_for(4, T0), [m], [fsf])
    want = np.array([1 - 2 ** -0.5, 0.5, 2 ** -0.5]) * length
    err_x = float(np.abs(plan.segments[0].x - want).max()) / length
    ok = err_t <= 1e-9 and err_x <= 1e-9 and plan.segments[0].n == 4
    record(1, ok, f"l={length:g}: |t*-2ln2|={err_t:.1e}, split err/l={err_x:.1e}")
    assert ok


# 2 -----------------------------------------------------------------------------------

def test_c02_bound_law_random_holed_polygons():
    rng = np.random.default_rng(2024)
    worst_lo, worst_hi, count = math.inf, -math.inf, 0
    failures = 0
    for _ in range(24):
        pslg = random_holed_polygon(rng)
        assert validate(pslg) == []
        fsfs, maps, b = prepare(pslg, 25.0, "truly")
        refined, _ = split(pslg, b, maps, fsfs)
        V, S = refined.pslg.vertices, refined.pslg.segments
        lfs = np.array([lfs_oracle(pslg, v) for v in V])
        L = np.hypot(*(V[S[:, 0]] - V[S[:, 1]]).T)
        ratios = np.concatenate([lfs[S[:, 0]] / L, lfs[S[:, 1]] / L])
        eps = 1e-6 * b.B_star
        failures += int(np.sum((ratios < b.A_star - eps) | (ratios > b.B_star + eps)))
        worst_lo = min(worst_lo, float((ratios - b.A_star).min()))
        worst_hi = max(worst_hi, float((ratios - b.B_star).max()))
        count += len(ratios)
    ok = failures == 0
    record(2, ok, f"24 polygons, {count} endpoint ratios, min(ratio-A*)={worst_lo:.3f}, "
                  f"max(ratio-B*)={worst_hi:.3f}")
    assert ok


# 3 -----------------------------------------------------------------------------------

def test_c03_bounds_for_anchor():
    b = bounds_for(10, T0)
    ok = abs(b.A_star - 5.49213) <= 1e-5 and abs(b.B_star - 8.21348) <= 1e-5
    record(3, ok, f"bounds_for(10, 2ln2)=({b.A_star:.6f}, {b.B_star:.6f})")
    assert ok


def test_c03_required_astar_independent_value():
    # exact evaluation of the same inequality, 30 significant digits
    mp.mp.dps = 30
    th = mp.radians(20)
    a = 1 / (2 * mp.sin(th))
    exact = (1 / mp.log(2) + 2 + a / (a - 1) + 2) / (mp.sqrt(2) - 1)
    got = required_astar(math.radians(20), "truly")
    ok = abs(got - float(exact)) <= 1e-9
    record(3, ok, f"required_astar(20deg, truly)={got:.6f}, 30-digit evaluation {mp.nstr(exact, 10)}")
    assert ok


@pytest.mark.xfail(strict=True, reason="the stated anchor 20.782 carries an arithmetic slip; "
                                       "the exact value is 20.78072, 1.3e-3 away")
def test_c03_required_astar_stated_anchor():
    got = required_astar(math.radians(20), "truly")
    ok = abs(got - 20.782) <= 1e-3
    record(3, ok, f"stated anchor 20.782: |{got:.5f} - 20.782| = {abs(got - 20.782):.2e} vs 1e-3")
    assert ok


# 4 / 5 / 12 --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def holed_runs():
    pslg = load_corpus("square_hole")
    return {mode: mesh_pslg(pslg, 25.0, mode) for mode in ("truly", "constrained")}


def _min_angle_all(res):
    from frontmesh import _kernels
    ang = _kernels.triangle_angles(np.asarray(res.mesh.px), np.asarray(res.mesh.py), res.mesh.triangles())
    return float(ang.min())


def test_c04_truly_end_to_end(holed_runs):
    res = holed_runs["truly"]
    r = res.report
    viol = delaunay_violations(res.mesh, "truly")
    checks = {
        "insertions<1e6": res.stats.insertions < 1_000_000,
        "incircle oracle": not viol,
        "subsegments present": pslg_recovered(res.mesh, res.refined.pslg),
        "zero encroachment": r.encroachment_events == 0 and res.stats.encroachment_events == 0,
        "min angle>=25": _min_angle_all(res) >= math.radians(25),
        "size ratio": r.worst_size_ratio <= r.size_ratio_bound,
    }
    ok = all(checks.values())
    record(4, ok, f"n*={r.n_star}, V={r.vertex_count}, min angle {math.degrees(_min_angle_all(res)):.4f}, "
                  f"ratio {r.worst_size_ratio:.2f} <= {r.size_ratio_bound:.2f}"
                  + "".join(f"; failed {k}" for k, v in checks.items() if not v))
    assert ok, checks


def test_c05_constrained_end_to_end(holed_runs):
    res, truly = holed_runs["constrained"], holed_runs["truly"]
    r = res.report
    checks = {
        "terminated": res.stats.insertions < 1_000_000,
        "visibility oracle": not delaunay_violations(res.mesh, "constrained"),
        "V<=truly": r.vertex_count <= truly.report.vertex_count,
    }
    ok = all(checks.values())
    record(5, ok, f"constrained V={r.vertex_count} vs truly V={truly.report.vertex_count}")
    assert ok, checks


def test_c12_determinism(tmp_path):
    import shutil
    from frontmesh import corpus_path
    src = tmp_path / "square_hole.poly"
    shutil.copy(corpus_path("square_hole"), src)
    blobs = []
    for k in range(2):
        prefix = tmp_path / f"run{k}"
        assert main([str(src), "--angle", "25", "--mode", "truly", "-o", str(prefix)]) == 0
        blobs.append([(tmp_path / f"run{k}{s}").read_bytes() for s in (".node", ".ele", ".report.json")])
    ok = blobs[0] == blobs[1]
    record(12, ok, f"node/ele/report byte-identical ({sum(map(len, blobs[0]))} bytes)")
    assert ok


# 6 -----------------------------------------------------------------------------------

@pytest.mark.parametrize("mode", ["truly", "constrained"])
@pytest.mark.parametrize("theta", [15.0, 20.0, 25.0, 28.0])
@pytest.mark.parametrize("name", CORPUS)
def test_c06_theta_sweep(name, theta, mode):
    res = mesh_pslg(load_corpus(name), theta, mode)
    ok = res.stats.insertions < 1_000_000
    record(6, ok, "" if ok else f"{name} {mode} {theta} did not terminate")
    assert ok


@pytest.mark.parametrize("mode", ["truly", "constrained"])
def test_c06_thirty_rejected(mode):
    with pytest.raises(ValueError, match="theta must be below 30 degrees"):
        mesh_pslg(load_corpus("square"), 30.0, mode)
    record(6, True, f"30 deg rejected in {mode} mode")


# 7 -----------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def wedge_levels():
    pslg = load_corpus("wedge20")
    base = mesh_pslg(pslg, 25.0, "truly")
    levels = [base]
    for k in (1, 2, 3):
        levels.append(mesh_pslg(pslg, 25.0, "truly", nstar=base.bounds.n_star * 2 ** k))
    return levels


def _apex_record(res):
    (rec,) = [s for s in res.report.small_angles if s.apex == 0]
    return rec


def _non_skipped_min(res):
    return res.report.min_angle_excluding_skipped


def test_c07_terminates_and_non_skipped_angles(wedge_levels):
    res = wedge_levels[0]
    ok = res.stats.insertions < 1_000_000 and _non_skipped_min(res) >= math.radians(25)
    record(7, ok, f"non-skipped min {math.degrees(_non_skipped_min(res)):.4f} deg, "
                  f"{res.report.skipped_triangles} skipped")
    assert ok


@pytest.mark.xfail(strict=True, reason="the stated pre-limit bound uses (1+R)/R where the derivation "
                                       "gives 1+R; the realized split violates it (see ledger)")
def test_c07_skipped_min_angle_stated_bound(wedge_levels):
    res = wedge_levels[0]
    rec = _apex_record(res)
    bound = rec.min_angle_bound - math.radians(0.5)
    ok = rec.realized_min >= bound
    record(7, ok, f"skipped min {math.degrees(rec.realized_min):.3f} vs stated bound-0.5 "
                  f"{math.degrees(bound):.3f} deg (R={res.bounds.R:.4f})")
    assert ok


def test_c07_skipped_min_angle_derived_bound(wedge_levels):
    # the same triangle inequality chain, carried through without the slip: |xs| <= (1+R)|xp|
    for res in wedge_levels:
        rec = _apex_record(res)
        R, phi = res.bounds.R, rec.phi
        derived = math.atan(math.sin(phi) / ((1 + R) - math.cos(phi)))
        assert rec.realized_min >= derived - math.radians(0.5)


def test_c07_doubling_trend(wedge_levels):
    Rs = [lv.bounds.R for lv in wedge_levels]
    final_max = math.degrees(_apex_record(wedge_levels[-1]).realized_max)
    limit = math.degrees(_apex_record(wedge_levels[-1]).max_angle_bound)
    ok = all(b < a for a, b in zip(Rs, Rs[1:])) and final_max <= limit + 3.0
    ok = ok and all(_non_skipped_min(lv) >= math.radians(25) for lv in wedge_levels)
    record(7, ok, "R " + " > ".join(f"{r:.4f}" for r in Rs)
                  + f"; final max across apex {final_max:.3f} <= {limit:.0f}+3")
    assert ok


# 8 -----------------------------------------------------------------------------------

SHARP_QUAD = [(0.992, 0.043), (0.945, 0.966), (0.902, 0.715), (0.827, 0.935)]


def _recover_from_coarse(pslg):
    fsfs, maps, _ = prepare(pslg, 25.0, "truly")
    coarse = bounds_for(2, min(m.t_star for m in maps), allow_nonpositive=True)
    refined, _, mesh, bounds, doublings = split_and_triangulate(pslg, fsfs, maps, coarse, "truly")
    return pslg_recovered(mesh, refined.pslg), doublings, bounds.n_star


def test_c08_recovery_loop():
    from frontmesh.pslg import Pslg
    auto = mesh_pslg(load_corpus("wedge20"), 25.0, "truly")
    ok_w, d_w, n_w = _recover_from_coarse(load_corpus("wedge20"))
    # a quadrilateral with 7.6 and 8.3 degree corners, where n* = 2 loses subsegments
    quad = Pslg.from_lists(SHARP_QUAD, [(0, 1), (1, 2), (2, 3), (3, 0)])
    ok_q, d_q, n_q = _recover_from_coarse(quad)
    ok = (auto.report.pslg_conforming and auto.doublings <= 20 and ok_w and d_w <= 20
          and ok_q and 0 < d_q <= 20)
    record(8, ok, f"wedge20: auto n* recovered after {auto.doublings} doublings, from n*=2 after {d_w}; "
                  f"sharp quadrilateral from n*=2 recovered after {d_q} doublings (n*={n_q})")
    assert ok


# 9 -----------------------------------------------------------------------------------

def test_c09_adjacent_pair_distance():
    rng = np.random.default_rng(99)
    done, checked, bad = 0, 0, 0
    while done < 100:
        pslg = random_adjacent_pair(rng)
        fsfs, maps, b = prepare(pslg, 25.0, "truly")
        ang = angle_between_adjacent(pslg, 0, 1)
        if ang <= small_angle_threshold(b.R):
            continue
        refined, _ = split(pslg, b, maps, fsfs)
        V = refined.pslg.vertices
        vseg = refined.vertex_segment
        for s, other in ((0, 1), (1, 0)):
            mine = [v for v in range(len(V)) if vseg[v] == s]
            theirs = [v for v in range(len(V)) if vseg[v] == other]
            far = [int(x) for x in pslg.segments[other] if x != 0]
            for v in mine:
                # apex-side subsegment: the neighbour of v nearer the shared vertex
                d_apex = np.hypot(*V[v])
                nearer = [u for u in mine if np.hypot(*V[u]) < d_apex] + [0]
                apex_side = min(np.hypot(*(V[v] - V[u])) for u in nearer)
                for w in theirs + far:
                    checked += 1
                    bad += int(not np.hypot(*(V[v] - V[w])) > apex_side)
        done += 1
    ok = bad == 0
    record(9, ok, f"100 pairs, {checked} vertex pairs, {bad} violations")
    assert ok


# 10 / 11 -----------------------------------------------------------------------------

def test_c10_envelope_vs_oracle():
    worst = 0.0
    for name in CORPUS:
        pslg = load_corpus(name)
        for i, fsf in enumerate(all_feature_sizes(pslg)):
            xs = np.linspace(0.0, fsf.segment_length, 1000)
            got = lfs_eval(fsf, xs)
            a, b = pslg.segment_points(i)
            u = (b - a) / fsf.segment_length
            for x, g in zip(xs, got):
                ref = lfs_oracle(pslg, a + x * u, segment=i)
                worst = max(worst, abs(g - ref) / ref)
    ok = worst <= 1e-9
    record(10, ok, f"max relative error {worst:.2e}")
    assert ok


def test_c11_ode_residual():
    worst = 0.0
    for name in CORPUS:
        for fsf in all_feature_sizes(load_corpus(name)):
            m = solve_mapping(fsf)
            for p in m.pieces:
                t = np.linspace(*p.t_interval, 100)
                y = np.clip(p.y(t), 0.0, fsf.segment_length)
                F = lfs_eval(fsf, y)
                worst = max(worst, float((np.abs(p.dy(t) - F) / F).max()))
    ok = worst <= 1e-8
    record(11, ok, f"max |M'-F(M)|/F = {worst:.2e}")
    assert ok
