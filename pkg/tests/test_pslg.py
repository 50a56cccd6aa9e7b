import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frontmesh import corpus_path, load_corpus
from frontmesh.pslg import (DuplicateVertex, PolyParseError, ProperIntersection, Pslg,
                            ValidationError, VertexOnSegment, ZeroLengthSegment,
                            angle_between_adjacent, check, classify_small_angles, format_poly,
                            parse_poly, small_angle_threshold, validate)
from helpers import unit_square, wedge

SQUARE = """# unit square
4 2 0 0
1 0 0
2 1 0
3 1 1
4 0 1
4 0
1 1 2
2 2 3
3 3 4
4 4 1
0
"""


def test_parse_square():
    p = parse_poly(SQUARE)
    assert (p.n_vertices, p.n_segments, len(p.holes)) == (4, 4, 0)
    assert p.segments.tolist() == [[0, 1], [1, 2], [2, 3], [3, 0]]


def test_parse_zero_based_and_bytes():
    text = SQUARE.replace("\n1 0 0", "\n0 0 0").replace("\n2 1 0", "\n1 1 0") \
        .replace("\n3 1 1", "\n2 1 1").replace("\n4 0 1", "\n3 0 1")
    text = text.replace("1 1 2\n2 2 3\n3 3 4\n4 4 1", "0 0 1\n1 1 2\n2 2 3\n3 3 0")
    assert parse_poly(text.encode()).segments.tolist() == parse_poly(SQUARE).segments.tolist()


def test_parse_empty_segments():
    with pytest.raises(ValidationError, match="PSLG must contain at least one segment"):
        parse_poly("3 2 0 0\n1 0 0\n2 1 0\n3 0 1\n0 0\n")


def test_parse_square_hole_corpus():
    p = load_corpus("square_hole")
    assert (p.n_vertices, p.n_segments, len(p.holes)) == (8, 8, 1)
    assert p.holes.tolist() == [[0.5, 0.5]]


@pytest.mark.parametrize("text, line", [
    ("4 2 0 0\n1 0 0\n2 1 0\n", 4),                      # truncated
    ("2 2 0 0\n1 0 0\n1 1 0\n1 0\n1 1 2\n", 3),          # duplicate id
    ("2 2 0 0\n1 0 0\n2 1 0\n1 0\n1 1 3\n", 5),          # endpoint out of range
    ("2 2 0 0\n1 0 0\n2 x 0\n1 0\n1 1 2\n", 3),          # not a number
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(PolyParseError) as exc:
        parse_poly(text)
    assert exc.value.line == line


def test_attributes_and_markers_parsed():
    p = parse_poly("2 2 1 1\n1 0 0 9.5 3\n2 1 0 9.5 4\n1 1\n1 1 2 7\n")
    assert p.vertex_markers.tolist() == [3, 4] and p.markers.tolist() == [7]


def test_format_roundtrip():
    for name in ("square", "square_hole", "wedge20"):
        p = load_corpus(name)
        q = parse_poly(format_poly(p))
        assert np.array_equal(p.vertices, q.vertices)
        assert np.array_equal(p.segments, q.segments)
        assert np.array_equal(p.holes, q.holes)


def test_validate_examples():
    assert validate(unit_square()) == []
    cross = Pslg.from_lists([(0, 0), (1, 1), (1, 0), (0, 1)], [(0, 1), (2, 3)])
    assert validate(cross) == [ProperIntersection(0, 1)]
    dup = Pslg.from_lists([(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)], [(0, 1), (1, 2), (2, 3)])
    assert DuplicateVertex(0, 4) in validate(dup)


def test_validate_other_violations():
    assert ZeroLengthSegment(0) in validate(Pslg.from_lists([(0, 0), (1, 0)], [(0, 0)]))
    t = Pslg.from_lists([(0, 0), (2, 0), (1, 0), (1, 1)], [(0, 1), (2, 3)])
    assert VertexOnSegment(2, 0) in validate(t)
    with pytest.raises(ValidationError):
        check(t)


def test_validate_is_idempotent():
    p = Pslg.from_lists([(0, 0), (1, 1), (1, 0), (0, 1)], [(0, 1), (2, 3)])
    before = p.vertices.copy()
    assert validate(p) == validate(p)
    assert np.array_equal(before, p.vertices)


def test_angle_between_adjacent_examples():
    assert angle_between_adjacent(unit_square(), 0, 1) == pytest.approx(math.pi / 2)
    assert angle_between_adjacent(wedge(20), 0, 2) == pytest.approx(math.radians(20), rel=1e-14)
    line = Pslg.from_lists([(0, 0), (1, 0), (2, 0)], [(0, 1), (1, 2)])
    assert angle_between_adjacent(line, 0, 1) == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        angle_between_adjacent(unit_square(), 0, 2)


def test_classify_examples():
    recs = classify_small_angles(wedge(20), 1.2)
    assert [r.segment_pair for r in recs if r.apex == 0] == [(0, 2)]
    assert math.degrees(small_angle_threshold(1.2)) == pytest.approx(65.38, abs=5e-3)
    assert math.degrees(small_angle_threshold(1.05)) == pytest.approx(61.56, abs=5e-3)
    assert not [r for r in classify_small_angles(wedge(80), 1.05) if r.apex == 0]
    assert classify_small_angles(unit_square(), 1.2) == []


def test_threshold_at_one_is_sixty_degrees():
    assert small_angle_threshold(1.0) == pytest.approx(math.pi / 3, rel=1e-15)
    eq = Pslg.from_lists([(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)], [(0, 1), (1, 2), (2, 0)])
    assert len(classify_small_angles(eq, 1.0 + 1e-9)) == 3
    assert [r for r in classify_small_angles(wedge(61), 1.0) if r.apex == 0] == []
    assert [r.apex for r in classify_small_angles(wedge(59), 1.0)] == [0]


@given(st.floats(1.0, 50.0), st.floats(1.0, 50.0))
def test_classification_monotone_in_R(r1, r2):
    lo, hi = sorted((r1, r2))
    assert small_angle_threshold(lo) <= small_angle_threshold(hi)
    p = load_corpus("wedge20")
    small = {r.segment_pair for r in classify_small_angles(p, lo)}
    assert small <= {r.segment_pair for r in classify_small_angles(p, hi)}


def test_corpus_paths_exist():
    for name in ("square", "square_hole", "wedge20"):
        assert corpus_path(name).is_file()
