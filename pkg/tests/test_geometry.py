from fractions import Fraction
import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stackel.geometry import (GeometryError, Hull2D, cross, decompose, hull_merge, max_y_point,
                              min_x, minkowski_weighted, restrict_halfspace, split_minkowski)

coords = st.integers(-6, 6).map(Fraction)
points = st.tuples(coords, coords)


def jarvis(pts):
    """Gift-wrapping hull: extreme points only, as a set."""
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return set(pts)
    out = set()
    start = pts[0]
    cur = start
    while True:
        out.add(cur)
        cand = pts[0] if pts[0] != cur else pts[1]
        for p in pts:
            if p == cur:
                continue
            turn = cross(cur, cand, p)
            if turn < 0 or (turn == 0 and _dist(cur, p) > _dist(cur, cand)):
                cand = p
        cur = cand
        if cur == start:
            break
    return out


def _dist(a, b):
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def is_ccw(h: Hull2D) -> bool:
    v = h.vertices
    if len(v) < 3:
        return True
    return all(cross(v[i], v[(i + 1) % len(v)], v[(i + 2) % len(v)]) > 0 for i in range(len(v)))


def test_merge_two_points_gives_segment():
    h = hull_merge([Hull2D.point(0, 0), Hull2D.point(1, 1)])
    assert set(h.vertices) == {(0, 0), (1, 1)}


def test_merge_gives_triangle():
    h = hull_merge([Hull2D.from_points([(0, 0), (2, 0)]), Hull2D.point(1, 5)])
    assert set(h.vertices) == {(0, 0), (2, 0), (1, 5)}


@given(st.lists(points, min_size=1, max_size=100))
def test_merge_of_points_matches_gift_wrapping(pts):
    h = hull_merge([Hull2D.point(x, y) for x, y in pts])
    assert set(h.vertices) == jarvis(pts)
    assert len(set(h.vertices)) == len(h.vertices)
    assert is_ccw(h)


def test_merge_of_100_random_points():
    import random
    rng = random.Random(5)
    pts = [(Fraction(rng.randint(-50, 50)), Fraction(rng.randint(-50, 50))) for _ in range(100)]
    assert set(hull_merge([Hull2D.point(*p) for p in pts]).vertices) == jarvis(pts)


def test_restrict_segment():
    h = restrict_halfspace(Hull2D.from_points([(0, 2), (2, 0)]), 1)
    assert set(h.vertices) == {(1, 1), (2, 0)}


def test_restrict_keeps_point_right_of_cut():
    assert restrict_halfspace(Hull2D.point(3, 1), 0).vertices == ((3, 1),)


def test_restrict_can_empty():
    tri = Hull2D.from_points([(0, 0), (2, 0), (1, 5)])
    assert restrict_halfspace(tri, 3).is_empty


@given(st.lists(points, min_size=1, max_size=12), coords)
def test_restrict_matches_clipping(pts, xmin):
    h = Hull2D.from_points(pts)
    got = restrict_halfspace(h, xmin)
    v = h.vertices
    keep = [p for p in v if p[0] >= xmin]
    edges = list(zip(v, v[1:] + v[:1])) if len(v) > 1 else []
    for a, b in edges:
        if (a[0] - xmin) * (b[0] - xmin) < 0:
            t = (xmin - a[0]) / (b[0] - a[0])
            keep.append((xmin, a[1] + t * (b[1] - a[1])))
    assert set(got.vertices) == jarvis(keep)


def test_minkowski_points():
    h = minkowski_weighted([(Hull2D.point(1, 1), Fraction(1, 2)), (Hull2D.point(3, 5), Fraction(1, 2))])
    assert h.vertices == ((2, 3),)


def test_minkowski_segment_and_point():
    seg = Hull2D.from_points([(0, 0), (2, 0)])
    h = minkowski_weighted([(seg, Fraction(1, 2)), (Hull2D.point(0, 4), Fraction(1, 2))])
    assert set(h.vertices) == {(0, 2), (1, 2)}


@given(st.lists(points, min_size=1, max_size=6), st.lists(points, min_size=1, max_size=6),
       st.integers(1, 5))
def test_minkowski_matches_all_pairs(a, b, k):
    w = Fraction(k, 6)
    ha, hb = Hull2D.from_points(a), Hull2D.from_points(b)
    got = minkowski_weighted([(ha, w), (hb, 1 - w)])
    pairs = [(w * p[0] + (1 - w) * q[0], w * p[1] + (1 - w) * q[1])
             for p in ha.vertices for q in hb.vertices]
    assert set(got.vertices) == jarvis(pairs)
    assert is_ccw(got)


def test_decompose_segment_midpoint():
    h = Hull2D.from_points([(0, 0), (2, 2)])
    d = decompose(h, (1, 1))
    assert d.alpha == Fraction(1, 2)
    assert {d.point_a, d.point_b} == {(0, 0), (2, 2)}


def test_decompose_vertex_is_single():
    h = Hull2D.from_points([(0, 0), (2, 2)])
    assert decompose(h, (2, 2)).single


def test_decompose_rejects_interior():
    with pytest.raises(GeometryError):
        decompose(Hull2D.from_points([(0, 0), (4, 0), (0, 4)]), (1, 1))


@given(st.lists(points, min_size=1, max_size=8), st.integers(0, 30))
def test_decompose_recombines(pts, pick):
    h = Hull2D.from_points(pts)
    v = h.vertices
    a, b = v[pick % len(v)], v[(pick + 1) % len(v)]
    target = ((a[0] + 2 * b[0]) / 3, (a[1] + 2 * b[1]) / 3)
    d = decompose(h, target)
    assert tuple(d.alpha * p + (1 - d.alpha) * q for p, q in zip(d.point_a, d.point_b)) == target


@given(st.lists(points, min_size=1, max_size=5), st.lists(points, min_size=1, max_size=5),
       st.integers(1, 5), st.integers(0, 40))
def test_split_minkowski_recombines(a, b, k, pick):
    w = Fraction(k, 6)
    parts = [(Hull2D.from_points(a), w), (Hull2D.from_points(b), 1 - w)]
    total = minkowski_weighted(parts)
    v = total.vertices
    p, q = v[pick % len(v)], v[(pick + 1) % len(v)]
    target = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
    pieces = split_minkowski(parts, target)
    assert all(parts[i][0].contains(pieces[i]) for i in range(2))
    assert tuple(w * x + (1 - w) * y for x, y in zip(pieces[0], pieces[1])) == target


def test_extremes():
    tri = Hull2D.from_points([(0, 0), (2, 0), (1, 5)])
    assert max_y_point(tri) == (1, 5) and min_x(tri) == 0
    assert max_y_point(Hull2D.from_points([(1, 2), (3, 1)])) == (1, 2)
    pt = Hull2D.point(4, 7)
    assert max_y_point(pt) == (4, 7) and min_x(pt) == 4


def test_max_y_ties_prefer_larger_x():
    assert max_y_point(Hull2D.from_points([(0, 3), (2, 3), (1, 0)])) == (2, 3)
