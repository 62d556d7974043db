"""Exact planar convex sets of utility points.

Points are ``(x, y)`` with x the follower utility and y the leader utility.
A :class:`Hull2D` stores only extreme points, counterclockwise, starting at
the lexicographically smallest vertex. Points and segments are ordinary hulls;
the empty hull has no vertices.
"""

from __future__ import annotations

import functools
import heapq
from dataclasses import dataclass
from typing import Any, Sequence

from .numeric import Fraction

Point = tuple[Fraction, Fraction]


class GeometryError(ValueError):
    pass


def cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _pt(p) -> Point:
    return (Fraction(p[0]), Fraction(p[1]))


@dataclass(frozen=True)
class Hull2D:
    vertices: tuple[Point, ...]
    provenance: tuple[Any, ...] = ()

    def __post_init__(self):
        verts = tuple(_pt(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if not self.provenance:
            object.__setattr__(self, "provenance", tuple((None, i) for i in range(len(verts))))
        elif len(self.provenance) != len(verts):
            raise GeometryError("provenance must tag every vertex")

    @classmethod
    def point(cls, x, y, tag=None) -> "Hull2D":
        return cls(((x, y),), ((tag, 0),))

    @classmethod
    def from_points(cls, points, tags=None) -> "Hull2D":
        """Hull of arbitrary points (sorts first; O(n log n))."""
        pts = [_pt(p) for p in points]
        tags = list(tags) if tags is not None else [(None, i) for i in range(len(pts))]
        order = sorted(range(len(pts)), key=lambda i: pts[i])
        return _monotone_chain([(pts[i], tags[i]) for i in order])

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def __len__(self):
        return len(self.vertices)

    def edges(self):
        n = len(self.vertices)
        if n < 2:
            return []
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def contains(self, p) -> bool:
        """Closed containment test."""
        p = _pt(p)
        v = self.vertices
        if not v:
            return False
        if len(v) == 1:
            return p == v[0]
        if len(v) == 2:
            return _on_segment(v[0], v[1], p)
        return all(cross(a, b, p) >= 0 for a, b in self.edges())

    def on_boundary(self, p) -> bool:
        p = _pt(p)
        if len(self.vertices) <= 2:
            return self.contains(p)
        return any(_on_segment(a, b, p) for a, b in self.edges())


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    if cross(a, b, p) != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def _monotone_chain(items: list[tuple[Point, Any]]) -> Hull2D:
    """Andrew's monotone chain over lexicographically sorted (point, tag) items."""
    dedup: list[tuple[Point, Any]] = []
    for p, t in items:
        if not dedup or dedup[-1][0] != p:
            dedup.append((p, t))
    if len(dedup) <= 2:
        return Hull2D(tuple(p for p, _ in dedup), tuple(t for _, t in dedup))

    def half(seq):
        chain: list[tuple[Point, Any]] = []
        for item in seq:
            while len(chain) >= 2 and cross(chain[-2][0], chain[-1][0], item[0]) <= 0:
                chain.pop()
            chain.append(item)
        return chain

    lower = half(dedup)
    upper = half(reversed(dedup))
    ring = lower[:-1] + upper[:-1]
    return Hull2D(tuple(p for p, _ in ring), tuple(t for _, t in ring))


def _sorted_chains(h: Hull2D, source) -> list[list[tuple[Point, int, Any]]]:
    """Split a canonical hull into its two lexicographically sorted chains."""
    v = h.vertices
    if not v:
        return []
    top = max(range(len(v)), key=lambda i: v[i])
    lower = [(v[i], i) for i in range(top + 1)]
    upper = [(v[i], i) for i in range(top, len(v))] + [(v[0], 0)]
    upper.reverse()
    return [[(p, i, (source, i)) for p, i in chain] for chain in (lower, upper)]


def hull_merge(hulls: Sequence[Hull2D], sources: Sequence[Any] | None = None) -> Hull2D:
    """Convex hull of the union of already-canonical hulls.

    Each input splits into two sorted chains, so a k-way merge followed by one
    monotone-chain sweep suffices. Vertex provenance is ``(source, index)``
    where ``index`` is the vertex position in the contributing hull.
    """
    if not hulls:
        raise GeometryError("hull_merge needs at least one hull")
    sources = list(range(len(hulls))) if sources is None else list(sources)
    streams = []
    for rank, (h, src) in enumerate(zip(hulls, sources)):
        for chain in _sorted_chains(h, src):
            streams.append([(p, rank, tag) for p, _, tag in chain])
    merged = heapq.merge(*streams, key=lambda item: (item[0], item[1]))
    return _monotone_chain([(p, tag) for p, _, tag in merged])


def restrict_halfspace(h: Hull2D, xmin) -> Hull2D:
    """Intersection of ``h`` with ``{x >= xmin}``; empty hull if disjoint.

    New vertices where edges cross ``x = xmin`` are tagged ``(source, "cut")``
    with the source of the edge's first endpoint.
    """
    xmin = Fraction(xmin)
    v = h.vertices
    if not v:
        return h
    if all(p[0] >= xmin for p in v):
        return h
    if all(p[0] < xmin for p in v):
        return Hull2D(())
    out: list[tuple[Point, Any]] = []
    n = len(v)
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        ta = h.provenance[i]
        if a[0] >= xmin:
            out.append((a, ta))
        if (a[0] < xmin) != (b[0] < xmin):
            t = (xmin - a[0]) / (b[0] - a[0])
            cut = (xmin, a[1] + t * (b[1] - a[1]))
            out.append((cut, (ta[0] if isinstance(ta, tuple) else ta, "cut")))
    out.sort(key=lambda item: item[0])
    return _monotone_chain(out)


def max_y_point(h: Hull2D) -> Point:
    """Vertex of maximal y; ties go to the larger x."""
    if not h.vertices:
        raise GeometryError("max_y_point of an empty hull")
    return max(h.vertices, key=lambda p: (p[1], p[0]))


def min_x(h: Hull2D) -> Fraction:
    if not h.vertices:
        raise GeometryError("min_x of an empty hull")
    return min(p[0] for p in h.vertices)


# --------------------------------------------------------------------------
# weighted Minkowski sums


def _angle_cmp(a: Point, b: Point) -> int:
    """Order edge directions by angle measured counterclockwise from (0, -1)."""
    def half(d):
        return 0 if d[0] > 0 or (d[0] == 0 and d[1] > 0) else 1

    ha, hb = half(a), half(b)
    if ha != hb:
        return ha - hb
    c = a[0] * b[1] - a[1] * b[0]
    return -1 if c > 0 else (1 if c < 0 else 0)


_angle_key = functools.cmp_to_key(_angle_cmp)


def minkowski_weighted(parts: Sequence[tuple[Hull2D, Any]]) -> Hull2D:
    """``{sum w_i p_i : p_i in H_i}`` for weights that are positive and sum to 1.

    Edges of every part are already in angular order, so the sum is a k-way
    merge of edge lists. Parallel edges are fused. Each output vertex is tagged
    ``("mix", (i_1, ..., i_k))`` with the vertex index used from every part.
    """
    if not parts:
        raise GeometryError("minkowski_weighted needs at least one part")
    weights = [Fraction(w) for _, w in parts]
    if any(w <= 0 for w in weights):
        raise GeometryError("Minkowski weights must be positive")
    if sum(weights) != 1:
        raise GeometryError(f"Minkowski weights must sum to 1, got {sum(weights)}")
    if any(h.is_empty for h, _ in parts):
        return Hull2D(())

    idx = [0] * len(parts)
    start = (
        sum((w * h.vertices[0][0] for (h, _), w in zip(parts, weights)), Fraction(0)),
        sum((w * h.vertices[0][1] for (h, _), w in zip(parts, weights)), Fraction(0)),
    )
    streams = []
    for k, ((h, _), w) in enumerate(zip(parts, weights)):
        v = h.vertices
        if len(v) < 2:
            continue
        edges = []
        for i in range(len(v)):
            a, b = v[i], v[(i + 1) % len(v)]
            d = (w * (b[0] - a[0]), w * (b[1] - a[1]))
            edges.append((_angle_key(d), k, d))
        streams.append(edges)

    verts = [start]
    tags = [("mix", tuple(idx))]
    pending = None
    for key, k, d in heapq.merge(*streams, key=lambda e: (e[0], e[1])):
        if pending is not None and _angle_cmp(pending[0], d) == 0:
            pending = ((pending[0][0] + d[0], pending[0][1] + d[1]), pending[1] + [k])
        else:
            if pending is not None:
                _emit(verts, tags, idx, parts, pending)
            pending = (d, [k])
    if pending is not None:
        _emit(verts, tags, idx, parts, pending)
    if len(verts) > 1 and verts[-1] == verts[0]:
        verts.pop()
        tags.pop()
    return Hull2D(tuple(verts), tuple(tags))


def _emit(verts, tags, idx, parts, pending):
    d, ks = pending
    for k in ks:
        idx[k] = (idx[k] + 1) % len(parts[k][0].vertices)
    last = verts[-1]
    verts.append((last[0] + d[0], last[1] + d[1]))
    tags.append(("mix", tuple(idx)))


# --------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True)
class Decomposition:
    point_a: Point
    tag_a: Any
    point_b: Point
    tag_b: Any
    alpha: Fraction

    @property
    def single(self) -> bool:
        return self.alpha == 1


def decompose(h: Hull2D, target) -> Decomposition:
    """Write a boundary point as ``alpha * a + (1 - alpha) * b`` for hull vertices a, b.

    Vertices decompose with ``alpha = 1``. Points off the boundary raise
    :class:`GeometryError`.
    """
    t = _pt(target)
    v = h.vertices
    for p, tag in zip(v, h.provenance):
        if p == t:
            return Decomposition(p, tag, p, tag, Fraction(1))
    n = len(v)
    for i in range(n if n > 2 else min(n, 1)):
        a, b = v[i], v[(i + 1) % n]
        if a != b and _on_segment(a, b, t):
            if a[0] != b[0]:
                alpha = (t[0] - b[0]) / (a[0] - b[0])
            else:
                alpha = (t[1] - b[1]) / (a[1] - b[1])
            return Decomposition(a, h.provenance[i], b, h.provenance[(i + 1) % n], alpha)
    raise GeometryError(f"point {t} is not on the hull boundary")


def _normal(a: Point, b: Point) -> Point:
    """Outward normal of the counterclockwise edge a -> b."""
    return (b[1] - a[1], a[0] - b[0])


def _dot(d: Point, p: Point) -> Fraction:
    return d[0] * p[0] + d[1] * p[1]


def _max_face(h: Hull2D, d: Point) -> tuple[Point, Point]:
    """Face of ``h`` maximising direction d, as (a, b) in counterclockwise order."""
    v = h.vertices
    best = max(_dot(d, p) for p in v)
    arg = [i for i, p in enumerate(v) if _dot(d, p) == best]
    if len(arg) == 1:
        return v[arg[0]], v[arg[0]]
    i, j = arg[0], arg[1]
    a, b = v[i], v[j]
    if _dot(_normal(a, b), d) > 0:
        return a, b
    return b, a


def split_minkowski(parts: Sequence[tuple[Hull2D, Any]], target) -> list[Point]:
    """Per-part points ``p_i in H_i`` with ``sum w_i p_i == target``.

    ``target`` must lie on the boundary of the weighted sum. Parallel edges are
    split with one common interpolation parameter, i.e. proportionally to their
    lengths.
    """
    weights = [Fraction(w) for _, w in parts]
    hulls = [h for h, _ in parts]
    total = minkowski_weighted(parts)
    t = _pt(target)
    v = total.vertices
    if len(v) == 1:
        if t != v[0]:
            raise GeometryError(f"point {t} is not the single point of the sum")
        return [h.vertices[0] for h in hulls]

    n = len(v)
    if t in v:
        i = v.index(t)
        if n == 2:
            other = v[1 - i]
            d = (t[0] - other[0], t[1] - other[1])
        else:
            d1 = _normal(v[i - 1], v[i])
            d2 = _normal(v[i], v[(i + 1) % n])
            d = (d1[0] + d2[0], d1[1] + d2[1])
        out = [_max_face(h, d)[0] for h in hulls]
    else:
        for i in range(n if n > 2 else 1):
            a, b = v[i], v[(i + 1) % n]
            if _on_segment(a, b, t):
                break
        else:
            raise GeometryError(f"point {t} is not on the Minkowski-sum boundary")
        d = _normal(a, b)
        faces = [_max_face(h, d) for h in hulls]
        ua = (sum((w * f[0][0] for w, f in zip(weights, faces)), Fraction(0)),
              sum((w * f[0][1] for w, f in zip(weights, faces)), Fraction(0)))
        ub = (sum((w * f[1][0] for w, f in zip(weights, faces)), Fraction(0)),
              sum((w * f[1][1] for w, f in zip(weights, faces)), Fraction(0)))
        if ua[0] != ub[0]:
            lam = (t[0] - ua[0]) / (ub[0] - ua[0])
        else:
            lam = (t[1] - ua[1]) / (ub[1] - ua[1])
        out = [(fa[0] + lam * (fb[0] - fa[0]), fa[1] + lam * (fb[1] - fa[1])) for fa, fb in faces]
    check = (sum((w * p[0] for w, p in zip(weights, out)), Fraction(0)),
             sum((w * p[1] for w, p in zip(weights, out)), Fraction(0)))
    if check != t:
        raise GeometryError(f"Minkowski split failed to reproduce {t}")
    return out
