"""Integral convex polygons, their lattice points and normal fans.

Everything here is exact integer arithmetic. Points are plain ``(int, int)``
tuples so they hash and compare structurally.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import DegeneratePolygon, NonConvexInput, NonIntegralInput

Point = tuple[int, int]


def cross(o: Point, a: Point, b: Point) -> int:
    """Twice the signed area of the triangle (o, a, b)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _as_int_point(p) -> Point:
    if len(p) != 2:
        raise NonIntegralInput(f"point {p!r} is not a pair")
    out = []
    for c in p:
        if isinstance(c, bool):
            raise NonIntegralInput(f"coordinate {c!r} is not an integer")
        if isinstance(c, int):
            out.append(c)
            continue
        q = Fraction(c)
        if q.denominator != 1:
            raise NonIntegralInput(f"coordinate {c!r} is not an integer")
        out.append(int(q))
    return (out[0], out[1])


def _canonical_rotation(vs: list[Point]) -> tuple[Point, ...]:
    k = min(range(len(vs)), key=lambda i: vs[i])
    return tuple(vs[k:] + vs[:k])


@dataclass(frozen=True)
class LatticePolygon:
    """A 2-dimensional integral convex polygon with its lattice points.

    ``vertices`` run counterclockwise starting at the lexicographically
    smallest vertex. ``points`` is sorted lexicographically.
    """

    vertices: tuple[Point, ...]
    points: tuple[Point, ...]
    interior: tuple[Point, ...]
    boundary: tuple[Point, ...]

    # construction -------------------------------------------------------
    @classmethod
    def from_vertices(cls, vertices: Iterable[Sequence]) -> "LatticePolygon":
        return enumerate_points(vertices)

    @classmethod
    def hull(cls, points: Iterable[Sequence]) -> "LatticePolygon":
        """Convex hull of an arbitrary finite set of integral points."""
        pts = sorted({_as_int_point(p) for p in points})
        if len(pts) < 3:
            raise DegeneratePolygon("need at least three distinct points")
        lower: list[Point] = []
        for p in pts:
            while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
                lower.pop()
            lower.append(p)
        upper: list[Point] = []
        for p in reversed(pts):
            while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
                upper.pop()
            upper.append(p)
        return enumerate_points(lower[:-1] + upper[:-1])

    # geometry -----------------------------------------------------------
    @property
    def edges(self) -> tuple[tuple[Point, Point], ...]:
        v = self.vertices
        return tuple((v[i], v[(i + 1) % len(v)]) for i in range(len(v)))

    @property
    def twice_area(self) -> int:
        v = self.vertices
        return sum(cross(v[0], v[i], v[i + 1]) for i in range(1, len(v) - 1))

    @property
    def area(self) -> Fraction:
        return Fraction(self.twice_area, 2)

    def edge_lattice_length(self, i: int) -> int:
        a, b = self.edges[i]
        return gcd(b[0] - a[0], b[1] - a[1])

    def contains(self, m: Sequence[int]) -> bool:
        m = (m[0], m[1])
        return all(cross(a, b, m) >= 0 for a, b in self.edges)

    def edge_index_of(self, m: Sequence[int]) -> list[int]:
        """Indices of the edges that contain ``m`` (empty for interior points)."""
        m = (m[0], m[1])
        out = []
        for i, (a, b) in enumerate(self.edges):
            if cross(a, b, m) == 0 and min(a[0], b[0]) <= m[0] <= max(a[0], b[0]) \
                    and min(a[1], b[1]) <= m[1] <= max(a[1], b[1]):
                out.append(i)
        return out

    def points_on_edge(self, i: int) -> list[Point]:
        """Lattice points of edge ``i`` ordered from its start vertex."""
        a, b = self.edges[i]
        g = self.edge_lattice_length(i)
        dx, dy = (b[0] - a[0]) // g, (b[1] - a[1]) // g
        return [(a[0] + k * dx, a[1] + k * dy) for k in range(g + 1)]

    def translate(self, v: Sequence[int]) -> "LatticePolygon":
        v = _as_int_point(v)
        return enumerate_points([(p[0] + v[0], p[1] + v[1]) for p in self.vertices])

    @property
    def diameter(self) -> float:
        vs = self.vertices
        return max(((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2) ** 0.5 for a in vs for b in vs)

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        xs = [p[0] for p in self.vertices]
        ys = [p[1] for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def to_json(self) -> dict:
        return {
            "schema": "polygon/1",
            "vertices": [list(v) for v in self.vertices],
            "points": [list(p) for p in self.points],
            "interior": [list(p) for p in self.interior],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LatticePolygon":
        if "vertices" not in data:
            raise NonIntegralInput("polygon JSON needs a 'vertices' list")
        return enumerate_points(data["vertices"])


def enumerate_points(vertices: Iterable[Sequence]) -> LatticePolygon:
    """Validate a vertex cycle and enumerate the lattice points of its hull.

    Either orientation is accepted. Vertices lying on the segment between
    their neighbours are dropped; a reflex turn raises ``NonConvexInput``.
    """
    vs = [_as_int_point(v) for v in vertices]
    # Drop consecutive duplicates (including wrap-around).
    dedup: list[Point] = []
    for v in vs:
        if not dedup or dedup[-1] != v:
            dedup.append(v)
    while len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    if len(set(dedup)) != len(dedup):
        raise NonConvexInput("vertex cycle revisits a point")
    if len(dedup) < 3:
        raise DegeneratePolygon("a polygon needs at least three vertices")

    n = len(dedup)
    signed = sum(cross(dedup[0], dedup[i], dedup[i + 1]) for i in range(1, n - 1))
    if signed == 0:
        raise DegeneratePolygon("vertices are collinear")
    if signed < 0:
        dedup.reverse()

    # Remove straight-angle vertices, reject reflex ones.
    changed = True
    while changed:
        changed = False
        n = len(dedup)
        for i in range(n):
            c = cross(dedup[i - 1], dedup[i], dedup[(i + 1) % n])
            if c < 0:
                raise NonConvexInput(f"reflex turn at vertex {dedup[i]}")
            if c == 0:
                del dedup[i]
                changed = True
                break
        if len(dedup) < 3:
            raise DegeneratePolygon("vertices are collinear")
    # A cycle with only left turns can still wind more than once; convexity
    # means every vertex is weakly left of every edge.
    n = len(dedup)
    for i in range(n):
        a, b = dedup[i], dedup[(i + 1) % n]
        if any(cross(a, b, v) < 0 for v in dedup):
            raise NonConvexInput("vertex cycle is not the boundary of a convex polygon")

    verts = _canonical_rotation(dedup)
    edges = [(verts[i], verts[(i + 1) % len(verts)]) for i in range(len(verts))]
    xs = [v[0] for v in verts]
    ys = [v[1] for v in verts]
    pts, interior, boundary = [], [], []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            m = (x, y)
            cs = [cross(a, b, m) for a, b in edges]
            if min(cs) < 0:
                continue
            pts.append(m)
            (boundary if min(cs) == 0 else interior).append(m)
    return LatticePolygon(verts, tuple(pts), tuple(interior), tuple(boundary))


def interior_points(polygon: LatticePolygon) -> list[Point]:
    return list(polygon.interior)


def pick_check(polygon: LatticePolygon) -> bool:
    """Pick's identity 2A = 2I + B - 2."""
    return polygon.twice_area == 2 * len(polygon.interior) + len(polygon.boundary) - 2


@dataclass(frozen=True)
class Ray:
    e: tuple[int, int]
    l: int


@dataclass(frozen=True)
class NormalFan:
    """Inward primitive edge normals ``e`` with support numbers ``l``.

    For every lattice point ``m`` of the polygon ``<m, e> + l >= 0``, with
    equality exactly on the edge the ray belongs to. ``rays[i]`` belongs to
    ``polygon.edges[i]``.
    """

    rays: tuple[Ray, ...]

    def to_json(self) -> dict:
        return {"schema": "fan/1", "rays": [{"e": list(r.e), "l": r.l} for r in self.rays]}


def normal_fan(polygon: LatticePolygon) -> NormalFan:
    rays = []
    for a, b in polygon.edges:
        dx, dy = b[0] - a[0], b[1] - a[1]
        g = gcd(dx, dy)
        e = (-dy // g, dx // g)
        l = -min(p[0] * e[0] + p[1] * e[1] for p in polygon.points)
        assert l == -(a[0] * e[0] + a[1] * e[1])
        rays.append(Ray(e, l))
    return NormalFan(tuple(rays))


def standard_triangle(d: int) -> LatticePolygon:
    """The degree-``d`` triangle conv{(0,0), (d,0), (0,d)}."""
    if d < 1:
        raise DegeneratePolygon("degree must be at least 1")
    return enumerate_points([(0, 0), (d, 0), (0, d)])
