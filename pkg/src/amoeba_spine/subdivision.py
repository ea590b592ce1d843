"""Regular subdivisions of lattice polygons induced by weight functions.

The subdivision ``Z_w`` is the projection of the lower convex hull of the
lifted points ``(m, w_m)``: a lifted facet counts as lower when its outward
normal points downward in the last coordinate. All predicates are exact.

Sign convention for normalized weights: after subtracting the affine
function that vanishes on a cell ``S`` the weight is zero on ``S`` and
strictly positive on every other lattice point (lower-hull convention).
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import InvariantViolation, NonGenericWeight, NotACell, InputError
from .lattice import LatticePolygon, Point, cross

Edge = tuple[Point, Point]
Tri = tuple[Point, Point, Point]


# ---------------------------------------------------------------------------
# weights

def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**12) if v != int(v) else Fraction(int(v))
    return Fraction(v)


@dataclass(frozen=True)
class AffineFunctional:
    """``m -> l + <m, n>`` with rational coefficients."""

    l: Fraction = Fraction(0)
    n: tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))

    def __call__(self, m: Sequence[int]) -> Fraction:
        return self.l + self.n[0] * m[0] + self.n[1] * m[1]


class WeightFunction(Mapping):
    """Rational weight ``w_m`` on every lattice point of a polygon."""

    __slots__ = ("_values",)

    def __init__(self, values: Mapping[Point, object]):
        self._values = {(int(k[0]), int(k[1])): _frac(v) for k, v in values.items()}

    @classmethod
    def from_function(cls, polygon: LatticePolygon, fn: Callable[[Point], object]) -> "WeightFunction":
        return cls({m: fn(m) for m in polygon.points})

    def __getitem__(self, m):
        return self._values[(m[0], m[1])]

    def __iter__(self):
        return iter(sorted(self._values))

    def __len__(self):
        return len(self._values)

    def __eq__(self, other):
        if isinstance(other, WeightFunction):
            return self._values == other._values
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self._values.items())))

    def __repr__(self):
        return f"WeightFunction({dict(sorted(self._values.items()))!r})"

    def plus_affine(self, f: AffineFunctional) -> "WeightFunction":
        return WeightFunction({m: v + f(m) for m, v in self._values.items()})

    def check_domain(self, polygon: LatticePolygon) -> None:
        if set(self._values) != set(polygon.points):
            missing = sorted(set(polygon.points) - set(self._values))
            extra = sorted(set(self._values) - set(polygon.points))
            raise InputError(f"weight domain mismatch: missing {missing}, extra {extra}")

    def to_json(self) -> dict:
        return {
            "schema": "weights/1",
            "entries": [{"point": list(m), "w": str(self[m])} for m in self],
        }

    @classmethod
    def from_json(cls, data: dict) -> "WeightFunction":
        try:
            return cls({tuple(e["point"]): Fraction(str(e["w"])) for e in data["entries"]})
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad weights JSON: {exc}") from exc


def standard_weight(polygon: LatticePolygon) -> WeightFunction:
    """The quadratic weight ``m1^2 + m1 m2 + m2^2``."""
    return WeightFunction.from_function(polygon, lambda m: m[0] ** 2 + m[0] * m[1] + m[1] ** 2)


# ---------------------------------------------------------------------------
# exact predicates

class _Heights:
    """Heights with an optional symbolic perturbation ``w_m + eps^(k+1)``.

    ``k`` is the index of ``m`` in the sorted point list, so lower-index
    points receive the larger perturbation.
    """

    def __init__(self, w: WeightFunction, points: Sequence[Point], perturb: bool):
        self.w = w
        self.perturb = perturb
        self.index = {m: i for i, m in enumerate(points)}

    def sign(self, terms: Iterable[tuple[Point, int]]) -> int:
        """Sign of ``sum coef * h_m`` for integer coefficients."""
        terms = [(m, c) for m, c in terms if c != 0]
        v = sum(c * self.w[m] for m, c in terms)
        if v != 0:
            return 1 if v > 0 else -1
        if not self.perturb:
            return 0
        agg: dict[Point, int] = {}
        for m, c in terms:
            agg[m] = agg.get(m, 0) + c
        for m in sorted(agg, key=self.index.__getitem__):
            if agg[m] != 0:
                return 1 if agg[m] > 0 else -1
        return 0

    def above(self, a: Point, b: Point, c: Point, d: Point) -> int:
        """+1 if lifted ``d`` lies above the plane through lifted a, b, c."""
        D = cross(a, b, c)
        if D == 0:
            raise ValueError("degenerate reference triangle")
        ka, kb, kc = cross(d, b, c), cross(a, d, c), cross(a, b, d)
        s = self.sign([(d, D), (a, -ka), (b, -kb), (c, -kc)])
        return s if D > 0 else -s


# ---------------------------------------------------------------------------
# subdivisions

def _tri_key(t: Sequence[Point]) -> Tri:
    return tuple(sorted(t))  # type: ignore[return-value]


def _ccw(t: Sequence[Point]) -> Tri:
    a, b, c = t
    return (a, b, c) if cross(a, b, c) > 0 else (a, c, b)


def _edge_key(a: Point, b: Point) -> Edge:
    return (a, b) if a <= b else (b, a)


def lattice_points_in_triangle(t: Sequence[Point]) -> list[Point]:
    """Brute-force enumeration of the lattice points of a closed triangle."""
    a, b, c = _ccw(t)
    xs = [p[0] for p in (a, b, c)]
    ys = [p[1] for p in (a, b, c)]
    out = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            m = (x, y)
            if cross(a, b, m) >= 0 and cross(b, c, m) >= 0 and cross(c, a, m) >= 0:
                out.append(m)
    return out


class Classification(enum.Enum):
    PARTIAL_SECONDARY = "PartialSecondary"
    SECONDARY_ONLY = "SecondaryOnly"


class ConeMembership(enum.Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"

    def __bool__(self) -> bool:
        return self is ConeMembership.INSIDE


@dataclass(frozen=True)
class Subdivision:
    """A triangulation of a lattice polygon by lattice triangles.

    ``triangles`` hold vertex sets (sorted tuples). Lattice points of the
    polygon that are not vertices are listed in ``hidden``; for each such
    point ``cell_contents`` records the triangle containing it.
    """

    polygon: LatticePolygon
    triangles: tuple[Tri, ...]
    unimodular: tuple[bool, ...] = field(init=False)
    hidden: tuple[Point, ...] = field(init=False)

    def __post_init__(self):
        tris = tuple(sorted(_tri_key(t) for t in self.triangles))
        object.__setattr__(self, "triangles", tris)
        flags = []
        for t in tris:
            det1 = abs(cross(*t)) == 1
            only_vertices = len(lattice_points_in_triangle(t)) == 3
            flags.append(det1 and only_vertices)
        object.__setattr__(self, "unimodular", tuple(flags))
        verts = {m for t in tris for m in t}
        object.__setattr__(self, "hidden", tuple(m for m in self.polygon.points if m not in verts))

    # derived combinatorics -----------------------------------------------
    @property
    def vertices(self) -> tuple[Point, ...]:
        return tuple(sorted({m for t in self.triangles for m in t}))

    @property
    def edges(self) -> tuple[Edge, ...]:
        es = set()
        for a, b, c in self.triangles:
            es.update((_edge_key(a, b), _edge_key(b, c), _edge_key(a, c)))
        return tuple(sorted(es))

    @property
    def cells(self) -> tuple[tuple[Point, ...], ...]:
        """All simplices of dimension 1 and 2 as vertex tuples."""
        return tuple(self.edges) + tuple(self.triangles)

    def edge_triangles(self) -> dict[Edge, list[Tri]]:
        out: dict[Edge, list[Tri]] = {}
        for t in self.triangles:
            a, b, c = t
            for e in (_edge_key(a, b), _edge_key(b, c), _edge_key(a, c)):
                out.setdefault(e, []).append(t)
        return out

    def is_boundary_edge(self, e: Edge) -> bool:
        ia = set(self.polygon.edge_index_of(e[0]))
        ib = set(self.polygon.edge_index_of(e[1]))
        return bool(ia & ib)

    def boundary_edges_by_side(self) -> dict[int, list[Edge]]:
        out: dict[int, list[Edge]] = {i: [] for i in range(len(self.polygon.edges))}
        for e in self.edges:
            common = set(self.polygon.edge_index_of(e[0])) & set(self.polygon.edge_index_of(e[1]))
            for i in common:
                out[i].append(e)
        return out

    def neighbours(self, m: Point) -> list[Point]:
        """Lattice points joined to ``m`` by a 1-cell."""
        out = set()
        for a, b in self.edges:
            if a == m:
                out.add(b)
            elif b == m:
                out.add(a)
        return sorted(out)

    def triangle_containing(self, m: Point) -> Tri | None:
        for t in self.triangles:
            a, b, c = _ccw(t)
            if cross(a, b, m) >= 0 and cross(b, c, m) >= 0 and cross(c, a, m) >= 0:
                return t
        return None

    @property
    def cell_contents(self) -> dict[Tri, list[Point]]:
        out: dict[Tri, list[Point]] = {}
        for t in self.triangles:
            extra = [m for m in lattice_points_in_triangle(t) if m not in t]
            if extra:
                out[t] = extra
        return out

    @property
    def is_triangulation(self) -> bool:
        return True

    @property
    def all_unimodular(self) -> bool:
        return all(self.unimodular)

    def has_cell(self, cell: Iterable[Sequence[int]]) -> bool:
        pts = tuple(sorted((int(m[0]), int(m[1])) for m in cell))
        if len(pts) == 3:
            return pts in set(self.triangles)
        if len(pts) == 2:
            return pts in set(self.edges)
        if len(pts) == 1:
            return pts[0] in set(self.vertices)
        return False

    def validate(self) -> None:
        """Combinatorial check that the triangles tile the polygon."""
        P = self.polygon
        total = sum(abs(cross(*t)) for t in self.triangles)
        if total != P.twice_area:
            raise InvariantViolation("triangles do not cover the polygon",
                                     {"twice_area_sum": total, "expected": P.twice_area})
        for t in self.triangles:
            if cross(*t) == 0:
                raise InvariantViolation("degenerate triangle", {"triangle": [list(m) for m in t]})
            if not all(P.contains(m) for m in t):
                raise InvariantViolation("triangle leaves the polygon", {"triangle": [list(m) for m in t]})
        directed: dict[tuple[Point, Point], int] = {}
        for t in self.triangles:
            a, b, c = _ccw(t)
            for e in ((a, b), (b, c), (c, a)):
                directed[e] = directed.get(e, 0) + 1
        for (a, b), k in directed.items():
            if k != 1:
                raise InvariantViolation("overlapping triangles", {"edge": [list(a), list(b)]})
            if (b, a) not in directed and not self.is_boundary_edge((a, b)):
                raise InvariantViolation("interior edge with one side", {"edge": [list(a), list(b)]})

    def to_json(self) -> dict:
        return {
            "schema": "subdivision/1",
            "polygon": [list(v) for v in self.polygon.vertices],
            "cells": [[list(m) for m in t] for t in self.triangles],
            "unimodular": list(self.unimodular),
            "all_unimodular": self.all_unimodular,
            "is_triangulation": self.is_triangulation,
            "classification": classify(self).value,
            "hidden": [list(m) for m in self.hidden],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Subdivision":
        from .lattice import enumerate_points
        try:
            P = enumerate_points(data["polygon"])
            tris = [tuple((int(m[0]), int(m[1])) for m in c) for c in data["cells"] if len(c) == 3]
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad subdivision JSON: {exc}") from exc
        Z = cls(P, tuple(tris))
        Z.validate()
        return Z


def subdivide(polygon: LatticePolygon, w: WeightFunction, perturb: str | None = None) -> Subdivision:
    """Lower-hull subdivision ``Z_w`` by exact gift wrapping.

    ``perturb="lex"`` resolves ties symbolically instead of raising
    ``NonGenericWeight``.
    """
    w.check_domain(polygon)
    if perturb not in (None, "lex"):
        raise InputError(f"unknown perturbation {perturb!r}")
    pts = list(polygon.points)
    H = _Heights(w, pts, perturb == "lex")

    # First hull edge: along polygon edge 0 from its start vertex.
    v0 = polygon.vertices[0]
    side = polygon.points_on_edge(0)[1:]
    best = side[0]
    for p in side[1:]:
        tb = best[0] - v0[0] if best[0] != v0[0] else best[1] - v0[1]
        tp = p[0] - v0[0] if p[0] != v0[0] else p[1] - v0[1]
        tb, tp = abs(tb), abs(tp)
        # slope_p < slope_best  <=>  (h_p - h0) tb - (h_best - h0) tp < 0
        s = H.sign([(p, tb), (best, -tp), (v0, tp - tb)])
        if s == 0:
            raise NonGenericWeight("collinear lifted boundary points", facet=[v0, best, p])
        if s < 0:
            best = p
    start = (v0, best)

    found: dict[Tri, Tri] = {}
    done: set[tuple[Point, Point]] = set()
    queue = deque([start])
    while queue:
        a, b = queue.popleft()
        if (a, b) in done:
            continue
        done.add((a, b))
        cands = [c for c in pts if cross(a, b, c) > 0]
        if not cands:
            continue
        c = cands[0]
        for d in cands[1:]:
            if H.above(a, b, c, d) < 0:
                c = d
        for d in pts:
            if d in (a, b, c):
                continue
            if H.above(a, b, c, d) == 0:
                raise NonGenericWeight(
                    "lower-hull facet is not a triangle",
                    facet=sorted({a, b, c, d}),
                )
        key = _tri_key((a, b, c))
        if key in found:
            continue
        found[key] = (a, b, c)
        for e in ((b, a), (c, b), (a, c)):
            if e not in done:
                queue.append(e)
    Z = Subdivision(polygon, tuple(found))
    Z.validate()
    return Z


def affine_interpolant(w: Mapping[Point, Fraction], S: Sequence[Point]) -> AffineFunctional:
    """The affine function agreeing with ``w`` on the three points of ``S``."""
    a, b, c = S
    D = cross(a, b, c)
    if D == 0:
        raise NotACell("cell is degenerate")
    wa, wb, wc = w[a], w[b], w[c]
    # Solve n . (b - a) = wb - wa, n . (c - a) = wc - wa.
    ux, uy = b[0] - a[0], b[1] - a[1]
    vx, vy = c[0] - a[0], c[1] - a[1]
    r1, r2 = wb - wa, wc - wa
    n1 = Fraction(r1 * vy - r2 * uy, D)
    n2 = Fraction(ux * r2 - vx * r1, D)
    l = wa - n1 * a[0] - n2 * a[1]
    return AffineFunctional(l, (n1, n2))


def affine_normalize(w: WeightFunction, S: Sequence[Sequence[int]],
                     Z: Subdivision | None = None, polygon: LatticePolygon | None = None
                     ) -> tuple[WeightFunction, AffineFunctional]:
    """Shift ``w`` by an affine function so it vanishes on the cell ``S``.

    Returns the new weight and the functional that was added. The result is
    positive off ``S`` whenever ``S`` is a cell of ``Z_w``.
    """
    S = tuple(sorted((int(m[0]), int(m[1])) for m in S))
    if Z is None:
        if polygon is None:
            from .lattice import LatticePolygon as _LP
            polygon = _LP.hull(list(w))
        Z = subdivide(polygon, w)
    if len(S) != 3 or S not in set(Z.triangles):
        raise NotACell(f"{[list(m) for m in S]} is not a top cell of the subdivision")
    L = affine_interpolant(w, S)
    f = AffineFunctional(-L.l, (-L.n[0], -L.n[1]))
    return w.plus_affine(f), f


def convexity_gap(Z: Subdivision, w: WeightFunction) -> Fraction:
    """``min over cells S and points m not in S`` of the normalized weight.

    Positive exactly when ``w`` is strictly convex and generic for ``Z``.
    """
    gap = None
    for S in Z.triangles:
        L = affine_interpolant(w, S)
        for m in Z.polygon.points:
            if m in S:
                continue
            v = w[m] - L(m)
            gap = v if gap is None else min(gap, v)
    return gap if gap is not None else Fraction(0)


def cone_contains(Z: Subdivision, w: WeightFunction) -> ConeMembership:
    """Where ``w`` sits relative to the closed cone of weights inducing ``Z``.

    INSIDE when ``subdivide(w) == Z``; BOUNDARY when ``w`` is convex on ``Z``
    but flat across some edge or on some hidden point; OUTSIDE otherwise.
    """
    w.check_domain(Z.polygon)
    H = _Heights(w, list(Z.polygon.points), False)
    worst = 1
    for e, ts in Z.edge_triangles().items():
        if len(ts) != 2:
            continue
        a, b = e
        c = next(m for m in ts[0] if m not in e)
        d = next(m for m in ts[1] if m not in e)
        worst = min(worst, H.above(a, b, c, d))
    for m in Z.hidden:
        t = Z.triangle_containing(m)
        worst = min(worst, H.above(*_ccw(t), m))
    return {1: ConeMembership.INSIDE, 0: ConeMembership.BOUNDARY}.get(worst, ConeMembership.OUTSIDE)


def classify(Z: Subdivision) -> Classification:
    if Z.all_unimodular and not Z.hidden:
        return Classification.PARTIAL_SECONDARY
    return Classification.SECONDARY_ONLY
