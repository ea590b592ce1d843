"""The barycentric spine graph of a subdivision.

Each triangle contributes a "Y": its barycenter joined to the midpoints of
its three sides. Midpoints shared by two triangles are merged, so the graph
is planar and embedded in the polygon.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvariantViolation
from .lattice import LatticePolygon
from .subdivision import Subdivision

QPoint = tuple[Fraction, Fraction]


class VertexKind(enum.Enum):
    TRIVALENT_CENTER = "TrivalentCenter"
    EDGE_BARYCENTER = "EdgeBarycenter"
    BOUNDARY_END = "BoundaryEnd"


@dataclass(frozen=True)
class SpineVertex:
    position: QPoint
    kind: VertexKind


@dataclass(frozen=True)
class SpineGraph:
    vertices: tuple[SpineVertex, ...]
    edges: tuple[tuple[int, int], ...]

    # vertex classes ------------------------------------------------------
    def _of_kind(self, kind: VertexKind) -> list[int]:
        return [i for i, v in enumerate(self.vertices) if v.kind is kind]

    @property
    def trivalent(self) -> list[int]:
        return self._of_kind(VertexKind.TRIVALENT_CENTER)

    @property
    def ends(self) -> list[int]:
        return self._of_kind(VertexKind.BOUNDARY_END)

    @property
    def joints(self) -> list[int]:
        return self._of_kind(VertexKind.EDGE_BARYCENTER)

    def degrees(self) -> list[int]:
        deg = [0] * len(self.vertices)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def components(self) -> int:
        parent = list(range(len(self.vertices)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for a, b in self.edges:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        return len({find(i) for i in range(len(self.vertices))})

    def check(self) -> None:
        deg = self.degrees()
        for i, v in enumerate(self.vertices):
            want = {VertexKind.TRIVALENT_CENTER: 3, VertexKind.EDGE_BARYCENTER: 2,
                    VertexKind.BOUNDARY_END: 1}[v.kind]
            if deg[i] != want:
                raise InvariantViolation("spine vertex has the wrong degree",
                                         {"vertex": i, "kind": v.kind.value, "degree": deg[i]})

    def segments(self) -> np.ndarray:
        """Edges as a float array of shape (E, 2, 2)."""
        P = np.array([[float(v.position[0]), float(v.position[1])] for v in self.vertices])
        if not self.edges:
            return np.zeros((0, 2, 2))
        E = np.array(self.edges)
        return np.stack([P[E[:, 0]], P[E[:, 1]]], axis=1)

    def positions(self) -> np.ndarray:
        return np.array([[float(v.position[0]), float(v.position[1])] for v in self.vertices])

    def to_json(self) -> dict:
        return {
            "schema": "spine/1",
            "vertices": [
                {"position": [str(v.position[0]), str(v.position[1])], "kind": v.kind.value}
                for v in self.vertices
            ],
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SpineGraph":
        vs = tuple(
            SpineVertex((Fraction(v["position"][0]), Fraction(v["position"][1])), VertexKind(v["kind"]))
            for v in data["vertices"]
        )
        return cls(vs, tuple(tuple(e) for e in data["edges"]))


def _mid(a, b) -> QPoint:
    return (Fraction(a[0] + b[0], 2), Fraction(a[1] + b[1], 2))


def build_spine(Z: Subdivision) -> SpineGraph:
    index: dict[QPoint, int] = {}
    verts: list[SpineVertex] = []
    edges: list[tuple[int, int]] = []

    def vertex(p: QPoint, kind: VertexKind) -> int:
        if p not in index:
            index[p] = len(verts)
            verts.append(SpineVertex(p, kind))
        return index[p]

    for t in Z.triangles:
        a, b, c = t
        center = (Fraction(a[0] + b[0] + c[0], 3), Fraction(a[1] + b[1] + c[1], 3))
        ci = vertex(center, VertexKind.TRIVALENT_CENTER)
        for e in ((a, b), (b, c), (a, c)):
            e = tuple(sorted(e))
            kind = VertexKind.BOUNDARY_END if Z.is_boundary_edge(e) else VertexKind.EDGE_BARYCENTER
            mi = vertex(_mid(*e), kind)
            edges.append((ci, mi))
    g = SpineGraph(tuple(verts), tuple(edges))
    g.check()
    return g


def bounded_faces(g: SpineGraph) -> int:
    """First Betti number ``E - V + C`` of the embedded graph."""
    return len(g.edges) - len(g.vertices) + g.components()


def legs_per_polygon_edge(g: SpineGraph, polygon: LatticePolygon) -> dict[int, int]:
    """Number of boundary ends on each side of the polygon (keyed by edge index)."""
    out = {i: 0 for i in range(len(polygon.edges))}
    for i in g.ends:
        p = g.vertices[i].position
        for k, (a, b) in enumerate(polygon.edges):
            # exact collinearity test with rational coordinates
            if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) == 0:
                out[k] += 1
                break
    return out
