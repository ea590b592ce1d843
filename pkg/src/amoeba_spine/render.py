"""Deterministic SVG pictures of polygons, subdivisions, spines and rasters."""
from __future__ import annotations

import numpy as np

from .lattice import LatticePolygon
from .sampler import AmoebaRaster
from .spine import SpineGraph, VertexKind
from .subdivision import Subdivision

SCALE = 100.0  # SVG units per lattice unit
PAD = 0.25


def _f(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _pt(x, y) -> str:
    return f"{_f(x * SCALE)},{_f(-y * SCALE)}"


def _raster_rects(r: AmoebaRaster) -> list[str]:
    """Occupied cells merged into horizontal runs along x, one rect per run."""
    out = []
    occ = r.occupancy
    h = r.grid.cell
    x0, y0 = r.grid.origin
    for j in range(occ.shape[1]):
        col = occ[:, j].astype(np.int8)
        d = np.diff(np.concatenate([[0], col, [0]]))
        for a, b in zip(np.flatnonzero(d == 1), np.flatnonzero(d == -1)):
            x, y = x0 + a * h, y0 + (j + 1) * h
            out.append(f'<rect x="{_f(x * SCALE)}" y="{_f(-y * SCALE)}" '
                       f'width="{_f((b - a) * h * SCALE)}" height="{_f(h * SCALE)}"/>')
    return out


def render_svg(polygon: LatticePolygon, subdivision: Subdivision | None = None,
               spine: SpineGraph | None = None, raster: AmoebaRaster | None = None,
               title: str | None = None) -> str:
    """SVG document; the same inputs always give the same bytes."""
    for layer in (subdivision, raster):
        lp = getattr(layer, "polygon", None) or getattr(getattr(layer, "grid", None), "polygon", None)
        if layer is not None and lp != polygon:
            raise ValueError("all layers must share the polygon")
    x0, y0, x1, y1 = polygon.bbox
    vb = (f"{_f((x0 - PAD) * SCALE)} {_f(-(y1 + PAD) * SCALE)} "
          f"{_f((x1 - x0 + 2 * PAD) * SCALE)} {_f((y1 - y0 + 2 * PAD) * SCALE)}")
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vb}">']
    if title:
        lines.append(f"<title>{title}</title>")
    if raster is not None:
        lines.append('<g id="amoeba" fill="#9ecae1" stroke="none">')
        lines.extend(_raster_rects(raster))
        lines.append("</g>")
    if subdivision is not None:
        lines.append('<g id="subdivision" stroke="#969696" stroke-width="1" fill="none">')
        for a, b in subdivision.edges:
            lines.append(f'<line x1="{_f(a[0] * SCALE)}" y1="{_f(-a[1] * SCALE)}" '
                         f'x2="{_f(b[0] * SCALE)}" y2="{_f(-b[1] * SCALE)}"/>')
        lines.append("</g>")
    pts = " ".join(_pt(*v) for v in polygon.vertices)
    lines.append(f'<polygon id="polygon" points="{pts}" fill="none" stroke="#000000" stroke-width="2"/>')
    lines.append('<g id="lattice" fill="#000000">')
    for m in polygon.points:
        lines.append(f'<circle cx="{_f(m[0] * SCALE)}" cy="{_f(-m[1] * SCALE)}" r="3"/>')
    lines.append("</g>")
    if spine is not None:
        lines.append('<g id="spine" stroke="#d62728" stroke-width="2.5" fill="none">')
        for a, b in spine.segments():
            lines.append(f'<line x1="{_f(a[0] * SCALE)}" y1="{_f(-a[1] * SCALE)}" '
                         f'x2="{_f(b[0] * SCALE)}" y2="{_f(-b[1] * SCALE)}"/>')
        lines.append("</g>")
        lines.append('<g id="spine-vertices" fill="#d62728">')
        for v in spine.vertices:
            if v.kind is VertexKind.TRIVALENT_CENTER:
                x, y = float(v.position[0]), float(v.position[1])
                lines.append(f'<circle cx="{_f(x * SCALE)}" cy="{_f(-y * SCALE)}" r="4"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
