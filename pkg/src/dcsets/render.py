"""SVG emitter for presentations, cone potentials, level sets of Psi and witness cones."""

from __future__ import annotations

from typing import Iterable, List, Tuple

import contourpy
import numpy as np

from .sets import PlanarSetPresentation

__all__ = ["render_svg", "view_box"]

SIZE = 640
PAD = 0.08


def view_box(M: PlanarSetPresentation, extra: Iterable[Tuple] = ()) -> Tuple[float, float, float, float]:
    """``(x0, y0, x1, y1)`` from the window, or the padded bounding box of the data."""
    if M.window is not None:
        w = M.window
        return float(w.xmin), float(w.ymin), float(w.xmax), float(w.ymax)
    pts = [p for ab in M.segments() for p in ab] + list(M.points()) + list(M.fills) + list(extra)
    if not pts:
        return -1.0, -1.0, 1.0, 1.0
    xs = [float(p[0]) for p in pts]
    ys = [float(p[1]) for p in pts]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    pad = PAD * span
    return min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad


class _Canvas:
    def __init__(self, box):
        self.x0, self.y0, self.x1, self.y1 = box
        self.scale = SIZE / max(self.x1 - self.x0, self.y1 - self.y0)
        self.w = (self.x1 - self.x0) * self.scale
        self.h = (self.y1 - self.y0) * self.scale
        self.items: List[str] = []

    def xy(self, p) -> str:
        x = (float(p[0]) - self.x0) * self.scale
        y = (self.y1 - float(p[1])) * self.scale
        return f"{x:.3f},{y:.3f}"

    def polyline(self, pts, cls):
        self.items.append(f'<polyline class="{cls}" points="{" ".join(self.xy(p) for p in pts)}"/>')

    def path(self, rings, cls):
        d = " ".join("M" + " L".join(self.xy(p) for p in ring) + " Z" for ring in rings)
        self.items.append(f'<path class="{cls}" fill-rule="evenodd" d="{d}"/>')

    def dot(self, p, cls, r=2.5):
        x, y = self.xy(p).split(",")
        self.items.append(f'<circle class="{cls}" cx="{x}" cy="{y}" r="{r}"/>')

    def svg(self) -> str:
        style = (
            ".set{fill:none;stroke:#111;stroke-width:1.5}"
            ".fill{fill:#9cc3e6;stroke:none}"
            ".point{fill:#111}"
            ".cone{fill:#f4a261;fill-opacity:0.25;stroke:#e76f51;stroke-width:0.6}"
            ".witness{fill:#e63946;fill-opacity:0.25;stroke:#e63946;stroke-width:0.6}"
            ".level{fill:none;stroke:#2a9d8f;stroke-width:0.6}"
            ".node{fill:#e76f51}"
        )
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w:.0f}" height="{self.h:.0f}" '
                f'viewBox="0 0 {self.w:.3f} {self.h:.3f}">')
        return "\n".join([head, f"<style>{style}</style>", *self.items, "</svg>"]) + "\n"


def _fill_rings(M: PlanarSetPresentation, box) -> List[List[Tuple]]:
    """Boundary walks of filled faces; an unbounded filled face adds the view rectangle."""
    if not M.fills:
        return []
    arr = M.arrangement
    rings, unbounded = [], False
    for walk in arr.walks:
        u, v = walk.vertices[0], walk.vertices[1 % len(walk.vertices)]
        if u == v or not M.signature_filled(arr.side_signature(u, v)):
            continue
        rings.append(list(walk.vertices))
        unbounded = unbounded or not walk.bounded
    if unbounded:
        x0, y0, x1, y1 = box
        rings.append([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    return rings


def _cone_polygon(apex, d1, d2, length):
    a = np.array([float(apex[0]), float(apex[1])])
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    return [tuple(a), tuple(a + length * d1 / np.hypot(*d1)), tuple(a + length * d2 / np.hypot(*d2))]


def render_svg(M: PlanarSetPresentation, psi=None, witness=None, levels: int = 12) -> str:
    """Deterministic SVG of ``M`` with optional ``Psi_n`` cones/level sets and witness cones."""
    extra = []
    if witness is not None:
        extra = [w.point for w in witness.witnesses] + [witness.z]
    box = view_box(M, extra)
    cv = _Canvas(box)
    rings = _fill_rings(M, box)
    if rings:
        cv.path(rings, "fill")
    if psi is not None and psi.potentials:
        span = max(box[2] - box[0], box[3] - box[1])
        for p in psi.potentials:
            corners = _cone_polygon(p.vertex, p.rays[0], p.rays[1], 0.15 * span)
            cv.polyline(corners + [corners[0]], "cone")
            cv.dot(p.vertex, "node", 1.5)
        xs = np.linspace(box[0], box[2], 121)
        ys = np.linspace(box[1], box[3], 121)
        X, Y = np.meshgrid(xs, ys)
        Z = psi(np.stack([X, Y], axis=-1))
        lo, hi = float(Z.min()), float(Z.max())
        if hi > lo:
            gen = contourpy.contour_generator(X, Y, Z, line_type="Separate")
            for level in np.linspace(lo, hi, levels + 2)[1:-1]:
                for line in gen.lines(level):
                    cv.polyline([tuple(q) for q in line], "level")
    for a, b in M.segments():
        cv.polyline([a, b], "set")
    for p in M.points():
        cv.dot(p, "point")
    if witness is not None:
        u = float(witness.u)
        for w in witness.witnesses:
            sign = 1 if w.side == "forward" else -1
            # the cone is cut at abscissa rho, so its slanted sides have length rho * sqrt(1 + 9u^2)
            reach = float(w.rho) * (1 + 9 * u * u) ** 0.5
            corners = _cone_polygon(w.point, (sign, 3 * u), (sign, -3 * u), reach)
            cv.polyline(corners + [corners[0]], "witness")
            cv.dot(w.point, "point", 1.5)
    return cv.svg()

