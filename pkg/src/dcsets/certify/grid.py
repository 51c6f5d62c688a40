"""Grid interpolation of a family of graphs and per-node slope statistics."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .. import plcalc
from .._q import q, qstr
from ..errors import PreconditionError
from ..plcalc import PLFunction
from ..sets import DCGraphPiece, PlacedSSet, PlanarSetPresentation, SSetPresentation

__all__ = ["GraphFamily", "SlopeStats", "GridApprox", "graph_family", "grid_approx"]


@dataclass(frozen=True)
class GraphFamily:
    """Graphs over a common interval ``[0, r]`` in a local frame translated by ``origin``."""

    r: Fraction
    envelopes: Tuple[PLFunction, ...]
    selections: Tuple[PLFunction, ...]
    origin: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))


def _from_sset(s: SSetPresentation, origin=(Fraction(0), Fraction(0))) -> GraphFamily:
    return GraphFamily(s.r, s.envelopes, s.selections, origin)


def _from_graphs(graphs: Sequence[PLFunction], origin=(Fraction(0), Fraction(0))) -> GraphFamily:
    if not graphs:
        raise PreconditionError("empty selection list")
    doms = {g.domain for g in graphs}
    if len(doms) != 1:
        raise PreconditionError("graphs must share a common domain")
    lo, hi = doms.pop()
    if hi <= lo:
        raise PreconditionError("graphs must have a nondegenerate domain")
    shifted = tuple(g.shift(-lo, 0) for g in graphs)
    return GraphFamily(hi - lo, shifted, shifted, (origin[0] + lo, origin[1]))


def graph_family(obj) -> GraphFamily:
    """Read a family of graphs over a common axis from any supported presentation."""
    if isinstance(obj, GraphFamily):
        return obj
    if isinstance(obj, SSetPresentation):
        return _from_sset(obj)
    if isinstance(obj, PlacedSSet):
        if not obj.rotation.is_identity():
            raise PreconditionError("the (s)-set must be placed without rotation")
        return _from_sset(obj.sset, obj.offset)
    if isinstance(obj, PlanarSetPresentation):
        if obj.fills or obj.isolated:
            raise PreconditionError("grid approximation needs a pure union of graphs")
        if len(obj.skeleton) == 1 and isinstance(obj.skeleton[0], PlacedSSet):
            return graph_family(obj.skeleton[0])
        graphs = []
        for p in obj.skeleton:
            pieces = p.graph_pieces() if isinstance(p, PlacedSSet) else [p]
            for g in pieces:
                if not g.rotation.is_identity():
                    raise PreconditionError("all graphs must be unrotated")
                graphs.append(g.profile.shift(g.offset[0], g.offset[1]))
        return _from_graphs(graphs)
    if isinstance(obj, DCGraphPiece):
        return graph_family(PlanarSetPresentation((obj,)))
    return _from_graphs(list(obj))


@dataclass(frozen=True)
class SlopeStats:
    """Extreme one-sided slopes of the interpolants through a node ``a``."""

    node: Tuple[Fraction, Fraction]
    index: int
    step: Fraction
    s_plus_max: Fraction
    s_plus_min: Fraction
    s_minus_max: Fraction
    s_minus_min: Fraction
    selections: Tuple[int, ...] = ()

    @property
    def class1(self) -> bool:
        return self.s_plus_max > self.s_minus_min

    @property
    def class2(self) -> bool:
        return self.s_minus_max > self.s_plus_min

    @property
    def gap1(self) -> Fraction:
        return self.s_plus_max - self.s_minus_min

    @property
    def gap2(self) -> Fraction:
        return self.s_minus_max - self.s_plus_min

    def p_point(self, which: str) -> Tuple[Fraction, Fraction]:
        """``p^+``, ``p_+``, ``p^-`` or ``p_-`` (``which`` in ``"+max"``, ``"+min"``, ``"-max"``, ``"-min"``)."""
        a, h = self.node, self.step
        slope = {"+max": self.s_plus_max, "+min": self.s_plus_min, "-max": self.s_minus_max, "-min": self.s_minus_min}[which]
        sign = 1 if which[0] == "+" else -1
        return (a[0] + sign * h, a[1] + sign * h * slope)

    def to_json(self) -> dict:
        return {
            "node": [qstr(c) for c in self.node],
            "s_plus_max": qstr(self.s_plus_max),
            "s_plus_min": qstr(self.s_plus_min),
            "s_minus_max": qstr(self.s_minus_max),
            "s_minus_min": qstr(self.s_minus_min),
            "class1": self.class1,
            "class2": self.class2,
        }


@dataclass(frozen=True)
class GridApprox:
    n: int
    family: GraphFamily
    interpolants: Tuple[PLFunction, ...]
    nodes: Tuple[SlopeStats, ...]

    @property
    def r(self) -> Fraction:
        return self.family.r

    @property
    def step(self) -> Fraction:
        return self.family.r / self.n

    def class_nodes(self, cls: int) -> List[SlopeStats]:
        return [s for s in self.nodes if (s.class1 if cls == 1 else s.class2)]

    def extended(self, lo, hi) -> List[PLFunction]:
        """Interpolants extended by constants to ``[lo, hi]``."""
        return [h.extend_constant(lo, hi) for h in self.interpolants]

    def segments(self, reach=None) -> List[Tuple[Tuple, Tuple]]:
        """Segments of ``M_n``: the interpolant graphs with constant extensions of length ``reach``."""
        reach = q(reach) if reach is not None else 100 * self.r
        out = set()
        for h in self.extended(-reach, self.r + reach):
            pts = h.points
            out.update(zip(pts, pts[1:]))
        return sorted(out)


def grid_approx(obj, n: int) -> GridApprox:
    """Interpolate every selection at ``i * r / n`` and collect node slope statistics."""
    if n < 2:
        raise PreconditionError("grid count must be at least 2")
    fam = graph_family(obj)
    if not fam.selections:
        raise PreconditionError("empty selection list")
    r, h = fam.r, fam.r / n
    xs = tuple(i * h for i in range(n + 1))
    interps = tuple(PLFunction(xs, tuple(f(x) for x in xs)) for f in fam.selections)
    by_node: Dict[Tuple, List[Tuple[int, int]]] = {}
    for j, g in enumerate(interps):
        for i, x in enumerate(xs):
            by_node.setdefault((x, g.values[i]), []).append((j, i))
    nodes = []
    for (x, y), members in sorted(by_node.items()):
        rights, lefts = [], []
        for j, i in members:
            g = interps[j]
            rights.append(plcalc.one_sided_slope(g, x, "right") if i < n else Fraction(0))
            lefts.append(plcalc.one_sided_slope(g, x, "left") if i > 0 else Fraction(0))
        nodes.append(
            SlopeStats((x, y), members[0][1], h, max(rights), min(rights), max(lefts), min(lefts),
                       tuple(sorted(j for j, _ in members)))
        )
    return GridApprox(n, fam, interps, tuple(nodes))
