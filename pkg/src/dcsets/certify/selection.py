"""Deterministic Lipschitz selections through a union of graphs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .. import plcalc
from .._q import qpoint, qstr
from ..errors import PreconditionError
from ..plcalc import PLFunction
from ..sets import DCGraphPiece, PlacedSSet, PlanarSetPresentation

__all__ = ["SelectionResult", "lipschitz_selection", "graphs_of"]


@dataclass
class SelectionResult:
    ok: bool
    function: Optional[PLFunction]
    blocked_at: Optional[Fraction]
    u: Fraction
    lipschitz: Optional[Fraction] = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "function": None if self.function is None else self.function.to_json(),
            "blocked_at": None if self.blocked_at is None else qstr(self.blocked_at),
            "u": qstr(self.u),
            "lipschitz": None if self.lipschitz is None else qstr(self.lipschitz),
        }


def graphs_of(M) -> List[PLFunction]:
    """Profiles of an unrotated union of graphs, in world coordinates."""
    if not isinstance(M, PlanarSetPresentation):
        return list(M)
    out = []
    for piece in M.skeleton:
        pieces = piece.graph_pieces() if isinstance(piece, PlacedSSet) else [piece]
        for g in pieces:
            if not g.rotation.is_identity():
                raise PreconditionError("selections need graphs over the window axis (no rotation)")
            out.append(g.profile.shift(g.offset[0], g.offset[1]))
    return out


def _events(graphs: Sequence[PLFunction]) -> List[Fraction]:
    xs = set()
    for g in graphs:
        xs.update(g.breakpoints)
    for i, f in enumerate(graphs):
        for g in graphs[i + 1:]:
            lo = max(f.domain[0], g.domain[0])
            hi = min(f.domain[1], g.domain[1])
            if lo < hi:
                d = plcalc.pl_combine("sub", f.restrict(lo, hi), g.restrict(lo, hi))
                xs.update(plcalc._zero_crossings(d))
    return sorted(xs)


def _walk(graphs, events, start, stop, direction: str):
    """Follow the lowest continuation from ``start`` toward ``stop``; returns points or the blocking abscissa."""
    t, y = start
    pts = [start]
    right = direction == "right"
    while (t < stop) if right else (t > stop):
        cands = []
        for g in graphs:
            lo, hi = g.domain
            if not (lo <= t <= hi) or g(t) != y:
                continue
            if right and t < hi:
                cands.append((plcalc.one_sided_slope(g, t, "right"), g))
            elif not right and t > lo:
                cands.append((-plcalc.one_sided_slope(g, t, "left"), g))
        if not cands:
            return pts, t
        _, g = min(cands, key=lambda c: c[0])
        if right:
            nxt = min([e for e in events if e > t] + [stop, g.domain[1]])
        else:
            nxt = max([e for e in events if e < t] + [stop, g.domain[0]])
        t, y = nxt, g(nxt)
        pts.append((t, y))
    return pts, None


def lipschitz_selection(M, z, window: Optional[Tuple] = None) -> SelectionResult:
    """Extend the lowest graph branch through ``z`` left and right across the window.

    At every event abscissa (breakpoint or crossing) the walk continues along
    the branch whose next values are smallest, so the result is the minimum
    selection.  A missing continuation blocks the walk; its abscissa is
    returned.
    """
    graphs = graphs_of(M)
    if not graphs:
        raise PreconditionError("no graphs to select from")
    z = qpoint(z)
    if window is None:
        if isinstance(M, PlanarSetPresentation) and M.window is not None:
            window = (M.window.xmin, M.window.xmax)
        else:
            window = (min(g.domain[0] for g in graphs), max(g.domain[1] for g in graphs))
    lo, hi = Fraction(window[0]), Fraction(window[1])
    if not lo < z[0] < hi:
        raise PreconditionError("z must lie strictly inside the window")
    if not any(g.contains(z[0]) and g(z[0]) == z[1] for g in graphs):
        raise PreconditionError(f"{z} is not on any graph")
    u = max(g.lipschitz() for g in graphs)
    events = _events(graphs)
    rpts, rblock = _walk(graphs, events, z, hi, "right")
    lpts, lblock = _walk(graphs, events, z, lo, "left")
    block = lblock if lblock is not None else rblock
    if block is not None:
        return SelectionResult(False, None, block, u)
    f = PLFunction.from_points(list(reversed(lpts)) + rpts[1:]).simplify()
    return SelectionResult(f.lipschitz() <= u, f, None, u, f.lipschitz())
