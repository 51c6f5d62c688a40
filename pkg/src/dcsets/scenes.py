"""Scene documents and the built-in example generators."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from ._q import num_json, num_parse, qpoint
from .plcalc import PLFunction
from .sets import (
    DCGraphPiece,
    PlacedSSet,
    PlanarSetPresentation,
    SSetPresentation,
    Window,
    segment_piece,
)

__all__ = ["Scene", "SceneError", "generate", "EXAMPLES", "COMPONENT_SCENES", "cantor_scene", "tent", "tent_sset", "sset3"]

VERSION = 1


class SceneError(ValueError):
    """Malformed scene document; the message names the offending position."""


@dataclass
class Scene:
    presentation: PlanarSetPresentation
    name: str = ""
    probes: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def window(self) -> Optional[Window]:
        return self.presentation.window

    def to_json(self) -> dict:
        pres = self.presentation
        doc = {
            "version": VERSION,
            "name": self.name,
            "window": None if pres.window is None else pres.window.to_json(),
            "set": pres.to_json(),
            "declared-accumulations": [[num_json(c) for c in p] for p in pres.accumulations],
        }
        if self.probes:
            doc["probes"] = self.probes
        if self.notes:
            doc["notes"] = self.notes
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, doc) -> "Scene":
        if not isinstance(doc, dict):
            raise SceneError("$: scene must be a JSON object")
        if doc.get("version", VERSION) != VERSION:
            raise SceneError(f"$.version: unsupported version {doc.get('version')!r}")
        if "set" not in doc:
            raise SceneError("$.set: missing presentation")
        try:
            window = Window.from_json(doc.get("window"))
        except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
            raise SceneError(f"$.window: {exc}") from exc
        accs = []
        for i, p in enumerate(doc.get("declared-accumulations", [])):
            try:
                accs.append(tuple(num_parse(c) for c in p))
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise SceneError(f"$.declared-accumulations[{i}]: {exc}") from exc
        data = doc["set"]
        if not isinstance(data, dict):
            raise SceneError("$.set: presentation must be an object")
        from .sets import piece_from_json

        pieces = []
        for i, p in enumerate(data.get("skeleton", [])):
            try:
                pieces.append(piece_from_json(p))
            except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
                raise SceneError(f"$.set.skeleton[{i}]: {exc}") from exc
        lists = {}
        for key in ("isolated", "fills"):
            pts = []
            for i, p in enumerate(data.get(key, [])):
                try:
                    if len(p) != 2:
                        raise ValueError("expected a 2-d point")
                    pts.append(tuple(num_parse(c) for c in p))
                except (ValueError, TypeError, ZeroDivisionError) as exc:
                    raise SceneError(f"$.set.{key}[{i}]: {exc}") from exc
            lists[key] = pts
        pres = PlanarSetPresentation(tuple(pieces), tuple(lists["isolated"]), tuple(lists["fills"]), window, tuple(accs))
        return cls(pres, doc.get("name", ""), doc.get("probes", {}) or {}, doc.get("notes", ""))

    @classmethod
    def loads(cls, text: str) -> "Scene":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SceneError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        return cls.from_json(doc)


# ---------------------------------------------------------------------------
# building blocks

F = Fraction


def tent() -> PLFunction:
    return PLFunction.from_points([(0, 0), (F(1, 8), 0), (F(1, 4), F(1, 8)), (F(3, 8), 0), (1, 0)])


def tent_sset() -> SSetPresentation:
    zero = PLFunction.constant(0, 1, 0)
    return SSetPresentation(1, (zero, tent()), (zero, tent()))


def sset3() -> SSetPresentation:
    """Three envelopes (flat, tent, dip-and-rise) and four selections, one switching."""
    zero = PLFunction.constant(0, 1, 0)
    dip = PLFunction.from_points([(0, 0), (F(1, 4), 0), (F(1, 2), F(-1, 8)), (F(3, 4), 0), (1, F(1, 8))])
    switch = PLFunction.from_points([(0, 0), (F(1, 8), 0), (F(1, 4), F(1, 8)), (F(3, 8), 0), (F(3, 4), 0), (1, F(1, 8))])
    return SSetPresentation(1, (zero, tent(), dip), (zero, tent(), dip, switch))


def corner() -> PLFunction:
    return PLFunction.from_points([(0, 0), (F(1, 2), 0), (1, F(1, 2))])


def square_presentation(lo=(0, 0), side=1, filled=True) -> PlanarSetPresentation:
    x, y = qpoint(lo)
    s = F(side)
    c = [(x, y), (x + s, y), (x + s, y + s), (x, y + s)]
    pieces = tuple(segment_piece(c[i], c[(i + 1) % 4]) for i in range(4))
    fills = ((x + s / 2, y + s / 2),) if filled else ()
    return PlanarSetPresentation(pieces, (), fills)


def cantor_gaps(depth: int) -> List[Tuple[Fraction, Fraction]]:
    """Bounded components of ``R \\ C`` removed up to ``depth`` (open intervals, sorted)."""
    out = []
    level = [(F(0), F(1))]
    for _ in range(depth):
        nxt = []
        for a, b in level:
            t = (b - a) / 3
            out.append((a + t, b - t))
            nxt += [(a, a + t), (b - t, b)]
        level = nxt
    return sorted(out)


def cantor_scene(depth: int, samples: int = 8) -> Scene:
    """``M = {y >= f} u {y <= -f}`` with ``f = d_F^2`` sampled onto a PL function.

    ``F`` is the union of the closed middle thirds ``[u_n, v_n]`` of the
    removed intervals up to ``depth``.  On each gap of ``F`` the quadratic
    is sampled at ``samples`` equally spaced points; the result is exact PL.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    Fint = []
    for a, b in cantor_gaps(depth):
        t = (b - a) / 3
        Fint.append((a + t, b - t))
    xs = {F(0), F(1)}
    gaps = []
    cur = F(0)
    for u, v in Fint:
        gaps.append((cur, u))
        cur = v
        xs.update((u, v))
    gaps.append((cur, F(1)))
    for a, b in gaps:
        xs.update(a + (b - a) * k / (samples - 1) for k in range(samples))

    def dF(x):
        best = None
        for u, v in Fint:
            d = u - x if x < u else (x - v if x > v else F(0))
            best = d if best is None or d < best else best
        return best

    xs = sorted(xs)
    f = PLFunction(tuple(xs), tuple(dF(x) ** 2 for x in xs))
    pieces = (DCGraphPiece(f), DCGraphPiece(-f))
    window = Window(0, F(-1, 4), 1, F(1, 4))
    pres = PlanarSetPresentation(pieces, (), ((F(1, 2), F(1, 8)), (F(1, 2), F(-1, 8))), window)
    note = f"f = (d_F)^2 sampled at {samples} points per gap of F; the PL graph replaces the quadratic"
    return Scene(pres, f"cantor-d{depth}", {"expected_projection_components": 2 ** depth}, note)


def staircase_points(count: int = 21) -> List[Tuple[Fraction, Fraction]]:
    return [(F(1, 3 ** n), F((-1) ** n, 10 * 3 ** n)) for n in range(count)]


def _scene(name, pres, probes=None, notes="") -> Scene:
    return Scene(pres, name, probes or {}, notes)


def _tent_scene() -> Scene:
    return _scene("tent-sset", PlanarSetPresentation((PlacedSSet(tent_sset()),)), {"n-sweep": [8, 16, 32, 64]})


def _sset3_scene() -> Scene:
    return _scene("sset3", PlanarSetPresentation((PlacedSSet(sset3()),)), {"n-sweep": [8, 16, 32, 64]})


def _corner_scene() -> Scene:
    return _scene("corner", PlanarSetPresentation((DCGraphPiece(corner()),)), {"n-sweep": [8, 16, 32, 64]})


def _square_scene() -> Scene:
    return _scene("square", square_presentation())


def _staircase_scene() -> Scene:
    pts = [(F(0), F(0))] + staircase_points()
    pres = PlanarSetPresentation((), tuple(pts), (), None, ((F(0), F(0)),))
    return _scene("staircase-isolated", pres, {"z": ["0", "0"], "u": "1", "N": [3, 8]})


def _accumulating_points_scene() -> Scene:
    pts = [(F(0), F(0))] + [(F(1, 3 ** n), F(0)) for n in range(21)]
    pres = PlanarSetPresentation((), tuple(pts), (), None, ((F(0), F(0)),))
    return _scene("accumulating-points", pres, {"z": ["0", "0"], "u": "1"})


def _two_segments_scene() -> Scene:
    pres = PlanarSetPresentation((segment_piece((0, 0), (1, 0)), segment_piece((0, 1), (1, 1))))
    return _scene("two-segments", pres)


def _square_and_point_scene() -> Scene:
    sq = square_presentation()
    pres = PlanarSetPresentation(sq.skeleton, ((F(3), F(1, 2)),), sq.fills)
    return _scene("square-and-point", pres)


def _tent_and_segment_scene() -> Scene:
    pres = PlanarSetPresentation((PlacedSSet(tent_sset()), segment_piece((0, 1), (1, 2))))
    return _scene("tent-and-segment", pres)


def _parallel_segments_scene() -> Scene:
    segs = [segment_piece((0, F(1, 2 ** n)), (1, F(1, 2 ** n))) for n in range(10)]
    segs.append(segment_piece((0, 0), (1, 0)))
    return _scene("parallel-segments", PlanarSetPresentation(tuple(segs)))


def _shrinking_squares_scene() -> Scene:
    pieces = []
    fills = []
    for n in range(1, 9):
        s = F(1, 3 ** n)
        sq = square_presentation((2 * s, 0), s / 2)
        pieces += sq.skeleton
        fills += sq.fills
    pieces.append(segment_piece((-1, 0), (0, 0)))
    return _scene("shrinking-squares", PlanarSetPresentation(tuple(pieces), (), tuple(fills), None, ((F(0), F(0)),)))


EXAMPLES: Dict[str, Callable[[], Scene]] = {
    "tent-sset": _tent_scene,
    "sset3": _sset3_scene,
    "corner": _corner_scene,
    "square": _square_scene,
    "staircase-isolated": _staircase_scene,
    "accumulating-points": _accumulating_points_scene,
    "two-segments": _two_segments_scene,
    "square-and-point": _square_and_point_scene,
    "tent-and-segment": _tent_and_segment_scene,
    "parallel-segments": _parallel_segments_scene,
    "shrinking-squares": _shrinking_squares_scene,
}

# curated scenes for the component-system verdicts: name -> expected discreteness
COMPONENT_SCENES: Dict[str, bool] = {
    "two-segments": True,
    "square-and-point": True,
    "tent-and-segment": True,
    "parallel-segments": False,
    "shrinking-squares": False,
    "accumulating-points": False,
}


def generate(name: str) -> Scene:
    """Build a named example (``cantor-d<k>`` or a key of :data:`EXAMPLES`)."""
    m = re.fullmatch(r"cantor-d(\d+)", name)
    if m:
        return cantor_scene(int(m.group(1)))
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; known: cantor-d<k>, {', '.join(sorted(EXAMPLES))}")
    return EXAMPLES[name]()
