"""Finite presentations of closed planar sets.

A set is presented as a *skeleton* (DC graphs and placed (s)-sets), a list
of isolated points and a list of fill seeds, each selecting one component
of the complement of the skeleton.  An optional axis-parallel window clips
the presentation: the window frame separates complement components but is
not itself part of the skeleton.
"""

from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import plcalc
from ._arrangement import OUTER, Arrangement, canonical_segments, on_segment
from ._q import add, is_exact, num_json, num_parse, q, qpoint, qstr
from .errors import PreconditionError
from .plcalc import PLFunction
from .planar import Rotation

__all__ = [
    "DCGraphPiece",
    "SSetPresentation",
    "PlacedSSet",
    "PlanarSetPresentation",
    "Window",
    "SSetReport",
    "AssemblyReport",
    "Similarity",
    "Shear",
    "DCMap",
    "validate_sset",
    "reshape",
    "assemble_and_check",
    "image_under_dc_map",
    "same_realized_set",
    "segment_piece",
]

FRAME = "frame"


def _pt(p):
    return qpoint(p) if is_exact(*p) else (p[0], p[1])


# ---------------------------------------------------------------------------
# pieces


@dataclass(frozen=True)
class DCGraphPiece:
    """``offset + rotation(graph of profile)``."""

    profile: PLFunction
    rotation: Rotation = field(default_factory=Rotation.identity)
    offset: Tuple = (Fraction(0), Fraction(0))

    def __post_init__(self):
        object.__setattr__(self, "offset", _pt(self.offset))

    def place(self, p):
        return add(self.offset, self.rotation.apply(p))

    def polyline(self) -> List[Tuple]:
        return [self.place(p) for p in self.profile.points]

    def segments(self) -> List[Tuple[Tuple, Tuple]]:
        pts = self.polyline()
        return list(zip(pts, pts[1:]))

    @property
    def is_point(self) -> bool:
        return self.profile.is_point

    def to_json(self) -> dict:
        return {
            "kind": "graph",
            "rotation": self.rotation.to_json(),
            "offset": [num_json(c) for c in self.offset],
            "profile": self.profile.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "DCGraphPiece":
        return cls(
            PLFunction.from_json(data["profile"]),
            Rotation.from_json(data.get("rotation")),
            tuple(num_parse(c) for c in data.get("offset", ["0", "0"])),
        )


def segment_piece(a, b) -> DCGraphPiece:
    """The segment ``[a, b]`` as an exact DC graph (graph over x, or over y if vertical)."""
    a, b = qpoint(a), qpoint(b)
    if a[0] != b[0]:
        lo, hi = sorted((a, b))
        return DCGraphPiece(PLFunction((lo[0], hi[0]), (lo[1], hi[1])))
    if a[1] == b[1]:
        return DCGraphPiece(PLFunction((a[0],), (a[1],)))
    y0, y1 = sorted((a[1], b[1]))
    return DCGraphPiece(PLFunction((y0, y1), (-a[0], -a[0])), Rotation(0, 1))


@dataclass(frozen=True)
class SSetPresentation:
    """Finite data of an (s)-set: envelopes on ``[0, r]`` and a selection list."""

    r: Fraction
    envelopes: Tuple[PLFunction, ...]
    selections: Tuple[PLFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "r", q(self.r))
        object.__setattr__(self, "envelopes", tuple(self.envelopes))
        object.__setattr__(self, "selections", tuple(self.selections))

    @property
    def k(self) -> int:
        return len(self.envelopes)

    def polylines(self) -> List[List[Tuple]]:
        return [h.points for h in self.selections]

    def to_json(self) -> dict:
        return {
            "r": qstr(self.r),
            "envelopes": [f.to_json() for f in self.envelopes],
            "selections": [h.to_json() for h in self.selections],
        }

    @classmethod
    def from_json(cls, data) -> "SSetPresentation":
        return cls(
            q(data["r"]),
            tuple(PLFunction.from_json(f) for f in data["envelopes"]),
            tuple(PLFunction.from_json(h) for h in data["selections"]),
        )


@dataclass(frozen=True)
class PlacedSSet:
    """An (s)-set moved by the isometry ``p -> offset + rotation(p)``."""

    sset: SSetPresentation
    rotation: Rotation = field(default_factory=Rotation.identity)
    offset: Tuple = (Fraction(0), Fraction(0))

    def __post_init__(self):
        object.__setattr__(self, "offset", _pt(self.offset))

    def place(self, p):
        return add(self.offset, self.rotation.apply(p))

    def polylines(self) -> List[List[Tuple]]:
        return [[self.place(p) for p in h.points] for h in self.sset.selections]

    def segments(self) -> List[Tuple[Tuple, Tuple]]:
        out = []
        for pts in self.polylines():
            out.extend(zip(pts, pts[1:]))
        return out

    def graph_pieces(self) -> List[DCGraphPiece]:
        return [DCGraphPiece(h, self.rotation, self.offset) for h in self.sset.selections]

    @property
    def is_point(self) -> bool:
        return False

    def to_json(self) -> dict:
        d = {"kind": "sset", "rotation": self.rotation.to_json(), "offset": [num_json(c) for c in self.offset]}
        d.update(self.sset.to_json())
        return d

    @classmethod
    def from_json(cls, data) -> "PlacedSSet":
        return cls(
            SSetPresentation.from_json(data),
            Rotation.from_json(data.get("rotation")),
            tuple(num_parse(c) for c in data.get("offset", ["0", "0"])),
        )


Piece = Union[DCGraphPiece, PlacedSSet]


def piece_from_json(data) -> Piece:
    kind = data.get("kind")
    if kind == "graph":
        return DCGraphPiece.from_json(data)
    if kind == "sset":
        return PlacedSSet.from_json(data)
    raise ValueError(f"unknown piece kind {kind!r}")


@dataclass(frozen=True)
class Window:
    xmin: Fraction
    ymin: Fraction
    xmax: Fraction
    ymax: Fraction

    def __post_init__(self):
        for name in ("xmin", "ymin", "xmax", "ymax"):
            object.__setattr__(self, name, q(getattr(self, name)))
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError("window must have positive width and height")

    def corners(self):
        return [(self.xmin, self.ymin), (self.xmax, self.ymin), (self.xmax, self.ymax), (self.xmin, self.ymax)]

    def contains(self, p) -> bool:
        return self.xmin <= p[0] <= self.xmax and self.ymin <= p[1] <= self.ymax

    @property
    def diameter(self) -> float:
        return float(((self.xmax - self.xmin) ** 2 + (self.ymax - self.ymin) ** 2)) ** 0.5

    def to_json(self) -> dict:
        return {k: qstr(getattr(self, k)) for k in ("xmin", "ymin", "xmax", "ymax")}

    @classmethod
    def from_json(cls, data) -> Optional["Window"]:
        if not data:
            return None
        return cls(*(q(data[k]) for k in ("xmin", "ymin", "xmax", "ymax")))


# ---------------------------------------------------------------------------
# planar presentation


@dataclass(frozen=True)
class PlanarSetPresentation:
    """``M = skeleton u isolated u (selected complement components)``."""

    skeleton: Tuple[Piece, ...] = ()
    isolated: Tuple[Tuple, ...] = ()
    fills: Tuple[Tuple, ...] = ()
    window: Optional[Window] = None
    accumulations: Tuple[Tuple, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "skeleton", tuple(self.skeleton))
        object.__setattr__(self, "isolated", tuple(_pt(p) for p in self.isolated))
        object.__setattr__(self, "fills", tuple(_pt(p) for p in self.fills))
        object.__setattr__(self, "accumulations", tuple(_pt(p) for p in self.accumulations))

    # -- geometry ---------------------------------------------------------

    def tagged_segments(self) -> List[Tuple[Tuple, Tuple, int]]:
        return list(self._tagged)

    @cached_property
    def _tagged(self) -> Tuple[Tuple[Tuple, Tuple, int], ...]:
        out = []
        for i, piece in enumerate(self.skeleton):
            for a, b in piece.segments():
                if a != b:
                    out.append((a, b, i))
        return tuple(out)

    def segments(self) -> List[Tuple[Tuple, Tuple]]:
        return [(a, b) for a, b, _ in self.tagged_segments()]

    def points(self) -> List[Tuple]:
        """Isolated points plus degenerate (single-point) pieces."""
        pts = list(self.isolated)
        for piece in self.skeleton:
            if piece.is_point:
                pts.append(piece.polyline()[0])
        return pts

    @property
    def is_empty(self) -> bool:
        return not self.skeleton and not self.isolated and not self.fills

    @property
    def exact(self) -> bool:
        return all(is_exact(*a, *b) for a, b in self.segments()) and all(is_exact(*p) for p in self.points())

    @cached_property
    def arrangement(self) -> Arrangement:
        segs = self.tagged_segments()
        if self.window is not None:
            c = self.window.corners()
            segs = segs + [(c[i], c[(i + 1) % 4], FRAME) for i in range(4)]
        return Arrangement(segs)

    @cached_property
    def _frame_component(self) -> Optional[int]:
        if self.window is None:
            return None
        arr = self.arrangement
        return arr.vertex_component[arr.index[self.window.corners()[0]]]

    @cached_property
    def fill_signatures(self) -> Tuple[Tuple[int, ...], ...]:
        arr = self.arrangement
        sigs = []
        for seed in self.fills:
            if arr.on_graph(seed):
                raise PreconditionError(f"fill seed {seed} lies on the skeleton")
            if self.window is not None and not self.window.contains(seed):
                raise PreconditionError(f"fill seed {seed} lies outside the window")
            sigs.append(arr.locate(seed))
        return tuple(sigs)

    def signature_filled(self, sig) -> bool:
        if self._frame_component is not None and sig[self._frame_component] == OUTER:
            return False
        return sig in self.fill_signatures

    def on_skeleton(self, p) -> bool:
        for a, b in self.segments():
            if on_segment(p, a, b):
                return True
        return False

    def in_fill(self, p) -> bool:
        """``p`` lies in a selected complement component (open face)."""
        if not self.fills:
            return False
        arr = self.arrangement
        if arr.on_graph(p):
            return False
        return self.signature_filled(arr.locate(p))

    def contains(self, p) -> bool:
        p = _pt(p)
        if p in self.points() or self.on_skeleton(p):
            return True
        if not self.fills:
            return False
        arr = self.arrangement
        if arr.on_graph(p):
            # frame point: belongs to M iff an adjacent face is filled
            return any(self._edge_touches_fill(u, v) for u, v, tags in arr.edges() if on_segment(p, u, v))
        return self.signature_filled(arr.locate(p))

    def touches_fill(self, p) -> bool:
        """``p`` lies in the closure of a filled face."""
        if not self.fills:
            return False
        p = _pt(p)
        arr = self.arrangement
        if p in arr.adj:
            return any(self._edge_touches_fill(p, q) for q in arr.adj[p])
        if arr.on_graph(p):
            return any(self._edge_touches_fill(u, v) for u, v, _ in arr.edges() if on_segment(p, u, v))
        return self.signature_filled(arr.locate(p))

    def _edge_touches_fill(self, u, v) -> bool:
        arr = self.arrangement
        return self.signature_filled(arr.side_signature(u, v)) or self.signature_filled(arr.side_signature(v, u))

    def fill_boundary_segments(self) -> List[Tuple[Tuple, Tuple]]:
        """Frame edges adjacent to a filled face (they belong to the clipped M)."""
        if not self.fills or self.window is None:
            return []
        out = []
        for u, v, tags in self.arrangement.edges():
            if tags == {FRAME} and self._edge_touches_fill(u, v):
                out.append((u, v))
        return out

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "skeleton": [p.to_json() for p in self.skeleton],
            "isolated": [[num_json(c) for c in p] for p in self.isolated],
            "fills": [[num_json(c) for c in p] for p in self.fills],
        }

    @classmethod
    def from_json(cls, data, window=None, accumulations=()) -> "PlanarSetPresentation":
        return cls(
            tuple(piece_from_json(p) for p in data.get("skeleton", [])),
            tuple(tuple(num_parse(c) for c in p) for p in data.get("isolated", [])),
            tuple(tuple(num_parse(c) for c in p) for p in data.get("fills", [])),
            window,
            tuple(accumulations),
        )


# ---------------------------------------------------------------------------
# (s)-set validation


@dataclass
class SSetReport:
    valid: bool
    clauses: Dict[str, bool]
    lipschitz: Fraction
    selection_convexity: List[Fraction]
    messages: List[str] = field(default_factory=list)
    note: str = "finite selection family H (modeling choice)"

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "clauses": dict(self.clauses),
            "lipschitz": qstr(self.lipschitz),
            "selection_convexity": [qstr(c) for c in self.selection_convexity],
            "messages": list(self.messages),
            "note": self.note,
        }


def _membership_points(h: PLFunction, envelopes: Sequence[PLFunction]) -> List[Fraction]:
    xs = set(h.breakpoints)
    for f in envelopes:
        xs |= set(f.breakpoints)
    for f in envelopes:
        diff = plcalc.pl_combine("sub", h, f)
        xs |= set(plcalc._zero_crossings(diff.refine(xs)))
    ordered = sorted(xs)
    mids = [(a + b) / 2 for a, b in zip(ordered, ordered[1:])]
    return sorted(set(ordered) | set(mids))


def selection_membership(h: PLFunction, envelopes: Sequence[PLFunction]) -> Optional[Fraction]:
    """First abscissa where ``h`` leaves all envelope graphs, or ``None``."""
    for x in _membership_points(h, envelopes):
        y = h(x)
        if not any(f(x) == y for f in envelopes):
            return x
    return None


def validate_sset(pres: SSetPresentation) -> SSetReport:
    """Check the defining clauses of an (s)-set on finite data."""
    clauses: Dict[str, bool] = {}
    msgs: List[str] = []
    r = pres.r
    dom = (Fraction(0), r)
    structural = r > 0 and bool(pres.envelopes)
    for name, fam in (("envelope", pres.envelopes), ("selection", pres.selections)):
        for i, f in enumerate(fam):
            if f.domain != dom:
                structural = False
                msgs.append(f"{name} {i} has domain {f.domain}, expected [0, {r}]")
    clauses["structure"] = structural
    if not structural:
        clauses.update(gate=False, membership=False, nonempty=bool(pres.selections), lipschitz_shared=False)
        return SSetReport(False, clauses, Fraction(0), [], msgs)

    gate = True
    for i, f in enumerate(pres.envelopes):
        if f(0) != 0:
            gate = False
            msgs.append(f"envelope {i}: value at 0 is {f(0)}, not 0")
        if plcalc.one_sided_slope(f, 0, "right") != 0:
            gate = False
            msgs.append(f"envelope {i}: right slope at 0 is {plcalc.one_sided_slope(f, 0, 'right')}, not 0")
    clauses["gate"] = gate

    membership = True
    for j, h in enumerate(pres.selections):
        bad = selection_membership(h, pres.envelopes)
        if bad is not None:
            membership = False
            msgs.append(f"selection {j} leaves the envelopes at x = {bad}")
    clauses["membership"] = membership
    clauses["nonempty"] = bool(pres.selections)

    K = max(f.lipschitz() for f in pres.envelopes)
    conv = [plcalc.convexity(h, 0, r) for h in pres.selections]
    clauses["lipschitz_shared"] = all(h.lipschitz() <= K for h in pres.selections)
    valid = all(clauses.values())
    return SSetReport(valid, clauses, K, conv, msgs)


# ---------------------------------------------------------------------------
# similarities, shears and maps


@dataclass(frozen=True)
class Similarity:
    """``p -> scale * rotation(p) + translation``."""

    rotation: Rotation = field(default_factory=Rotation.identity)
    scale: Fraction = Fraction(1)
    translation: Tuple = (Fraction(0), Fraction(0))

    def __post_init__(self):
        s = self.scale if isinstance(self.scale, float) else q(self.scale)
        if not s > 0:
            raise PreconditionError("a similarity needs a positive scale (bilipschitz)")
        object.__setattr__(self, "scale", s)
        object.__setattr__(self, "translation", _pt(self.translation))

    def apply(self, p):
        r = self.rotation.apply(p)
        return (self.scale * r[0] + self.translation[0], self.scale * r[1] + self.translation[1])

    __call__ = apply

    def inverse(self) -> "Similarity":
        rinv = self.rotation.inverse()
        s = 1 / self.scale
        t = rinv.apply(self.translation)
        return Similarity(rinv, s, (-s * t[0], -s * t[1]))

    @property
    def axis_aligned(self) -> bool:
        return self.rotation.c == 0 or self.rotation.s == 0


@dataclass(frozen=True)
class Shear:
    """``(x, y) -> (x, y + w(x))`` (``axis="vertical"``) or ``(x + w(y), y)``.

    ``w`` is extended by constants beyond its domain.
    """

    w: PLFunction
    axis: str = "vertical"

    def __post_init__(self):
        if self.axis not in ("vertical", "horizontal"):
            raise ValueError("axis must be 'vertical' or 'horizontal'")

    def apply(self, p):
        if self.axis == "vertical":
            return (p[0], p[1] + self.w.eval_extended(p[0]))
        return (p[0] + self.w.eval_extended(p[1]), p[1])

    __call__ = apply

    def inverse(self) -> "Shear":
        return Shear(-self.w, self.axis)

    @property
    def lipschitz(self) -> Fraction:
        return self.w.lipschitz()

    def refine_segment(self, a, b) -> List[Tuple]:
        """Points of ``[a, b]`` (ends included) where the image polyline may bend."""
        k = 0 if self.axis == "vertical" else 1
        lo, hi = sorted((a[k], b[k]))
        cuts = [x for x in self.w.breakpoints if lo < x < hi]
        pts = [a]
        for x in sorted(cuts, reverse=a[k] > b[k]):
            t = (x - a[k]) / (b[k] - a[k])
            pts.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
        pts.append(b)
        return pts


@dataclass(frozen=True)
class DCMap:
    """Composition of similarities and PL shears, applied first to last."""

    steps: Tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        for s in self.steps:
            if not isinstance(s, (Similarity, Shear)):
                raise PreconditionError(f"unsupported map component {s!r}")

    def apply(self, p):
        for s in self.steps:
            p = s.apply(p)
        return p

    __call__ = apply

    def inverse(self) -> "DCMap":
        return DCMap(tuple(s.inverse() for s in reversed(self.steps)))


# ---------------------------------------------------------------------------
# reshape


def _scale_sset(s: SSetPresentation, c) -> SSetPresentation:
    return SSetPresentation(
        s.r * c, tuple(f.scaled(c) for f in s.envelopes), tuple(h.scaled(c) for h in s.selections)
    )


def _similar_piece(piece: Piece, sim: Similarity) -> Piece:
    if isinstance(piece, DCGraphPiece):
        return DCGraphPiece(piece.profile.scaled(sim.scale), sim.rotation.compose(piece.rotation), sim.apply(piece.offset))
    return PlacedSSet(_scale_sset(piece.sset, sim.scale), sim.rotation.compose(piece.rotation), sim.apply(piece.offset))


def _similar_window(w: Optional[Window], sim: Similarity) -> Optional[Window]:
    if w is None:
        return None
    if not sim.axis_aligned:
        raise PreconditionError("a windowed scene only admits axis-aligned similarities")
    pts = [sim.apply(c) for c in w.corners()]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return Window(min(xs), min(ys), max(xs), max(ys))


def reshape(pres, action: str, value):
    """``action = "truncate"`` (value ``rho``) or ``"similarity"`` (value :class:`Similarity`)."""
    if action == "truncate":
        if not isinstance(pres, SSetPresentation):
            raise PreconditionError("truncation applies to (s)-set presentations")
        rho = q(value)
        if not 0 < rho < pres.r:
            raise PreconditionError(f"truncation length {rho} not in (0, {pres.r})")
        return SSetPresentation(
            rho,
            tuple(f.restrict(0, rho) for f in pres.envelopes),
            tuple(h.restrict(0, rho) for h in pres.selections),
        )
    if action != "similarity":
        raise ValueError(f"unknown reshape action {action!r}")
    sim: Similarity = value
    if isinstance(pres, SSetPresentation):
        if not (sim.rotation.is_identity() and sim.translation == (0, 0)):
            raise PreconditionError("a bare (s)-set only admits scalings; place it in a scene first")
        return _scale_sset(pres, sim.scale)
    return PlanarSetPresentation(
        tuple(_similar_piece(p, sim) for p in pres.skeleton),
        tuple(sim.apply(p) for p in pres.isolated),
        tuple(sim.apply(p) for p in pres.fills),
        _similar_window(pres.window, sim),
        tuple(sim.apply(p) for p in pres.accumulations),
    )


# ---------------------------------------------------------------------------
# assembly


@dataclass
class AssemblyReport:
    fill_faces: List[Tuple[int, ...]]
    boundary_edges: List[Tuple[Tuple, Tuple]]
    interior_edges: List[Tuple[Tuple, Tuple]]
    frame_edges_in_m: int
    boundary_in_skeleton: bool
    skeleton_in_m: bool
    boundary_points: List[Tuple]
    passes: bool

    def boundary_projection(self) -> List[Tuple[Fraction, Fraction]]:
        """Components of the first-coordinate projection of the boundary."""
        ivs = [tuple(sorted((u[0], v[0]))) for u, v in self.boundary_edges]
        ivs += [(p[0], p[0]) for p in self.boundary_points]
        return merge_intervals(ivs)

    def to_json(self) -> dict:
        return {
            "passes": self.passes,
            "fills": len(self.fill_faces),
            "boundary_edges": len(self.boundary_edges),
            "interior_edges": len(self.interior_edges),
            "frame_edges_in_m": self.frame_edges_in_m,
            "boundary_in_skeleton": self.boundary_in_skeleton,
            "skeleton_in_m": self.skeleton_in_m,
            "boundary_projection_components": len(self.boundary_projection()),
        }


def merge_intervals(ivs) -> List[Tuple]:
    """Union of closed intervals (touching ones merge)."""
    out: List[List] = []
    for a, b in sorted(ivs):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [tuple(iv) for iv in out]


class _SegmentIndex:
    """Segments per piece, sorted by left abscissa for windowed lookup."""

    def __init__(self, tagged):
        by_piece: Dict[int, List[Tuple]] = {}
        for a, b, i in tagged:
            lo, hi = sorted((a[0], b[0]))
            by_piece.setdefault(i, []).append((lo, hi, a, b))
        self.pieces = {}
        for i, segs in by_piece.items():
            segs.sort(key=lambda s: s[0])
            width = max(hi - lo for lo, hi, _, _ in segs)
            self.pieces[i] = ([s[0] for s in segs], segs, width)

    def covers(self, u, v, pieces) -> bool:
        x, y = sorted((u[0], v[0]))
        for i in pieces:
            keys, segs, width = self.pieces[i]
            for k in range(bisect_left(keys, x - width), bisect_right(keys, x)):
                _, hi, a, b = segs[k]
                if y <= hi and on_segment(u, a, b) and on_segment(v, a, b):
                    return True
        return False


def assemble_and_check(pres: PlanarSetPresentation) -> AssemblyReport:
    """Resolve fills to faces and certify ``boundary(M) c K c M`` with ``K`` the skeleton."""
    arr = pres.arrangement
    sigs = list(pres.fill_signatures)
    boundary, interior = [], []
    frame_in_m = 0
    skeletal_edges = set()
    for u, v, tags in arr.edges():
        left = pres.signature_filled(arr.side_signature(u, v)) if pres.fills else False
        right = pres.signature_filled(arr.side_signature(v, u)) if pres.fills else False
        if not tags - {FRAME}:
            if left or right:
                frame_in_m += 1
            continue
        skeletal_edges.add((u, v))
        if left and right:
            interior.append((u, v))
        else:
            boundary.append((u, v))
    bpts = [p for p in pres.points() if not arr.on_graph(p) and not pres.in_fill(p)]
    # exact check: every skeletal edge of the arrangement lies on a segment of a piece it is tagged with
    index = _SegmentIndex(pres.tagged_segments())
    skeleton_ok = all(index.covers(u, v, tags - {FRAME}) for u, v, tags in arr.edges() if tags - {FRAME})
    boundary_ok = skeleton_ok and all(e in skeletal_edges for e in boundary)
    return AssemblyReport(sigs, boundary, interior, frame_in_m, boundary_ok, skeleton_ok, bpts, boundary_ok and skeleton_ok)


# ---------------------------------------------------------------------------
# images under DC maps


def _map_polyline(params: Sequence[Fraction], pts: Sequence[Tuple], step) -> Tuple[List[Fraction], List[Tuple]]:
    if isinstance(step, Similarity):
        return list(params), [step.apply(p) for p in pts]
    out_t: List[Fraction] = [params[0]]
    out_p: List[Tuple] = [pts[0]]
    for (t0, a), (t1, b) in zip(zip(params, pts), zip(params[1:], pts[1:])):
        seg = step.refine_segment(a, b)
        for p in seg[1:]:
            if b != a:
                k = 0 if a[0] != b[0] else 1
                t = t0 + (t1 - t0) * (p[k] - a[k]) / (b[k] - a[k])
            else:
                t = t1
            out_t.append(t)
            out_p.append(p)
    return out_t, [step.apply(p) for p in out_p]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _graph_pieces_from_curve(params: Sequence[Fraction], pts: Sequence[Tuple]) -> List[DCGraphPiece]:
    """Reparametrize a PL curve ``t -> (phi1(t), phi2(t))`` into graphs over x.

    The curve is split where ``phi1`` changes monotonicity; on each strictly
    monotone run the graph profile is ``phi2 o phi1^{-1}``; vertical runs
    become graphs over y.
    """
    if len(pts) == 1:
        return [DCGraphPiece(PLFunction((pts[0][0],), (pts[0][1],)))]
    signs = [_sign(b[0] - a[0]) for a, b in zip(pts, pts[1:])]
    runs: List[Tuple[int, int]] = []
    start = 0
    for i in range(1, len(signs)):
        if signs[i] != signs[start]:
            runs.append((start, i))
            start = i
    runs.append((start, len(signs)))
    pieces = []
    for lo, hi in runs:
        ts = list(params[lo:hi + 1])
        ps = list(pts[lo:hi + 1])
        sgn = signs[lo]
        if sgn == 0:
            ys = sorted(p[1] for p in ps)
            pieces.append(DCGraphPiece(PLFunction(tuple(ys), tuple(-ps[0][0] for _ in ys)), Rotation(0, 1)))
            continue
        if sgn < 0:
            ts = [-t for t in reversed(ts)]
            ps = list(reversed(ps))
        phi1 = PLFunction(tuple(ts), tuple(p[0] for p in ps))
        phi2 = PLFunction(tuple(ts), tuple(p[1] for p in ps))
        h = plcalc.compose(phi2, plcalc.invert(phi1))
        pieces.append(DCGraphPiece(h))
    return pieces


def _map_graph_piece(piece: DCGraphPiece, dcmap: DCMap) -> List[DCGraphPiece]:
    if all(isinstance(s, Similarity) for s in dcmap.steps):
        out = piece
        for s in dcmap.steps:
            out = _similar_piece(out, s)
        return [out]
    params = list(piece.profile.breakpoints)
    pts = piece.polyline()
    for step in dcmap.steps:
        params, pts = _map_polyline(params, pts, step)
    return _graph_pieces_from_curve(params, pts)


def _shear_sset(piece: PlacedSSet, shear: Shear) -> Optional[PlacedSSet]:
    """Vertical shear of an unrotated (s)-set, kept in (s)-set form when the gate survives."""
    if shear.axis != "vertical" or not piece.rotation.is_identity() or not is_exact(*piece.offset):
        return None
    ox, oy = piece.offset
    r = piece.sset.r
    lo, hi = shear.w.domain
    w = shear.w.extend_constant(min(lo, ox), max(hi, ox + r)).restrict(ox, ox + r).shift(-ox, 0)
    w0 = w(0)
    w = w.shift(0, -w0)
    if plcalc.one_sided_slope(w, 0, "right") != 0:
        return None
    env = tuple(plcalc.pl_combine("add", f, w) for f in piece.sset.envelopes)
    sel = tuple(plcalc.pl_combine("add", h, w) for h in piece.sset.selections)
    return PlacedSSet(SSetPresentation(r, env, sel), piece.rotation, (ox, oy + w0))


def _map_piece(piece: Piece, dcmap: DCMap) -> List[Piece]:
    if isinstance(piece, DCGraphPiece):
        return _map_graph_piece(piece, dcmap)
    cur: Piece = piece
    for i, step in enumerate(dcmap.steps):
        if isinstance(step, Similarity):
            cur = _similar_piece(cur, step)
            continue
        sheared = _shear_sset(cur, step)
        if sheared is None:
            rest = DCMap(dcmap.steps[i:])
            out: List[Piece] = []
            for g in cur.graph_pieces():
                out.extend(_map_graph_piece(g, rest))
            return out
        cur = sheared
    return [cur]


def image_under_dc_map(pres: PlanarSetPresentation, dcmap: DCMap) -> PlanarSetPresentation:
    """Image of a presentation under a composition of similarities and PL shears."""
    if not isinstance(dcmap, DCMap):
        dcmap = DCMap(tuple(dcmap))
    window = pres.window
    for step in dcmap.steps:
        if window is not None:
            if isinstance(step, Shear):
                raise PreconditionError("shears are not supported on windowed scenes")
            window = _similar_window(window, step)
    skeleton: List[Piece] = []
    for piece in pres.skeleton:
        skeleton.extend(_map_piece(piece, dcmap))
    return PlanarSetPresentation(
        tuple(skeleton),
        tuple(dcmap.apply(p) for p in pres.isolated),
        tuple(dcmap.apply(p) for p in pres.fills),
        window,
        tuple(dcmap.apply(p) for p in pres.accumulations),
    )


def same_realized_set(a: PlanarSetPresentation, b: PlanarSetPresentation) -> bool:
    """Exact equality of the realized sets of two presentations."""
    if canonical_segments(a.segments()) != canonical_segments(b.segments()):
        return False

    def loose_points(p: PlanarSetPresentation):
        return {x for x in p.points() if not p.on_skeleton(x)}

    if loose_points(a) != loose_points(b):
        return False
    for x, y in ((a, b), (b, a)):
        for seed in x.fills:
            if not y.in_fill(seed):
                return False
    return True
