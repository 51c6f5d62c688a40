"""Structural analysis of presented sets: components, isolated and singular points, paths."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ._arrangement import Arrangement, on_segment, segment_intersection
from ._q import is_exact, num_json, q, qpoint, qstr
from .errors import PreconditionError
from .field import nearest_on_segment
from .planar import tangent_fan
from .plcalc import PLFunction
from .sets import (
    FRAME,
    DCGraphPiece,
    PlacedSSet,
    PlanarSetPresentation,
    merge_intervals,
    segment_piece,
)

__all__ = [
    "ComponentReport",
    "PointsReport",
    "PathResult",
    "ImageReport",
    "components_report",
    "isolated_points_report",
    "singular_tangent_points",
    "dc_graph_decomposition",
    "path_between",
    "d1_check",
    "nowhere_dense_image",
    "find_accumulation",
]

CHAIN_RATIO = Fraction(1, 2)
CHAIN_LENGTH = 6
DECLARED_MEMBERS = 3


def _pt_json(p):
    return [num_json(c) for c in p]


# ---------------------------------------------------------------------------
# accumulation heuristics


def _chain(dists: Sequence) -> int:
    """Length of the greedy chain of positive distances shrinking by ``CHAIN_RATIO``."""
    length, last = 0, None
    for d in sorted((d for d in dists if d > 0), reverse=True):
        if last is None or d <= last * CHAIN_RATIO:
            length += 1
            last = d
    return length


def find_accumulation(n: int, sep: Callable[[int, int], float], declared: Sequence = (),
                      to_point: Optional[Callable[[Tuple, int], float]] = None,
                      contains: Optional[Callable[[Tuple, int], bool]] = None):
    """Detect a family of ``n`` objects accumulating at a point, from finite data.

    A declared point flags accumulation when at least ``DECLARED_MEMBERS``
    objects not containing it approach it geometrically; otherwise an object
    from which ``CHAIN_LENGTH`` others recede geometrically (ratio at most
    ``CHAIN_RATIO``) is taken as an accumulation site.  Returns the declared
    point or the object index, or ``None``.
    """
    if to_point is not None:
        for p in declared:
            ds = [to_point(p, j) for j in range(n) if contains is None or not contains(p, j)]
            if _chain(ds) >= DECLARED_MEMBERS:
                return ("declared", p)
    best, where = 0, None
    for i in range(n):
        length = _chain([sep(i, j) for j in range(n) if j != i])
        if length > best:
            best, where = length, i
    if best >= CHAIN_LENGTH:
        return ("chain", where)
    return None


# ---------------------------------------------------------------------------
# exact distances between features


def _seg_seg2(a, b, c, d):
    if segment_intersection(a, b, c, d):
        return 0
    return min(
        nearest_on_segment(a, c, d)[1],
        nearest_on_segment(b, c, d)[1],
        nearest_on_segment(c, a, b)[1],
        nearest_on_segment(d, a, b)[1],
    )


def _feature_dist2(f, g):
    """Squared distance between two features (segments ``(a, b)`` or points ``(p,)``)."""
    if len(f) == 1 and len(g) == 1:
        p, r = f[0], g[0]
        return (p[0] - r[0]) ** 2 + (p[1] - r[1]) ** 2
    if len(f) == 1:
        return nearest_on_segment(f[0], *g)[1]
    if len(g) == 1:
        return nearest_on_segment(g[0], *f)[1]
    return _seg_seg2(*f, *g)


# ---------------------------------------------------------------------------
# components


@dataclass
class ComponentReport:
    components: List[dict]
    adjacency: List[dict]
    separations: Dict[Tuple[int, int], float]
    discrete: bool
    accumulation: Optional[dict]

    @property
    def count(self) -> int:
        return len(self.components)

    @property
    def verdict(self) -> str:
        return "discrete" if self.discrete else "not D_2-compatible"

    def min_separation(self) -> Optional[float]:
        return min(self.separations.values()) if self.separations else None

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "components": self.components,
            "adjacency": self.adjacency,
            "separations": [
                {"pair": list(k), "distance": v} for k, v in sorted(self.separations.items())
            ],
            "discrete": self.discrete,
            "verdict": self.verdict,
            "accumulation": self.accumulation,
        }

    def to_dot(self) -> str:
        lines = ["graph components {"]
        for c in self.components:
            for node in c["members"]:
                lines.append(f'  "{node}" [label="{node}"];')
        for a in self.adjacency:
            lines.append(f'  "{a["a"]}" -- "{a["b"]}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


class _UF:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def _members(M: PlanarSetPresentation):
    """Labelled atoms of ``M``: pieces, loose points and fills."""
    atoms = [f"piece{i}" for i in range(len(M.skeleton))]
    atoms += [f"point{i}" for i in range(len(M.isolated))]
    atoms += [f"fill{i}" for i in range(len(M.fills))]
    return atoms


def _connect(M: PlanarSetPresentation):
    np_, ni = len(M.skeleton), len(M.isolated)
    atoms = _members(M)
    uf = _UF(len(atoms))
    evidence: List[dict] = []
    arr = M.arrangement
    # pieces sharing a vertex of the arrangement
    at_vertex: Dict[Tuple, set] = {}
    for u, v, tags in arr.edges():
        pieces = {t for t in tags if t != FRAME}
        for p in (u, v):
            at_vertex.setdefault(p, set()).update(pieces)
    for i, piece in enumerate(M.skeleton):
        if piece.is_point:
            p = piece.polyline()[0]
            for a, b in M.segments():
                if on_segment(p, a, b):
                    at_vertex.setdefault(p, set()).add(i)
            at_vertex.setdefault(p, set()).add(i)
    seen_pairs = set()
    for p, pieces in sorted(at_vertex.items()):
        pieces = sorted(pieces)
        for a, b in zip(pieces, pieces[1:]):
            uf.union(a, b)
            if (a, b) not in seen_pairs:
                seen_pairs.add((a, b))
                evidence.append({"a": atoms[a], "b": atoms[b], "at": _pt_json(p)})
    # loose points
    for k, p in enumerate(M.isolated):
        idx = np_ + k
        for i, piece in enumerate(M.skeleton):
            if any(on_segment(p, a, b) for a, b in piece.segments()) or (piece.is_point and piece.polyline()[0] == p):
                uf.union(idx, i)
                evidence.append({"a": atoms[idx], "b": atoms[i], "at": _pt_json(p)})
        for j, s in enumerate(M.isolated[:k]):
            if s == p:
                uf.union(idx, np_ + j)
        if M.fills and M.in_fill(p):
            sig = arr.locate(p)
            for f, fsig in enumerate(M.fill_signatures):
                if fsig == sig:
                    uf.union(idx, np_ + ni + f)
    # fills: same face, and pieces on their boundary
    if M.fills:
        sigs = M.fill_signatures
        for f, sf in enumerate(sigs):
            for g in range(f):
                if sigs[g] == sf:
                    uf.union(np_ + ni + f, np_ + ni + g)
        for u, v, tags in arr.edges():
            sides = {arr.side_signature(u, v), arr.side_signature(v, u)}
            for f, sf in enumerate(sigs):
                if sf in sides and M.signature_filled(sf):
                    for t in tags:
                        if t != FRAME:
                            uf.union(np_ + ni + f, t)
                            key = (t, np_ + ni + f)
                            if key not in seen_pairs:
                                seen_pairs.add(key)
                                evidence.append({"a": atoms[t], "b": atoms[np_ + ni + f], "at": _pt_json(u)})
    return atoms, uf, evidence


def _component_features(M: PlanarSetPresentation, members: List[int]):
    np_, ni = len(M.skeleton), len(M.isolated)
    feats = []
    for m in members:
        if m < np_:
            piece = M.skeleton[m]
            if piece.is_point:
                feats.append((piece.polyline()[0],))
            feats.extend(piece.segments())
        elif m < np_ + ni:
            feats.append((M.isolated[m - np_],))
    # filled faces are bounded by skeleton and frame edges
    if any(m >= np_ + ni for m in members):
        arr = M.arrangement
        for u, v, tags in arr.edges():
            if tags == {FRAME} and (M.signature_filled(arr.side_signature(u, v)) or M.signature_filled(arr.side_signature(v, u))):
                feats.append((u, v))
    return feats


def _components(M: PlanarSetPresentation):
    atoms, uf, evidence = _connect(M)
    groups: Dict[int, List[int]] = {}
    for i in range(len(atoms)):
        groups.setdefault(uf.find(i), []).append(i)
    comps = [sorted(g) for _, g in sorted(groups.items())]
    return atoms, comps, evidence


def components_report(M: PlanarSetPresentation) -> ComponentReport:
    """Connected components of ``M`` with exact separations and a discreteness verdict."""
    atoms, comps, evidence = _components(M)
    feats = [_component_features(M, c) for c in comps]
    n = len(comps)
    sep2: Dict[Tuple[int, int], Fraction] = {}
    for i in range(n):
        for j in range(i + 1, n):
            sep2[(i, j)] = min(_feature_dist2(f, g) for f in feats[i] for g in feats[j])
    seps = {k: math.sqrt(float(v)) for k, v in sep2.items()}

    def sep(i, j):
        return sep2[(min(i, j), max(i, j))]

    def to_point(p, j):
        return min(_feature_dist2((p,), f) for f in feats[j])

    acc = find_accumulation(n, sep, M.accumulations, to_point, lambda p, j: to_point(p, j) == 0)
    acc_json = None
    if acc is not None:
        kind, where = acc
        acc_json = {"kind": kind, "at": _pt_json(where) if kind == "declared" else f"component {where}"}
    comp_json = [{"id": i, "members": [atoms[m] for m in c]} for i, c in enumerate(comps)]
    return ComponentReport(comp_json, evidence, seps, acc is None, acc_json)


def component_of(M: PlanarSetPresentation, p) -> Optional[int]:
    """Index (as in :func:`components_report`) of the component containing ``p``."""
    p = qpoint(p)
    atoms, comps, _ = _components(M)
    np_, ni = len(M.skeleton), len(M.isolated)
    for i, c in enumerate(comps):
        for m in c:
            if m < np_:
                piece = M.skeleton[m]
                if any(on_segment(p, a, b) for a, b in piece.segments()) or (piece.is_point and piece.polyline()[0] == p):
                    return i
            elif m < np_ + ni:
                if M.isolated[m - np_] == p:
                    return i
            elif M.in_fill(p) and M.arrangement.locate(p) == M.fill_signatures[m - np_ - ni]:
                return i
    # a point on a frame edge bounding a fill
    for i, c in enumerate(comps):
        if any(m >= np_ + ni for m in c) and M.contains(p):
            return i
    return None


# ---------------------------------------------------------------------------
# isolated and singular points


@dataclass
class PointsReport:
    points: List[Tuple]
    discrete: bool
    accumulation: Optional[Tuple]
    kind: str = "isolated"
    extra: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if self.discrete:
            return "discrete"
        return "accumulating (incompatible with D_2)"

    def to_json(self) -> dict:
        d = {
            "kind": self.kind,
            "points": [_pt_json(p) for p in self.points],
            "count": len(self.points),
            "discrete": self.discrete,
            "verdict": self.verdict,
            "accumulation": None if self.accumulation is None else _pt_json(self.accumulation),
        }
        d.update(self.extra)
        return d


def _points_accumulation(pts: List[Tuple], declared) -> Optional[Tuple]:
    def d2(a, b):
        return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2

    # distances compared as squares: the ratio threshold is squared too
    def sep(i, j):
        return math.sqrt(float(d2(pts[i], pts[j])))

    acc = find_accumulation(len(pts), sep, declared, lambda p, j: math.sqrt(float(d2(p, pts[j]))), lambda p, j: p == pts[j])
    if acc is None:
        return None
    kind, where = acc
    return where if kind == "declared" else pts[where]


def isolated_points_report(M: PlanarSetPresentation) -> PointsReport:
    """Points of the presentation off every piece and every filled component closure."""
    seen = []
    for p in M.points():
        if p in seen or M.on_skeleton(p):
            continue
        if M.fills and (M.in_fill(p) or M.arrangement.on_graph(p) and M.contains(p)):
            continue
        seen.append(p)
    pts = sorted(seen)
    acc = _points_accumulation(pts, M.accumulations)
    return PointsReport(pts, acc is None, acc)


def _feature_points(M: PlanarSetPresentation) -> List[Tuple]:
    pts = set()
    for a, b in M.segments():
        pts.update((a, b))
    arr = Arrangement(M.tagged_segments())
    pts.update(arr.vertices)
    pts.update(M.points())
    return sorted(pts)


def singular_tangent_points(M: PlanarSetPresentation, candidates=None) -> PointsReport:
    """Points whose tangent fan is a single direction (``E_M``), and their discreteness."""
    cands = _feature_points(M) if candidates is None else [qpoint(c) for c in candidates]
    fans = {}
    em = []
    for c in cands:
        if M.touches_fill(c):
            # the tangent cone at a point of a filled closure contains a sector
            continue
        fan = tangent_fan(M, c)
        fans[c] = fan
        if len(fan) == 1:
            em.append(c)
    acc = _points_accumulation(em, M.accumulations)
    return PointsReport(em, acc is None, acc, kind="singular-tangent",
                        extra={"fans": {",".join(qstr(x) for x in c): [list(d) for d in fans[c].directions] for c in em}})


# ---------------------------------------------------------------------------
# decomposition and paths


def dc_graph_decomposition(M: PlanarSetPresentation) -> List[DCGraphPiece]:
    """Explicit finite list of DC graphs whose union is the realized set."""
    if M.fills:
        raise PreconditionError("decomposition applies to presentations without fills")
    out: List[DCGraphPiece] = []
    for piece in M.skeleton:
        if isinstance(piece, PlacedSSet):
            for g in piece.graph_pieces():
                if g not in out:
                    out.append(g)
        elif piece not in out:
            out.append(piece)
    for p in M.isolated:
        out.append(DCGraphPiece(PLFunction((p[0],), (p[1],))))
    return out


@dataclass
class PathResult:
    ok: bool
    chain: List[DCGraphPiece]
    points: List[Tuple]
    length: float
    failure: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "pieces": len(self.chain),
            "points": [_pt_json(p) for p in self.points],
            "length": self.length,
            "failure": self.failure,
        }


def _segment_in_m(M: PlanarSetPresentation, a, b) -> bool:
    cuts = {Fraction(0), Fraction(1)}
    dx, dy = b[0] - a[0], b[1] - a[1]
    for c, d in M.segments():
        for p in segment_intersection(a, b, c, d):
            cuts.add((p[0] - a[0]) / dx if dx else (p[1] - a[1]) / dy)
    ts = sorted(cuts)
    for t0, t1 in zip(ts, ts[1:]):
        t = (t0 + t1) / 2
        if not M.contains((a[0] + t * dx, a[1] + t * dy)):
            return False
    return all(M.contains((a[0] + t * dx, a[1] + t * dy)) for t in ts)


def path_between(M: PlanarSetPresentation, x, y) -> PathResult:
    """Injective chain of segments in ``M`` from ``x`` to ``y`` (breadth-first, fewest pieces)."""
    x, y = qpoint(x), qpoint(y)
    for p in (x, y):
        if not M.contains(p):
            raise PreconditionError(f"{p} is not a point of M")
    if x == y:
        return PathResult(True, [segment_piece(x, x)], [x], 0.0)
    adj: Dict[Tuple, set] = {}

    def link(u, v):
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)

    arr = Arrangement(M.tagged_segments())
    for key in arr.edge_tags:
        u, v = sorted(key)
        inner = [p for p in (x, y) if p not in (u, v) and on_segment(p, u, v)]
        chain = sorted([u, v] + inner, key=lambda p: (p[0], p[1]) if u[0] != v[0] else (p[1], p[0]))
        for a, b in zip(chain, chain[1:]):
            link(a, b)
    for p in (x, y):
        adj.setdefault(p, set())
    if M.fills:
        nodes = sorted(adj)
        for i, u in enumerate(nodes):
            for v in nodes[i + 1:]:
                if v not in adj[u] and (M.in_fill(((u[0] + v[0]) / 2, (u[1] + v[1]) / 2))) and _segment_in_m(M, u, v):
                    link(u, v)
    prev = {x: None}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        if u == y:
            break
        for v in sorted(adj[u]):
            if v not in prev:
                prev[v] = u
                queue.append(v)
    if y not in prev:
        cx, cy = component_of(M, x), component_of(M, y)
        return PathResult(False, [], [], math.inf, f"points lie in different components ({cx} and {cy})")
    pts = [y]
    while prev[pts[-1]] is not None:
        pts.append(prev[pts[-1]])
    pts.reverse()
    # merge straight runs
    merged = [pts[0]]
    for p in pts[1:]:
        if len(merged) >= 2:
            a, b = merged[-2], merged[-1]
            if (b[0] - a[0]) * (p[1] - b[1]) - (b[1] - a[1]) * (p[0] - b[0]) == 0:
                merged[-1] = p
                continue
        merged.append(p)
    chain = [segment_piece(a, b) for a, b in zip(merged, merged[1:])]
    length = math.fsum(math.hypot(float(b[0] - a[0]), float(b[1] - a[1])) for a, b in zip(merged, merged[1:]))
    return PathResult(True, chain, merged, length)


# ---------------------------------------------------------------------------
# one-dimensional criteria


@dataclass
class D1Report:
    components: List[Tuple]
    locally_finite: bool
    accumulation: Optional[Fraction]

    @property
    def verdict(self) -> str:
        return "D_1" if self.locally_finite else "not D_1"

    def to_json(self) -> dict:
        return {
            "components": [[qstr(a), qstr(b)] for a, b in self.components],
            "locally_finite": self.locally_finite,
            "verdict": self.verdict,
            "accumulation": None if self.accumulation is None else qstr(self.accumulation),
        }


def d1_check(F: Sequence, window=None, declared: Sequence = ()) -> D1Report:
    """Local finiteness of the components of a finite union of closed intervals and points."""
    ivs = []
    for item in F:
        if isinstance(item, (tuple, list)):
            a, b = q(item[0]), q(item[1])
        else:
            a = b = q(item)
        if a > b:
            raise PreconditionError(f"interval [{a}, {b}] is reversed")
        ivs.append((a, b))
    comps = merge_intervals(ivs)
    if window is not None:
        lo, hi = q(window[0]), q(window[1])
        comps = [(max(a, lo), min(b, hi)) for a, b in comps if b >= lo and a <= hi]

    def sep(i, j):
        a, b = comps[i], comps[j]
        return max(Fraction(0), max(a[0], b[0]) - min(a[1], b[1]))

    def to_point(p, j):
        a, b = comps[j]
        return max(Fraction(0), a - p, p - b)

    acc = find_accumulation(len(comps), sep, [q(p) for p in declared], to_point, lambda p, j: comps[j][0] <= p <= comps[j][1])
    where = None
    if acc is not None:
        kind, w = acc
        where = w if kind == "declared" else comps[w][0]
    return D1Report(comps, acc is None, where)


@dataclass
class ImageReport:
    pieces: List[Tuple]
    image: List[Tuple]
    nowhere_dense: bool
    interior: Optional[Tuple]

    def to_json(self) -> dict:
        return {
            "image": [[qstr(a), qstr(b)] for a, b in self.image],
            "nowhere_dense": self.nowhere_dense,
            "interior": None if self.interior is None else [qstr(c) for c in self.interior],
        }


def closed_pieces(a, b, gaps) -> List[Tuple[Fraction, Fraction]]:
    """``[a, b]`` minus finitely many open intervals, as closed intervals (possibly points)."""
    a, b = q(a), q(b)
    cur = a
    out = []
    for c, d in sorted((q(c), q(d)) for c, d in gaps):
        if d <= cur:
            continue
        if c >= cur:
            out.append((cur, min(c, b)))
        cur = max(cur, d)
        if cur > b:
            break
    if cur <= b:
        out.append((cur, b))
    return [iv for iv in out if iv[0] <= iv[1]]


def _piece_image(g: PLFunction, c, d) -> Tuple[Fraction, Fraction]:
    xs = [c, d] + [x for x in g.breakpoints if c < x < d]
    vals = [g(x) for x in xs]
    return min(vals), max(vals)


def nowhere_dense_image(g: PLFunction, gaps: Sequence, a=None, b=None, mapper=None) -> ImageReport:
    """Exact image ``g(P)`` for ``P = [a, b]`` minus the open ``gaps``.

    ``P`` must be nowhere dense; for finite data that means every closed
    piece is a single point.  ``mapper(g, c, d)`` overrides the piece image
    (used to test the interior check).
    """
    lo, hi = g.domain
    a = lo if a is None else q(a)
    b = hi if b is None else q(b)
    pieces = closed_pieces(a, b, gaps)
    if any(c < d for c, d in pieces):
        raise PreconditionError("P has interior: it is not nowhere dense")
    f = mapper or _piece_image
    image = merge_intervals([f(g, c, d) for c, d in pieces])
    interior = next(((c, d) for c, d in image if c < d), None)
    return ImageReport(pieces, image, interior is None, interior)
