"""Exact arrangement of rational segments: splitting, faces and point location.

Segments are split at all mutual intersections (collinear overlaps included),
giving a planar graph.  Each connected component of that graph is traced
into face walks (faces on the left; bounded walks have positive area).  A
point off the graph is located by the tuple of faces it lies in, one per
graph component.  Since the components are disjoint compact connected sets,
two points lie in the same component of the complement of the whole graph
exactly when those tuples agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from ._q import cross
from .errors import PreconditionError

OUTER = -1


def segment_intersection(a, b, c, d) -> List[Tuple]:
    """Intersection of closed segments ``ab`` and ``cd``: 0, 1 or 2 points.

    Two points are returned for a collinear overlap (its endpoints).
    """
    r = (b[0] - a[0], b[1] - a[1])
    s = (d[0] - c[0], d[1] - c[1])
    den = r[0] * s[1] - r[1] * s[0]
    qp = (c[0] - a[0], c[1] - a[1])
    if den == 0:
        if qp[0] * r[1] - qp[1] * r[0] != 0:
            return []
        pts = []
        for p in (a, b):
            if on_segment(p, c, d):
                pts.append(p)
        for p in (c, d):
            if on_segment(p, a, b) and p not in pts:
                pts.append(p)
        return pts
    t = Fraction(qp[0] * s[1] - qp[1] * s[0]) / den
    w = Fraction(qp[0] * r[1] - qp[1] * r[0]) / den
    if 0 <= t <= 1 and 0 <= w <= 1:
        return [(a[0] + t * r[0], a[1] + t * r[1])]
    return []


def on_segment(p, a, b) -> bool:
    if cross(a, b, p) != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def _param(p, a, b):
    if a[0] != b[0]:
        return Fraction(p[0] - a[0]) / (b[0] - a[0])
    return Fraction(p[1] - a[1]) / (b[1] - a[1])


def _half(v) -> int:
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def _angle_cmp(u, v) -> int:
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return hu - hv
    c = u[0] * v[1] - u[1] * v[0]
    return -1 if c > 0 else (1 if c < 0 else 0)


def winding(p, walk: Sequence[Tuple]) -> int:
    wn = 0
    n = len(walk)
    for i in range(n):
        a, b = walk[i], walk[(i + 1) % n]
        if a[1] <= p[1]:
            if b[1] > p[1] and cross(a, b, p) > 0:
                wn += 1
        elif b[1] <= p[1] and cross(a, b, p) < 0:
            wn -= 1
    return wn


@dataclass
class Walk:
    component: int
    vertices: List[Tuple]
    area2: Fraction
    bbox: Tuple

    @property
    def bounded(self) -> bool:
        return self.area2 > 0


class Arrangement:
    """Planar graph induced by a list of tagged segments."""

    def __init__(self, segments: Sequence[Tuple[Tuple, Tuple, Hashable]]):
        segs = [(a, b, tag) for a, b, tag in segments if a != b]
        splits: List[set] = [{a, b} for a, b, _ in segs]
        order = sorted(range(len(segs)), key=lambda i: min(segs[i][0][0], segs[i][1][0]))
        active: List[int] = []
        for i in order:
            a, b, _ = segs[i]
            xlo = min(a[0], b[0])
            active = [j for j in active if max(segs[j][0][0], segs[j][1][0]) >= xlo]
            ylo, yhi = min(a[1], b[1]), max(a[1], b[1])
            for j in active:
                c, d, _ = segs[j]
                if max(c[1], d[1]) < ylo or min(c[1], d[1]) > yhi:
                    continue
                for p in segment_intersection(a, b, c, d):
                    splits[i].add(p)
                    splits[j].add(p)
            active.append(i)

        self.edge_tags: Dict[frozenset, set] = {}
        for (a, b, tag), pts in zip(segs, splits):
            chain = sorted(pts, key=lambda p: _param(p, a, b))
            for u, v in zip(chain, chain[1:]):
                self.edge_tags.setdefault(frozenset((u, v)), set()).add(tag)

        self.vertices: List[Tuple] = []
        index: Dict[Tuple, int] = {}
        adj: Dict[Tuple, List[Tuple]] = {}
        for key in self.edge_tags:
            u, v = tuple(key)
            for p in (u, v):
                if p not in index:
                    index[p] = len(self.vertices)
                    self.vertices.append(p)
                    adj[p] = []
            adj[u].append(v)
            adj[v].append(u)
        self.index = index
        for p, nbrs in adj.items():
            nbrs.sort(key=cmp_to_key(lambda x, y, p=p: _angle_cmp((x[0] - p[0], x[1] - p[1]), (y[0] - p[0], y[1] - p[1]))))
        self.adj = adj

        parent = list(range(len(self.vertices)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for key in self.edge_tags:
            u, v = tuple(key)
            ru, rv = find(index[u]), find(index[v])
            if ru != rv:
                parent[ru] = rv
        roots: Dict[int, int] = {}
        self.vertex_component = [roots.setdefault(find(i), len(roots)) for i in range(len(self.vertices))]
        self.n_components = len(roots)

        self.walks: List[Walk] = []
        self.left_walk: Dict[Tuple[Tuple, Tuple], int] = {}
        for u in self.vertices:
            for v in adj[u]:
                if (u, v) in self.left_walk:
                    continue
                wid = len(self.walks)
                verts = []
                x, y = u, v
                while (x, y) not in self.left_walk:
                    self.left_walk[(x, y)] = wid
                    verts.append(x)
                    nb = adj[y]
                    k = nb.index(x)
                    x, y = y, nb[(k - 1) % len(nb)]
                area2 = sum(
                    (verts[i][0] * verts[(i + 1) % len(verts)][1] - verts[(i + 1) % len(verts)][0] * verts[i][1]
                     for i in range(len(verts))),
                    Fraction(0),
                )
                xs = [p[0] for p in verts]
                ys = [p[1] for p in verts]
                self.walks.append(Walk(self.vertex_component[index[u]], verts, area2, (min(xs), min(ys), max(xs), max(ys))))

    # -- queries ------------------------------------------------------------

    def edges(self):
        for key, tags in self.edge_tags.items():
            u, v = sorted(key)
            yield u, v, tags

    def on_graph(self, p) -> bool:
        if p in self.index:
            return True
        for key in self.edge_tags:
            u, v = tuple(key)
            if on_segment(p, u, v):
                return True
        return False

    def locate(self, p) -> Tuple[int, ...]:
        """Face signature of a point off the graph (one face id per component)."""
        if self.on_graph(p):
            raise PreconditionError(f"{p} lies on the arrangement")
        sig = [OUTER] * self.n_components
        for wid, w in enumerate(self.walks):
            if not w.bounded:
                continue
            x0, y0, x1, y1 = w.bbox
            if not (x0 < p[0] < x1 and y0 < p[1] < y1):
                continue
            if winding(p, w.vertices) != 0:
                sig[w.component] = wid
        return tuple(sig)

    def side_signature(self, u, v) -> Tuple[int, ...]:
        """Face signature of the region immediately left of directed edge ``u -> v``."""
        wid = self.left_walk[(u, v)]
        comp = self.walks[wid].component
        mid = ((u[0] + v[0]) / 2, (u[1] + v[1]) / 2)
        sig = [OUTER] * self.n_components
        for j, w in enumerate(self.walks):
            if not w.bounded or w.component == comp:
                continue
            x0, y0, x1, y1 = w.bbox
            if x0 < mid[0] < x1 and y0 < mid[1] < y1 and winding(mid, w.vertices) != 0:
                sig[w.component] = j
        sig[comp] = wid if self.walks[wid].bounded else OUTER
        return tuple(sig)


def canonical_segments(segments: Sequence[Tuple[Tuple, Tuple]]) -> set:
    """Canonical form of a union of segments as a set of maximal segments.

    Segments are split at every mutual intersection and re-merged through
    vertices of degree two where the two edges continue straight, so two
    unions of segments are equal as point sets iff their canonical forms are.
    """
    arr = Arrangement([(a, b, 0) for a, b in segments])
    adj = arr.adj
    done = set()
    out = set()

    def straight(v):
        nb = adj[v]
        if len(nb) != 2:
            return False
        a, b = nb
        return cross(a, v, b) == 0

    for key in arr.edge_tags:
        if key in done:
            continue
        u, v = tuple(key)
        done.add(key)
        ends = []
        for start, nxt in ((u, v), (v, u)):
            prev, cur = nxt, start
            while straight(cur):
                a, b = adj[cur]
                step = a if a != prev else b
                done.add(frozenset((cur, step)))
                prev, cur = cur, step
            ends.append(cur)
        out.add(tuple(sorted(ends)))
    return out
