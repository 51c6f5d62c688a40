"""Cone projections, cone-emptiness witnesses and convexity blow-up."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .. import plcalc
from .._q import num_json, q, qpoint, qstr
from ..errors import PreconditionError
from ..field import distance
from ..sets import PlanarSetPresentation, assemble_and_check, merge_intervals

__all__ = [
    "ProjectionClass",
    "Witness",
    "NonDCWitness",
    "BlowupRow",
    "cone_halfplanes",
    "clip_segment",
    "cone_projection",
    "cone_projection_classify",
    "first_hit",
    "detect_non_dc",
    "convexity_blowup",
    "alpha_lower_bound",
]


# ---------------------------------------------------------------------------
# exact cone geometry


def cone_halfplanes(apex, slope, sign: int = 1, length=None):
    """Half-planes ``alpha x + beta y <= gamma`` cutting out ``apex + sign * A_length^slope``."""
    cx, cy = apex
    hp = [
        (-sign, 0, -sign * cx),
        (-slope * sign, 1, cy - slope * sign * cx),
        (-slope * sign, -1, -cy - slope * sign * cx),
    ]
    if length is not None:
        hp.append((sign, 0, length + sign * cx))
    return hp


def in_halfplanes(p, hps) -> bool:
    return all(a * p[0] + b * p[1] <= g for a, b, g in hps)


def clip_segment(a, b, hps) -> Optional[Tuple[Tuple, Tuple]]:
    """Exact part of segment ``[a, b]`` inside the polygon ``hps`` (or ``None``)."""
    t0, t1 = Fraction(0), Fraction(1)
    dx, dy = b[0] - a[0], b[1] - a[1]
    for al, be, ga in hps:
        k = al * dx + be * dy
        m = ga - (al * a[0] + be * a[1])
        if k == 0:
            if m < 0:
                return None
        elif k > 0:
            t1 = min(t1, Fraction(m) / k)
        else:
            t0 = max(t0, Fraction(m) / k)
        if t0 > t1:
            return None
    return (a[0] + t0 * dx, a[1] + t0 * dy), (a[0] + t1 * dx, a[1] + t1 * dy)


def _features(M: PlanarSetPresentation):
    return M.segments() + M.fill_boundary_segments(), M.points()


def _fill_projection(M: PlanarSetPresentation, z, slope, r, hps) -> List[Tuple]:
    """Abscissae ``x`` where the cone slice at ``x`` meets a filled component."""
    segs, _ = _features(M)
    zx, zy = z
    xs = {zx, zx + r}
    for v in M.arrangement.vertices:
        if in_halfplanes(v, hps):
            xs.add(v[0])
    for a, b in segs:
        for lateral in (1, -1):
            c = clip_segment(a, b, hps + [(-lateral * slope, lateral, lateral * zy - lateral * slope * zx)])
            d = clip_segment(a, b, hps + [(lateral * slope, -lateral, -lateral * zy + lateral * slope * zx)])
            for part in (c, d):
                if part is not None:
                    xs.update(p[0] for p in part)
    xs = sorted(x for x in xs if zx <= x <= zx + r)
    out = []
    for x0, x1 in zip(xs, xs[1:]):
        xm = (x0 + x1) / 2
        h = slope * (xm - zx)
        ys = {zy - h, zy + h}
        for a, b in segs:
            if min(a[0], b[0]) <= xm <= max(a[0], b[0]) and a[0] != b[0]:
                y = a[1] + (b[1] - a[1]) * (xm - a[0]) / (b[0] - a[0])
                if zy - h <= y <= zy + h:
                    ys.add(y)
        ys = sorted(ys)
        if any(M.in_fill((xm, (y0 + y1) / 2)) for y0, y1 in zip(ys, ys[1:])):
            out.append((x0, x1))
    return out


def cone_projection(M: PlanarSetPresentation, z, slope, r) -> List[Tuple]:
    """``pi_1(M n (z + A_r^slope))`` as a sorted list of closed intervals (exact)."""
    z, slope, r = qpoint(z), q(slope), q(r)
    hps = cone_halfplanes(z, slope, 1, r)
    segs, pts = _features(M)
    ivs = []
    for a, b in segs:
        c = clip_segment(a, b, hps)
        if c is not None:
            ivs.append(tuple(sorted((c[0][0], c[1][0]))))
    ivs += [(p[0], p[0]) for p in pts if in_halfplanes(p, hps)]
    if M.fills:
        ivs += _fill_projection(M, z, slope, r, hps)
    return merge_intervals(ivs)


@dataclass
class ProjectionClass:
    kind: str
    r: Optional[Fraction]
    projection: List[Tuple]
    hypothesis: bool
    trace: List[dict] = field(default_factory=list)

    @property
    def gaps(self) -> List[Tuple]:
        return [(a[1], b[0]) for a, b in zip(self.projection, self.projection[1:])]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "r": None if self.r is None else qstr(self.r),
            "projection": [[qstr(a), qstr(b)] for a, b in self.projection],
            "gaps": len(self.gaps),
            "hypothesis": self.hypothesis,
        }


def _boundary_features(M: PlanarSetPresentation):
    if not M.fills:
        return M.segments(), M.points()
    rep = assemble_and_check(M)
    return rep.boundary_edges, rep.boundary_points


def cone_projection_classify(M: PlanarSetPresentation, z, u, s, max_halvings: int = 20) -> ProjectionClass:
    """Classify the projection of ``M`` in the cones ``z + A_r^{3u}`` for ``r = s / 2^j``.

    Returns the first ``r`` at which ``M`` meets the cone only in ``z``
    (``isolated-in-cone``) or projects onto all of ``[x, x + r]``
    (``full-projection``); otherwise ``violation`` with the gap structure
    at the smallest ``r`` tried.
    """
    z, u, s = qpoint(z), q(u), q(s)
    if not M.contains(z):
        raise PreconditionError(f"{z} is not a point of M")
    # hypothesis: the boundary inside the wide cone stays in the narrow one
    big = cone_halfplanes(z, 3 * u, 1, s)
    small = cone_halfplanes(z, u, 1, s)
    segs, pts = _boundary_features(M)
    hyp = True
    for a, b in segs:
        c = clip_segment(a, b, big)
        if c is not None and not (in_halfplanes(c[0], small) and in_halfplanes(c[1], small)):
            hyp = False
    hyp = hyp and all(in_halfplanes(p, small) for p in pts if in_halfplanes(p, big))
    trace = []
    proj: List[Tuple] = []
    r = s
    for j in range(max_halvings + 1):
        r = s / 2 ** j
        proj = cone_projection(M, z, 3 * u, r)
        trace.append({"r": qstr(r), "components": len(proj)})
        if proj == [(z[0], z[0])]:
            return ProjectionClass("isolated-in-cone", r, proj, hyp, trace)
        if proj == [(z[0], z[0] + r)]:
            return ProjectionClass("full-projection", r, proj, hyp, trace)
    return ProjectionClass("violation", r, proj, hyp, trace)


# ---------------------------------------------------------------------------
# witnesses


def first_hit(M: PlanarSetPresentation, apex, slope, sign: int) -> Optional[Fraction]:
    """Infimum of the axial offsets of points of ``M`` other than ``apex`` in ``apex + sign * A^slope``.

    ``None`` when the untruncated cone meets ``M`` only at the apex.
    """
    apex = qpoint(apex)
    hps = cone_halfplanes(apex, slope, sign)
    segs, pts = _features(M)
    best = None

    def offer(p):
        nonlocal best
        off = sign * (p[0] - apex[0])
        if best is None or off < best:
            best = off

    for a, b in segs:
        c = clip_segment(a, b, hps)
        if c is None:
            continue
        if c[0] == c[1]:
            if c[0] != apex:
                offer(c[0])
            continue
        offer(c[0])
        offer(c[1])
    for p in pts:
        if p != apex and in_halfplanes(p, hps):
            offer(p)
    if M.fills:
        probe_len = best if best is not None else Fraction(1)
        if M.in_fill((apex[0] + sign * probe_len / 2, apex[1])):
            return Fraction(0)
    return best


@dataclass(frozen=True)
class Witness:
    point: Tuple[Fraction, Fraction]
    rho: Fraction
    side: str
    a: Fraction
    b: Fraction

    def to_json(self) -> dict:
        return {
            "point": [qstr(c) for c in self.point],
            "rho": qstr(self.rho),
            "side": self.side,
        }


@dataclass
class NonDCWitness:
    """Witness points ``z_n`` with empty cones, and the spine through them."""

    z: Tuple[Fraction, Fraction]
    u: Fraction
    orientation: int
    witnesses: List[Witness]
    spine: plcalc.SequenceFunction
    slope_bound_ok: bool

    def world(self, t, y):
        return (self.z[0] + self.orientation * t, self.z[1] + y)

    def to_json(self) -> dict:
        return {
            "z": [qstr(c) for c in self.z],
            "u": qstr(self.u),
            "orientation": self.orientation,
            "witnesses": [w.to_json() for w in self.witnesses],
            "spine": self.spine.function.to_json(),
            "spine_slope_bound_2u": self.slope_bound_ok,
        }


def _diameter_bound(M: PlanarSetPresentation) -> Fraction:
    pts = [p for ab in M.segments() for p in ab] + list(M.points())
    if M.window is not None:
        pts += M.window.corners()
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return max(max(xs) - min(xs) + max(ys) - min(ys), Fraction(1))


def detect_non_dc(M: PlanarSetPresentation, z, u, min_witnesses: int = 3) -> Optional[NonDCWitness]:
    """Search points ``z_n`` of ``M`` in ``z + S^u`` whose cones ``z_n +- A_rho^{3u}`` meet ``M`` only at ``z_n``.

    Candidates (isolated points and piece vertices) are thinned to the
    ratio-1/3 subsequence of abscissae.  The cone facing ``z`` is tried
    first; ``rho_n`` is half the supremum of empty lengths, so emptiness of
    the closed cone is exact.  Returns ``None`` with fewer than
    ``min_witnesses`` witnesses (not a proof of anything).
    """
    z, u = qpoint(z), q(u)
    if not M.contains(z):
        raise PreconditionError(f"{z} is not a point of M")
    cand = {p for ab in M.segments() for p in ab} | set(M.points())
    in_cone = [p for p in cand if p != z and abs(p[1] - z[1]) <= u * abs(p[0] - z[0])]
    right = [p for p in in_cone if p[0] > z[0]]
    left = [p for p in in_cone if p[0] < z[0]]
    orient = 1 if len(right) >= len(left) else -1
    side_pts = sorted(right if orient == 1 else left, key=lambda p: -abs(p[0] - z[0]))
    thinned = []
    for p in side_pts:
        a = abs(p[0] - z[0])
        if not thinned or a <= abs(thinned[-1][0] - z[0]) / 3:
            thinned.append(p)
    cap = _diameter_bound(M)
    found: List[Witness] = []
    for p in thinned:
        for sign, name in ((-orient, "backward" if orient == 1 else "forward"),
                           (orient, "forward" if orient == 1 else "backward")):
            hit = first_hit(M, p, 3 * u, sign)
            sup = cap if hit is None else hit
            if sup > 0:
                found.append(Witness(p, sup / 2, name, abs(p[0] - z[0]), p[1] - z[1]))
                break
    if len(found) < min_witnesses:
        return None
    a = [w.a for w in found]
    b = [w.b for w in found]
    spine = plcalc.sequence_to_function(a, b, len(found) - 1)
    ok = all(abs(s) <= 2 * u for s in spine.slopes)
    return NonDCWitness(z, u, orient, found, spine, ok)


def alpha_lower_bound(u) -> float:
    """``alpha(u) = u / (2 sqrt(1 + 9 u^2))``: distance scale of the worst probe in the cone."""
    u = float(q(u))
    if not u > 0:
        raise PreconditionError("u must be positive")
    return u / (2 * math.sqrt(1 + 9 * u * u))


@dataclass(frozen=True)
class BlowupRow:
    N: int
    K_hat: float
    increment: Optional[float]
    oscillations: int
    samples: int

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "K_hat": self.K_hat,
            "increment": self.increment,
            "oscillations": self.oscillations,
            "samples": self.samples,
        }


def _spine_samples(w: NonDCWitness, N: int) -> Tuple[plcalc.PLFunction, List[Fraction]]:
    ws = w.witnesses[:N]
    seq = plcalc.sequence_to_function([x.a for x in ws], [x.b for x in ws], N - 1)
    g = seq.function
    lo, hi = g.domain
    ts = {Fraction(0)}
    for x in ws:
        ts.add(x.a)
        toward_z = (x.side == "backward") == (w.orientation == 1)
        t = x.a - x.rho / 2 if toward_z else x.a + x.rho / 2
        if lo <= t <= hi:
            ts.add(t)
    return g, sorted(ts)


def convexity_blowup(M: PlanarSetPresentation, w: NonDCWitness, N_range: Sequence[int] = range(3, 9)) -> List[BlowupRow]:
    """Partition convexity of ``F(t) = d_M(spine(t))`` sampled at witness-driven points.

    For each ``N`` the spine through the first ``N`` witnesses is rebuilt and
    ``F`` is sampled at ``0``, at the witness abscissae and half a cone
    length off each of them.  The estimate is from below.
    """
    if w is None or len(w.witnesses) < 3:
        raise PreconditionError("a blow-up table needs at least 3 witnesses")
    rows: List[BlowupRow] = []
    prev = None
    for N in N_range:
        if N < 2 or N > len(w.witnesses):
            raise PreconditionError(f"N = {N} outside 2..{len(w.witnesses)}")
        g, ts = _spine_samples(w, N)
        F = [distance(M, w.world(t, g(t))).value for t in ts]
        dq = [(F[i + 1] - F[i]) / float(ts[i + 1] - ts[i]) for i in range(len(ts) - 1)]
        K = math.fsum(abs(dq[i + 1] - dq[i]) for i in range(len(dq) - 1))
        osc = sum(1 for i in range(len(dq) - 1) if (dq[i] > 0) != (dq[i + 1] > 0))
        rows.append(BlowupRow(N, K, None if prev is None else K - prev, osc, len(ts)))
        prev = K
    return rows
