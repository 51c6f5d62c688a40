"""Distance to presented sets, metric projections and line diagnostics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ._q import is_exact, num_json, q
from .errors import PreconditionError
from .sets import PlanarSetPresentation

__all__ = [
    "DistanceResult",
    "LineProfile",
    "ProbeReport",
    "SegmentField",
    "distance",
    "nearest_on_segment",
    "line_profile",
    "semiconcavity_probe",
]

DEDUP_TOL = 1e-12
SUSPECT_INCREMENT = 1.0
PROBE_STEPS = (1e-3, 1e-4, 1e-5)


@dataclass
class DistanceResult:
    value: float
    projections: List[Tuple]
    squared: Optional[Fraction] = None

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "projections": [[num_json(c) for c in p] for p in self.projections],
        }


def nearest_on_segment(p, a, b):
    """Nearest point of segment ``[a, b]`` to ``p`` and the squared distance (exact on rationals)."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    L2 = dx * dx + dy * dy
    if L2 == 0:
        t = 0
    else:
        t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / L2
        t = min(max(t, 0), 1)
    c = (a[0] + t * dx, a[1] + t * dy)
    return c, (p[0] - c[0]) ** 2 + (p[1] - c[1]) ** 2


def _features(M: PlanarSetPresentation):
    segs = M.segments() + M.fill_boundary_segments()
    return segs, M.points()


def distance(M: PlanarSetPresentation, p) -> DistanceResult:
    """``d_M(p)`` with the set of nearest points of ``M``."""
    if M.is_empty:
        raise PreconditionError("distance to the empty set is not computed")
    exact = is_exact(*p)
    p = (q(p[0]), q(p[1])) if exact else (float(p[0]), float(p[1]))
    if M.fills and exact and M.contains(p):
        return DistanceResult(0.0, [p], Fraction(0))
    if M.fills and not exact and M.contains((q(p[0]), q(p[1]))):
        return DistanceResult(0.0, [p], None)
    segs, pts = _features(M)
    if not exact:
        segs = [((float(a[0]), float(a[1])), (float(b[0]), float(b[1]))) for a, b in segs]
        pts = [(float(x), float(y)) for x, y in pts]
    best = None
    cands: List[Tuple] = []
    for a, b in segs:
        c, d2 = nearest_on_segment(p, a, b)
        if best is None or d2 < best:
            best, cands = d2, [c]
        elif d2 == best:
            cands.append(c)
    for c in pts:
        d2 = (p[0] - c[0]) ** 2 + (p[1] - c[1]) ** 2
        if best is None or d2 < best:
            best, cands = d2, [c]
        elif d2 == best:
            cands.append(c)
    uniq: List[Tuple] = []
    for c in cands:
        if not any(abs(float(c[0]) - float(u[0])) <= DEDUP_TOL and abs(float(c[1]) - float(u[1])) <= DEDUP_TOL for u in uniq):
            uniq.append(c)
    return DistanceResult(math.sqrt(float(best)), uniq, best if exact else None)


class SegmentField:
    """Vectorized float distance to a finite union of segments and points."""

    def __init__(self, segments: Sequence[Tuple[Tuple, Tuple]], points: Sequence[Tuple] = ()):
        segs = [((float(a[0]), float(a[1])), (float(b[0]), float(b[1]))) for a, b in segments]
        pts = [(float(x), float(y)) for x, y in points]
        # degenerate segments are points
        pts += [a for a, b in segs if a == b]
        segs = [s for s in segs if s[0] != s[1]]
        self.a = np.array([s[0] for s in segs], dtype=float).reshape(-1, 2)
        self.b = np.array([s[1] for s in segs], dtype=float).reshape(-1, 2)
        self.p = np.array(pts, dtype=float).reshape(-1, 2)
        if not len(self.a) and not len(self.p):
            raise PreconditionError("distance to the empty set is not computed")

    @classmethod
    def from_presentation(cls, M: PlanarSetPresentation) -> "SegmentField":
        if M.fills:
            raise PreconditionError("bulk distance supports unfilled presentations only")
        segs, pts = _features(M)
        return cls(segs, pts)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        flat = z.reshape(-1, 2)
        out = np.empty(len(flat))
        chunk = max(1, 2_000_000 // max(1, len(self.a) + len(self.p)))
        for s in range(0, len(flat), chunk):
            out[s:s + chunk] = self._dist(flat[s:s + chunk])
        return out.reshape(z.shape[:-1])

    def _dist(self, z: np.ndarray) -> np.ndarray:
        best = np.full(len(z), np.inf)
        if len(self.a):
            d = self.b - self.a
            L2 = np.einsum("ij,ij->i", d, d)
            w = z[:, None, :] - self.a[None, :, :]
            t = np.clip(np.einsum("nij,ij->ni", w, d) / L2, 0.0, 1.0)
            diff = w - t[..., None] * d[None, :, :]
            best = np.minimum(best, np.einsum("nij,nij->ni", diff, diff).min(axis=1))
        if len(self.p):
            diff = z[:, None, :] - self.p[None, :, :]
            best = np.minimum(best, np.einsum("nij,nij->ni", diff, diff).min(axis=1))
        return np.sqrt(best)


# ---------------------------------------------------------------------------
# line profiles


def _partition_convexity(t: np.ndarray, d: np.ndarray) -> Tuple[np.ndarray, float]:
    dq = np.diff(d) / np.diff(t)
    jumps = np.abs(np.diff(dq))
    return dq, float(jumps.sum())


@dataclass
class LineProfile:
    """Samples of ``t -> d_M(base + t * direction)``; ``K_hat`` is an estimate from below."""

    base: Tuple[float, float]
    direction: Tuple[float, float]
    interval: Tuple[float, float]
    t: np.ndarray
    d: np.ndarray
    dq: np.ndarray
    K_hat: float
    refinement: List[float] = field(default_factory=list)
    suspect: bool = False

    def cumulative_K(self) -> np.ndarray:
        jumps = np.abs(np.diff(self.dq))
        return np.concatenate([[0.0, 0.0], np.cumsum(jumps)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "d", "dq", "K_hat"])
        cum = self.cumulative_K()
        for i in range(len(self.t)):
            dq = repr(float(self.dq[i - 1])) if i > 0 else ""
            w.writerow([repr(float(self.t[i])), repr(float(self.d[i])), dq, repr(float(cum[i]))])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "base": list(self.base),
            "direction": list(self.direction),
            "interval": list(self.interval),
            "samples": len(self.t),
            "K_hat": self.K_hat,
            "K_hat_refinement": list(self.refinement),
            "suspect_unbounded_convexity": self.suspect,
            "note": "K_hat is an estimate from below",
        }


def _sampler(M: PlanarSetPresentation):
    if M.fills:
        return lambda pts: np.array([distance(M, (float(x), float(y))).value for x, y in pts])
    return SegmentField.from_presentation(M)


def line_profile(M: PlanarSetPresentation, base, direction, t_range, n: int, levels: int = 4) -> LineProfile:
    """Sample ``d_M`` along a line and estimate the convexity of the restriction.

    ``levels`` dyadic refinements of the sampling are also evaluated; the
    profile is flagged *suspect* when ``K_hat`` grows by at least
    ``SUSPECT_INCREMENT`` across them.
    """
    if n < 3:
        raise PreconditionError("a line profile needs at least 3 samples")
    dx, dy = float(direction[0]), float(direction[1])
    norm = math.hypot(dx, dy)
    if norm == 0 or not math.isfinite(norm):
        raise PreconditionError("degenerate direction")
    e = (dx / norm, dy / norm)
    b = (float(base[0]), float(base[1]))
    t0, t1 = float(t_range[0]), float(t_range[1])
    if not t0 < t1:
        raise PreconditionError("empty parameter interval")
    dist = _sampler(M)

    def sample(m):
        t = np.linspace(t0, t1, m)
        pts = np.stack([b[0] + t * e[0], b[1] + t * e[1]], axis=-1)
        return t, np.asarray(dist(pts), dtype=float)

    t, d = sample(n)
    dq, K = _partition_convexity(t, d)
    ks = [K]
    m = n
    for _ in range(levels):
        m = 2 * m - 1
        ks.append(_partition_convexity(*sample(m))[1])
    suspect = ks[-1] - ks[0] >= SUSPECT_INCREMENT
    return LineProfile(b, e, (t0, t1), t, d, dq, K, ks, suspect)


# ---------------------------------------------------------------------------
# semiconcavity probe


@dataclass
class ProbeReport:
    passes: bool
    results: List[dict]
    skipped: List[dict]
    tolerance_factor: float = 1e-6

    def to_json(self) -> dict:
        return {"passes": self.passes, "probes": self.results, "skipped": self.skipped}


def semiconcavity_probe(M: PlanarSetPresentation, probes, directions: int = 8, steps=PROBE_STEPS) -> ProbeReport:
    """Estimate ``d'(p, v) + d'(p, -v)`` at probe points off ``M``.

    Each symmetric second difference is reduced by the semiconcavity
    allowance ``h / (d(p) - h)`` (the curvature bound of a distance function
    at distance ``d(p) - h`` from the set), so the corrected quotient is
    ``<= 0`` for every step and tends to the derivative sum as ``h -> 0``.
    The estimate reported is the corrected quotient at the smallest step;
    the check is that no step exceeds ``1e-6 * d(p)``.
    """
    results, skipped = [], []
    ok = True
    for p in probes:
        pf = (float(p[0]), float(p[1]))
        d0 = distance(M, pf).value
        if d0 <= 0:
            skipped.append({"point": list(pf), "note": "probe lies on M"})
            continue
        tol = 1e-6 * d0
        worst = -math.inf
        per_dir = []
        for k in range(directions):
            ang = 2 * math.pi * k / directions
            v = (math.cos(ang), math.sin(ang))
            vals = []
            for s in steps:
                h = s * d0
                dp = distance(M, (pf[0] + h * v[0], pf[1] + h * v[1])).value
                dm = distance(M, (pf[0] - h * v[0], pf[1] - h * v[1])).value
                raw = (dp + dm - 2 * d0) / h
                vals.append(raw - h / (d0 - h))
            worst = max(worst, max(vals))
            per_dir.append({"direction": list(v), "estimate": vals[-1]})
        passed = worst <= tol
        ok = ok and passed
        results.append({"point": list(pf), "distance": d0, "worst": worst, "passes": passed, "directions": per_dir})
    return ProbeReport(ok, results, skipped)
