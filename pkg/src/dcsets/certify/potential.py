"""Cone potentials, the field Psi_n and local-concavity verification."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .. import plcalc
from .._q import qstr
from ..errors import PreconditionError
from ..field import SegmentField
from .grid import GridApprox, SlopeStats, grid_approx

__all__ = [
    "ConePotential",
    "PsiField",
    "ConcavityReport",
    "cone_potential",
    "build_psi",
    "verify_local_concavity",
    "golden_max",
]

MODES = ("global", "clamped")
GOLDEN = (math.sqrt(5) - 1) / 2
SEARCH_ITERS = 60


def golden_max(f, lo, hi, iters: int = SEARCH_ITERS):
    """Elementwise maximum of concave ``f`` on ``[lo, hi]`` by golden-section search."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc >= fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new = np.where(left, hi - GOLDEN * (hi - lo), lo + GOLDEN * (hi - lo))
        fn = f(new)
        c, d, fc, fd = (
            np.where(left, new, d),
            np.where(left, c, new),
            np.where(left, fn, fd),
            np.where(left, fc, fn),
        )
    return np.maximum(np.maximum(fc, fd), np.maximum(f(lo), f(hi)))


def _norm_defect(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``(|p| + |q|) / 2 - |(p + q) / 2|`` without cancellation (always ``>= 0``)."""
    np_, nq = np.hypot(p[..., 0], p[..., 1]), np.hypot(q[..., 0], q[..., 1])
    dot = p[..., 0] * q[..., 0] + p[..., 1] * q[..., 1]
    crs = p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]
    nm = np.hypot(p[..., 0] + q[..., 0], p[..., 1] + q[..., 1])
    den = np_ + nq + nm
    safe = np.where(den > 0, den, 1.0)
    pos = crs * crs / np.where(np_ * nq + dot > 0, np_ * nq + dot, 1.0) / safe
    neg = (np_ * nq - dot) / safe
    out = np.where(dot >= 0, pos, neg)
    return np.where(den > 0, out, 0.0)


@dataclass(frozen=True)
class ConePotential:
    """Concave potential at a node ``v`` with ``|z - v| + psi(z) = S(z)`` on the cone ``V``.

    ``S(z) = <z - v, e> / cos(beta)`` where ``e`` is the unit bisector of
    ``V`` and ``2 beta`` its opening angle.
    """

    stats: SlopeStats
    cls: int
    mode: str
    beta: float
    bisector: Tuple[float, float]
    rays: Tuple[Tuple[float, float], Tuple[float, float]]

    @property
    def vertex(self) -> Tuple[float, float]:
        return (float(self.stats.node[0]), float(self.stats.node[1]))

    @property
    def angle(self) -> float:
        return 2 * self.beta

    @property
    def lipschitz(self) -> float:
        if self.mode == "global":
            return 1 + 1 / math.cos(self.beta)
        return math.tan(self.beta)

    def in_cone(self, z) -> bool:
        """Exact membership in ``V`` by the two inner-product conditions."""
        s = self.stats
        a = s.node
        w = (z[0] - a[0], z[1] - a[1])
        if self.cls == 1:
            return w[0] + w[1] * s.s_plus_max <= 0 and w[0] + w[1] * s.s_minus_min >= 0
        return w[0] + w[1] * s.s_plus_min <= 0 and w[0] + w[1] * s.s_minus_max >= 0

    def _local(self, z: np.ndarray):
        v = np.array(self.vertex)
        e = np.array(self.bisector)
        w = np.asarray(z, dtype=float) - v
        x = w[..., 0] * e[0] + w[..., 1] * e[1]
        y = -w[..., 0] * e[1] + w[..., 1] * e[0]
        return x, y

    def S(self, z) -> np.ndarray:
        x, _ = self._local(z)
        return x / math.cos(self.beta)

    def cone_value(self, z) -> np.ndarray:
        """``S(z) - |z - v|``: the potential's value on ``V``."""
        x, y = self._local(z)
        return x / math.cos(self.beta) - np.hypot(x, y)

    def inside(self, z) -> np.ndarray:
        x, y = self._local(z)
        return np.abs(y) <= x * math.tan(self.beta)

    def __call__(self, z, search: bool = False) -> np.ndarray:
        if self.mode == "global":
            return self.cone_value(z)
        return _clamped_eval([self], np.asarray(z, dtype=float).reshape(-1, 2), search)[0].reshape(np.shape(z)[:-1])

    def to_json(self) -> dict:
        return {
            "node": [qstr(c) for c in self.stats.node],
            "class": self.cls,
            "mode": self.mode,
            "beta": self.beta,
            "angle": self.angle,
            "bisector": list(self.bisector),
            "rays": [list(r) for r in self.rays],
            "lipschitz": self.lipschitz,
        }


def _unit(x, y):
    n = math.hypot(x, y)
    return (x / n, y / n)


def cone_potential(stats: SlopeStats, cls: int, mode: str = "global") -> ConePotential:
    """Potential attached to a node of class ``cls`` (1: lower cone, 2: upper cone)."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if cls == 1:
        lo, hi = stats.s_minus_min, stats.s_plus_max
        t_lo, t_hi = math.atan(lo) - math.pi / 2, math.atan(hi) - math.pi / 2
        rays = (_unit(float(lo), -1.0), _unit(float(hi), -1.0))
    elif cls == 2:
        lo, hi = stats.s_plus_min, stats.s_minus_max
        t_lo, t_hi = math.atan(lo) + math.pi / 2, math.atan(hi) + math.pi / 2
        rays = (_unit(-float(lo), 1.0), _unit(-float(hi), 1.0))
    else:
        raise ValueError("class must be 1 or 2")
    if not hi > lo:
        raise PreconditionError(f"node {stats.node} has zero angle for class {cls}")
    # arctan difference computed without cancellation
    gap = math.atan2(float(hi - lo), float(1 + hi * lo))
    if gap <= 0:
        gap += math.pi
    beta = gap / 2
    mid = t_lo + beta
    return ConePotential(stats, cls, mode, beta, (math.cos(mid), math.sin(mid)), rays)


def _search_radius(beta: float) -> float:
    s, c = math.sin(beta), math.cos(beta)
    return 2 * s / (s + c - 1) + 2


def _clamped_eval(pots: Sequence[ConePotential], z: np.ndarray, search: bool = False) -> np.ndarray:
    """``sup_{w in V} (S(w) - |w - v| - tan(beta) |z - w|)`` for every potential and point.

    The objective is jointly concave in the bisector-frame coordinates of
    ``w``; the search is a nested golden-section maximization over
    ``0 <= x <= T`` and ``|y| <= x tan(beta)``.  Points of ``V`` take the
    closed form unless ``search`` is set.
    """
    if not pots:
        return np.zeros((0, len(z)))
    v = np.array([p.vertex for p in pots])[:, None, :]
    e = np.array([p.bisector for p in pots])[:, None, :]
    beta = np.array([p.beta for p in pots])[:, None]
    tb, cb = np.tan(beta), np.cos(beta)
    w = z[None, :, :] - v
    zx = w[..., 0] * e[..., 0] + w[..., 1] * e[..., 1]
    zy = -w[..., 0] * e[..., 1] + w[..., 1] * e[..., 0]
    rad = np.hypot(zx, zy)
    T = np.array([_search_radius(p.beta) for p in pots])[:, None] * (rad + 1)

    def objective(x, y):
        return x / cb - np.hypot(x, y) - tb * np.hypot(zx - x, zy - y)

    def inner(x):
        return golden_max(lambda y: objective(x, y), -x * tb, x * tb)

    val = golden_max(inner, np.zeros_like(T), T)
    if not search:
        inside = np.abs(zy) <= zx * tb
        val = np.where(inside, zx / cb - rad, val)
    return val


@dataclass
class PsiField:
    """Sum of cone potentials over the classed nodes of a grid approximation."""

    grid: GridApprox
    mode: str
    potentials: List[ConePotential]
    budget: dict
    C: Fraction
    L: Fraction
    D: float

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        flat = z.reshape(-1, 2)
        if not self.potentials:
            return np.zeros(flat.shape[0]).reshape(z.shape[:-1])
        if self.mode == "global":
            total = np.zeros(len(flat))
            for p in self.potentials:
                total += p.cone_value(flat)
        else:
            total = _clamped_eval(self.potentials, flat).sum(axis=0)
        return total.reshape(z.shape[:-1])

    def midpoint_defect(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """``Psi((x + y) / 2) - (Psi(x) + Psi(y)) / 2`` computed stably."""
        if not self.potentials:
            return np.zeros(len(x))
        if self.mode == "global":
            out = np.zeros(len(x))
            for p in self.potentials:
                v = np.array(p.vertex)
                out += _norm_defect(x - v, y - v)
            return out
        return self((x + y) / 2) - (self(x) + self(y)) / 2

    @property
    def lipschitz_sum(self) -> float:
        return math.fsum(p.lipschitz for p in self.potentials)

    def lipschitz_sample(self, pairs: int = 200, seed: int = 0, box=None) -> float:
        """Largest ``|Psi(z1) - Psi(z2)| / |z1 - z2|`` over random pairs in ``box``."""
        rng = np.random.default_rng(seed)
        x0, y0, x1, y1 = box or _probe_box(self.grid)
        z1 = rng.uniform([x0, y0], [x1, y1], size=(pairs, 2))
        z2 = rng.uniform([x0, y0], [x1, y1], size=(pairs, 2))
        vals = self(np.concatenate([z1, z2]))
        num = np.abs(vals[:pairs] - vals[pairs:])
        den = np.hypot(*(z1 - z2).T)
        keep = den > 1e-9 * max(x1 - x0, y1 - y0)
        return float((num[keep] / den[keep]).max()) if keep.any() else 0.0

    def without_potentials(self) -> "PsiField":
        return replace(self, potentials=[])

    def to_json(self) -> dict:
        return {
            "n": self.grid.n,
            "mode": self.mode,
            "potentials": len(self.potentials),
            "budget": dict(self.budget),
            "C": qstr(self.C),
            "L": qstr(self.L),
            "D": self.D,
        }


def _budget(grid: GridApprox) -> Tuple[dict, Fraction, Fraction, float]:
    fam = grid.family
    lo, hi = -grid.step, grid.r + grid.step
    env = [f.extend_constant(lo, hi) for f in fam.envelopes]
    phi = plcalc.mix_control(env)
    k = len(env)
    L = phi.lipschitz()
    C = 2 * L * k
    D = 0.0 if L == 0 else float(2 * C * L) / (math.sqrt(2) * math.atan(float(L)))
    s1 = sum((s.gap1 for s in grid.class_nodes(1)), Fraction(0))
    s2 = sum((s.gap2 for s in grid.class_nodes(2)), Fraction(0))
    tele = k * (plcalc.one_sided_slope(phi, hi, "left") - plcalc.one_sided_slope(phi, lo, "right"))
    budget = {
        "class1": qstr(s1),
        "class2": qstr(s2),
        "total": qstr(s1 + s2),
        "C": qstr(C),
        "within_C": s1 + s2 <= C,
        "telescoping_bound": qstr(tele),
        "within_telescoping": s1 <= tele and s2 <= tele,
    }
    return budget, C, L, D


def build_psi(obj, n: int, mode: str = "global") -> PsiField:
    """``Psi_n``: one potential per node and class, with the budget report."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    grid = obj if isinstance(obj, GridApprox) else grid_approx(obj, n)
    pots = [cone_potential(s, 1, mode) for s in grid.class_nodes(1)]
    pots += [cone_potential(s, 2, mode) for s in grid.class_nodes(2)]
    budget, C, L, D = _budget(grid)
    return PsiField(grid, mode, pots, budget, C, L, D)


# ---------------------------------------------------------------------------
# concavity verification


@dataclass
class ConcavityReport:
    passes: bool
    balls: List[dict]
    skipped: List[dict]
    worst: float
    failures: int

    def to_json(self) -> dict:
        return {
            "passes": self.passes,
            "balls": len(self.balls),
            "failures": self.failures,
            "worst_scaled_defect": self.worst,
            "skipped": len(self.skipped),
        }


def _probe_box(grid: GridApprox):
    r = float(grid.r)
    ys = [float(v) for h in grid.interpolants for v in h.values]
    y0, y1 = min(ys), max(ys)
    w, h = r, max(y1 - y0, r / 4)
    cx, cy = r / 2, (y0 + y1) / 2
    return (cx - 0.75 * w, cy - 0.75 * h, cx + 0.75 * w, cy + 0.75 * h)


def probe_balls(grid: GridApprox, dist: SegmentField, count: int, seed: int = 0):
    """Jittered-grid probe balls ``(center, radius)`` off ``M_n``."""
    r = float(grid.r)
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = _probe_box(grid)
    side = max(2, math.ceil(math.sqrt(1.5 * count)))
    balls, skipped = [], []
    while True:
        cells = np.array([(i, j) for j in range(side) for i in range(side)], dtype=float)
        jitter = rng.uniform(0, 1, size=cells.shape)
        centers = np.column_stack([
            x0 + (cells[:, 0] + jitter[:, 0]) * (x1 - x0) / side,
            y0 + (cells[:, 1] + jitter[:, 1]) * (y1 - y0) / side,
        ])
        d = dist(centers)
        balls, skipped = [], []
        for c, dc in zip(centers, d):
            rad = min(dc / 2, r / 4)
            if rad < 1e-6 * r:
                skipped.append({"center": c.tolist(), "note": "touches M_n"})
                continue
            balls.append((c, rad))
        if len(balls) >= count:
            idx = np.linspace(0, len(balls) - 1, count).round().astype(int)
            return [balls[i] for i in idx], skipped
        side += 2


def verify_local_concavity(pres, psi: PsiField, probes=None, n_balls: int = 200, triples: int = 16,
                           seed: int = 0, tol: float = 1e-9) -> ConcavityReport:
    """Midpoint concavity of ``d_{M_n} + Psi_n`` inside probe balls off ``M_n``.

    ``probes`` may list ``(center, radius)`` balls explicitly; otherwise
    ``n_balls`` balls are drawn on a jittered grid.  A ball passes when every
    sampled defect is ``>= -tol * radius``.
    """
    grid = psi.grid
    dist = SegmentField(grid.segments())
    skipped: List[dict] = []
    if probes is None:
        balls, skipped = probe_balls(grid, dist, n_balls, seed)
    else:
        balls = []
        for c, rad in probes:
            c = np.array([float(c[0]), float(c[1])])
            if dist(c[None, :])[0] <= rad:
                skipped.append({"center": c.tolist(), "note": "ball touches M_n"})
            else:
                balls.append((c, float(rad)))
    rng = np.random.default_rng(seed + 1)
    xs, ys = [], []
    for c, rad in balls:
        ang = rng.uniform(0, 2 * math.pi, size=(triples, 2))
        rr = rad * np.sqrt(rng.uniform(0, 1, size=(triples, 2)))
        xs.append(c + np.column_stack([rr[:, 0] * np.cos(ang[:, 0]), rr[:, 0] * np.sin(ang[:, 0])]))
        ys.append(c + np.column_stack([rr[:, 1] * np.cos(ang[:, 1]), rr[:, 1] * np.sin(ang[:, 1])]))
    # one batched evaluation for all balls
    defects = np.zeros((0, triples))
    if balls:
        x, y = np.concatenate(xs), np.concatenate(ys)
        dvals = dist(np.concatenate([x, y, (x + y) / 2]))
        k = len(x)
        dd = dvals[2 * k:] - (dvals[:k] + dvals[k:2 * k]) / 2
        defects = (dd + psi.midpoint_defect(x, y)).reshape(len(balls), triples)
    out, worst, failures = [], math.inf, 0
    for (c, rad), defect in zip(balls, defects):
        low = float(defect.min())
        ok = low >= -tol * rad
        failures += not ok
        worst = min(worst, low / float(rad))
        out.append({"center": c.tolist(), "radius": float(rad), "worst_defect": low, "passes": bool(ok)})
    return ConcavityReport(failures == 0, out, skipped, float(worst) if out else 0.0, failures)
