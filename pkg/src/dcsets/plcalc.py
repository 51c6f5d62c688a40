"""Exact piecewise-linear calculus of DC and DCR functions on the real line.

Every function here is a :class:`PLFunction`: affine interpolation between
rational breakpoints.  All arithmetic is carried out with
:class:`fractions.Fraction`, so convexities, slopes and control functions
are compared with ``==`` rather than a tolerance.

A PL function on a compact interval always has finite convexity, so it is
DCR; the interesting content is in the *quantities*: the convexity
``K_a^b f`` (the total absolute slope jump), the minimal control function,
and the mixing control for continuous selections of several envelopes.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from ._q import q, qstr
from .errors import DomainError, PreconditionError

__all__ = [
    "PLFunction",
    "DCSplit",
    "SequenceFunction",
    "convexity",
    "partition_convexity",
    "dc_split",
    "pl_combine",
    "pl_compose_invert",
    "mix_control",
    "one_sided_slope",
    "sequence_to_function",
    "control_gap_check",
    "control_gap_check_grid",
    "grid_denominator",
    "is_convex",
]


@dataclass(frozen=True)
class PLFunction:
    """Piecewise-linear function through ``(breakpoints[i], values[i])``.

    The domain is ``[breakpoints[0], breakpoints[-1]]``.  A single breakpoint
    describes a constant on a degenerate (one-point) domain.
    """

    breakpoints: Tuple[Fraction, ...]
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        xs = tuple(q(x) for x in self.breakpoints)
        ys = tuple(q(y) for y in self.values)
        if len(xs) != len(ys):
            raise ValueError("breakpoints and values differ in length")
        if not xs:
            raise ValueError("a PLFunction needs at least one breakpoint")
        for a, b in zip(xs, xs[1:]):
            if not a < b:
                raise ValueError(f"breakpoints must be strictly increasing ({a} >= {b})")
        object.__setattr__(self, "breakpoints", xs)
        object.__setattr__(self, "values", ys)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_points(cls, points: Iterable[Sequence]) -> "PLFunction":
        pts = [(q(x), q(y)) for x, y in points]
        return cls(tuple(p[0] for p in pts), tuple(p[1] for p in pts))

    @classmethod
    def affine(cls, a, b, slope, intercept=0) -> "PLFunction":
        a, b, slope, intercept = q(a), q(b), q(slope), q(intercept)
        return cls((a, b), (slope * a + intercept, slope * b + intercept))

    @classmethod
    def constant(cls, a, b, c=0) -> "PLFunction":
        return cls.affine(a, b, 0, c)

    # -- basic queries ----------------------------------------------------

    @property
    def domain(self) -> Tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    @property
    def is_point(self) -> bool:
        return len(self.breakpoints) == 1

    @property
    def slopes(self) -> Tuple[Fraction, ...]:
        xs, ys = self.breakpoints, self.values
        return tuple((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1))

    @property
    def points(self) -> List[Tuple[Fraction, Fraction]]:
        return list(zip(self.breakpoints, self.values))

    def lipschitz(self) -> Fraction:
        return max((abs(s) for s in self.slopes), default=Fraction(0))

    def contains(self, x) -> bool:
        x = q(x)
        return self.breakpoints[0] <= x <= self.breakpoints[-1]

    def __call__(self, x) -> Fraction:
        x = q(x)
        xs, ys = self.breakpoints, self.values
        if not xs[0] <= x <= xs[-1]:
            raise DomainError(f"{x} outside domain [{xs[0]}, {xs[-1]}]")
        i = bisect_left(xs, x)
        if xs[i] == x:
            return ys[i]
        x0, x1, y0, y1 = xs[i - 1], xs[i], ys[i - 1], ys[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def eval_extended(self, x) -> Fraction:
        """Evaluate with constant extension beyond both domain ends."""
        x = q(x)
        if x <= self.breakpoints[0]:
            return self.values[0]
        if x >= self.breakpoints[-1]:
            return self.values[-1]
        return self(x)

    # -- transformations --------------------------------------------------

    def refine(self, extra: Iterable) -> "PLFunction":
        """Insert additional breakpoints (those outside the domain are ignored)."""
        lo, hi = self.domain
        xs = sorted(set(self.breakpoints) | {q(x) for x in extra if lo <= q(x) <= hi})
        return PLFunction(tuple(xs), tuple(self(x) for x in xs))

    def restrict(self, a, b) -> "PLFunction":
        a, b = q(a), q(b)
        lo, hi = self.domain
        if not (lo <= a <= b <= hi):
            raise DomainError(f"[{a}, {b}] is not contained in [{lo}, {hi}]")
        inner = [x for x in self.breakpoints if a < x < b]
        xs = [a] + inner + ([b] if b != a else [])
        return PLFunction(tuple(xs), tuple(self(x) for x in xs))

    def extend_constant(self, a, b) -> "PLFunction":
        """Constant extension to ``[a, b]`` containing the domain."""
        a, b = q(a), q(b)
        lo, hi = self.domain
        if a > lo or b < hi:
            raise DomainError("extension interval must contain the domain")
        xs = list(self.breakpoints)
        ys = list(self.values)
        if a < lo:
            xs.insert(0, a)
            ys.insert(0, ys[0])
        if b > hi:
            xs.append(b)
            ys.append(ys[-1])
        return PLFunction(tuple(xs), tuple(ys))

    def simplify(self) -> "PLFunction":
        """Drop breakpoints where the slope does not change."""
        if len(self.breakpoints) <= 2:
            return self
        s = self.slopes
        keep = [0] + [i for i in range(1, len(s)) if s[i] != s[i - 1]] + [len(self.breakpoints) - 1]
        return PLFunction(tuple(self.breakpoints[i] for i in keep), tuple(self.values[i] for i in keep))

    def shift(self, dx=0, dy=0) -> "PLFunction":
        dx, dy = q(dx), q(dy)
        return PLFunction(tuple(x + dx for x in self.breakpoints), tuple(y + dy for y in self.values))

    def scaled(self, factor) -> "PLFunction":
        """Graph scaled about the origin: ``x -> factor * f(x / factor)``."""
        c = q(factor)
        if c <= 0:
            raise PreconditionError("scale factor must be positive")
        return PLFunction(tuple(c * x for x in self.breakpoints), tuple(c * y for y in self.values))

    def __neg__(self) -> "PLFunction":
        return PLFunction(self.breakpoints, tuple(-y for y in self.values))

    def __add__(self, other):
        return pl_combine("add", self, other)

    def __sub__(self, other):
        return pl_combine("sub", self, other)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {"breakpoints": [qstr(x) for x in self.breakpoints], "values": [qstr(y) for y in self.values]}

    @classmethod
    def from_json(cls, data) -> "PLFunction":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(q(x) for x in data["breakpoints"]), tuple(q(y) for y in data["values"]))


@dataclass(frozen=True)
class DCSplit:
    """Result of :func:`dc_split`: ``f = p - q`` and the minimal control."""

    p: PLFunction
    q: PLFunction
    control: PLFunction


def is_convex(f: PLFunction) -> bool:
    s = f.slopes
    return all(a <= b for a, b in zip(s, s[1:]))


def _jumps(f: PLFunction) -> List[Fraction]:
    s = f.slopes
    return [s[i] - s[i - 1] for i in range(1, len(s))]


def _integrate(xs: Sequence[Fraction], y0: Fraction, slope0: Fraction, jumps: Sequence[Fraction]) -> PLFunction:
    """PL function on ``xs`` with value ``y0`` at ``xs[0]``, first slope ``slope0``
    and the given slope jumps at ``xs[1:-1]``."""
    ys = [y0]
    slope = slope0
    for i in range(len(xs) - 1):
        if i > 0:
            slope += jumps[i - 1]
        ys.append(ys[-1] + slope * (xs[i + 1] - xs[i]))
    return PLFunction(tuple(xs), tuple(ys))


def partition_convexity(f, partition: Sequence) -> Fraction:
    """``K(f, D)``: summed absolute changes of consecutive difference quotients.

    ``f`` may be any callable; ``partition`` must be strictly increasing.
    """
    xs = [q(x) for x in partition]
    if len(xs) <= 2:
        return Fraction(0)
    ys = [f(x) for x in xs]
    dq = [(ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1)]
    return sum((abs(dq[i + 1] - dq[i]) for i in range(len(dq) - 1)), Fraction(0))


def convexity(f: PLFunction, a, b) -> Fraction:
    """Convexity ``K_a^b f``; for PL data the sum of absolute slope jumps in ``(a, b)``."""
    a, b = q(a), q(b)
    lo, hi = f.domain
    if not (lo <= a <= b <= hi):
        raise DomainError(f"[{a}, {b}] is not contained in the domain [{lo}, {hi}]")
    if a == b:
        return Fraction(0)
    return sum((abs(j) for j in _jumps(f.restrict(a, b))), Fraction(0))


def dc_split(f: PLFunction) -> DCSplit:
    """Split ``f`` into convex parts ``p - q`` and return its minimal control.

    ``p`` collects the upward slope jumps and starts with ``f``'s value and
    slope; ``q`` collects the downward jumps and starts at ``(0, slope 0)``.
    The control has slope jump ``|jump_f|`` at each breakpoint (the least
    that keeps both ``control + f`` and ``control - f`` convex), value 0 and
    slope 0 at the left end; it equals ``p + q`` up to an affine term.
    """
    xs = f.breakpoints
    x0 = xs[0]
    if f.is_point:
        zero = PLFunction((x0,), (Fraction(0),))
        return DCSplit(f, zero, zero)
    jumps = _jumps(f)
    s0 = f.slopes[0]
    p = _integrate(xs, f.values[0], s0, [max(j, 0) for j in jumps])
    qf = _integrate(xs, Fraction(0), Fraction(0), [max(-j, 0) for j in jumps])
    control = _integrate(xs, Fraction(0), Fraction(0), [abs(j) for j in jumps])
    return DCSplit(p, qf, control)


def _common_refinement(f: PLFunction, g: PLFunction) -> Tuple[PLFunction, PLFunction]:
    if f.domain != g.domain:
        raise DomainError(f"domains differ: {f.domain} vs {g.domain}")
    xs = sorted(set(f.breakpoints) | set(g.breakpoints))
    return f.refine(xs), g.refine(xs)


def _zero_crossings(f: PLFunction) -> List[Fraction]:
    """Interior points where ``f`` changes sign strictly inside a piece."""
    out = []
    xs, ys = f.breakpoints, f.values
    for i in range(len(xs) - 1):
        y0, y1 = ys[i], ys[i + 1]
        if (y0 < 0 < y1) or (y1 < 0 < y0):
            out.append(xs[i] + (xs[i + 1] - xs[i]) * y0 / (y0 - y1))
    return out


def pl_combine(op: str, f: PLFunction, g=None) -> PLFunction:
    """Exact PL arithmetic: ``add``, ``sub``, ``scale``, ``abs``, ``max``, ``min``.

    Binary operations require equal domains.  ``scale`` takes a scalar ``g``;
    ``abs`` ignores ``g``.  For ``abs``/``max``/``min`` the exact crossing
    points are inserted as breakpoints.
    """
    if op == "scale":
        c = q(g)
        return PLFunction(f.breakpoints, tuple(c * y for y in f.values))
    if op == "abs":
        h = f.refine(_zero_crossings(f))
        return PLFunction(h.breakpoints, tuple(abs(y) for y in h.values))
    if op in ("add", "sub", "max", "min"):
        if not isinstance(g, PLFunction):
            c = q(g)
            g = PLFunction(f.breakpoints, tuple(c for _ in f.breakpoints))
        f1, g1 = _common_refinement(f, g)
        if op == "add":
            return PLFunction(f1.breakpoints, tuple(a + b for a, b in zip(f1.values, g1.values)))
        diff = PLFunction(f1.breakpoints, tuple(a - b for a, b in zip(f1.values, g1.values)))
        if op == "sub":
            return diff
        cross = _zero_crossings(diff)
        f2, g2 = f1.refine(cross), g1.refine(cross)
        pick = max if op == "max" else min
        return PLFunction(f2.breakpoints, tuple(pick(a, b) for a, b in zip(f2.values, g2.values)))
    raise ValueError(f"unknown operation {op!r}")


def _require_increasing(phi: PLFunction) -> None:
    if phi.is_point:
        raise PreconditionError("a bijection needs a nondegenerate interval")
    for i, s in enumerate(phi.slopes):
        if s <= 0:
            raise PreconditionError(
                f"phi is not strictly increasing: slope {s} on [{phi.breakpoints[i]}, {phi.breakpoints[i + 1]}]"
            )


def pl_compose_invert(mode: str, f: Optional[PLFunction], phi: PLFunction) -> PLFunction:
    """``compose`` returns ``f o phi``; ``invert`` returns ``phi^{-1}`` (``f`` unused).

    ``phi`` must be a strictly increasing PL bijection.
    """
    _require_increasing(phi)
    if mode == "invert":
        return PLFunction(phi.values, phi.breakpoints)
    if mode != "compose":
        raise ValueError(f"unknown mode {mode!r}")
    lo, hi = f.domain
    c, d = phi.values[0], phi.values[-1]
    if not (lo <= c and d <= hi):
        raise DomainError(f"range [{c}, {d}] of phi is not inside domain [{lo}, {hi}] of f")
    inv = PLFunction(phi.values, phi.breakpoints)
    pulled = [inv(y) for y in f.breakpoints if c < y < d]
    xs = sorted(set(phi.breakpoints) | set(pulled))
    return PLFunction(tuple(xs), tuple(f(phi(x)) for x in xs))


def compose(f: PLFunction, phi: PLFunction) -> PLFunction:
    return pl_compose_invert("compose", f, phi)


def invert(phi: PLFunction) -> PLFunction:
    return pl_compose_invert("invert", None, phi)


def mix_control(envelopes: Sequence[PLFunction], controls: Optional[Sequence[PLFunction]] = None) -> PLFunction:
    """Control function valid for every continuous selection of ``envelopes``.

    Returns ``sum_{i,j} (f_i + f_j + |F_i - F_j| / 2)`` where ``f_i`` is a
    control of ``F_i`` (by default the minimal one from :func:`dc_split`).
    """
    envelopes = list(envelopes)
    if not envelopes:
        raise PreconditionError("mix_control needs at least one envelope")
    if controls is None:
        controls = [dc_split(F).control for F in envelopes]
    elif len(controls) != len(envelopes):
        raise PreconditionError("one control per envelope is required")
    k = len(envelopes)
    total = pl_combine("scale", controls[0], 0)
    for i in range(k):
        total = pl_combine("add", total, pl_combine("scale", controls[i], 2 * k))
    for i in range(k):
        for j in range(k):
            if i != j:
                gap = pl_combine("abs", pl_combine("sub", envelopes[i], envelopes[j]))
                total = pl_combine("add", total, pl_combine("scale", gap, Fraction(1, 2)))
    return total


def one_sided_slope(f: PLFunction, x, direction: str) -> Fraction:
    """Exact one-sided derivative of ``f`` at ``x`` (``direction`` is ``left``/``right``)."""
    x = q(x)
    xs = f.breakpoints
    lo, hi = f.domain
    if direction == "right":
        if not lo <= x < hi:
            raise DomainError(f"no right slope at {x} on [{lo}, {hi}]")
        i = bisect_right(xs, x) - 1
    elif direction == "left":
        if not lo < x <= hi:
            raise DomainError(f"no left slope at {x} on [{lo}, {hi}]")
        i = bisect_left(xs, x) - 1
    else:
        raise ValueError(f"direction must be 'left' or 'right', not {direction!r}")
    return (f.values[i + 1] - f.values[i]) / (xs[i + 1] - xs[i])


@dataclass(frozen=True)
class SequenceFunction:
    """PL function through ``(a_n, A_n)`` together with its variation report."""

    function: PLFunction
    slopes: Tuple[Fraction, ...]
    derivative_variation: Fraction
    slope_sum: Fraction
    proof_bound: Fraction
    weighted_sum: Fraction
    truncated: bool = True

    def report(self) -> dict:
        return {
            "derivative_variation": qstr(self.derivative_variation),
            "slope_sum": qstr(self.slope_sum),
            "proof_bound": qstr(self.proof_bound),
            "weighted_sum": qstr(self.weighted_sum),
            "within_bound": self.derivative_variation <= self.proof_bound,
            "note": "finite truncation: the infinite-tail DCR property is witnessed only by bounded partial sums",
        }


def sequence_to_function(a: Sequence, A: Sequence, N: int) -> SequenceFunction:
    """Interpolate ``f(a_n) = A_n`` for ``n = 1..N+1`` and close with ``f(0) = 0``.

    Requires ``0 < a_{n+1} <= a_n / 3``.  The returned slopes are those on
    ``(a_{n+1}, a_n]`` for ``n = 1..N`` (then the closing piece on
    ``(0, a_{N+1}]``).  ``derivative_variation`` is the variation of the
    left derivative over ``(a_{N+1}, a_1)``; ``proof_bound`` is
    ``sum_{n<=N} (|A_n| / (2a_n/3) + |A_{n+1}| / (2 a_{n+1}))``.
    """
    if N < 1:
        raise PreconditionError("N must be at least 1")
    a = [q(v) for v in a]
    A = [q(v) for v in A]
    if len(a) < N + 1 or len(A) < N + 1:
        raise PreconditionError(f"need N+1 = {N + 1} terms of both sequences")
    if a[0] <= 0:
        raise PreconditionError("ratio condition violated at index 1: a_1 must be positive")
    for n in range(N):
        if not (0 < a[n + 1] <= a[n] / 3):
            raise PreconditionError(f"ratio condition 0 < a_(n+1) <= a_n/3 violated at index {n + 1}")
    pts = [(Fraction(0), Fraction(0))] + [(a[n], A[n]) for n in range(N, -1, -1)]
    f = PLFunction.from_points(pts)
    slopes = tuple((A[n] - A[n + 1]) / (a[n] - a[n + 1]) for n in range(N))
    variation = sum((abs(slopes[n] - slopes[n + 1]) for n in range(N - 1)), Fraction(0))
    bound = sum((abs(A[n]) / (Fraction(2, 3) * a[n]) + abs(A[n + 1]) / (2 * a[n + 1]) for n in range(N)), Fraction(0))
    weighted = sum((abs(A[n]) / a[n] for n in range(N + 1)), Fraction(0))
    return SequenceFunction(f, slopes, variation, sum((abs(s) for s in slopes), Fraction(0)), bound, weighted)


def control_gap_check(f: PLFunction, phi: PLFunction, z, h, k) -> bool:
    """Check the control inequality for difference quotients around ``z``.

    ``|D_k f(z) - D_{-h} f(z)| <= D_k phi(z) - D_{-h} phi(z)``.
    """
    z, h, k = q(z), q(h), q(k)
    if h <= 0 or k <= 0:
        raise PreconditionError("h and k must be positive")
    fr = (f(z + k) - f(z)) / k
    fl = (f(z) - f(z - h)) / h
    pr = (phi(z + k) - phi(z)) / k
    pl = (phi(z) - phi(z - h)) / h
    return abs(fr - fl) <= pr - pl


def grid_denominator(*fs: PLFunction) -> int:
    """Least ``N`` such that every breakpoint of every ``f`` lies on the grid ``Z / N``."""
    return math.lcm(*(x.denominator for f in fs for x in f.breakpoints))


def _grid_numerators(f: PLFunction, N: int, js: Sequence[int]) -> Tuple[List[int], int]:
    """Integers ``Y`` and ``L`` with ``f(j / N) == Y[i] / L`` for ``j = js[i]``."""
    xs = [x * N for x in f.breakpoints]
    if any(x.denominator != 1 for x in xs):
        raise PreconditionError("breakpoints are not on the grid")
    xs = [int(x) for x in xs]
    slopes = f.slopes
    L = math.lcm(*(y.denominator for y in f.values), *(s.denominator * N for s in slopes))
    y0 = [int(y * L) for y in f.values]
    step = [int(s * L / N) for s in slopes]
    out = []
    for j in js:
        if not xs[0] <= j <= xs[-1]:
            raise DomainError(f"{j}/{N} outside domain")
        i = min(bisect_right(xs, j) - 1, len(step) - 1)
        out.append(y0[0] if i < 0 else y0[i] + step[i] * (j - xs[i]))
    return out, L


def control_gap_check_grid(f: PLFunction, phi: PLFunction, N: int, triples: Iterable[Tuple[int, int, int]]) -> List[bool]:
    """:func:`control_gap_check` at ``z = jz / N``, ``h = jh / N``, ``k = jk / N`` for many triples.

    Values are integer numerators over a common denominator, so the result
    is exact and agrees with the single-triple check.  ``N`` must be a
    multiple of :func:`grid_denominator` of both functions.
    """
    triples = list(triples)
    if any(jh <= 0 or jk <= 0 for _, jh, jk in triples):
        raise PreconditionError("h and k must be positive")
    js = sorted({j for jz, jh, jk in triples for j in (jz - jh, jz, jz + jk)})
    fv, Lf = _grid_numerators(f, N, js)
    pv, Lp = _grid_numerators(phi, N, js)
    F_ = dict(zip(js, fv))
    P_ = dict(zip(js, pv))
    out = []
    for jz, jh, jk in triples:
        # |fr - fl| <= pr - pl, scaled by h * k * N * Lf * Lp > 0
        df = jh * (F_[jz + jk] - F_[jz]) - jk * (F_[jz] - F_[jz - jh])
        dp = jh * (P_[jz + jk] - P_[jz]) - jk * (P_[jz] - P_[jz - jh])
        out.append(abs(df) * Lp <= dp * Lf)
    return out
