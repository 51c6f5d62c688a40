"""Planar primitives: rotations, the cones ``A_r^u`` / ``S_r^u`` and tangent fans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from ._q import cross, dot, is_exact, num_json, num_parse, q, qpoint, sub
from .errors import PreconditionError

__all__ = ["Rotation", "Cone", "TangentFan", "tangent_fan", "same_direction", "unit"]

ROTATION_TOL = 1e-12


@dataclass(frozen=True)
class Rotation:
    """Rotation about the origin mapping ``(1, 0)`` to ``(c, s)``.

    Exact when both entries are rationals (Pythagorean-triple frames);
    otherwise a float pair whose norm is within ``1e-12`` of one.
    """

    c: object = Fraction(1)
    s: object = Fraction(0)

    def __post_init__(self):
        c, s = self.c, self.s
        if isinstance(c, float) or isinstance(s, float):
            c, s = float(c), float(s)
            if abs(c * c + s * s - 1.0) > ROTATION_TOL:
                raise ValueError(f"({c}, {s}) is not a unit vector")
        else:
            c, s = q(c), q(s)
            if c * c + s * s != 1:
                raise ValueError(f"({c}, {s}) is not an exact unit vector")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "s", s)

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(Fraction(1), Fraction(0))

    @classmethod
    def from_triple(cls, a: int, b: int, hyp: int) -> "Rotation":
        """Exact rotation with ``cos = a/hyp`` and ``sin = b/hyp``."""
        return cls(Fraction(a, hyp), Fraction(b, hyp))

    @classmethod
    def from_angle(cls, theta: float) -> "Rotation":
        quarter = theta / (math.pi / 2)
        if abs(quarter - round(quarter)) < 1e-15:
            k = int(round(quarter)) % 4
            return cls(*[(1, 0), (0, 1), (-1, 0), (0, -1)][k])
        return cls(math.cos(theta), math.sin(theta))

    @property
    def exact(self) -> bool:
        return is_exact(self.c, self.s)

    @property
    def angle(self) -> float:
        return math.atan2(float(self.s), float(self.c))

    def apply(self, p):
        c, s = self.c, self.s
        return (c * p[0] - s * p[1], s * p[0] + c * p[1])

    __call__ = apply

    def inverse(self) -> "Rotation":
        return Rotation(self.c, -self.s)

    def compose(self, other: "Rotation") -> "Rotation":
        """``self o other``."""
        c = self.c * other.c - self.s * other.s
        s = self.s * other.c + self.c * other.s
        if not (self.exact and other.exact):
            n = math.hypot(float(c), float(s))
            return Rotation(float(c) / n, float(s) / n)
        return Rotation(c, s)

    def is_identity(self) -> bool:
        return self.c == 1 and self.s == 0

    def to_json(self) -> dict:
        return {"c": num_json(self.c), "s": num_json(self.s)}

    @classmethod
    def from_json(cls, data) -> "Rotation":
        if data is None:
            return cls.identity()
        return cls(num_parse(data["c"]), num_parse(data["s"]))


SHAPES = ("forward", "backward", "symmetric")


@dataclass(frozen=True)
class Cone:
    """Truncated cone with vertex ``vertex`` in the frame ``frame``.

    In frame coordinates ``(x, y) = frame^{-1}(p - vertex)``:

    * forward (``A_r^u``): ``0 <= x <= r`` and ``|y| <= u x``;
    * backward (``-A_r^u``): the mirror image ``-r <= x <= 0``;
    * symmetric (``S_r^u``): ``|x| <= r`` and ``|y| <= u |x|``.

    ``r = None`` means an untruncated cone.
    """

    vertex: Tuple
    u: Fraction
    r: Optional[Fraction] = None
    shape: str = "forward"
    frame: Rotation = field(default_factory=Rotation.identity)

    def __post_init__(self):
        object.__setattr__(self, "vertex", qpoint(self.vertex) if is_exact(*self.vertex) else tuple(self.vertex))
        object.__setattr__(self, "u", q(self.u))
        if self.r is not None:
            object.__setattr__(self, "r", q(self.r))
            if self.r <= 0:
                raise ValueError("cone length must be positive")
        if self.u <= 0:
            raise ValueError("cone slope must be positive")
        if self.shape not in SHAPES:
            raise ValueError(f"shape must be one of {SHAPES}")

    def local(self, p):
        return self.frame.inverse().apply(sub(p, self.vertex))

    def contains(self, p) -> bool:
        x, y = self.local(p)
        if self.shape == "backward":
            x = -x
        elif self.shape == "symmetric":
            x = abs(x)
        if x < 0:
            return False
        if self.r is not None and x > self.r:
            return False
        return abs(y) <= self.u * x

    __contains__ = contains

    def with_params(self, u=None, r=None) -> "Cone":
        return Cone(self.vertex, self.u if u is None else u, self.r if r is None else r, self.shape, self.frame)

    def to_json(self) -> dict:
        return {
            "vertex": [num_json(c) for c in self.vertex],
            "frame": self.frame.to_json(),
            "u": num_json(self.u),
            "r": None if self.r is None else num_json(self.r),
            "shape": self.shape,
        }

    @classmethod
    def from_json(cls, data) -> "Cone":
        r = data.get("r")
        return cls(
            tuple(num_parse(c) for c in data["vertex"]),
            q(data["u"]),
            None if r is None else q(r),
            data.get("shape", "forward"),
            Rotation.from_json(data.get("frame")),
        )


def same_direction(u, v) -> bool:
    """Exact test that nonzero vectors ``u`` and ``v`` point the same way."""
    return u[0] * v[1] - u[1] * v[0] == 0 and dot(u, v) > 0


def unit(v) -> Tuple[float, float]:
    n = math.hypot(float(v[0]), float(v[1]))
    return (float(v[0]) / n, float(v[1]) / n)


@dataclass(frozen=True)
class TangentFan:
    """Unit tangent directions of a set at ``base``.

    ``exact_directions`` keeps the rational direction vectors the unit
    vectors were normalized from.
    """

    base: Tuple
    directions: Tuple[Tuple[float, float], ...]
    exact_directions: Tuple[Tuple, ...] = ()

    def __len__(self):
        return len(self.directions)

    def to_json(self) -> dict:
        return {"base": [num_json(c) for c in self.base], "directions": [list(d) for d in self.directions]}


def _on_segment(z, a, b) -> bool:
    if cross(a, b, z) != 0:
        return False
    return min(a[0], b[0]) <= z[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= z[1] <= max(a[1], b[1])


def tangent_fan(pres, z) -> TangentFan:
    """Tangent directions of a presented set at ``z``, read off its pieces.

    At an interior point of a segment both segment directions are tangent;
    at a segment endpoint only the direction into the segment.  Isolated
    points contribute nothing.  Filled components are not included: the
    fan describes the skeleton.
    """
    z = tuple(z)
    if not pres.contains(z):
        raise PreconditionError(f"{z} is not a point of the set")
    dirs: List = []
    for a, b in pres.segments():
        if not _on_segment(z, a, b):
            continue
        for end in (a, b):
            if end != z:
                d = sub(end, z)
                if not any(same_direction(d, e) for e in dirs):
                    dirs.append(d)
    dirs.sort(key=lambda d: math.atan2(float(d[1]), float(d[0])))
    return TangentFan(z, tuple(unit(d) for d in dirs), tuple(dirs))
