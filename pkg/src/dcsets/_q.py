"""Helpers for exact rationals: parsing, formatting and point utilities."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Tuple, Union

Number = Union[int, float, Fraction]
Point = Tuple[Fraction, Fraction]


def q(value) -> Fraction:
    """Coerce ``value`` to an exact :class:`~fractions.Fraction`.

    Strings are parsed as ``"p/q"``, integers or finite decimals; floats are
    converted exactly (their binary expansion), never rounded.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def qstr(value: Fraction) -> str:
    """Format a rational as ``"p/q"`` (or ``"p"`` for integers)."""
    value = q(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def qpoint(p: Sequence) -> Point:
    if len(p) != 2:
        raise ValueError(f"expected a 2-d point, got {p!r}")
    return (q(p[0]), q(p[1]))


def point_str(p) -> list:
    return [num_json(p[0]), num_json(p[1])]


def num_json(value):
    """JSON form of a coordinate: rational string when exact, float otherwise."""
    if isinstance(value, float):
        return value
    return qstr(value)


def num_parse(value):
    """Inverse of :func:`num_json`: JSON numbers stay floats, strings are exact."""
    if isinstance(value, float):
        return value
    return q(value)


def is_exact(*values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def cross(o, a, b):
    """z-component of (a - o) x (b - o)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def dist2(a, b):
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


def fsum_points(points: Iterable) -> list:
    return [tuple(float(c) for c in p) for p in points]
