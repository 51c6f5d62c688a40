import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import F
from dcsets.errors import PreconditionError
from dcsets.planar import Cone, Rotation, tangent_fan
from dcsets.plcalc import PLFunction
from dcsets.scenes import sset3, tent_sset
from dcsets.sets import DCGraphPiece, PlacedSSet, PlanarSetPresentation, SSetPresentation, segment_piece, validate_sset

coords = st.fractions(-3, 3, max_denominator=16)
points = st.tuples(coords, coords)


def pres_of(*pieces, isolated=()):
    return PlanarSetPresentation(tuple(pieces), tuple(isolated))


def test_abs_corner_fan():
    M = pres_of(DCGraphPiece(PLFunction((-1, 0, 1), (1, 0, 1))))
    fan = tangent_fan(M, (0, 0))
    s = 1 / math.sqrt(2)
    assert len(fan) == 2
    assert sorted(fan.directions) == sorted([(s, s), (-s, s)])


def test_segment_interior_fan_is_two_opposite_directions():
    M = pres_of(segment_piece((0, 0), (2, 1)))
    fan = tangent_fan(M, (1, F(1, 2)))
    (a, b), (c, d) = fan.directions
    assert len(fan) == 2
    assert a == pytest.approx(-c) and b == pytest.approx(-d)


def test_segment_endpoint_fan_is_single_direction():
    M = pres_of(segment_piece((0, 0), (3, 4)))
    fan = tangent_fan(M, (0, 0))
    assert fan.directions == ((0.6, 0.8),)


def test_isolated_point_fan_is_empty():
    M = pres_of(isolated=[(1, 1)])
    assert len(tangent_fan(M, (1, 1))) == 0


def test_fan_outside_set_raises():
    with pytest.raises(PreconditionError):
        tangent_fan(pres_of(segment_piece((0, 0), (1, 0))), (0, 1))


@pytest.mark.parametrize("sset", [tent_sset(), sset3()])
def test_validated_sset_origin_fan(sset):
    assert validate_sset(sset).valid
    fan = tangent_fan(pres_of(PlacedSSet(sset)), (0, 0))
    assert fan.directions == ((1.0, 0.0),)


def test_sset_with_rising_selection_has_two_directions():
    steep = PLFunction((0, F(1, 2), 1), (0, F(1, 2), F(1, 2)))
    flat = PLFunction.constant(0, 1, 0)
    bad = SSetPresentation(1, (flat, steep), (flat, steep))
    assert not validate_sset(bad).clauses["gate"]
    assert len(tangent_fan(pres_of(PlacedSSet(bad)), (0, 0))) == 2


@given(points, st.fractions(F(1, 8), 4, max_denominator=8), st.fractions(F(1, 8), 4, max_denominator=8),
       st.sampled_from(["forward", "backward", "symmetric"]), st.fractions(0, 2, max_denominator=8))
def test_cone_membership_is_monotone(p, u, r, shape, extra):
    small = Cone((0, 0), u, r, shape)
    big = Cone((0, 0), u + extra, r + extra, shape)
    if small.contains(p):
        assert big.contains(p)
        assert Cone((0, 0), u, None, shape).contains(p)


def test_cone_shapes():
    fwd = Cone((0, 0), 1, 1, "forward")
    assert fwd.contains((F(1, 2), F(1, 2))) and not fwd.contains((F(-1, 2), 0))
    assert Cone((0, 0), 1, 1, "backward").contains((F(-1, 2), F(1, 4)))
    sym = Cone((0, 0), 1, 1, "symmetric")
    assert sym.contains((F(-1, 2), F(1, 4))) and sym.contains((F(1, 2), F(-1, 4)))
    assert not sym.contains((0, F(1, 4)))


def test_rotated_cone_membership():
    fwd = Cone((1, 1), F(1, 2), 2, "forward", Rotation(0, 1))
    assert fwd.contains((1, 2)) and not fwd.contains((2, 1))


@given(points, st.sampled_from([(3, 4, 5), (5, 12, 13), (8, 15, 17), (-7, 24, 25)]))
def test_exact_rotation_round_trip(p, triple):
    R = Rotation.from_triple(*triple)
    assert R.inverse().apply(R.apply(p)) == p


@given(points, st.floats(-3, 3))
def test_float_rotation_round_trip(p, theta):
    R = Rotation.from_angle(theta)
    x, y = R.inverse().apply(R.apply(p))
    assert abs(x - float(p[0])) <= 1e-12 * 8 and abs(y - float(p[1])) <= 1e-12 * 8


def test_rotation_rejects_non_unit():
    with pytest.raises(ValueError):
        Rotation(F(1, 2), F(1, 2))


def test_cone_json_round_trip():
    c = Cone((1, F(1, 3)), F(3, 2), 2, "symmetric", Rotation.from_triple(3, 4, 5))
    assert Cone.from_json(c.to_json()) == c
