import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import F
from dcsets.errors import PreconditionError
from dcsets.field import SegmentField, distance, line_profile, nearest_on_segment, semiconcavity_probe
from dcsets.planar import Rotation
from dcsets.scenes import generate, square_presentation, staircase_points, tent_sset
from dcsets.sets import DCGraphPiece, PlacedSSet, PlanarSetPresentation, Similarity, reshape, segment_piece
from dcsets.plcalc import PLFunction

UNIT = PlanarSetPresentation((segment_piece((0, 0), (1, 0)),))


def test_distance_examples():
    assert distance(UNIT, (2, 1)).value == pytest.approx(math.sqrt(2), abs=1e-15)
    assert distance(UNIT, (F(1, 2), F(7, 10))).value == pytest.approx(0.7, abs=1e-15)
    assert distance(UNIT, (F(1, 3), 0)).value == 0


def test_distance_exact_squared_and_projection():
    r = distance(UNIT, (2, 1))
    assert r.squared == 2 and r.projections == [(1, 0)]


def test_two_nearest_points():
    M = PlanarSetPresentation((), ((F(0), F(0)), (F(2), F(0))))
    r = distance(M, (1, 5))
    assert sorted(r.projections) == [(0, 0), (2, 0)]


def test_inside_fill_is_zero():
    assert distance(square_presentation(), (F(1, 3), F(1, 4))).value == 0
    assert distance(square_presentation(), (F(3, 2), F(1, 2))).value == pytest.approx(0.5)


def test_empty_set_rejected():
    with pytest.raises(PreconditionError):
        distance(PlanarSetPresentation(()), (0, 0))


@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), min_size=2, max_size=2))
def test_distance_is_one_lipschitz(pq):
    M = generate("tent-and-segment").presentation
    p, r = [(F(a, 10), F(b, 10)) for a, b in pq]
    assert abs(distance(M, p).value - distance(M, r).value) <= math.dist(p, r) + 1e-12


def test_nearest_on_segment_oracle():
    rng = random.Random(1)
    for _ in range(200):
        a, b, p = [(F(rng.randint(-9, 9)), F(rng.randint(-9, 9))) for _ in range(3)]
        c, d2 = nearest_on_segment(p, a, b)
        brute = min((p[0] - a[0] - k * (b[0] - a[0]) / 400) ** 2 + (p[1] - a[1] - k * (b[1] - a[1]) / 400) ** 2
                    for k in range(401))
        assert d2 <= brute and float(brute - d2) < 0.01 + 1e-12


def test_bulk_field_matches_exact():
    M = generate("tent-and-segment").presentation
    field = SegmentField.from_presentation(M)
    rng = np.random.default_rng(0)
    z = rng.uniform(-1, 2, size=(200, 2))
    bulk = field(z)
    for zi, v in zip(z, bulk):
        assert v == pytest.approx(distance(M, tuple(zi)).value, abs=1e-12)


def test_similarity_scales_distance():
    sim = Similarity(Rotation.from_triple(5, 12, 13), F(3), (F(2), F(1)))
    S = reshape(UNIT, "similarity", sim)
    for p in [(F(1, 2), F(1)), (F(-1), F(1, 3)), (F(2), F(-2))]:
        assert distance(S, sim.apply(p)).value == pytest.approx(3 * distance(UNIT, p).value)


def test_line_profile_horizontal_line_is_affine():
    prof = line_profile(UNIT, (0, 1), (1, 0), (-0.5, 0.5), 101)
    # d = sqrt(t^2 + 1) only on t < 0; d = 1 on t >= 0
    assert prof.K_hat < 1
    assert not prof.suspect
    flat = line_profile(UNIT, (0, 1), (1, 0), (0.1, 0.9), 101)
    assert flat.K_hat == pytest.approx(0, abs=1e-12)


def test_line_profile_of_accumulating_points_is_suspect():
    pts = ((F(0), F(0)),) + tuple(staircase_points(15))
    prof = line_profile(PlanarSetPresentation((), pts), (0, 0), (1, 0), (0, 1), 201, levels=6)
    assert prof.suspect
    assert prof.refinement == sorted(prof.refinement)


def test_line_profile_of_abs_is_bounded():
    M = PlanarSetPresentation((DCGraphPiece(PLFunction.from_points([(-1, 1), (0, 0), (1, 1)])),))
    prof = line_profile(M, (-1, F(1, 2)), (1, 0), (0, 2), 101)
    assert not prof.suspect
    # slopes -+1/sqrt2 alternate at x = -1/2, 0, 1/2
    for k in prof.refinement:
        assert k == pytest.approx(3 * math.sqrt(2), abs=1e-9)


def test_line_profile_csv_columns():
    prof = line_profile(UNIT, (0, 1), (1, 0), (0, 1), 5, levels=0)
    lines = prof.to_csv().splitlines()
    assert lines[0] == "t,d,dq,K_hat" and len(lines) == 6


def test_line_profile_preconditions():
    with pytest.raises(PreconditionError):
        line_profile(UNIT, (0, 1), (0, 0), (0, 1), 10)
    with pytest.raises(PreconditionError):
        line_profile(UNIT, (0, 1), (1, 0), (1, 0), 10)
    with pytest.raises(PreconditionError):
        line_profile(UNIT, (0, 1), (1, 0), (0, 1), 2)


@pytest.mark.parametrize("probes", [[(1, 1), (-2, F(1, 3))], [(F(1, 2), F(1, 2))]])
def test_semiconcavity_point(probes):
    M = PlanarSetPresentation((), ((F(0), F(0)),))
    assert semiconcavity_probe(M, probes).passes


def test_semiconcavity_segment_and_bisector():
    assert semiconcavity_probe(UNIT, [(F(1, 2), 1), (2, 2), (-1, F(-1, 2))]).passes
    two = PlanarSetPresentation((), ((F(-1), F(0)), (F(1), F(0))))
    rep = semiconcavity_probe(two, [(0, 1), (0, F(1, 3))])
    assert rep.passes
    # on the bisector the second difference across it is strongly negative
    worst = min(d["estimate"] for d in rep.results[0]["directions"])
    assert worst < -0.5


def test_semiconcavity_skips_points_on_set():
    rep = semiconcavity_probe(UNIT, [(F(1, 2), 0), (0, 1)])
    assert len(rep.skipped) == 1 and len(rep.results) == 1


def test_semiconcavity_tent_sset():
    M = PlanarSetPresentation((PlacedSSet(tent_sset()),))
    assert semiconcavity_probe(M, [(F(1, 4), F(1, 2)), (F(1, 2), F(-1, 4)), (-1, 0)]).passes
