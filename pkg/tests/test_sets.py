import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import F, pl_functions
from dcsets.analyze import path_between
from dcsets.errors import PreconditionError
from dcsets.field import distance
from dcsets.planar import Rotation
from dcsets.plcalc import PLFunction, convexity
from dcsets.scenes import cantor_scene, generate, square_presentation, sset3, tent, tent_sset
from dcsets.sets import (
    DCGraphPiece,
    DCMap,
    PlacedSSet,
    PlanarSetPresentation,
    Shear,
    Similarity,
    SSetPresentation,
    assemble_and_check,
    image_under_dc_map,
    reshape,
    same_realized_set,
    segment_piece,
    validate_sset,
)

ZERO = PLFunction.constant(0, 1, 0)


# -- validate_sset -------------------------------------------------------------


def test_tent_sset_is_valid_with_k_one():
    rep = validate_sset(tent_sset())
    assert rep.valid
    assert rep.lipschitz == 1
    assert "finite selection family" in rep.note


def test_gate_failure():
    bad = PLFunction((0, F(1, 4), 1), (0, F(1, 16), 0))
    rep = validate_sset(SSetPresentation(1, (ZERO, bad), (ZERO, bad)))
    assert not rep.valid and not rep.clauses["gate"]


def test_switching_selection_is_valid():
    switch = PLFunction((0, F(1, 8), F(1, 4), F(3, 8), 1), (0, 0, F(1, 8), 0, 0))
    early = PLFunction((0, F(1, 8), F(1, 4), F(3, 8), F(1, 2), 1), (0, 0, F(1, 8), 0, 0, 0))
    rep = validate_sset(SSetPresentation(1, (ZERO, tent()), (ZERO, switch, early)))
    assert rep.valid


def test_selection_off_the_envelopes_is_invalid():
    stray = PLFunction((0, F(1, 2), 1), (0, F(1, 16), 0))
    rep = validate_sset(SSetPresentation(1, (ZERO, tent()), (ZERO, stray)))
    assert not rep.clauses["membership"]


def test_jump_between_envelopes_is_caught_at_midpoints():
    # agrees with an envelope at every breakpoint but cuts across in between
    cut = PLFunction((0, F(1, 8), F(3, 8), 1), (0, 0, 0, 0))
    hi = PLFunction((0, F(1, 8), F(1, 4), F(3, 8), 1), (0, 0, F(1, 8), 0, 0))
    assert validate_sset(SSetPresentation(1, (hi,), (hi, cut))).clauses["membership"] is False


@pytest.mark.parametrize("sset", [tent_sset(), sset3()])
def test_valid_ssets_basic_facts(sset):
    rep = validate_sset(sset)
    assert rep.valid
    for h in sset.selections:
        assert convexity(h, 0, sset.r) < 10**6
        assert h.lipschitz() <= rep.lipschitz
    M = PlanarSetPresentation((PlacedSSet(sset),))
    end = next((sset.r, h(sset.r)) for h in sset.selections)
    assert M.contains((0, 0)) and M.contains(end)
    assert path_between(M, (0, 0), end).ok


# -- reshape -------------------------------------------------------------------


def test_truncate_tent():
    t = reshape(tent_sset(), "truncate", F(1, 4))
    assert t.r == F(1, 4)
    assert all(f.domain == (0, F(1, 4)) for f in t.envelopes)
    assert validate_sset(t).valid


@pytest.mark.parametrize("rho", [0, 1, 2, F(-1, 2)])
def test_truncate_out_of_range(rho):
    with pytest.raises(PreconditionError):
        reshape(tent_sset(), "truncate", rho)


def test_identity_similarity():
    M = generate("tent-and-segment").presentation
    assert reshape(M, "similarity", Similarity()) == M


def test_scaling_scales_distance():
    M = generate("tent-and-segment").presentation
    sim = Similarity(Rotation.from_triple(3, 4, 5), F(2), (F(1), F(-1, 3)))
    S = reshape(M, "similarity", sim)
    rng = random.Random(3)
    for _ in range(100):
        p = (F(rng.randrange(-200, 300), 100), F(rng.randrange(-200, 300), 100))
        assert distance(S, sim.apply(p)).value == pytest.approx(2 * distance(M, p).value, rel=1e-12, abs=1e-12)


# -- assemble_and_check --------------------------------------------------------


def test_square_fill():
    M = square_presentation()
    rep = assemble_and_check(M)
    assert rep.passes and len(rep.boundary_edges) == 4 and not rep.interior_edges
    assert M.contains((F(1, 3), F(2, 3))) and not M.contains((2, 2))


def inside_square(p):
    return 0 < p[0] < 1 and 0 < p[1] < 1


def ray_cast(p, polygon):
    """Even-odd point-in-polygon oracle."""
    inside = False
    for (x0, y0), (x1, y1) in zip(polygon, polygon[1:] + polygon[:1]):
        if (y0 > p[1]) != (y1 > p[1]):
            x = x0 + (p[1] - y0) * (x1 - x0) / (y1 - y0)
            if p[0] < x:
                inside = not inside
    return inside


def test_unbounded_seed_matches_ray_casting():
    sq = square_presentation(filled=False)
    M = PlanarSetPresentation(sq.skeleton, (), ((F(5), F(5)),))
    assert assemble_and_check(M).passes
    poly = [(F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1))]
    rng = random.Random(5)
    for _ in range(300):
        p = (F(rng.randrange(-300, 400), 200), F(rng.randrange(-300, 400), 200))
        if M.on_skeleton(p):
            continue
        assert M.contains(p) == (not ray_cast(p, poly))


def test_two_segments_unbounded_seed():
    M = PlanarSetPresentation((segment_piece((0, 0), (1, 0)), segment_piece((0, 1), (1, 1))), (), ((F(5), F(5)),))
    rep = assemble_and_check(M)
    assert rep.passes
    assert not rep.boundary_edges
    assert M.contains((F(1, 2), F(1, 2))) and M.contains((-7, 3))


def test_fill_seed_on_skeleton_rejected():
    sq = square_presentation(filled=False)
    with pytest.raises(PreconditionError):
        assemble_and_check(PlanarSetPresentation(sq.skeleton, (), ((F(1, 2), F(0)),)))


@pytest.mark.parametrize("depth", [1, 2, 3, 4])
def test_cantor_boundary_in_skeleton(depth):
    rep = assemble_and_check(cantor_scene(depth).presentation)
    assert rep.passes and rep.boundary_in_skeleton
    assert len(rep.boundary_projection()) == 2 ** depth


# -- DC-map images -------------------------------------------------------------


def test_identity_map():
    M = generate("sset3").presentation
    assert image_under_dc_map(M, DCMap(())) == M


def test_shear_identity_profile():
    M = PlanarSetPresentation((DCGraphPiece(ZERO),))
    img = image_under_dc_map(M, DCMap((Shear(PLFunction.affine(0, 1, 1)),)))
    (piece,) = img.skeleton
    assert piece.profile == PLFunction.affine(0, 1, 1)


def test_tent_shear_of_tent_sset():
    M = generate("tent-sset").presentation
    shear = Shear(tent())
    img = image_under_dc_map(M, DCMap((shear,)))
    (piece,) = img.skeleton
    assert isinstance(piece, PlacedSSet)
    assert validate_sset(piece.sset).valid
    for k in range(1000):
        t = F(k, 999)
        for h in tent_sset().selections:
            assert img.on_skeleton(shear.apply((t, h(t))))
        for h in piece.sset.selections:
            back = shear.inverse().apply((t, h(t)))
            assert M.on_skeleton(back)
    assert same_realized_set(image_under_dc_map(img, DCMap((shear.inverse(),))), M)


def test_non_bilipschitz_rejected():
    with pytest.raises((PreconditionError, ValueError)):
        image_under_dc_map(square_presentation(), DCMap((Similarity(scale=F(0)),)))


@given(pl_functions(0, 1, 1, 5), pl_functions(0, 1, 1, 4), st.sampled_from(["vertical", "horizontal"]))
def test_shear_inverse_reproduces_set(h, w, axis):
    M = PlanarSetPresentation((DCGraphPiece(h),), ((F(1, 2), F(7)),))
    if axis == "horizontal":
        w = w.extend_constant(-10, 10)
    else:
        w = w.extend_constant(-1, 2)
    m = DCMap((Shear(w, axis), Similarity(Rotation.from_triple(3, 4, 5), F(1, 2), (F(1), F(0)))))
    back = image_under_dc_map(image_under_dc_map(M, m), m.inverse())
    assert same_realized_set(back, M)


# -- serialization -------------------------------------------------------------


@pytest.mark.parametrize("name", ["tent-sset", "sset3", "square-and-point", "staircase-isolated", "cantor-d2"])
def test_presentation_json_round_trip(name):
    M = generate(name).presentation
    back = PlanarSetPresentation.from_json(M.to_json(), M.window, M.accumulations)
    assert back == M
