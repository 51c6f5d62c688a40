import math
from fractions import Fraction

import pytest

from conftest import F
from dcsets.analyze import (
    components_report,
    d1_check,
    dc_graph_decomposition,
    isolated_points_report,
    nowhere_dense_image,
    path_between,
    singular_tangent_points,
)
from dcsets.errors import PreconditionError
from dcsets.planar import Rotation
from dcsets.plcalc import PLFunction
from dcsets.scenes import COMPONENT_SCENES, cantor_gaps, generate, square_presentation, sset3, tent, tent_sset
from dcsets.sets import DCGraphPiece, PlacedSSet, PlanarSetPresentation, segment_piece


def seg(a, b):
    return PlanarSetPresentation((segment_piece(a, b),))


# -- components ----------------------------------------------------------------


def test_two_segments_components():
    rep = components_report(generate("two-segments").presentation)
    assert rep.count == 2 and rep.discrete
    assert rep.min_separation() == 1


@pytest.mark.parametrize("name,expected", sorted(COMPONENT_SCENES.items()))
def test_component_verdicts(name, expected):
    rep = components_report(generate(name).presentation)
    assert rep.discrete is expected
    assert rep.verdict == ("discrete" if expected else "not D_2-compatible")


def test_accumulating_segments_found_without_declaration():
    rep = components_report(generate("parallel-segments").presentation)
    assert not rep.discrete and rep.accumulation is not None


def test_component_dot_output():
    dot = components_report(generate("two-segments").presentation).to_dot()
    assert dot.startswith("graph components {") and dot.rstrip().endswith("}")


# -- isolated points -----------------------------------------------------------


def test_isolated_integer_points_discrete():
    M = PlanarSetPresentation((), tuple((F(n), F(0)) for n in range(10)))
    rep = isolated_points_report(M)
    assert rep.discrete and len(rep.points) == 10


def test_isolated_accumulating_points():
    rep = isolated_points_report(generate("accumulating-points").presentation)
    assert not rep.discrete and rep.accumulation == (0, 0)


def test_undeclared_geometric_points_are_flagged():
    pts = ((F(0), F(0)),) + tuple((F(1, 3 ** n), F(0)) for n in range(12))
    rep = isolated_points_report(PlanarSetPresentation((), pts))
    assert not rep.discrete


def test_square_boundary_has_no_isolated_points():
    assert isolated_points_report(square_presentation(filled=False)).points == []
    assert isolated_points_report(generate("square-and-point").presentation).points == [(3, F(1, 2))]


# -- singular tangent points ---------------------------------------------------


def test_segment_endpoints_are_singular():
    rep = singular_tangent_points(seg((0, 0), (1, 2)))
    assert rep.points == [(0, 0), (1, 2)] and rep.discrete


def test_polygon_has_no_singular_points():
    assert singular_tangent_points(square_presentation(filled=False)).points == []
    assert singular_tangent_points(square_presentation()).points == []


@pytest.mark.parametrize("sset", [tent_sset(), sset3()], ids=["tent", "sset3"])
def test_sset_origin_is_singular_with_fan_right(sset):
    rep = singular_tangent_points(PlanarSetPresentation((PlacedSSet(sset),)), [(0, 0)])
    assert rep.points == [(0, 0)]
    assert rep.extra["fans"]["0,0"] == [[1.0, 0.0]]


# -- decomposition -------------------------------------------------------------


def test_tent_decomposes_into_envelopes():
    pieces = dc_graph_decomposition(PlanarSetPresentation((PlacedSSet(tent_sset()),)))
    assert len(pieces) == 2
    assert {p.profile for p in pieces} == set(tent_sset().envelopes)


def test_segment_decomposes_into_itself():
    s = segment_piece((0, 0), (1, 1))
    assert dc_graph_decomposition(PlanarSetPresentation((s,))) == [s]


def test_rotated_graphs_cover():
    rots = [Rotation.identity(), Rotation.from_triple(3, 4, 5), Rotation.from_triple(-5, 12, 13)]
    M = PlanarSetPresentation(tuple(DCGraphPiece(tent(), r, (F(i), F(0))) for i, r in enumerate(rots)))
    pieces = dc_graph_decomposition(M)
    assert len(pieces) == 3
    union = PlanarSetPresentation(tuple(pieces))
    for k in range(1000):
        t = F(k, 999)
        for piece in M.skeleton:
            assert union.on_skeleton(piece.place((t, tent()(t))))


def test_decomposition_rejects_fills():
    with pytest.raises(PreconditionError):
        dc_graph_decomposition(square_presentation())


# -- paths ---------------------------------------------------------------------


def test_path_on_one_segment():
    res = path_between(seg((0, 0), (1, 0)), (F(1, 4), 0), (F(3, 4), 0))
    assert res.ok and len(res.chain) == 1 and res.length == 0.5


def test_path_through_filled_square():
    res = path_between(square_presentation(), (0, 0), (1, 1))
    assert res.ok and len(res.chain) == 1
    assert res.length == pytest.approx(math.sqrt(2))


def test_path_on_tent_sset():
    M = PlanarSetPresentation((PlacedSSet(tent_sset()),))
    res = path_between(M, (0, 0), (1, 0))
    assert res.ok and len(res.chain) <= 3
    top = path_between(M, (F(1, 4), F(1, 8)), (1, 0))
    assert top.ok and len(top.chain) <= 3
    assert all(M.on_skeleton(p) for p in top.points)


def test_path_across_components_fails():
    res = path_between(generate("two-segments").presentation, (0, 0), (0, 1))
    assert not res.ok and "different components" in res.failure


def test_path_endpoint_must_be_in_m():
    with pytest.raises(PreconditionError):
        path_between(seg((0, 0), (1, 0)), (0, 0), (0, 1))


# -- one-dimensional checks ----------------------------------------------------


def test_d1_interval_and_point():
    rep = d1_check([(0, 1), 2])
    assert rep.locally_finite and rep.verdict == "D_1"


def test_d1_geometric_points():
    rep = d1_check([0] + [F(1, 3 ** n) for n in range(15)])
    assert not rep.locally_finite and rep.accumulation == 0


def test_d1_empty_set():
    assert d1_check([]).locally_finite


def test_d1_reversed_interval():
    with pytest.raises(PreconditionError):
        d1_check([(1, 0)])


def cantor_endpoint_gaps(depth):
    """Open gaps leaving only the endpoints of the depth-``depth`` Cantor intervals."""
    removed = cantor_gaps(depth)
    kept, cur = [], F(0)
    for a, b in removed:
        kept.append((cur, a))
        cur = b
    kept.append((cur, F(1)))
    return removed + [(a, b) for a, b in kept]


def test_affine_image_of_cantor_endpoints():
    g = PLFunction.affine(0, 1, 2)
    rep = nowhere_dense_image(g, cantor_endpoint_gaps(6))
    assert rep.nowhere_dense
    assert len(rep.image) == 2 ** 7
    assert all(a == b for a, b in rep.image)


def test_constant_image_is_a_point():
    rep = nowhere_dense_image(PLFunction.constant(0, 1, 5), cantor_endpoint_gaps(3))
    assert rep.nowhere_dense and rep.image == [(5, 5)]


def test_tent_image_of_two_points():
    rep = nowhere_dense_image(tent(), [(F(1, 4), F(1, 2))], F(1, 4), F(1, 2))
    assert rep.nowhere_dense and len(rep.image) <= 2


def test_broken_mapper_is_caught():
    rep = nowhere_dense_image(tent(), cantor_endpoint_gaps(2), mapper=lambda g, c, d: (g(c), g(c) + 1))
    assert not rep.nowhere_dense and rep.interior is not None


def test_p_with_interior_rejected():
    with pytest.raises(PreconditionError):
        nowhere_dense_image(tent(), cantor_gaps(2))
