"""Acceptance suite: one group of tests per criterion, summarized as PASS/FAIL lines."""

import io
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import F
from dcsets.analyze import components_report, isolated_points_report
from dcsets.certify import (
    alpha_lower_bound,
    build_psi,
    cone_potential,
    convexity_blowup,
    detect_non_dc,
    grid_approx,
    verify_local_concavity,
)
from dcsets.cli import run
from dcsets.planar import tangent_fan
from dcsets.plcalc import (
    PLFunction,
    control_gap_check,
    control_gap_check_grid,
    convexity,
    grid_denominator,
    mix_control,
    partition_convexity,
    pl_combine,
    sequence_to_function,
)
from dcsets.scenes import COMPONENT_SCENES, EXAMPLES, cantor_scene, corner, generate, sset3, tent, tent_sset
from dcsets.sets import (
    DCMap,
    PlacedSSet,
    PlanarSetPresentation,
    Shear,
    SSetPresentation,
    assemble_and_check,
    image_under_dc_map,
    reshape,
    same_realized_set,
    validate_sset,
)

N_SWEEP = (8, 16, 32, 64)


def criterion(number, title):
    return pytest.mark.criterion(number, title)


# -- 1. convexity oracle -------------------------------------------------------


def random_pl(rng):
    m = rng.randrange(2, 12)
    xs = sorted({F(0), F(1), *(F(rng.randrange(1, 240), 240) for _ in range(m - 1))})
    return PLFunction(tuple(xs), tuple(F(rng.randrange(-60, 61), rng.randrange(1, 13)) for _ in xs))


@criterion(1, "PL convexity equals the breakpoint partition and dominates 10^4 random partitions (200 functions, < 5 s)")
def test_c1_convexity_oracle():
    rng = random.Random(1)
    nrng = np.random.default_rng(1)
    start = time.perf_counter()
    for _ in range(200):
        f = random_pl(rng)
        a = F(rng.randrange(0, 120), 240)
        b = F(rng.randrange(121, 241), 240)
        K = convexity(f, a, b)
        inner = [x for x in f.breakpoints if a < x < b]
        assert K == partition_convexity(f, [a, *inner, b])
        # 10^4 random partitions of [a, b], evaluated in floats
        xs = np.array([float(x) for x in f.breakpoints])
        ys = np.array([float(y) for y in f.values])
        for size in range(3, 13):
            cuts = nrng.uniform(float(a), float(b), size=(1000, size - 2))
            D = np.sort(np.concatenate([np.full((1000, 1), float(a)), cuts, np.full((1000, 1), float(b))], axis=1), axis=1)
            vals = np.interp(D, xs, ys)
            dx = np.diff(D, axis=1)
            keep = (dx > 1e-12).all(axis=1)
            dq = np.diff(vals[keep], axis=1) / dx[keep]
            est = np.abs(np.diff(dq, axis=1)).sum(axis=1)
            # float evaluation error of the difference quotients
            rounding = 16 * np.finfo(float).eps * np.abs(ys).max() * (1 / dx[keep]).sum(axis=1)
            assert (est <= float(K) + rounding + 1e-12 * (1 + float(K))).all()
    assert time.perf_counter() - start < 5


# -- 2. control-function contract ----------------------------------------------


def random_envelope(rng):
    xs = sorted({F(0), F(1), *(F(rng.randrange(1, 24), 24) for _ in range(rng.randrange(0, 4)))})
    return PLFunction(tuple(xs), tuple(F(rng.randrange(-12, 13), 6) for _ in xs))


def switching(envs, rng):
    """Random continuous selection: it may change envelope only where they agree."""
    xs = set()
    for f in envs:
        xs.update(f.breakpoints)
    for i, f in enumerate(envs):
        for g in envs[i + 1:]:
            xs.update(pl_combine("abs", pl_combine("sub", f, g)).breakpoints)
    xs = sorted(xs)
    cur = rng.randrange(len(envs))
    pts = [(xs[0], envs[cur](xs[0]))]
    for x0, x1 in zip(xs, xs[1:]):
        cur = rng.choice([j for j, f in enumerate(envs) if f(x0) == envs[cur](x0)])
        pts.append((x1, envs[cur](x1)))
    return PLFunction.from_points(pts)


@criterion(2, "mix_control passes control_gap_check on 50 families x 100 switchings x 10^3 (z, h, k), exact")
def test_c2_control_contract():
    rng = random.Random(2)
    failures = 0
    for _ in range(50):
        envs = [random_envelope(rng) for _ in range(rng.randrange(1, 5))]
        phi = mix_control(envs)
        for s in range(100):
            sel = switching(envs, rng)
            N = grid_denominator(sel, phi) * 997
            triples = []
            for _ in range(1000):
                jz = rng.randrange(1, N)
                triples.append((jz, rng.randrange(1, jz + 1), rng.randrange(1, N - jz + 1)))
            failures += control_gap_check_grid(sel, phi, N, triples).count(False)
            if s < 2:
                # the batched check agrees with the single-triple check
                for jz, jh, jk in triples[:25]:
                    assert control_gap_check(sel, phi, F(jz, N), F(jh, N), F(jk, N))
    assert failures == 0


# -- 3. sequence constructor ---------------------------------------------------


@criterion(3, "sequence constructor: derivative variation <= the summed bound for N = 12, exact")
def test_c3_sequence_bound():
    N = 12
    a = [F(1, 3 ** n) for n in range(N + 1)]
    A = [F(1, 4 ** n) for n in range(N + 1)]
    s = sequence_to_function(a, A, N)
    g = s.function
    # variation of the derivative over (a_{N+1}, a_1), read off the PL function itself
    inner = [x for x in g.breakpoints if a[N] < x < a[0]]
    idx = [g.breakpoints.index(x) for x in inner]
    slopes = g.slopes
    variation = sum((abs(slopes[i] - slopes[i - 1]) for i in idx), Fraction(0))
    bound = sum((abs(A[n]) / (F(2, 3) * a[n]) + abs(A[n + 1]) / (2 * a[n + 1]) for n in range(N)), Fraction(0))
    assert variation == s.derivative_variation
    assert bound == s.proof_bound
    assert variation <= bound
    assert all(g(a[n]) == A[n] for n in range(N + 1))


# -- 4. positive certification -------------------------------------------------

_c4_elapsed = []


@criterion(4, "tent and 3-envelope (s)-sets at n = 8..64: budget <= C, Lipschitz <= D, 200 balls pass; ablation fails; < 60 s")
@pytest.mark.parametrize("name,sset", [("tent", tent_sset()), ("sset3", sset3())])
def test_c4_certification(name, sset):
    start = time.perf_counter()
    for n in N_SWEEP:
        psi = build_psi(sset, n)
        assert Fraction(psi.budget["total"]) <= psi.C
        clamped = build_psi(sset, n, "clamped")
        assert clamped.lipschitz_sample(200, seed=0) <= psi.D + 1e-8
        rep = verify_local_concavity(None, psi, n_balls=200, seed=0, tol=1e-9)
        assert len(rep.balls) == 200 and rep.passes, (n, rep.failures)
    _c4_elapsed.append(time.perf_counter() - start)


@criterion(4, "tent and 3-envelope (s)-sets at n = 8..64: budget <= C, Lipschitz <= D, 200 balls pass; ablation fails; < 60 s")
def test_c4_ablation_and_runtime():
    start = time.perf_counter()
    psi = build_psi([corner()], 8)
    balls = [((0.6, -0.4), 0.05), ((0.55, -0.3), 0.03), ((0.7, -0.8), 0.1)]
    assert verify_local_concavity(None, psi, balls).passes
    assert not verify_local_concavity(None, psi.without_potentials(), balls).passes
    assert sum(_c4_elapsed) + time.perf_counter() - start < 60


# -- 5. angle identity ---------------------------------------------------------


@criterion(5, "corner node angle = pi/4 to 1e-12; clamped Lipschitz <= tan(pi/8) + 1e-8")
def test_c5_angle_identity():
    (node,) = [s for s in grid_approx([corner()], 2).nodes if s.node == (F(1, 2), 0)]
    assert (node.s_minus_min, node.s_plus_max) == (0, 1)
    p = cone_potential(node, 1, "clamped")
    assert abs(p.angle - math.pi / 4) <= 1e-12
    rng = np.random.default_rng(5)
    x = rng.uniform(-2, 3, size=(2000, 2))
    y = rng.uniform(-2, 3, size=(2000, 2))
    ratio = float((np.abs(p(x) - p(y)) / np.hypot(*(x - y).T)).max())
    assert ratio <= math.tan(math.pi / 8) + 1e-8
    assert math.tan(math.pi / 8) + 1e-8 <= math.sqrt(2) * math.tan(math.pi / 8)


# -- 6. falsification ----------------------------------------------------------


def brute_alpha(u, count=10 ** 6):
    """Least distance from a probe at offset 1/2 inside the 2u-cone to the boundary of the 3u-cone of length 1."""
    y = np.linspace(-u, u, count)
    px = np.full(count, 0.5)
    best = np.hypot(px, y)  # the apex
    for a, b in [((0, 0), (1, 3 * u)), ((0, 0), (1, -3 * u)), ((1, -3 * u), (1, 3 * u))]:
        a, b = np.array(a, float), np.array(b, float)
        d = b - a
        t = np.clip(((px - a[0]) * d[0] + (y - a[1]) * d[1]) / (d @ d), 0, 1)
        best = np.minimum(best, np.hypot(px - a[0] - t * d[0], y - a[1] - t * d[1]))
    return float(best.min())


@criterion(6, "staircase: >= 5 exact witnesses, blow-up strictly increasing by >= alpha(1) - 1e-6, alpha matches brute force")
def test_c6_falsification():
    M = generate("staircase-isolated").presentation
    w = detect_non_dc(M, (0, 0), 1)
    assert w is not None and len(w.witnesses) >= 5
    rows = convexity_blowup(M, w, range(3, 9))
    alpha = alpha_lower_bound(1)
    assert alpha == pytest.approx(1 / (2 * math.sqrt(10)), abs=1e-15)
    for prev, row in zip(rows, rows[1:]):
        assert row.K_hat > prev.K_hat
        assert row.increment >= alpha - 1e-6
    for u in (F(1, 2), 1, 2):
        assert abs(alpha_lower_bound(u) - brute_alpha(float(u))) <= 1e-6


# -- 7. structure verdicts -----------------------------------------------------


def random_valid_ssets(count, seed=7):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        envs = []
        for _ in range(rng.randrange(1, 4)):
            flat = F(rng.randrange(1, 8), 16)
            xs = sorted({F(0), flat, F(1), *(F(rng.randrange(9, 32), 32) for _ in range(2))})
            ys = [F(0) if x <= flat else F(rng.randrange(-4, 5), 32) for x in xs]
            envs.append(PLFunction(tuple(xs), tuple(ys)))
        s = SSetPresentation(1, tuple(envs), tuple(envs))
        if validate_sset(s).valid:
            out.append(s)
    return out


@criterion(7, "component verdicts on 6 curated scenes, accumulating points flagged, (s)-set origin fans = {(1,0)}")
def test_c7_structure():
    assert sum(COMPONENT_SCENES.values()) == 3 and len(COMPONENT_SCENES) == 6
    for name, expected in COMPONENT_SCENES.items():
        assert components_report(generate(name).presentation).discrete is expected, name
    assert not isolated_points_report(generate("accumulating-points").presentation).discrete
    ssets = [tent_sset(), sset3(), reshape(sset3(), "truncate", F(1, 2))] + random_valid_ssets(12)
    for s in ssets:
        assert validate_sset(s).valid
        fan = tangent_fan(PlanarSetPresentation((PlacedSSet(s),)), (0, 0))
        assert fan.directions == ((1.0, 0.0),)


# -- 8. Cantor example ---------------------------------------------------------


@criterion(8, "Cantor example d = 3..6: 2^d boundary-projection components, boundary in the skeleton, < 10 s")
def test_c8_cantor():
    start = time.perf_counter()
    for d in range(3, 7):
        rep = assemble_and_check(cantor_scene(d).presentation)
        assert rep.passes and rep.boundary_in_skeleton
        assert len(rep.boundary_projection()) == 2 ** d
    assert time.perf_counter() - start < 10


# -- 9. image stability --------------------------------------------------------


@criterion(9, "a PL shear and its inverse reproduce 10 scenes; the sheared tent passes the n = 16 concavity check")
def test_c9_image_stability():
    names = [n for n in sorted(EXAMPLES) if generate(n).window is None][:10]
    assert len(names) == 10
    shear = Shear(tent().extend_constant(-4, 5))
    m = DCMap((shear,))
    for name in names:
        M = generate(name).presentation
        back = image_under_dc_map(image_under_dc_map(M, m), m.inverse())
        assert same_realized_set(back, M), name
    img = image_under_dc_map(PlanarSetPresentation((PlacedSSet(tent_sset()),)), DCMap((Shear(tent()),)))
    (piece,) = img.skeleton
    assert validate_sset(piece.sset).valid
    psi = build_psi(img, 16)
    rep = verify_local_concavity(None, psi, n_balls=200, seed=0, tol=1e-9)
    assert rep.passes and len(rep.balls) == 200


# -- 10. determinism -----------------------------------------------------------


@criterion(10, "repeated runs with a fixed seed are byte-identical")
def test_c10_determinism():
    def outputs():
        got = []
        for argv in (["certify", "sset3", "--n-sweep", "8,16", "--seed", "3"],
                     ["certify", "tent-sset", "--n-sweep", "8", "--mode", "clamped", "--format", "csv"],
                     ["falsify", "staircase-isolated"],
                     ["analyze", "cantor-d4"],
                     ["render", "tent-sset", "--n-sweep", "8"],
                     ["gen-example", "cantor-d3"]):
            out = io.StringIO()
            code = run(argv, out, io.StringIO())
            got.append((code, out.getvalue()))
        return got

    first, second = outputs(), outputs()
    assert first == second
    assert all(text for _, text in first)
