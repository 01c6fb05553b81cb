import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from grigid.affine import converse_ifs
from grigid.attractor import (EmptyPointSetError, PointSet, attractor_ball, chaos_game,
                              directed_hausdorff, hausdorff_brute_force, hausdorff_distance,
                              hutchinson_step, iterate_attractor)
from grigid.similitude import make_ifs

cantor = make_ifs([(1 / 3, 0, (0, 0)), (1 / 3, 0, (2 / 3, 0))])
clouds = arrays(np.float64, st.tuples(st.integers(1, 60), st.just(2)),
                elements=st.floats(-3, 3, allow_nan=False))


def test_empty_inputs_rejected():
    empty = PointSet(np.zeros((0, 2)))
    with pytest.raises(EmptyPointSetError):
        hausdorff_distance(empty, [[0.0, 0.0]])
    with pytest.raises(EmptyPointSetError):
        hutchinson_step(cantor, empty)


def test_hutchinson_step_count_and_order():
    ps = PointSet([[0.0, 0.0], [1.0, 0.0]])
    out = hutchinson_step(cantor, ps)
    assert len(out) == 4
    assert np.allclose(out.points[:, 0], [0, 1 / 3, 2 / 3, 1])


def test_iterate_cantor_endpoints():
    res = iterate_attractor(cantor, [[0.0, 0.0], [1.0, 0.0]], depth=5)
    assert res.mode == "deterministic"
    xs = np.sort(res.points.points[:, 0])
    assert len(xs) == 64
    # every point is a triadic endpoint: 3^5 x is an integer
    assert np.allclose(np.round(xs * 243), xs * 243, atol=1e-9)


def test_budget_switches_to_chaos():
    res = iterate_attractor(cantor, [[0.0, 0.0]], depth=30, point_budget=1000, rng_seed=3)
    assert res.mode == "chaos"
    assert res.switch_depth is not None
    again = iterate_attractor(cantor, [[0.0, 0.0]], depth=30, point_budget=1000, rng_seed=3)
    assert np.array_equal(res.points.points, again.points.points)


def test_chaos_game_lies_near_attractor():
    ifs = converse_ifs(1.0, 0.0)
    pts = chaos_game(ifs, 2000, rng_seed=1).points
    assert np.all(np.abs(pts[:, 0] - pts[:, 1]) < 1e-12)
    assert pts[:, 0].min() >= -1e-12 and pts[:, 0].max() <= 1 + 1e-12


def test_attractor_ball_contains_iterates():
    c, R = attractor_ball(cantor)
    res = iterate_attractor(cantor, [c], depth=8)
    assert np.all(np.hypot(*(res.points.points - c).T) <= R + 1e-12)


def test_hausdorff_simple():
    a = PointSet([[0.0, 0.0]])
    b = PointSet([[3.0, 4.0], [0.0, 1.0]])
    assert directed_hausdorff(a, b) == 1.0
    assert directed_hausdorff(b, a) == 5.0
    assert hausdorff_distance(a, b) == 5.0


@settings(max_examples=60)
@given(clouds, clouds)
def test_hausdorff_matches_brute_force(a, b):
    assert hausdorff_distance(a, b) == hausdorff_brute_force(a, b)
    assert hausdorff_distance(a, b) == hausdorff_distance(b, a)


@settings(max_examples=40)
@given(clouds, clouds, clouds)
def test_hausdorff_triangle(a, b, c):
    assert hausdorff_distance(a, c) <= hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-12


def test_hausdorff_ties_on_lattice():
    # many equidistant candidates: the exact recomputation must not miss the max
    g = np.array([[i, j] for i in range(20) for j in range(20)], dtype=float)
    h = g + 0.5
    assert hausdorff_distance(g, h) == hausdorff_brute_force(g, h) == math.sqrt(0.5)


def test_csv_round_trip():
    rng = np.random.default_rng(0)
    ps = PointSet(rng.normal(size=(50, 2)))
    assert np.array_equal(PointSet.from_csv(ps.to_csv()).points, ps.points)


def test_hutchinson_contraction():
    ifs = converse_ifs(2.0, -1.0)
    a = PointSet(np.random.default_rng(4).uniform(0, 1, size=(80, 2)))
    b = PointSet(np.random.default_rng(5).uniform(0, 1, size=(60, 2)))
    d0 = hausdorff_distance(a, b)
    d1 = hausdorff_distance(hutchinson_step(ifs, a), hutchinson_step(ifs, b))
    assert d1 <= ifs.r_max * d0 + 1e-12
