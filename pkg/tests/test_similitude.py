import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from grigid.similitude import (IFS, InvalidWordError, RotationClass, Similitude, apply,
                               classify_rotation, compose, compose_word, fixed_point, make_ifs,
                               moran_dimension, normalize_angle, word_ratio)

ratios = st.floats(0.01, 0.99)
angles = st.floats(-20.0, 20.0)
coords = st.floats(-5.0, 5.0)
maps = st.builds(Similitude, ratios, angles, st.tuples(coords, coords))


def test_matrix_sign_convention():
    # rho(theta) has +sin in the top-right entry
    s = Similitude(0.5, math.pi / 2)
    assert np.array_equal(s.linear, 0.5 * np.array([[0.0, 1.0], [-1.0, 0.0]]))
    # a direction at angle phi goes to phi - theta
    v = apply(Similitude(0.5, 0.3), (math.cos(1.0), math.sin(1.0)))
    assert math.isclose(math.atan2(v[1], v[0]), 0.7, abs_tol=1e-12)


@pytest.mark.parametrize("r", [0.0, 1.0, -0.5, 1.2, math.nan])
def test_ratio_guard(r):
    with pytest.raises(ValueError):
        Similitude(r, 0.0)


def test_fixed_point_point_reflection():
    s = Similitude(0.5, math.pi, (0.75, 0.75))
    assert np.allclose(fixed_point(s), [0.5, 0.5], atol=1e-15)


def test_classify_rotation():
    assert classify_rotation(0.0) is RotationClass.IDENTITY
    assert classify_rotation(2 * math.pi) is RotationClass.IDENTITY
    assert classify_rotation(math.pi) is RotationClass.POINT_REFLECTION
    assert classify_rotation(-math.pi) is RotationClass.POINT_REFLECTION
    assert classify_rotation(math.pi / 3) is RotationClass.OTHER
    with pytest.raises(ValueError):
        classify_rotation(1.0, tol=0.0)


def test_moran_examples():
    assert abs(moran_dimension([1 / 3, 1 / 3]) - math.log(2) / math.log(3)) <= 1e-12
    assert abs(moran_dimension([0.5, 0.5]) - 1.0) <= 1e-12
    assert moran_dimension([0.5]) == 0.0
    with pytest.raises(ValueError):
        moran_dimension([])
    with pytest.raises(ValueError):
        moran_dimension([1.0])


@given(st.lists(ratios, min_size=2, max_size=6))
def test_moran_root(rs):
    s = moran_dimension(rs)
    assert s > 0
    assert math.isclose(math.fsum(r**s for r in rs), 1.0, rel_tol=0, abs_tol=1e-9)


@given(angles)
def test_normalize_angle_range(a):
    t = normalize_angle(a)
    assert 0.0 <= t < 2 * math.pi
    assert math.isclose(math.cos(t), math.cos(a), abs_tol=1e-9)


@given(maps, maps, st.tuples(coords, coords))
def test_compose_matches_sequential(a, b, p):
    assert np.allclose(compose(a, b)(p), a(b(p)), atol=1e-9)


@given(maps)
def test_fixed_point_is_fixed(s):
    p = fixed_point(s)
    assert np.allclose(s(p), p, atol=1e-9)


@settings(max_examples=50)
@given(st.lists(maps, min_size=1, max_size=3), st.data())
def test_compose_word_applies_first_letter_first(ms, data):
    ifs = IFS(tuple(ms))
    word = data.draw(st.lists(st.integers(1, ifs.k), min_size=1, max_size=6))
    p = np.array([0.3, -0.2])
    q = p
    for i in word:
        q = ifs.maps[i - 1](q)
    assert np.allclose(compose_word(ifs, word)(p), q, atol=1e-9)
    assert math.isclose(compose_word(ifs, word).ratio, word_ratio(ifs, word), rel_tol=1e-12)


def test_word_validation():
    ifs = make_ifs([(0.5, 0, (0, 0)), (0.5, 0, (0.5, 0))])
    with pytest.raises(InvalidWordError):
        compose_word(ifs, ())
    with pytest.raises(InvalidWordError):
        compose_word(ifs, (1, 3))


def test_derived_constants():
    ifs = make_ifs([(0.25, 0, (0, 0)), (0.5, math.pi, (1, 1))])
    assert (ifs.r_min, ifs.r_max, ifs.c) == (0.25, 0.5, 0.125)
    assert ifs.is_axis_aligned()
    assert not make_ifs([(0.5, 1.0, (0, 0))]).is_axis_aligned()


def test_axis_aligned_compose_is_exact():
    a = Similitude(0.5, math.pi, (1.0, 1.0))
    b = compose(a, a)
    assert b.angle == 0.0
    assert b.translation == (0.5, 0.5)
