import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from grigid.affine import (CantorStage, NoContainingWordError, cantor_refine, certify_affine,
                           chord_slope, converse_ifs, find_slope_subinterval,
                           slope_invariance_check)
from grigid.cover import NotAxisAlignedError, certify_lipschitz
from grigid.fitting import self_similarity_residual
from grigid.graph import UNIT, Affine, Interval, Takagi, sample
from grigid.similitude import Similitude, make_ifs
from oracles import slope_witness_exhaustive

line_ifs = [
    converse_ifs(1.0, 0.0),
    converse_ifs(-2.0, 1.0),
    make_ifs([(1 / 3, 0, (0, 0)), (2 / 3, 0, (1 / 3, 1 / 3))]),  # graph of y = x, unequal ratios
    make_ifs([(0.5, math.pi, (0.5, 0.5)), (0.5, math.pi, (1.0, 1.0))]),  # y = x, reflections
]


@pytest.mark.parametrize("a", [-2, -1, 0, 1, 2])
@pytest.mark.parametrize("b", [-2, -1, 0, 1, 2])
def test_converse_residual(a, b):
    g = sample(Affine(a, b), 2048)
    assert self_similarity_residual(converse_ifs(a, b), g) <= 2 / 2048


def test_converse_maps():
    ifs = converse_ifs(1.0, 0.0)
    assert [m.ratio for m in ifs.maps] == [0.5, 0.5]
    assert [m.angle for m in ifs.maps] == [0.0, 0.0]
    assert [m.translation for m in ifs.maps] == [(0.0, 0.0), (0.5, 0.5)]


def test_reflection_ifs_leaves_line_invariant():
    g = sample(Affine(1.0, 0.0), 1024)
    assert self_similarity_residual(line_ifs[3], g) <= 2 / 1024
    assert self_similarity_residual(line_ifs[2], g) <= 2 / 1024


def test_slope_witness_examples():
    g = sample(Affine(1.0, 0.0), 1024)
    ifs = converse_ifs(1.0, 0.0)
    w = find_slope_subinterval(ifs, g, UNIT)
    assert w.word == (1,) and (w.interval.lo, w.interval.hi) == (0.0, 0.5)
    w = find_slope_subinterval(ifs, g, Interval(0.0, 0.5))
    assert w.word == (1, 1) and (w.interval.lo, w.interval.hi) == (0.0, 0.25)
    assert w.slope == 1.0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(line_ifs), st.floats(0, 0.95), st.floats(0.05, 1.0))
def test_slope_witness_matches_exhaustive_enumeration(ifs, lo, frac):
    hi = lo + frac * (1 - lo)
    if hi - lo < 0.02:
        return
    g = sample(Affine(1.0, 0.0), 64)
    # ratio 2/3 maps need depth 9 on targets of length 1/16
    ref = slope_witness_exhaustive(ifs, lo, hi, max_depth=12)
    assert ref is not None
    w = find_slope_subinterval(ifs, g, Interval(lo, hi))
    assert w.word == ref[0]
    assert (w.interval.lo, w.interval.hi) == pytest.approx((ref[1], ref[2]), abs=1e-15)
    # the length and containment facts behind the refinement
    length = w.interval.length
    assert ifs.c * (hi - lo) - 1e-15 <= length <= 0.5 * (hi - lo) + 1e-15
    assert lo - 1e-12 <= w.interval.lo and w.interval.hi <= hi + 1e-12


def test_witness_needs_cover():
    cantor = make_ifs([(1 / 3, 0, (0, 0)), (1 / 3, 0, (2 / 3, 0))])
    g = sample(Affine(1.0, 0.0), 64)
    with pytest.raises(NoContainingWordError):
        find_slope_subinterval(cantor, g, Interval(0.4, 0.6))
    with pytest.raises(ValueError):
        find_slope_subinterval(cantor, g, Interval(0.5, 0.5))


@pytest.mark.parametrize("ifs", line_ifs[:3])
def test_cantor_stage_invariants(ifs):
    spec = Affine(1.0, 0.0) if ifs is not line_ifs[1] else Affine(-2.0, 1.0)
    g = sample(spec, 4096)
    stage = CantorStage.initial(Interval(0.1, 0.9))
    for n in range(1, 11):
        prev = stage
        stage = cantor_refine(ifs, g, stage)
        assert len(stage.intervals) == 2**n
        assert stage.total_length <= (1 - ifs.c) ** n * 0.8 + 1e-15
        removed = math.fsum(gp.length for gp in stage.removed_gaps)
        assert abs(prev.total_length - removed - stage.total_length) <= 1e-12
        # intervals stay ordered and disjoint (touching allowed only when degenerate)
        for u, v in zip(stage.intervals[:-1], stage.intervals[1:]):
            assert u.hi <= v.lo


def test_certify_affine_examples():
    g = sample(Affine(1.0, 0.0), 1024)
    cert = certify_affine(converse_ifs(1.0, 0.0), g, UNIT, 10)
    assert cert.passed and cert.verdict == "AFFINE-CONSISTENT"
    assert cert.measured_deviation <= 1e-9
    assert math.isclose(cert.bound, (4 + 1) * 0.75**10, rel_tol=1e-12)
    assert all(r.ok for r in cert.records)


def test_certify_affine_on_subinterval():
    g = sample(Affine(-2.0, 1.0), 2048)
    cert = certify_affine(converse_ifs(-2.0, 1.0), g, Interval(0.2, 0.7), 6)
    assert cert.passed and cert.measured_deviation <= 1e-9
    assert cert.lam == -2.0


def test_certify_affine_fails_without_cover():
    g = sample(Takagi(), 1024)
    cert = certify_affine(converse_ifs(0.0, 0.0), g, UNIT, 4)
    assert cert.verdict == "NOT-SELF-SIMILAR"
    assert cert.failing_stage == 0


def test_certify_affine_deviation_violation():
    # a supplied Lipschitz constant of 0 leaves no room: Takagi deviates on [0, 1/2]
    g = sample(Takagi(), 1024)
    cert = certify_affine(converse_ifs(0.0, 0.0), g, Interval(0.0, 0.5), 3, lipschitz=0.0)
    assert not cert.passed and cert.failing_stage == 1


def test_slope_invariance_check():
    s = Similitude(0.5, math.pi, (1.0, 1.0))
    chord = ((0.0, 0.0), (1.0, 2.0))
    img = (tuple(s(chord[0])), tuple(s(chord[1])))
    assert slope_invariance_check(s, chord, img)
    with pytest.raises(ValueError):
        slope_invariance_check(s, chord, ((0, 0), (1, 1)))
    with pytest.raises(NotAxisAlignedError):
        slope_invariance_check(Similitude(0.5, 1.0), chord, img)


def test_chord_slope():
    g = sample(Affine(3.0, -1.0), 16)
    assert chord_slope(g, 0.25, 0.75) == 3.0


def test_lipschitz_then_affine_share_constant():
    g = sample(Affine(2.0, 1.0), 512)
    ifs = converse_ifs(2.0, 1.0)
    cover = certify_lipschitz(ifs, g)
    cert = certify_affine(ifs, g, cover=cover, stages=5)
    assert cert.L == cover.lipschitz_constant == 8.0
