"""Slope witnesses, the Cantor-like refinement and the affine certificate.

For an IFS that leaves a graph invariant, every interval ``[a, b]`` contains
a word interval ``I_alpha = [s, t]`` around its midpoint whose chord slope is
``lambda = f(1) - f(0)`` and whose length is between ``c (b - a)`` and
``(b - a) / 2`` (``c = r_min / 2``).  Removing these witnesses repeatedly
leaves ``2**n`` intervals of total length at most ``(1 - c)**n (b - a)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cover import CoverCertificate, NotAxisAlignedError, certify_lipschitz, x_actions
from .graph import UNIT, Interval, SampledGraph
from .similitude import IFS, RotationClass, Similitude, make_ifs

CONTAIN_TOL = 1e-12


class NoContainingWordError(ValueError):
    pass


@dataclass(frozen=True)
class SlopeWitness:
    interval: Interval
    word: tuple[int, ...]
    depth: int
    slope: float


@dataclass(frozen=True)
class Gap:
    lo: float
    hi: float
    slope: float  # nan for zero-length gaps

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass
class CantorStage:
    stage: int
    intervals: list[Interval]
    removed_gaps: list[Gap] = field(default_factory=list)

    @property
    def total_length(self) -> float:
        return math.fsum(iv.length for iv in self.intervals)

    @classmethod
    def initial(cls, target: Interval) -> "CantorStage":
        return cls(0, [target], [])


@dataclass
class StageRecord:
    stage: int
    total_length: float
    length_bound: float
    deviation_bound: float
    partition_defect: float
    telescoping_defect: float
    worst_gap_slope_defect: float
    ok: bool


@dataclass
class AffineCertificate:
    interval: Interval
    lam: float
    L: float
    c: float
    stages: int
    measured_deviation: float
    bound: float
    slack: float
    verdict: str
    failing_stage: int | None = None
    records: list[StageRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "AFFINE-CONSISTENT"


def slope_invariance_check(s: Similitude, chord, image_chord, tol: float = 1e-9) -> bool:
    """Whether ``s`` keeps the slope of a graph chord.

    ``chord`` and ``image_chord`` are pairs of plane points; the image points
    must equal ``s`` applied to the chord points within ``tol``.
    """
    if s.rotation_class() is RotationClass.OTHER:
        raise NotAxisAlignedError(f"map angle {s.angle!r} is neither 0 nor pi")
    (x0, y0), (x1, y1) = chord
    (u0, v0), (u1, v1) = image_chord
    for p, q in (((x0, y0), (u0, v0)), ((x1, y1), (u1, v1))):
        img = s(p)
        if math.hypot(img[0] - q[0], img[1] - q[1]) > tol:
            raise ValueError("image_chord is not the image of chord under s")
    if x1 == x0 or u1 == u0:
        raise ValueError("vertical chord: points of a function graph have distinct x")
    return abs((y1 - y0) / (x1 - x0) - (v1 - v0) / (u1 - u0)) <= tol


def chord_slope(g: SampledGraph, s: float, t: float) -> float:
    fs, ft = g([s, t])
    return float((ft - fs) / (t - s))


def find_slope_subinterval(ifs: IFS, g: SampledGraph, target: Interval,
                           max_depth: int = 200) -> SlopeWitness:
    """Shallowest word interval around the midpoint of ``target`` no longer than half of it.

    Word intervals nest along suffixes (``S_alpha = S_beta o S_j`` with
    ``alpha = (j, *beta)``), so only children of words that contained the
    midpoint are examined.  Ties at the first admissible depth go to the
    lexicographically smallest word.
    """
    if target.length <= 0:
        raise ValueError("target must have positive length")
    actions = x_actions(ifs)
    mid, half = target.mid, 0.5 * target.length
    frontier = [((), 1.0, 0.0, 1.0)]  # word, sign, offset, scale: x -> sign*scale*x + offset
    for depth in range(1, max_depth + 1):
        children = []
        for word, sign, off, scale in frontier:
            for j, (sj, rj, bj) in enumerate(actions, start=1):
                # S_word o S_j acting on x: sign*scale*(sj*rj*x + bj) + off
                nsign, nscale = sign * sj, scale * rj
                noff = sign * scale * bj + off
                a, b = noff, nsign * nscale + noff
                lo, hi = (a, b) if a <= b else (b, a)
                if lo - CONTAIN_TOL <= mid <= hi + CONTAIN_TOL:
                    children.append(((j,) + word, nsign, noff, nscale, lo, hi))
        if not children:
            raise NoContainingWordError(
                f"no depth-{depth} word interval contains the midpoint {mid!r}; "
                "the IFS images do not cover [0, 1]"
            )
        short = [ch for ch in children if ch[3] <= half]  # ch[3] is the ratio r_alpha
        if short:
            word, _, _, _, lo, hi = min(short)
            return SlopeWitness(Interval(lo, hi), word, depth, chord_slope(g, lo, hi))
        frontier = [c[:4] for c in children]
    raise NoContainingWordError(f"no word interval shorter than {half!r} up to depth {max_depth}")


def cantor_refine(ifs: IFS, g: SampledGraph, stage: CantorStage) -> CantorStage:
    """Remove a slope witness from the interior of every interval of ``stage``.

    Zero-length intervals cannot host a witness; they split into two copies
    of themselves around an empty gap so the count stays ``2**n``.
    """
    new_intervals: list[Interval] = []
    gaps: list[Gap] = []
    for iv in stage.intervals:
        if iv.length <= 0:
            new_intervals += [iv, iv]
            gaps.append(Gap(iv.lo, iv.lo, math.nan))
            continue
        w = find_slope_subinterval(ifs, g, iv)
        s = min(max(w.interval.lo, iv.lo), iv.hi)
        t = max(min(w.interval.hi, iv.hi), s)
        new_intervals += [Interval(iv.lo, s), Interval(t, iv.hi)]
        gaps.append(Gap(s, t, w.slope))
    return CantorStage(stage.stage + 1, new_intervals, gaps)


def certify_affine(ifs: IFS, g: SampledGraph, target: Interval = UNIT, stages: int = 10,
                   cover: CoverCertificate | None = None, lipschitz: float | None = None
                   ) -> AffineCertificate:
    """Run the Cantor refinement and compare ``|f(b) - f(a) - lambda (b - a)|``
    with ``(L + |lambda|) (1 - c)**n (b - a)`` at every stage.

    ``L`` comes from ``lipschitz`` if given, else from ``cover`` (which must
    have passed), else from a fresh :func:`certify_lipschitz` run.
    """
    if stages < 1:
        raise ValueError("stages must be >= 1")
    lam = float(g.ys[-1] - g.ys[0])
    c = ifs.c
    slack = g.slack()
    fa, fb = (float(v) for v in g([target.lo, target.hi]))
    deviation = abs(fb - fa - lam * target.length)
    if lipschitz is None:
        if cover is None:
            cover = certify_lipschitz(ifs, g)
        if not cover.passed:
            return AffineCertificate(target, lam, cover.lipschitz_constant, c, stages, deviation,
                                     math.nan, slack, "NOT-SELF-SIMILAR", failing_stage=0)
        lipschitz = cover.lipschitz_constant
    L = float(lipschitz)

    stage = CantorStage.initial(target)
    records = []
    failing = None
    bound = math.nan
    for n in range(1, stages + 1):
        stage = cantor_refine(ifs, g, stage)
        rec = _stage_record(g, stage, target, lam, L, c, fa, fb, deviation, slack)
        records.append(rec)
        bound = rec.deviation_bound
        if not rec.ok and failing is None:
            failing = n
    verdict = "AFFINE-CONSISTENT" if failing is None else "NOT-SELF-SIMILAR"
    return AffineCertificate(target, lam, L, c, stages, deviation, bound, slack, verdict,
                             failing, records)


def _stage_record(g, stage, target, lam, L, c, fa, fb, deviation, slack) -> StageRecord:
    n = stage.stage
    ivs = stage.intervals
    total = stage.total_length
    # gaps between consecutive intervals, read off the interval list itself
    between = [Interval(ivs[i].hi, ivs[i + 1].lo) for i in range(len(ivs) - 1)]
    gap_total = math.fsum(b.length for b in between)
    partition_defect = abs(total + gap_total - target.length)
    vals_lo = g([iv.lo for iv in ivs])
    vals_hi = g([iv.hi for iv in ivs])
    inc = math.fsum(float(v) for v in vals_hi - vals_lo)
    gap_inc = math.fsum(float(g(b.hi) - g(b.lo)) for b in between)
    telescoping_defect = abs((fb - fa) - (inc + gap_inc))
    gap_defects = [abs(float(g(b.hi) - g(b.lo)) - lam * b.length) for b in between if b.length > 0]
    worst_gap = max(gap_defects, default=0.0)
    length_bound = (1.0 - c) ** n * target.length
    deviation_bound = (L + abs(lam)) * length_bound
    ok = (
        len(ivs) == 2**n
        and total <= length_bound * (1 + 1e-12) + 1e-15
        and partition_defect <= 1e-12
        and telescoping_defect <= 1e-12 * max(1.0, abs(fb - fa))
        and deviation <= deviation_bound + slack
    )
    return StageRecord(n, total, length_bound, deviation_bound, partition_defect,
                       telescoping_defect, worst_gap, ok)


def converse_ifs(a: float, b: float) -> IFS:
    """Two half-size maps whose images are the left and right halves of ``y = a x + b`` on [0, 1]."""
    f0, f1 = b, a + b
    return make_ifs(
        [(0.5, 0.0, (0.0, f0 / 2)), (0.5, 0.0, (0.5, f1 / 2))],
        name=f"converse(a={a!r}, b={b!r})",
    )
