"""Direction sets of a graph seen from a base point, arcs, rotation orbits and
the rotation-rigidity decision for candidate similitude angles.

Angles are measured with ``atan2`` in ``[0, 2 pi)``; the north point
``(0, 1)`` is ``pi / 2`` and the south point is ``3 pi / 2``.  The rotation
``rho(theta)`` acts on angles as ``phi -> phi - theta`` (see
:mod:`grigid.similitude`).

Everything here works on sampled data, so verdicts are necessary-condition
checks: a rejection reproduces the contradiction on the sample, an
admission only means no contradiction was found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .graph import SampledGraph, line_fit
from .similitude import TWO_PI, RotationClass, classify_rotation, normalize_angle

NORTH = math.pi / 2
SOUTH = 3 * math.pi / 2
ARC_MIN_GAPS = 8
MERGE_TOL = 1e-9
RATIONAL_MAX_DEN = 64
RATIONAL_TOL = 1e-9


class NotOnGraphError(ValueError):
    pass


@dataclass
class DirectionSet:
    angles: np.ndarray
    source: str = ""

    def __post_init__(self):
        a = np.mod(np.asarray(self.angles, dtype=float).ravel(), TWO_PI)
        a[a >= TWO_PI] = 0.0
        self.angles = np.sort(a)

    def __len__(self):
        return len(self.angles)

    def distinct(self, tol: float = MERGE_TOL) -> np.ndarray:
        """Cluster representatives: sorted angles with circular gaps <= tol merged."""
        a = self.angles
        if len(a) == 0:
            return a
        keep = np.concatenate([[True], np.diff(a) > tol])
        reps = a[keep]
        if len(reps) > 1 and (reps[0] + TWO_PI - a[-1]) <= tol:
            reps = reps[1:]  # first cluster wraps into the last one
        return reps


@dataclass
class ArcReport:
    contains_arc: bool
    witness_arc: tuple[float, float] | None  # (start angle, length)
    max_gap: float
    resolution: float


def rotate_angles(angles, theta: float) -> np.ndarray:
    """Image of direction angles under ``rho(theta)``."""
    return np.mod(np.asarray(angles, dtype=float) - theta, TWO_PI)


def phi_image(g: SampledGraph, p_star, exclusion_radius: float | None = None,
              on_graph_tol: float | None = None) -> DirectionSet:
    """Directions ``(p - p*) / |p - p*|`` of the graph nodes outside a small disc around ``p*``."""
    x0, y0 = (float(v) for v in p_star)
    if exclusion_radius is None:
        exclusion_radius = 4.0 * g.h
    if exclusion_radius <= 0:
        raise ValueError("exclusion radius must be positive")
    if on_graph_tol is None:
        on_graph_tol = 2.0 * g.eval_error + 1e-12 * (1.0 + abs(y0))
    if not -1e-12 <= x0 <= 1.0 + 1e-12 or abs(float(g(x0)) - y0) > on_graph_tol:
        raise NotOnGraphError(f"p* = ({x0!r}, {y0!r}) is not on the sampled graph")
    dx = g.xs - x0
    dy = g.ys - y0
    keep = np.hypot(dx, dy) > exclusion_radius
    if not np.any(keep):
        raise ValueError("every node lies inside the exclusion radius")
    angles = np.arctan2(dy[keep], dx[keep])
    return DirectionSet(angles, source=f"{g.label} from ({x0:.17g}, {y0:.17g})")


def _circular_gaps(a: np.ndarray) -> np.ndarray:
    return np.append(np.diff(a), a[0] + TWO_PI - a[-1])


def contains_arc(d: DirectionSet, resolution: float | None = None) -> ArcReport:
    """Look for a run of at least 8 consecutive gaps no wider than ``resolution``.

    Angles closer than 1e-9 are merged first, so repeated directions never
    count as an arc.  The witness is the longest run (start angle, length).
    """
    if resolution is None:
        resolution = TWO_PI / math.sqrt(max(len(d), 1))
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    a = d.distinct()
    if len(a) < 3:
        return ArcReport(False, None, TWO_PI, resolution)
    gaps = _circular_gaps(a)
    max_gap = float(gaps.max())
    small = gaps <= resolution
    if small.all():
        if len(gaps) >= ARC_MIN_GAPS:
            return ArcReport(True, (float(a[0]), TWO_PI), max_gap, resolution)
        return ArcReport(False, None, max_gap, resolution)
    # rotate so that index 0 follows a large gap; runs then never wrap
    start = int(np.flatnonzero(~small)[0]) + 1
    order = np.roll(np.arange(len(a)), -start)
    s = small[order]
    best = (0, 0.0, 0.0)  # count, length, start angle
    i = 0
    while i < len(s):
        if not s[i]:
            i += 1
            continue
        j = i
        while j < len(s) and s[j]:
            j += 1
        length = float(gaps[order[i:j]].sum())
        if length > best[1]:
            best = (j - i, length, float(a[order[i]]))
        i = j
    count, length, begin = best
    if count >= ARC_MIN_GAPS:
        return ArcReport(True, (begin, length), max_gap, resolution)
    return ArcReport(False, None, max_gap, resolution)


def arc_union_stats(starts: np.ndarray, arc_len: float) -> tuple[float, float]:
    """Largest uncovered gap and total uncovered length for arcs ``[s, s + arc_len]``."""
    s = np.sort(np.mod(starts, TWO_PI))
    g = np.clip(_circular_gaps(s) - arc_len, 0.0, None)
    return float(g.max()), float(g.sum())


@dataclass
class OrbitCover:
    covered: bool
    steps: int  # least N when covered, max_steps otherwise
    max_gap: float
    uncovered_length: float


def rotation_orbit_cover(arc_start: float, arc_len: float, theta: float, eps: float,
                         max_steps: int = 10_000) -> OrbitCover:
    """Least ``N`` for which ``J, rho(J), ..., rho^N(J)`` leave at most ``eps`` of the circle uncovered.

    ``J = [arc_start, arc_start + arc_len]``.  Coverage grows with ``N``, so
    the least ``N`` is found by bisection.
    """
    if not 0.0 < arc_len < TWO_PI:
        raise ValueError("arc length must lie in (0, 2 pi)")
    if eps <= 0:
        raise ValueError("eps must be positive")

    def stats(n):
        starts = arc_start - theta * np.arange(n + 1)
        return arc_union_stats(starts, arc_len)

    gap, unc = stats(max_steps)
    if unc > eps:
        return OrbitCover(False, max_steps, gap, unc)
    lo, hi = -1, max_steps  # stats(hi) covers; stats(lo) does not (lo = -1 sentinel)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if stats(mid)[1] <= eps:
            hi = mid
        else:
            lo = mid
    gap, unc = stats(hi)
    return OrbitCover(True, hi, gap, unc)


@dataclass
class Invariance:
    forward_ok: bool
    backward_ok: bool
    worst_defect: float


def _nearest_circle_distance(sorted_angles: np.ndarray, queries: np.ndarray) -> np.ndarray:
    ext = np.concatenate([sorted_angles - TWO_PI, sorted_angles, sorted_angles + TWO_PI])
    pos = np.searchsorted(ext, queries)
    left = ext[np.clip(pos - 1, 0, len(ext) - 1)]
    right = ext[np.clip(pos, 0, len(ext) - 1)]
    return np.minimum(np.abs(queries - left), np.abs(right - queries))


def invariance_check(d: DirectionSet, theta: float, tol: float) -> Invariance:
    """Forward: ``rho(theta)`` maps every angle near the set; backward: ``rho(-theta)`` does."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = d.angles
    if len(a) == 0:
        return Invariance(True, True, 0.0)
    fwd = _nearest_circle_distance(a, rotate_angles(a, theta))
    bwd = _nearest_circle_distance(a, rotate_angles(a, -theta))
    worst = float(max(fwd.max(), bwd.max()))
    return Invariance(bool(fwd.max() <= tol), bool(bwd.max() <= tol), worst)


def rational_proxy(theta: float, max_den: int = RATIONAL_MAX_DEN,
                   tol: float = RATIONAL_TOL) -> Fraction | None:
    """``m/n`` with ``n <= max_den`` and ``|theta/2pi - m/n| <= tol``, if any."""
    x = normalize_angle(theta) / TWO_PI
    frac = Fraction(x).limit_denominator(max_den)
    if abs(float(frac) - x) <= tol:
        return frac if frac.denominator > 0 else None
    return None


def _cut_points(theta: float, n: int) -> np.ndarray:
    i = np.arange(n)
    pts = np.concatenate([NORTH + i * theta, SOUTH + i * theta])
    pts = np.sort(np.mod(pts, TWO_PI))
    keep = np.concatenate([[True], np.diff(pts) > 1e-9])
    pts = pts[keep]
    if len(pts) > 1 and pts[0] + TWO_PI - pts[-1] <= 1e-9:
        pts = pts[1:]
    return pts


def _segment_of(angle: float, cuts: np.ndarray) -> int:
    return int(np.searchsorted(cuts, np.mod(angle, TWO_PI), side="right")) % len(cuts)


def _sub_arc_between_cuts(arc: tuple[float, float], cuts: np.ndarray) -> tuple[float, float]:
    """Longest piece of ``arc`` containing no cut point."""
    start, length = arc
    rel = np.sort(np.mod(cuts - start, TWO_PI))
    rel = rel[(rel > 0) & (rel < length)]
    bounds = np.concatenate([[0.0], rel, [length]])
    k = int(np.argmax(np.diff(bounds)))
    return start + bounds[k], float(bounds[k + 1] - bounds[k])


def component_count(arc: tuple[float, float], theta: float, n: int) -> int:
    """Number of segments (cut by the rotated north/south points) hit by ``rho^i(J)``, i < n."""
    cuts = _cut_points(theta, n)
    start, length = _sub_arc_between_cuts(arc, cuts)
    mid = start + 0.5 * length
    return len({_segment_of(mid - i * theta, cuts) for i in range(n)})


def orbit_hits_vertical(arc: tuple[float, float], theta: float, max_steps: int) -> int | None:
    """Least ``i <= max_steps`` with north or south inside ``rho^i(J)``, else None."""
    start, length = arc
    starts = np.mod(start - np.arange(max_steps + 1) * theta, TWO_PI)
    first = None
    for target in (NORTH, SOUTH):
        hits = np.flatnonzero(np.mod(target - starts, TWO_PI) <= length)
        if len(hits) and (first is None or hits[0] < first):
            first = int(hits[0])
    return first


@dataclass
class RotationVerdict:
    angle: float
    status: str  # "Admissible", "Rejected", "Line", "Inconclusive"
    rotation_class: str
    reason: str = ""
    details: dict = field(default_factory=dict)


@dataclass
class AdmissibilityReport:
    is_line: bool
    line_deviation: float
    arc_reports: list[tuple[tuple[float, float], ArcReport]]
    verdicts: list[RotationVerdict]

    def admissible(self) -> list[float]:
        return [v.angle for v in self.verdicts if v.status in ("Admissible", "Line")]

    def rejected(self) -> list[float]:
        return [v.angle for v in self.verdicts if v.status == "Rejected"]


def default_base_points(g: SampledGraph, count: int = 5) -> list[tuple[float, float]]:
    idx = np.round(np.linspace(0, g.n, count)).astype(int)
    return [(float(g.xs[i]), float(g.ys[i])) for i in idx]


def admissible_rotations(g: SampledGraph, candidates: Sequence[float], tol: float = 1e-9,
                         base_points: Sequence | None = None, resolution: float | None = None,
                         line_tol: float | None = None, max_orbit_steps: int = 10_000
                         ) -> AdmissibilityReport:
    """Decide, candidate by candidate, whether ``rho(theta)`` can belong to a
    similitude mapping the graph into itself.

    The fixed point ``p*`` of such a map is unknown, so the direction set is
    examined from several base points on the graph; a candidate is rejected
    only when the contradiction appears from every one of them.
    """
    _, _, dev = line_fit(g)
    if line_tol is None:
        line_tol = 1e-9 * (1.0 + float(np.abs(g.ys).max())) + 2.0 * g.eval_error
    if dev <= line_tol:
        verdicts = [
            RotationVerdict(normalize_angle(t), "Line", classify_rotation(t, tol).value,
                            "graph is a straight line; every rotation class is possible in principle")
            for t in candidates
        ]
        return AdmissibilityReport(True, dev, [], verdicts)

    bases = list(base_points) if base_points is not None else default_base_points(g)
    sets = [(tuple(p), phi_image(g, p)) for p in bases]
    reports = [(p, contains_arc(d, resolution)) for p, d in sets]
    verdicts = []
    for theta in candidates:
        theta = normalize_angle(theta)
        cls = classify_rotation(theta, tol)
        if cls is not RotationClass.OTHER:
            verdicts.append(RotationVerdict(theta, "Admissible", cls.value,
                                            "identity or point reflection is never excluded"))
            continue
        verdicts.append(_judge_other(theta, sets, reports, max_orbit_steps))
    return AdmissibilityReport(False, dev, reports, verdicts)


def _judge_other(theta, sets, reports, max_orbit_steps) -> RotationVerdict:
    frac = rational_proxy(theta)
    reasons = []
    for (p, d), (_, rep) in zip(sets, reports):
        if not rep.contains_arc:
            # finite direction set: it must itself be invariant under the rotation
            inv = invariance_check(DirectionSet(d.distinct()), theta, 1e-6)
            if inv.forward_ok:
                return RotationVerdict(theta, "Inconclusive", "Other",
                                       f"no arc seen from {p} and its directions are rotation invariant")
            reasons.append(f"{p}: arc-free direction set not invariant")
            continue
        if frac is not None and frac.denominator >= 3:
            n = frac.denominator
            comps = component_count(rep.witness_arc, theta, n)
            if comps <= 2:
                return RotationVerdict(theta, "Inconclusive", "Other",
                                       f"rotated arcs from {p} fall in only {comps} segments",
                                       {"m": frac.numerator, "n": n})
            reasons.append(f"{p}: {comps} components")
        else:
            hit = orbit_hits_vertical(rep.witness_arc, theta, max_orbit_steps)
            if hit is None:
                return RotationVerdict(theta, "Inconclusive", "Other",
                                       f"orbit of the arc from {p} misses north/south within "
                                       f"{max_orbit_steps} steps")
            reasons.append(f"{p}: vertical direction reached at step {hit}")
    details = {"proxy_max_den": RATIONAL_MAX_DEN, "proxy_tol": RATIONAL_TOL}
    if frac is not None and frac.denominator >= 3:
        details.update(m=frac.numerator, n=frac.denominator)
        reason = (f"rational 2*pi*{frac.numerator}/{frac.denominator} with n >= 3: "
                  "the direction image would need more than two components")
    else:
        reason = "irrational proxy: rotated arcs reach a vertical direction"
    details["evidence"] = reasons
    return RotationVerdict(theta, "Rejected", "Other", reason, details)
