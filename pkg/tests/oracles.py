"""Slow, obviously-correct reference implementations used by the tests."""

import itertools

import numpy as np

from grigid.similitude import compose_word, word_ratio


def covers(intervals, lo, hi) -> bool:
    """Closed intervals cover [lo, hi]: sweep over sorted left endpoints."""
    reach = lo
    for a, b in sorted(intervals):
        if a > reach:
            return False
        reach = max(reach, b)
        if reach >= hi:
            return True
    return reach >= hi


def all_minimal_covers(intervals, lo, hi):
    """Every index subset that covers [lo, hi] and loses coverage when any member is dropped."""
    m = len(intervals)
    out = []
    for mask in range(1, 1 << m):
        idx = [i for i in range(m) if mask >> i & 1]
        sel = [intervals[i] for i in idx]
        if not covers(sel, lo, hi):
            continue
        if all(not covers(sel[:j] + sel[j + 1:], lo, hi) for j in range(len(sel))):
            out.append(idx)
    return out


def hausdorff_loops(a, b) -> float:
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    best_ab = max(min(float(np.hypot(*(p - q))) for q in b) for p in a)
    best_ba = max(min(float(np.hypot(*(q - p))) for p in a) for q in b)
    return max(best_ab, best_ba)


def word_x_interval(ifs, word, lo=0.0, hi=1.0):
    s = compose_word(ifs, word)
    xa, xb = s((lo, 0.0))[0], s((hi, 0.0))[0]
    return (xa, xb) if xa <= xb else (xb, xa)


def slope_witness_exhaustive(ifs, target_lo, target_hi, max_depth=8, tol=1e-12):
    """Shallowest, then lexicographically least, word interval around the midpoint of
    the target whose ratio is at most half the target length."""
    mid = 0.5 * (target_lo + target_hi)
    half = 0.5 * (target_hi - target_lo)
    for depth in range(1, max_depth + 1):
        found = []
        for word in itertools.product(range(1, ifs.k + 1), repeat=depth):
            a, b = word_x_interval(ifs, word)
            if a - tol <= mid <= b + tol and word_ratio(ifs, word) <= half:
                found.append((word, a, b))
        if found:
            return min(found)
    return None
