"""Attractor generation and Hausdorff distance between finite point sets."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .similitude import IFS, apply, fixed_point

DEDUP_TOL = 1e-12


class EmptyPointSetError(ValueError):
    pass


@dataclass
class PointSet:
    """A finite multiset of plane points, stored as an ``(N, 2)`` array.

    The nearest-neighbour index is built lazily and cached.
    """

    points: np.ndarray
    _tree: cKDTree | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.size == 0:
            p = p.reshape(0, 2)
        if p.ndim == 1 and p.shape[0] == 2:
            p = p.reshape(1, 2)
        if p.ndim != 2 or p.shape[1] != 2:
            raise ValueError(f"expected an (N, 2) array, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("point coordinates must be finite")
        self.points = p

    def __len__(self):
        return self.points.shape[0]

    @property
    def index(self) -> cKDTree:
        if self._tree is None:
            self._tree = cKDTree(self.points)
        return self._tree

    def bounding_box(self) -> tuple[float, float, float, float]:
        lo = self.points.min(axis=0)
        hi = self.points.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    def diameter_bound(self) -> float:
        """Diagonal of the bounding box (an upper bound on the diameter)."""
        x0, y0, x1, y1 = self.bounding_box()
        return math.hypot(x1 - x0, y1 - y0)

    def deduplicated(self, tol: float = DEDUP_TOL) -> "PointSet":
        if len(self) == 0:
            return self
        keys = np.round(self.points / tol)
        _, first = np.unique(keys, axis=0, return_index=True)
        return PointSet(self.points[np.sort(first)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("x,y\n")
        for x, y in self.points:
            buf.write(f"{x:.17g},{y:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PointSet":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["x", "y"]:
            raise ValueError("point CSV must start with the header 'x,y'")
        rows = [(float(a), float(b)) for a, b in (r for r in reader if r)]
        return cls(np.array(rows, dtype=float).reshape(-1, 2))


def as_pointset(obj) -> PointSet:
    return obj if isinstance(obj, PointSet) else PointSet(obj)


def hutchinson_step(ifs: IFS, ps, dedupe: float | None = None) -> PointSet:
    """One application of ``K -> union_i S_i(K)``.

    Images are concatenated map by map (all of ``S_1(K)`` first), so the
    result has ``k * len(ps)`` points unless ``dedupe`` is given.
    """
    ps = as_pointset(ps)
    if len(ps) == 0:
        raise EmptyPointSetError("hutchinson_step needs a nonempty point set")
    out = PointSet(np.concatenate([apply(m, ps.points) for m in ifs.maps]))
    return out.deduplicated(dedupe) if dedupe else out


def attractor_ball(ifs: IFS) -> tuple[np.ndarray, float]:
    """A disc ``B(c, R)`` mapped into itself by every map, hence containing the attractor.

    ``c`` is the centroid of the fixed points and ``R = max_i |S_i(c) - c| / (1 - r_max)``.
    """
    fps = np.array([fixed_point(m) for m in ifs.maps])
    c = fps.mean(axis=0)
    disp = max(float(np.linalg.norm(apply(m, c) - c)) for m in ifs.maps)
    return c, disp / (1.0 - ifs.r_max)


@dataclass
class AttractorResult:
    points: PointSet
    mode: str  # "deterministic" or "chaos"
    depth: int
    switch_depth: int | None
    rng_seed: int
    error_bound: float


def iterate_attractor(
    ifs: IFS,
    seed,
    depth: int,
    point_budget: int = 1_000_000,
    rng_seed: int = 0,
    dedupe: float = DEDUP_TOL,
) -> AttractorResult:
    """Iterate the Hutchinson operator ``depth`` times from ``seed``.

    When a full step would exceed ``point_budget``, the remaining levels are
    sampled: each of ``point_budget`` points is the image of a random current
    point under a random map.  The result then only guarantees the one-sided
    bound (every point is close to the attractor) and ``mode`` is ``"chaos"``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if point_budget <= 0:
        raise ValueError("point_budget must be positive")
    ps = as_pointset(seed)
    if len(ps) == 0:
        raise EmptyPointSetError("seed point set is empty")
    rng = np.random.Generator(np.random.Philox(rng_seed))
    mode, switch = "deterministic", None
    for level in range(depth):
        if mode == "deterministic" and ifs.k * len(ps) > point_budget:
            mode, switch = "chaos", level
        if mode == "deterministic":
            ps = hutchinson_step(ifs, ps, dedupe=dedupe)
        else:
            src = rng.integers(0, len(ps), size=point_budget)
            which = rng.integers(0, ifs.k, size=point_budget)
            out = np.empty((point_budget, 2))
            for i, m in enumerate(ifs.maps):
                sel = which == i
                out[sel] = apply(m, ps.points[src[sel]])
            ps = PointSet(out)
    c, radius = attractor_ball(ifs)
    start = float(np.linalg.norm(as_pointset(seed).points - c, axis=1).max()) + radius
    return AttractorResult(ps, mode, depth, switch, rng_seed, start * ifs.r_max**depth)


def chaos_game(ifs: IFS, n_points: int, rng_seed: int = 0, burn_in: int = 32) -> PointSet:
    """Random-iteration sampling of the attractor.

    The orbit starts at the fixed point of the first map, which already lies
    on the attractor; the first ``burn_in`` iterates are still discarded.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    rng = np.random.Generator(np.random.Philox(rng_seed))
    which = rng.integers(0, ifs.k, size=burn_in + n_points)
    mats = [m.linear for m in ifs.maps]
    offs = [np.asarray(m.translation) for m in ifs.maps]
    p = fixed_point(ifs.maps[0])
    out = np.empty((n_points, 2))
    for t, i in enumerate(which):
        p = mats[i] @ p + offs[i]
        if t >= burn_in:
            out[t - burn_in] = p
    return PointSet(out)


def _pair_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = a - b
    return np.sqrt(d[..., 0] * d[..., 0] + d[..., 1] * d[..., 1])


def nearest_distances(src, dst) -> np.ndarray:
    """For every point of ``src`` the exact distance to the nearest point of ``dst``.

    The tree proposes candidates; distances are then recomputed with the
    same expression as the brute-force loop so the two agree bit for bit.
    """
    src, dst = as_pointset(src), as_pointset(dst)
    k = min(8, len(dst))
    _, idx = dst.index.query(src.points, k=k)
    if k == 1:
        idx = idx[:, None]
    cand = _pair_dist(src.points[:, None, :], dst.points[idx])
    best = cand.min(axis=1)
    if k < len(dst):
        # near-ties beyond the k-th neighbour: fall back to a ball query
        loose = cand.max(axis=1) <= best * (1.0 + 1e-9) + 1e-300
        for i in np.flatnonzero(loose):
            near = dst.index.query_ball_point(src.points[i], best[i] * (1.0 + 1e-9) + 1e-300)
            best[i] = _pair_dist(src.points[i], dst.points[near]).min()
    return best


def directed_hausdorff(a, b) -> float:
    return float(nearest_distances(a, b).max())


def hausdorff_distance(a, b) -> float:
    a, b = as_pointset(a), as_pointset(b)
    if len(a) == 0 or len(b) == 0:
        raise EmptyPointSetError("hausdorff_distance needs two nonempty point sets")
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def hausdorff_brute_force(a, b) -> float:
    """Quadratic reference implementation."""
    a = as_pointset(a).points
    b = as_pointset(b).points
    if len(a) == 0 or len(b) == 0:
        raise EmptyPointSetError("hausdorff_distance needs two nonempty point sets")
    ab = max(_pair_dist(p, b).min() for p in a)
    ba = max(_pair_dist(q, a).min() for q in b)
    return float(max(ab, ba))
