"""Planar similitudes, iterated function systems and words.

A similitude is ``S(p) = r * rho(theta) @ p + b`` with the rotation matrix

    rho(theta) = [[ cos(theta), sin(theta)],
                  [-sin(theta), cos(theta)]]

Note the sign placement: acting on direction angles, ``rho(theta)`` sends
``phi`` to ``phi - theta``.  Every module in the package uses this
convention.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

# Angles whose cosine/sine are snapped to exact values so that the
# axis-aligned maps (theta in {0, pi}) compose without rounding noise.
_EXACT_TRIG = {
    0.0: (1.0, 0.0),
    math.pi / 2: (0.0, 1.0),
    math.pi: (-1.0, 0.0),
    3 * math.pi / 2: (0.0, -1.0),
}


class InvalidWordError(ValueError):
    pass


class RotationClass(enum.Enum):
    IDENTITY = "Identity"
    POINT_REFLECTION = "PointReflection"
    OTHER = "Other"


def normalize_angle(angle: float) -> float:
    a = math.fmod(float(angle), TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:
        a = 0.0
    return a


def circle_distance(a: float, b: float) -> float:
    """Arc-length distance between two angles on the unit circle."""
    d = abs(math.fmod(a - b, TWO_PI))
    return min(d, TWO_PI - d)


def cos_sin(angle: float) -> tuple[float, float]:
    exact = _EXACT_TRIG.get(angle)
    if exact is not None:
        return exact
    return math.cos(angle), math.sin(angle)


def rotation_matrix(angle: float) -> np.ndarray:
    c, s = cos_sin(normalize_angle(angle))
    return np.array([[c, s], [-s, c]])


@dataclass(frozen=True)
class Similitude:
    ratio: float
    angle: float = 0.0
    translation: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        r = float(self.ratio)
        if not (0.0 < r < 1.0) or not math.isfinite(r):
            raise ValueError(f"similitude ratio must lie in (0, 1), got {self.ratio!r}")
        tx, ty = (float(v) for v in self.translation)
        if not (math.isfinite(tx) and math.isfinite(ty)):
            raise ValueError("translation must be finite")
        object.__setattr__(self, "ratio", r)
        object.__setattr__(self, "angle", normalize_angle(self.angle))
        object.__setattr__(self, "translation", (tx, ty))

    @property
    def linear(self) -> np.ndarray:
        """The 2x2 matrix ``r * rho(theta)``."""
        return self.ratio * rotation_matrix(self.angle)

    def __call__(self, points):
        return apply(self, points)

    def rotation_class(self, tol: float = 1e-9) -> RotationClass:
        return classify_rotation(self.angle, tol)

    def x_action(self) -> tuple[float, float, float]:
        """Return ``(sign, ratio, offset)`` so that x' = sign*ratio*x + offset.

        Only meaningful for axis-aligned maps (angle 0 or pi), where the new
        abscissa does not depend on the ordinate.
        """
        cls = self.rotation_class()
        if cls is RotationClass.OTHER:
            raise ValueError(
                f"map with angle {self.angle!r} is not axis-aligned (rotation class Other)"
            )
        sign = 1.0 if cls is RotationClass.IDENTITY else -1.0
        return sign, self.ratio, self.translation[0]


def apply(s: Similitude, points):
    """Apply ``s`` to one point ``(x, y)`` or to an ``(N, 2)`` array of points."""
    c, sn = cos_sin(s.angle)
    r = s.ratio
    bx, by = s.translation
    p = np.asarray(points, dtype=float)
    if p.ndim == 1:
        x, y = p
        return np.array([r * (c * x + sn * y) + bx, r * (-sn * x + c * y) + by])
    x, y = p[:, 0], p[:, 1]
    out = np.empty_like(p)
    out[:, 0] = r * (c * x + sn * y) + bx
    out[:, 1] = r * (-sn * x + c * y) + by
    return out


def compose(outer: Similitude, inner: Similitude) -> Similitude:
    """The similitude ``outer o inner``."""
    c, s = cos_sin(outer.angle)
    bx, by = inner.translation
    tx = outer.ratio * (c * bx + s * by) + outer.translation[0]
    ty = outer.ratio * (-s * bx + c * by) + outer.translation[1]
    return Similitude(
        outer.ratio * inner.ratio,
        normalize_angle(outer.angle + inner.angle),
        (tx, ty),
    )


@dataclass(frozen=True)
class IFS:
    """A finite, ordered list of contracting similitudes."""

    maps: tuple[Similitude, ...]
    name: str = ""
    source: str = ""
    r_min: float = field(init=False)
    r_max: float = field(init=False)
    c: float = field(init=False)

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("an IFS needs at least one map")
        for i, m in enumerate(maps):
            if not isinstance(m, Similitude):
                raise TypeError(f"map {i} is not a Similitude")
        ratios = [m.ratio for m in maps]
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "r_min", min(ratios))
        object.__setattr__(self, "r_max", max(ratios))
        object.__setattr__(self, "c", min(ratios) / 2.0)

    @property
    def k(self) -> int:
        return len(self.maps)

    @property
    def ratios(self) -> list[float]:
        return [m.ratio for m in self.maps]

    def __len__(self):
        return len(self.maps)

    def __getitem__(self, i):
        return self.maps[i]

    def is_axis_aligned(self, tol: float = 1e-9) -> bool:
        return all(m.rotation_class(tol) is not RotationClass.OTHER for m in self.maps)

    def moran_dimension(self) -> float:
        return moran_dimension(self.ratios)


def make_ifs(maps: Iterable, **meta) -> IFS:
    """Build an IFS from similitudes or ``(ratio, angle, (bx, by))`` triples."""
    built = [m if isinstance(m, Similitude) else Similitude(*m) for m in maps]
    return IFS(tuple(built), **meta)


Word = tuple  # letters are 1-based map indices


def check_word(ifs: IFS, word: Sequence[int]) -> tuple[int, ...]:
    letters = tuple(int(i) for i in word)
    if not letters:
        raise InvalidWordError("a word needs at least one letter")
    for pos, i in enumerate(letters):
        if not 1 <= i <= ifs.k:
            raise InvalidWordError(f"letter {i} at position {pos} is outside 1..{ifs.k}")
    return letters


def compose_word(ifs: IFS, word: Sequence[int]) -> Similitude:
    """``S_alpha = S_{i_n} o ... o S_{i_1}`` for ``alpha = (i_1, ..., i_n)``.

    The first letter is applied first; the last letter is the outermost map.

    >>> f = make_ifs([(0.5, 0, (0, 0)), (0.5, 0, (0.5, 0))])
    >>> apply(compose_word(f, (1, 2)), (0.0, 0.0)).tolist()
    [0.5, 0.0]
    """
    letters = check_word(ifs, word)
    result = ifs.maps[letters[0] - 1]
    for i in letters[1:]:
        result = compose(ifs.maps[i - 1], result)
    return result


def word_ratio(ifs: IFS, word: Sequence[int]) -> float:
    letters = check_word(ifs, word)
    r = 1.0
    for i in letters:
        r *= ifs.maps[i - 1].ratio
    return r


def fixed_point(s: Similitude) -> np.ndarray:
    """Unique fixed point, from the 2x2 system ``(I - r rho) p = b``."""
    a = np.eye(2) - s.linear
    return np.linalg.solve(a, np.asarray(s.translation, dtype=float))


def classify_rotation(angle: float, tol: float = 1e-9) -> RotationClass:
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = normalize_angle(angle)
    if circle_distance(a, 0.0) <= tol:
        return RotationClass.IDENTITY
    if circle_distance(a, math.pi) <= tol:
        return RotationClass.POINT_REFLECTION
    return RotationClass.OTHER


def moran_dimension(ratios: Sequence[float], max_iter: int = 200) -> float:
    """Solve ``sum(r_i ** s) = 1`` for ``s >= 0`` by bisection."""
    rs = [float(r) for r in ratios]
    if not rs:
        raise ValueError("moran_dimension needs at least one ratio")
    for r in rs:
        if not 0.0 < r < 1.0:
            raise ValueError(f"ratio {r!r} is outside (0, 1)")

    def excess(s):
        return math.fsum(r**s for r in rs) - 1.0

    if excess(0.0) <= 0.0:
        return 0.0
    hi = 1.0
    while excess(hi) >= 0.0:
        hi *= 2.0
    lo = 0.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if excess(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    # pick whichever bracket end has the smaller defect
    return lo if abs(excess(lo)) <= abs(excess(hi)) else hi
