"""Sampled function graphs on [0, 1], the function catalog, oscillation and framing."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .attractor import PointSet

DOMAIN_TOL = 1e-12


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"interval needs lo <= hi, got [{self.lo!r}, {self.hi!r}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def contains_interval(self, other: "Interval", tol: float = 0.0) -> bool:
        return self.lo - tol <= other.lo and other.hi <= self.hi + tol

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __iter__(self):
        yield self.lo
        yield self.hi


UNIT = Interval(0.0, 1.0)


@dataclass(frozen=True)
class Rectangle:
    x_interval: Interval
    y_interval: Interval

    @property
    def width(self) -> float:
        return self.x_interval.length

    @property
    def height(self) -> float:
        return self.y_interval.length

    def corners(self) -> np.ndarray:
        (x0, x1), (y0, y1) = self.x_interval, self.y_interval
        return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)


# --- function catalog -------------------------------------------------------


@dataclass(frozen=True)
class Affine:
    a: float = 1.0
    b: float = 0.0
    name = "affine"


@dataclass(frozen=True)
class Takagi:
    depth: int = 52
    name = "takagi"


@dataclass(frozen=True)
class Weierstrass:
    a: float = 0.5
    b: int = 3
    depth: int = 40
    name = "weierstrass"


@dataclass(frozen=True)
class CantorLebesgue:
    depth: int = 40
    name = "cantor"


@dataclass(frozen=True)
class Custom:
    xs: tuple[float, ...]
    ys: tuple[float, ...]
    eval_error: float = 0.0
    label: str = "custom"
    name = "custom"


FunctionSpec = Union[Affine, Takagi, Weierstrass, CantorLebesgue, Custom]


def spec_params(spec: FunctionSpec) -> dict:
    if isinstance(spec, Custom):
        return {"label": spec.label, "source_points": len(spec.xs)}
    return {k: getattr(spec, k) for k in spec.__dataclass_fields__}


@dataclass
class SampledGraph:
    """Values of a function on the uniform grid ``x_i = i / n``, ``i = 0..n``."""

    xs: np.ndarray
    ys: np.ndarray
    eval_error: float = 0.0
    label: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.ys = np.asarray(self.ys, dtype=float)
        if self.xs.shape != self.ys.shape or self.xs.ndim != 1:
            raise ValueError("xs and ys must be 1-D arrays of equal length")
        if len(self.xs) < 3:
            raise ValueError("a sampled graph needs at least 3 nodes")
        if self.xs[0] != 0.0 or self.xs[-1] != 1.0:
            raise ValueError("grid must start at 0 and end at 1")
        if np.any(np.diff(self.xs) <= 0):
            raise ValueError("grid must be strictly increasing")
        if self.eval_error < 0:
            raise ValueError("eval_error must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.xs) - 1

    @property
    def h(self) -> float:
        return 1.0 / self.n

    def points(self) -> PointSet:
        return PointSet(np.column_stack([self.xs, self.ys]))

    def __call__(self, x):
        """Piecewise-linear interpolation between nodes."""
        return np.interp(x, self.xs, self.ys)

    def modulus(self) -> float:
        """Largest change of the stored values over one grid step."""
        return float(np.abs(np.diff(self.ys)).max())

    def slack(self) -> float:
        """Declared numeric slack for certificates built on this sample."""
        return 8.0 * self.eval_error + 4.0 * self.modulus()

    def to_csv(self) -> str:
        return self.points().to_csv()

    def metadata_block(self) -> str:
        lines = [f"spec = {self.label}"]
        for k, v in self.params.items():
            lines.append(f"{k} = {v}")
        lines.append(f"n = {self.n}")
        lines.append(f"eval_error = {self.eval_error:.17g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, eval_error: float = 0.0, label: str = "csv") -> "SampledGraph":
        ps = PointSet.from_csv(text)
        return cls(ps.points[:, 0], ps.points[:, 1], eval_error, label)


def parse_metadata(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"metadata line without '=': {line!r}")
        out[key.strip()] = value.strip()
    return out


def grid(n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("n must be >= 2")
    return np.arange(n + 1, dtype=float) / n


def takagi(x, depth: int = 52):
    """Partial sum ``sum_{j=0}^{depth} 2^-j dist(2^j x, Z)``."""
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for j in range(depth + 1):
        t = np.ldexp(x, j)
        total += np.ldexp(np.abs(t - np.round(t)), -j)
    return total


def takagi_tail(depth: int) -> float:
    return 2.0 ** (-depth - 1)


def weierstrass_on_grid(n: int, a: float, b: int, depth: int) -> np.ndarray:
    """``sum_{j=0}^{depth} a^j cos(b^j pi x)`` at ``x = i/n``.

    The phase ``b^j * i / n`` is reduced modulo 2 in integer arithmetic, so
    large powers of ``b`` lose no precision.
    """
    i = np.arange(n + 1, dtype=np.int64)
    period = 2 * n
    total = np.zeros(n + 1)
    for j in range(depth + 1):
        mult = pow(b, j, period)
        phase = (mult * i) % period  # mult, i < 2n so the product fits int64
        total += a**j * np.cos(np.pi * phase / n)
    return total


def weierstrass_tail(a: float, depth: int) -> float:
    return a ** (depth + 1) / (1.0 - a)


def cantor_lebesgue_on_grid(n: int, depth: int) -> tuple[np.ndarray, bool]:
    """Cantor-Lebesgue function at ``x = i/n`` by exact base-3 digit scan.

    Returns the values and whether every node terminated within ``depth``
    digits (then the values are exact).
    """
    ys = np.empty(n + 1)
    exact = True
    for i in range(n + 1):
        if i == n:
            ys[i] = 1.0
            continue
        num, val, done = i, 0.0, False
        for k in range(1, depth + 1):
            num *= 3
            digit, num = divmod(num, n)
            if digit == 1:
                val += 2.0**-k
                done = True
                break
            if digit == 2:
                val += 2.0**-k
            if num == 0:
                done = True
                break
        exact = exact and done
        ys[i] = val
    return ys, exact


def cantor_lebesgue(x, depth: int = 40):
    """Digit-scan evaluation at arbitrary floats (error <= 2^-depth)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    for idx, v in enumerate(x):
        if v >= 1.0:
            out[idx] = 1.0
            continue
        val = 0.0
        for k in range(1, depth + 1):
            v *= 3.0
            digit = int(v)
            v -= digit
            if digit == 1:
                val += 2.0**-k
                break
            if digit == 2:
                val += 2.0**-k
        out[idx] = val
    return out


def sample(spec: FunctionSpec, n: int) -> SampledGraph:
    xs = grid(n)
    rounding = 0.0
    if isinstance(spec, Affine):
        ys = spec.a * xs + spec.b
        err = 0.0
    elif isinstance(spec, Takagi):
        if spec.depth < 1:
            raise ValueError("depth must be >= 1")
        ys = takagi(xs, spec.depth)
        rounding = 4 * (spec.depth + 1) * np.finfo(float).eps
        err = takagi_tail(spec.depth) + rounding
    elif isinstance(spec, Weierstrass):
        if not 0.0 < spec.a < 1.0:
            raise ValueError("Weierstrass a must lie in (0, 1)")
        if spec.b < 1 or spec.b % 2 != 1:
            raise ValueError("Weierstrass b must be an odd natural number")
        if spec.depth < 1:
            raise ValueError("depth must be >= 1")
        ys = weierstrass_on_grid(n, spec.a, spec.b, spec.depth)
        rounding = 4 * (spec.depth + 1) * np.finfo(float).eps / (1.0 - spec.a)
        err = weierstrass_tail(spec.a, spec.depth) + rounding
    elif isinstance(spec, CantorLebesgue):
        if spec.depth < 1:
            raise ValueError("depth must be >= 1")
        ys, exact = cantor_lebesgue_on_grid(n, spec.depth)
        err = 0.0 if exact else 2.0**-spec.depth
    elif isinstance(spec, Custom):
        sx = np.asarray(spec.xs, dtype=float)
        sy = np.asarray(spec.ys, dtype=float)
        if sx.shape != sy.shape or len(sx) < 2:
            raise ValueError("custom samples need matching xs/ys with >= 2 points")
        if sx[0] > 0.0 or sx[-1] < 1.0 or np.any(np.diff(sx) <= 0):
            raise ValueError("custom xs must be increasing and span [0, 1]")
        ys = np.interp(xs, sx, sy)
        # interpolation error is bounded by the local variation between source nodes
        err = spec.eval_error + float(np.abs(np.diff(sy)).max())
    else:
        raise TypeError(f"unknown function spec {spec!r}")
    return SampledGraph(xs, ys, float(err), spec.name, spec_params(spec))


def _check_domain(I: Interval) -> Interval:
    if I.lo < -DOMAIN_TOL or I.hi > 1.0 + DOMAIN_TOL:
        raise DomainError(f"interval [{I.lo!r}, {I.hi!r}] is not inside [0, 1]")
    return Interval(min(max(I.lo, 0.0), 1.0), min(max(I.hi, 0.0), 1.0))


def _values_on(g: SampledGraph, I: Interval) -> np.ndarray:
    I = _check_domain(I)
    i0 = np.searchsorted(g.xs, I.lo, side="left")
    i1 = np.searchsorted(g.xs, I.hi, side="right")
    ends = g(np.array([I.lo, I.hi]))
    return np.concatenate([g.ys[i0:i1], ends])


def oscillation(g: SampledGraph, I: Interval) -> float:
    """``max - min`` of the sampled function over the nodes in ``I`` and its endpoints."""
    v = _values_on(g, I)
    return float(v.max() - v.min())


def framing_rectangle(g: SampledGraph, I: Interval) -> Rectangle:
    v = _values_on(g, I)
    return Rectangle(Interval(I.lo, I.hi), Interval(float(v.min()), float(v.max())))


def project_x(r: Rectangle) -> Interval:
    return r.x_interval


def line_fit(g: SampledGraph) -> tuple[float, float, float]:
    """Least-squares line ``y = a x + b``; returns ``(a, b, max |residual|)``."""
    a, b = np.polyfit(g.xs, g.ys, 1)
    resid = g.ys - (a * g.xs + b)
    return float(a), float(b), float(np.abs(resid).max())


def from_samples(xs: Sequence[float], ys: Sequence[float], n: int, eval_error: float = 0.0,
                 label: str = "custom") -> SampledGraph:
    return sample(Custom(tuple(map(float, xs)), tuple(map(float, ys)), eval_error, label), n)

