"""Grids, sampled functions, and the closed-form fixture registry.

Candidate functions f: R -> R ∪ {+inf} come in two shapes: sampled on a
strictly increasing grid, or closed-form fixtures from a small named
registry.  Sampled functions are never interpolated: every evaluation
must land on a grid node, and every check that needs f at a convex
combination either uses a closed form or restricts combinations so they
land exactly on nodes.  Interpolation would silently convexify the data
and corrupt counterexamples.

-inf never appears among values; properness (at least one finite value)
is validated, not enforced at construction, because improper samples are
legitimate inputs to `validate_proper` and error paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Union

import numpy as np

from .extreal import INF, as_extreal_array

__all__ = [
    "Grid",
    "SampledFunction",
    "ClosedFormFunction",
    "FIXTURES",
    "make_uniform_grid",
    "sample",
    "evaluate",
    "validate_proper",
]

_UNIFORM_RTOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Strictly increasing finite 1-D grid; uniform grids carry a step."""

    points: np.ndarray
    uniform: bool
    step: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("degenerate grid: need at least 2 points")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("degenerate grid: points must be strictly increasing")
        if self.uniform:
            if self.step is None:
                raise ValueError("uniform grid requires a step")
            gaps = np.diff(pts)
            tol = _UNIFORM_RTOL * max(1.0, abs(self.step))
            if np.max(np.abs(gaps - self.step)) > tol:
                raise ValueError("degenerate grid: gaps do not match declared step")

    @classmethod
    def from_points(cls, points) -> "Grid":
        """Build a grid from raw points, detecting uniformity."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("degenerate grid: need at least 2 points")
        gaps = np.diff(pts)
        if not np.all(gaps > 0):
            raise ValueError("degenerate grid: points must be strictly increasing")
        step = float(np.mean(gaps))
        uniform = bool(np.max(np.abs(gaps - step)) <= _UNIFORM_RTOL * max(1.0, abs(step)))
        return cls(points=pts, uniform=uniform, step=step if uniform else None)

    def __len__(self) -> int:
        return int(self.points.size)

    @property
    def a(self) -> float:
        return float(self.points[0])

    @property
    def b(self) -> float:
        return float(self.points[-1])

    def node_index(self, x: float) -> int:
        """Index of the node matching x, or raise on an off-grid query."""
        i = int(np.argmin(np.abs(self.points - x)))
        scale = self.step if self.step is not None else float(np.max(np.diff(self.points)))
        if abs(float(self.points[i]) - x) > 1e-12 * max(1.0, abs(scale)):
            raise ValueError(f"off-grid evaluation: x={x!r} is not a grid node")
        return i

    def nearest_index(self, x: float) -> int:
        return int(np.argmin(np.abs(self.points - x)))


def make_uniform_grid(a: float, b: float, n: int) -> Grid:
    """Uniform grid of n nodes from a to b inclusive."""
    if n < 2 or not (a < b):
        raise ValueError("degenerate grid: need a < b and n >= 2")
    pts = np.linspace(a, b, int(n))
    return Grid(points=pts, uniform=True, step=(b - a) / (n - 1))


@dataclass(frozen=True)
class SampledFunction:
    """A grid plus values in R ∪ {+inf} (-inf and NaN are rejected)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = as_extreal_array(self.values)
        object.__setattr__(self, "values", vals)
        if vals.shape != self.grid.points.shape:
            raise ValueError("values must match the grid length")
        if np.any(vals == -INF):
            raise ValueError("-inf is not allowed among sampled values")

    def eval_at(self, x: float) -> float:
        """Exact node lookup; off-grid queries are an error, never interpolated."""
        return float(self.values[self.grid.node_index(x)])

    @property
    def finite_mask(self) -> np.ndarray:
        return np.isfinite(self.values)

    def domain_contiguous(self) -> bool:
        """True iff the finite nodes form one contiguous index range."""
        idx = np.flatnonzero(self.finite_mask)
        if idx.size == 0:
            return False
        return bool(idx[-1] - idx[0] + 1 == idx.size)


def _quad_factory(params: Mapping[str, float]) -> Callable[[np.ndarray], np.ndarray]:
    a = float(params.get("a", 1.0))
    b = float(params.get("b", 0.0))
    c = float(params.get("c", 0.0))
    return lambda x: 0.5 * a * x * x + b * x + c


def _indicator_factory(params: Mapping[str, float]) -> Callable[[np.ndarray], np.ndarray]:
    x0 = float(params.get("x0", 0.0))

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where(x == x0, 0.0, INF)

    return f


# name -> factory(params) -> vectorized callable
FIXTURES: Dict[str, Callable[[Mapping[str, float]], Callable[[np.ndarray], np.ndarray]]] = {
    "neg_square": lambda p: (lambda x: -np.square(np.asarray(x, dtype=float))),
    "x_exp_neg": lambda p: (lambda x: np.asarray(x, dtype=float) * np.exp(-np.asarray(x, dtype=float))),
    "quad": _quad_factory,
    "abs": lambda p: (lambda x: np.abs(np.asarray(x, dtype=float))),
    "quartic_well": lambda p: (lambda x: np.power(np.asarray(x, dtype=float), 4) - np.square(np.asarray(x, dtype=float))),
    "sine": lambda p: (lambda x: np.sin(np.asarray(x, dtype=float))),
    "indicator_point": _indicator_factory,
}


@dataclass(frozen=True)
class ClosedFormFunction:
    """A named fixture from the registry with its parameters."""

    name: str
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in FIXTURES:
            raise ValueError(f"unknown fixture: {self.name!r}")
        object.__setattr__(self, "params", dict(self.params))

    @property
    def fn(self) -> Callable[[np.ndarray], np.ndarray]:
        return FIXTURES[self.name](self.params)

    def eval_at(self, x: float) -> float:
        return float(self.fn(np.asarray(x, dtype=float)))

    def eval_many(self, xs) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(xs, dtype=float)), dtype=float)


AnyFunction = Union[SampledFunction, ClosedFormFunction]


def sample(cf: ClosedFormFunction, grid: Grid) -> SampledFunction:
    """Sample a registry fixture on a grid.

    Indicator fixtures place their single support on the grid node nearest
    x0, provided x0 lies within half a boundary gap of the grid span;
    otherwise every value is +inf (an improper sample).
    """
    if cf.name == "indicator_point":
        x0 = float(cf.params.get("x0", 0.0))
        pts = grid.points
        lo = pts[0] - 0.5 * (pts[1] - pts[0])
        hi = pts[-1] + 0.5 * (pts[-1] - pts[-2])
        vals = np.full(pts.shape, INF)
        if lo <= x0 <= hi:
            vals[grid.nearest_index(x0)] = 0.0
        return SampledFunction(grid=grid, values=vals)
    return SampledFunction(grid=grid, values=cf.eval_many(grid.points))


def evaluate(f: AnyFunction, x: float) -> float:
    """Evaluate either function shape at a point (exact node lookup for samples)."""
    return f.eval_at(float(x))


def validate_proper(f: SampledFunction) -> bool:
    """True iff at least one value is finite (nonempty effective domain)."""
    return bool(np.isfinite(f.values).any())
