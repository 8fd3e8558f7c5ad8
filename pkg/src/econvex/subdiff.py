"""Budgeted subdifferentials, upper Dini derivatives, and operator monotonicity.

The budgeted subdifferential of f at a grid node x collects every slope
s with

    s * (y - x) <= f(y) - f(x) + e(x, y)    for every grid node y.

In one dimension this is a closed (possibly empty, possibly unbounded)
interval obtained from one-sided difference quotients.  The doubled
budget variant is obtained by passing a kernel scaled by 2; no separate
type exists for it.

An n-dimensional point-cloud membership oracle is also provided: it
checks the defining inequality over a finite cloud via dot products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .extreal import INF, NEG_INF, add_ext_array
from .funcmodel import AnyFunction, ClosedFormFunction, SampledFunction
from .errorfn import ErrorFunction
from .reporting import ViolationReport

__all__ = [
    "SubdiffInterval",
    "DiniEstimate",
    "OperatorSample",
    "e_subdiff_interval",
    "e_subdiff_membership",
    "dini_upper",
    "check_e_monotone",
]

_T_SCHEDULE = 1e-2 * np.power(2.0, -np.arange(21))
_TAIL = 5


@dataclass(frozen=True)
class SubdiffInterval:
    """The 1-D budgeted subdifferential as a closed interval."""

    lower: float
    upper: float
    empty: bool

    def contains(self, s: float, tol: float = 0.0) -> bool:
        if self.empty:
            return False
        return self.lower - tol <= s <= self.upper + tol

    def to_dict(self) -> dict:
        from .extreal import ext_to_json

        return {"lower": ext_to_json(self.lower), "upper": ext_to_json(self.upper), "empty": self.empty}


def e_subdiff_interval(f: SampledFunction, e: ErrorFunction, x: float) -> SubdiffInterval:
    """Interval of slopes satisfying the defining inequality at grid node x.

    Bounds come from one-sided difference quotients of f(y) - f(x) + e(x, y):
    the minimum over y > x gives the upper bound, the maximum over y < x the
    lower bound.  A node with f(x) = +inf has an empty subdifferential (by
    definition, not an error); a side with no finite constraints contributes
    an infinite bound.
    """
    i = f.grid.node_index(float(x))
    fx = float(f.values[i])
    if not math.isfinite(fx):
        return SubdiffInterval(lower=INF, upper=NEG_INF, empty=True)
    pts = f.grid.points
    rhs = add_ext_array(f.values - fx, np.asarray(e.evaluate(pts, float(x)), dtype=float))
    dx = pts - pts[i]
    with np.errstate(invalid="ignore"):
        quotients = rhs / dx
    upper = float(np.min(quotients[dx > 0], initial=INF))
    lower = float(np.max(quotients[dx < 0], initial=NEG_INF))
    return SubdiffInterval(lower=lower, upper=upper, empty=bool(lower > upper))


def e_subdiff_membership(points, f_values, e_matrix, x, xstar, tol: float = 0.0) -> bool:
    """Membership oracle on a finite point cloud, any dimension.

    `points` is (N, d) (or (N,) in 1-D), `f_values` the matching extended
    values, and `e_matrix` the (N, N) pairwise kernel table.  Checks
    <y - x, xstar> <= f(y) - f(x) + e(x, y) + tol for every cloud point y.
    The base point x must be one of the sample points with finite value.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    vals = np.asarray(f_values, dtype=float)
    E = np.asarray(e_matrix, dtype=float)
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    sv = np.atleast_1d(np.asarray(xstar, dtype=float))
    matches = np.flatnonzero(np.all(np.abs(pts - xv[None, :]) <= 1e-12, axis=1))
    if matches.size == 0:
        raise ValueError("unknown base point")
    i = int(matches[0])
    fx = float(vals[i])
    if not math.isfinite(fx):
        return False
    lhs = (pts - xv[None, :]) @ sv
    rhs = add_ext_array(vals - fx, E[i, :])
    return bool(np.all(lhs <= rhs + tol))


@dataclass(frozen=True)
class DiniEstimate:
    """limsup estimate of forward difference quotients on a geometric schedule."""

    value: float
    quotients: Tuple[Tuple[float, float], ...]
    converged: bool


def dini_upper(f: AnyFunction, x: float, u: float) -> DiniEstimate:
    """Upper Dini directional derivative estimate at x in direction u.

    Quotients (f(x + t*u) - f(x)) / t are taken for t = 1e-2 * 2^-k,
    k = 0..20; the estimate is the max of the last five (a limsup
    surrogate) and `converged` records whether their spread is <= 1e-6.
    Off the effective domain the value is -inf exactly.  If the whole
    t-schedule leaves the domain the direction is an error.  Sampled
    functions work only when every probe lands on a node.
    """
    fx = f.eval_at(float(x))
    if not math.isfinite(fx):
        return DiniEstimate(value=NEG_INF, quotients=(), converged=True)
    ts = _T_SCHEDULE
    xs = float(x) + ts * float(u)
    if isinstance(f, ClosedFormFunction):
        fvals = f.eval_many(xs)
    else:
        fvals = np.array([f.eval_at(float(v)) for v in xs])
    if not np.isfinite(fvals).any():
        raise ValueError("direction exits domain")
    quotients = (fvals - fx) / ts
    tail = quotients[-_TAIL:]
    finite_tail = tail[np.isfinite(tail)]
    spread = float(np.max(tail) - np.min(tail)) if finite_tail.size == tail.size else INF
    return DiniEstimate(
        value=float(np.max(tail)),
        quotients=tuple((float(t), float(q)) for t, q in zip(ts, quotients)),
        converged=bool(spread <= 1e-6),
    )


@dataclass(frozen=True)
class OperatorSample:
    """Finite sample of an operator graph: points x with dual values x*."""

    points: np.ndarray
    duals: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        ds = np.asarray(self.duals, dtype=float)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "duals", ds)
        if pts.shape != ds.shape or pts.ndim != 1:
            raise ValueError("operator sample needs matching 1-D points and duals")
        if np.unique(pts).size != pts.size:
            raise ValueError("operator sample points must be distinct")


def check_e_monotone(T: OperatorSample, e: ErrorFunction, factor: float) -> ViolationReport:
    """Worst violation of <x - y, x* - y*> >= -factor * e(x, y) over all pairs.

    The violation at a pair is -factor*e(x,y) - <x-y, x*-y*>; the check
    passes when the worst violation is <= 1e-9.  Ties resolve to the
    lowest pair index for a deterministic witness.
    """
    if not factor > 0:
        raise ValueError("invalid constant: factor must be positive")
    x = T.points
    s = T.duals
    dx = x[:, None] - x[None, :]
    ds = s[:, None] - s[None, :]
    E = np.asarray(e.evaluate(x[:, None], x[None, :]), dtype=float)
    viol = -factor * E - dx * ds
    viol[np.isnan(viol)] = NEG_INF  # -factor*inf pairs are vacuous
    iu = np.triu_indices(x.size, k=1)
    flat = viol[iu]
    if flat.size == 0:
        return ViolationReport(max_violation=NEG_INF, witness=None, checked_count=0, tolerance=1e-9)
    k = int(np.argmax(flat))
    return ViolationReport(
        max_violation=float(flat[k]),
        witness=(float(x[iu[0][k]]), float(x[iu[1][k]])),
        checked_count=int(flat.size),
        mode="exhaustive",
        tolerance=1e-9,
    )
