"""Anchored conjugate transforms, infimal convolution, affine minorants.

The anchored conjugate of f with budget kernel e and anchor y is

    F(s) = max over grid nodes x of  s*x - f(x) - e(x, y),

i.e. the classical discrete Legendre transform of g = f + e(., y).  Two
implementations are provided: an O(n*m) brute-force maximization (the
oracle) and an O(n + m) method that builds the lower convex hull of the
finite points of g and merges hull edge slopes against the sorted dual
slopes.  Both evaluate the identical expression s*x - g(x) per candidate
node, with g precomputed once under the extended-real addition rule, so
their outputs agree to floating-point noise on any input.

The anchored biconjugate applies the *classical* conjugate to the
conjugate table; the budget kernel enters only the first transform.

Hull ties are pinned for determinism: collinear middle points are
dropped (the earlier vertex starts the edge), and a dual slope equal to
an edge slope reads the leftmost maximizing vertex.  Both choices yield
equal conjugate values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .extreal import INF, NEG_INF, add_ext_array
from .funcmodel import Grid, SampledFunction, make_uniform_grid, validate_proper
from .errorfn import ErrorFunction

__all__ = [
    "ConjugateTable",
    "anchored_values",
    "default_dual_grid",
    "e_conjugate_brute",
    "e_conjugate_fast",
    "e_conjugate_at",
    "e_biconjugate",
    "inf_convolution",
    "affine_minorant",
]


@dataclass(frozen=True)
class ConjugateTable:
    """Conjugate values on a dual grid of slopes, with provenance."""

    dual_grid: Grid
    values: np.ndarray
    anchor_y: float
    algorithm: str
    primal_grid: Grid

    @property
    def improper(self) -> bool:
        """True iff no primal node had a finite value of f + e(., y)."""
        return bool(np.all(self.values == NEG_INF))

    def as_sampled(self) -> SampledFunction:
        """The table viewed as a sampled function of the slope (proper tables only)."""
        if self.improper:
            raise ValueError("improper conjugate")
        return SampledFunction(grid=self.dual_grid, values=self.values)


def anchored_values(f: SampledFunction, e: ErrorFunction, y: float) -> np.ndarray:
    """g = f + e(., y) on the primal grid, under the extended addition rule."""
    ev = np.asarray(e.evaluate(f.grid.points, float(y)), dtype=float)
    return add_ext_array(f.values, ev)


def _brute_core(x: np.ndarray, g: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """max_i (s*x_i - g_i) for every s, restricted to finite g; -inf if none."""
    finite = np.isfinite(g)
    if not finite.any():
        return np.full(slopes.shape, NEG_INF)
    xf = x[finite]
    gf = g[finite]
    out = np.empty(slopes.shape, dtype=float)
    # chunk the outer product to bound memory at large n*m
    chunk = max(1, int(4_000_000 // max(1, xf.size)))
    for lo in range(0, slopes.size, chunk):
        s = slopes[lo : lo + chunk]
        out[lo : lo + chunk] = np.max(s[:, None] * xf[None, :] - gf[None, :], axis=1)
    return out


def _lower_hull(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Indices (into x) of the lower convex hull of the finite points of g.

    Single monotone sweep; x must be strictly increasing.  Collinear middle
    points are popped so edge slopes come out strictly increasing.
    """
    finite = np.flatnonzero(np.isfinite(g))
    xs = x[finite]
    gs = g[finite]
    stack: List[int] = []
    for i in range(xs.size):
        xi = xs[i]
        gi = gs[i]
        while len(stack) >= 2:
            j = stack[-1]
            k = stack[-2]
            # pop the middle point when it lies on or above the chord
            if (xs[j] - xs[k]) * (gi - gs[k]) - (xi - xs[k]) * (gs[j] - gs[k]) <= 0.0:
                stack.pop()
            else:
                break
        stack.append(i)
    return finite[np.asarray(stack, dtype=int)]


def _fast_core(x: np.ndarray, g: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """Hull-based evaluation of max_i (s*x_i - g_i); slopes must be sorted."""
    hull = _lower_hull(x, g)
    if hull.size == 0:
        return np.full(slopes.shape, NEG_INF)
    hx = x[hull]
    hg = g[hull]
    if hull.size == 1:
        return slopes * hx[0] - hg[0]
    edge_slopes = np.diff(hg) / np.diff(hx)
    # for s strictly between edge slopes k and k+1 the argmax is vertex k;
    # an exact tie with an edge slope reads the left endpoint
    vertex = np.searchsorted(edge_slopes, slopes, side="left")
    return slopes * hx[vertex] - hg[vertex]


def _require_proper(f: SampledFunction) -> None:
    if not validate_proper(f):
        raise ValueError("improper primal")


def default_dual_grid(f: SampledFunction, e: ErrorFunction, y: float, m: int | None = None) -> Grid:
    """Dual grid spanning the finite-difference slopes of f + e(., y), padded 10%.

    This captures every active slope of the discrete data; m defaults to
    one more than the primal node count.
    """
    g = anchored_values(f, e, y)
    x = f.grid.points
    finite = np.isfinite(g)
    xf = x[finite]
    gf = g[finite]
    if xf.size >= 2:
        slopes = np.diff(gf) / np.diff(xf)
        lo = float(np.min(slopes))
        hi = float(np.max(slopes))
    else:
        lo, hi = -1.0, 1.0
    width = hi - lo
    pad = 0.1 * width if width > 1e-9 else 1.0
    if m is None:
        m = len(f.grid) + 1
    return make_uniform_grid(lo - pad, hi + pad, m)


def e_conjugate_brute(f: SampledFunction, e: ErrorFunction, y: float, dual_grid: Grid) -> ConjugateTable:
    """Oracle conjugate: exhaustive maximization over every primal node."""
    _require_proper(f)
    g = anchored_values(f, e, y)
    values = _brute_core(f.grid.points, g, dual_grid.points)
    return ConjugateTable(dual_grid=dual_grid, values=values, anchor_y=float(y),
                          algorithm="brute", primal_grid=f.grid)


def e_conjugate_fast(f: SampledFunction, e: ErrorFunction, y: float, dual_grid: Grid) -> ConjugateTable:
    """Hull-based conjugate; identical to the brute oracle within 1e-12."""
    _require_proper(f)
    g = anchored_values(f, e, y)
    values = _fast_core(f.grid.points, g, dual_grid.points)
    return ConjugateTable(dual_grid=dual_grid, values=values, anchor_y=float(y),
                          algorithm="fast", primal_grid=f.grid)


def e_conjugate_at(f: SampledFunction, e: ErrorFunction, y: float, slopes) -> np.ndarray | float:
    """Conjugate value at arbitrary slopes (not snapped to any dual grid)."""
    _require_proper(f)
    g = anchored_values(f, e, y)
    s = np.atleast_1d(np.asarray(slopes, dtype=float))
    out = _brute_core(f.grid.points, g, s)
    return float(out[0]) if np.ndim(slopes) == 0 else out


def e_biconjugate(f: SampledFunction, e: ErrorFunction, y: float, dual_grid: Grid,
                  out_grid: Grid, algorithm: str = "fast") -> SampledFunction:
    """Classical conjugate of the anchored-conjugate table, on out_grid nodes."""
    if algorithm == "brute":
        table = e_conjugate_brute(f, e, y, dual_grid)
        core = _brute_core
    elif algorithm == "fast":
        table = e_conjugate_fast(f, e, y, dual_grid)
        core = _fast_core
    else:
        raise ValueError(f"unknown algorithm: {algorithm!r}")
    if table.improper:
        raise ValueError("improper conjugate")
    values = core(dual_grid.points, table.values, out_grid.points)
    return SampledFunction(grid=out_grid, values=values)


def biconjugate_of_table(table: ConjugateTable, out_grid: Grid) -> SampledFunction:
    """Classical conjugate of an existing table, on out_grid nodes."""
    if table.improper:
        raise ValueError("improper conjugate")
    values = _fast_core(table.dual_grid.points, table.values, out_grid.points)
    return SampledFunction(grid=out_grid, values=values)


def inf_convolution(f: SampledFunction, g: SampledFunction, out_grid: Grid) -> SampledFunction:
    """min over splits x = x1 + x2 (x1 on f's grid, x2 on g's) of f(x1) + g(x2).

    A split counts when x - x1 matches a node of g within 1e-9.  Out nodes
    admitting no representable split get the value +inf (not an error).
    """
    for h in (f, g):
        if not validate_proper(h):
            raise ValueError("improper input")
    xf = f.grid.points[f.finite_mask]
    vf = f.values[f.finite_mask]
    xg = g.grid.points
    vg = g.values
    out = np.full(out_grid.points.shape, INF)
    for i, xout in enumerate(out_grid.points):
        x2 = xout - xf
        idx = np.clip(np.searchsorted(xg, x2), 0, xg.size - 1)
        left = np.clip(idx - 1, 0, xg.size - 1)
        idx = np.where(np.abs(xg[left] - x2) < np.abs(xg[idx] - x2), left, idx)
        ok = np.abs(xg[idx] - x2) <= 1e-9
        if ok.any():
            out[i] = float(np.min(vf[ok] + vg[idx[ok]]))
    return SampledFunction(grid=out_grid, values=out)


def affine_minorant(f: SampledFunction, e: ErrorFunction, y: float,
                    dual_grid: Grid | None = None) -> Tuple[float, float]:
    """(slope, intercept) with slope*x + intercept <= f(x) + e(x, y) at every node.

    The slope is the dual node minimizing the conjugate table; the bound is
    the defining inequality of the transform, so it is grid-exact up to
    floating-point rounding.
    """
    _require_proper(f)
    if dual_grid is None:
        dual_grid = default_dual_grid(f, e, y)
    table = e_conjugate_brute(f, e, y, dual_grid)
    if table.improper:
        raise ValueError("no affine minorant on this dual grid")
    j = int(np.argmin(table.values))
    s0 = float(dual_grid.points[j])
    return s0, -float(table.values[j])
