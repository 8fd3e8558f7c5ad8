"""Error-function kernels e(x, y) and their structural validation.

An error function is a nonnegative, symmetric bifunction with nonempty
domain; it is the "budget" added to the right-hand side of the convexity
inequality.  Built-in kernels:

    zero             e(x, y) = 0
    quadratic        e(x, y) = c (x - y)^2,  c > 0
    scaled_distance  e(x, y) = 2 L |x - y|,  L > 0
    exp_kernel       e(x, y) = (exp(-x) - exp(-y)) (y - x)
    product          e(x, y) = f(x) g(y) + f(y) g(x)  for convex nonneg f, g
    sampled_matrix   table lookup on a grid

Symmetry of the built-in closed forms is structural (bit-exact), not
approximate.  Note that the exp kernel, while nonnegative and symmetric,
grows without bound as |x| -> inf for fixed y; the validation report
therefore speaks about boundedness only on the supplied grid and never
extrapolates beyond it.

Runtime wrappers `scale_error` and `add_errors` produce derived kernels
(used e.g. for doubled budgets); they evaluate like any other kernel but
have no serialized form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .extreal import INF, sub_ext_array
from .funcmodel import AnyFunction, ClosedFormFunction, Grid, SampledFunction, make_uniform_grid

__all__ = [
    "ErrorFunction",
    "ZeroError",
    "QuadraticError",
    "ScaledDistanceError",
    "ExpError",
    "ProductError",
    "SampledMatrixError",
    "ScaledError",
    "SumError",
    "ErrorValidationReport",
    "zero_error",
    "quadratic_error",
    "lipschitz_error",
    "exp_error",
    "product_error",
    "sampled_matrix_error",
    "scale_error",
    "add_errors",
    "eval_error",
    "validate_error",
]

_TRIANGLE_EXHAUSTIVE_CAP = 200
_TRIANGLE_SAMPLES = 200_000
_TRIANGLE_SEED = 0


class ErrorFunction:
    """Base class for kernels; subclasses implement vectorized `evaluate`."""

    kind: str = "abstract"

    def evaluate(self, x, y):
        raise NotImplementedError

    def __call__(self, x, y):
        return self.evaluate(x, y)


def _node_indices(grid: Grid, xs: np.ndarray) -> np.ndarray:
    """Vectorized exact node lookup; raises on any off-grid point."""
    xs = np.asarray(xs, dtype=float)
    idx = np.clip(np.searchsorted(grid.points, xs), 0, len(grid) - 1)
    left = np.clip(idx - 1, 0, len(grid) - 1)
    use_left = np.abs(grid.points[left] - xs) < np.abs(grid.points[idx] - xs)
    idx = np.where(use_left, left, idx)
    scale = grid.step if grid.step is not None else float(np.max(np.diff(grid.points)))
    if np.any(np.abs(grid.points[idx] - xs) > 1e-12 * max(1.0, abs(scale))):
        raise ValueError("off-grid evaluation: point not on the sampled grid")
    return idx


def _values_at(func: AnyFunction, xs: np.ndarray) -> np.ndarray:
    """Function values at xs; sampled functions require exact node hits."""
    xs = np.asarray(xs, dtype=float)
    if isinstance(func, ClosedFormFunction):
        return func.eval_many(xs)
    return func.values[_node_indices(func.grid, xs)]


@dataclass(frozen=True)
class ZeroError(ErrorFunction):
    kind: str = "zero"

    def evaluate(self, x, y):
        return np.zeros(np.broadcast(np.asarray(x, dtype=float), np.asarray(y, dtype=float)).shape)


@dataclass(frozen=True)
class QuadraticError(ErrorFunction):
    scale: float = 1.0
    kind: str = "quadratic"

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("invalid constant: quadratic kernel needs scale > 0")

    def evaluate(self, x, y):
        d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return self.scale * (d * d)


@dataclass(frozen=True)
class ScaledDistanceError(ErrorFunction):
    L: float = 1.0
    kind: str = "scaled_distance"

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("invalid constant: scaled_distance kernel needs L > 0")

    def evaluate(self, x, y):
        return 2.0 * self.L * np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))


@dataclass(frozen=True)
class ExpError(ErrorFunction):
    kind: str = "exp_kernel"

    def evaluate(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return (np.exp(-x) - np.exp(-y)) * (y - x)


@dataclass(frozen=True)
class ProductError(ErrorFunction):
    f: AnyFunction = None
    g: AnyFunction = None
    kind: str = "product"

    def evaluate(self, x, y):
        fx, fy = _values_at(self.f, x), _values_at(self.f, y)
        gx, gy = _values_at(self.g, x), _values_at(self.g, y)
        return fx * gy + fy * gx


@dataclass(frozen=True)
class SampledMatrixError(ErrorFunction):
    grid: Grid = None
    matrix: np.ndarray = None
    kind: str = "sampled_matrix"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if np.isnan(m).any():
            raise ValueError("NaN is not an extended real")
        n = len(self.grid)
        if m.shape != (n, n):
            raise ValueError("sampled_matrix values must be n x n for an n-node grid")
        object.__setattr__(self, "matrix", m)

    def evaluate(self, x, y):
        bx, by = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        xi = _node_indices(self.grid, bx.ravel())
        yi = _node_indices(self.grid, by.ravel())
        return self.matrix[xi, yi].reshape(bx.shape)


@dataclass(frozen=True)
class ScaledError(ErrorFunction):
    base: ErrorFunction = None
    factor: float = 1.0
    kind: str = "scaled"

    def __post_init__(self):
        if not self.factor > 0:
            raise ValueError("invalid constant: scale factor must be positive")

    def evaluate(self, x, y):
        return self.factor * np.asarray(self.base.evaluate(x, y), dtype=float)


@dataclass(frozen=True)
class SumError(ErrorFunction):
    left: ErrorFunction = None
    right: ErrorFunction = None
    kind: str = "sum"

    def evaluate(self, x, y):
        from .extreal import add_ext_array

        return add_ext_array(self.left.evaluate(x, y), self.right.evaluate(x, y))


def zero_error() -> ErrorFunction:
    return ZeroError()


def quadratic_error(scale: float) -> ErrorFunction:
    return QuadraticError(scale=float(scale))


def lipschitz_error(L: float) -> ErrorFunction:
    """Budget 2 L |x - y| certifying every L-Lipschitz function."""
    if not L > 0:
        raise ValueError("invalid constant: Lipschitz kernel needs L > 0")
    return ScaledDistanceError(L=float(L))


def exp_error() -> ErrorFunction:
    return ExpError()


def sampled_matrix_error(grid: Grid, matrix) -> ErrorFunction:
    return SampledMatrixError(grid=grid, matrix=matrix)


def scale_error(e: ErrorFunction, factor: float) -> ErrorFunction:
    """Pointwise positive rescaling of a kernel (no serialized form)."""
    return ScaledError(base=e, factor=float(factor))


def add_errors(e1: ErrorFunction, e2: ErrorFunction) -> ErrorFunction:
    """Pointwise sum of two kernels (no serialized form)."""
    return SumError(left=e1, right=e2)


def eval_error(e: ErrorFunction, x, y):
    """Kernel value at (x, y); scalar in, scalar out."""
    out = e.evaluate(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return float(np.asarray(out).reshape(-1)[0])
    return out


def _check_convex_nonneg(func: AnyFunction, grid: Grid) -> Optional[str]:
    """Midpoint-convexity and nonnegativity check; returns a reason on failure."""
    if isinstance(func, ClosedFormFunction):
        probe = make_uniform_grid(grid.a, grid.b, 1001)
        vals = func.eval_many(probe.points)
    else:
        if not np.array_equal(func.grid.points, grid.points):
            return "sampled function not given on the validation grid"
        if not grid.uniform:
            return "grid not uniform"
        vals = func.values
    finite = np.isfinite(vals)
    if np.any(vals[finite] < -1e-12):
        i = int(np.argmin(np.where(finite, vals, INF)))
        return f"negative value {vals[i]!r} at node index {i}"
    n = vals.size
    for d in range(1, (n - 1) // 2 + 1):
        left, mid, right = vals[: n - 2 * d], vals[d : n - d], vals[2 * d :]
        # midpoint triple (i, i+d, i+2d): f(mid) <= (f(left)+f(right))/2
        gap = sub_ext_array(mid, 0.5 * (left + right))
        bad = np.flatnonzero(gap > 1e-9)
        if bad.size:
            i = int(bad[0])
            return f"midpoint convexity fails on triple (indices {i}, {i + d}, {i + 2 * d})"
    return None


def product_error(f: AnyFunction, g: AnyFunction, grid: Grid) -> ErrorFunction:
    """Kernel f(x)g(y) + f(y)g(x) for convex nonnegative f, g on the grid."""
    for name, func in (("f", f), ("g", g)):
        reason = _check_convex_nonneg(func, grid)
        if reason is not None:
            raise ValueError(f"product precondition violated ({name}): {reason}")
    fv = _values_at(f, grid.points)
    gv = _values_at(g, grid.points)
    if not np.any(np.isfinite(fv) & np.isfinite(gv)):
        raise ValueError("product precondition violated: empty common domain")
    return ProductError(f=f, g=g)


@dataclass(frozen=True)
class ErrorValidationReport:
    """Exhaustive grid validation of a kernel's structural properties.

    All flags are deterministic functions of (kernel, grid).  `k_values[j]`
    is the grid maximum of e(., y_j); `bounded_flag` says whether every
    k value is finite -- a statement about the grid only.
    """

    symmetric_ok: bool
    worst_asymmetry: float
    nonneg_ok: bool
    worst_negative: float
    nonneg_witness: Optional[Tuple[float, float]]
    zero_diag_ok: bool
    worst_diag: float
    triangle_ok: bool
    worst_triangle_violation: float
    triangle_witness: Optional[Tuple[float, float, float]]
    triangle_mode: str
    k_values: np.ndarray
    bounded_flag: bool


def pairwise_matrix(e: ErrorFunction, grid: Grid) -> np.ndarray:
    """Full pairwise kernel matrix E[i, j] = e(x_i, x_j)."""
    x = grid.points
    return np.asarray(e.evaluate(x[:, None], x[None, :]), dtype=float)


def validate_error(e: ErrorFunction, grid: Grid) -> ErrorValidationReport:
    """Check symmetry, nonnegativity, zero diagonal, and the triangle property.

    Triangle validation is O(n^3) and runs exhaustively up to 200 nodes;
    larger grids fall back to seeded random triple subsampling, which is
    sound for falsification and labeled "sampled" when it confirms.
    """
    E = pairwise_matrix(e, grid)
    x = grid.points
    n = len(grid)

    with np.errstate(invalid="ignore"):
        asym = np.abs(E - E.T)
    asym[np.isinf(E) & np.isinf(E.T)] = 0.0
    worst_asym = float(np.max(asym))
    symmetric_ok = worst_asym == 0.0

    finite = np.isfinite(E)
    worst_neg = float(np.min(np.where(finite, E, INF))) if finite.any() else INF
    nonneg_ok = worst_neg >= 0.0
    witness = None
    if not nonneg_ok:
        i, j = np.unravel_index(int(np.argmin(np.where(finite, E, INF))), E.shape)
        witness = (float(x[i]), float(x[j]))
    worst_neg = min(worst_neg, 0.0) if nonneg_ok else worst_neg

    diag = np.abs(np.diag(E))
    worst_diag = float(np.max(diag[np.isfinite(diag)])) if np.isfinite(diag).any() else INF
    zero_diag_ok = worst_diag == 0.0

    if n <= _TRIANGLE_EXHAUSTIVE_CAP:
        mode = "exhaustive"
        worst_tri = -INF
        tri_witness = None
        for j in range(n):
            # violation(z=i, y=j, x=k) = E[i,k] - E[i,j] - E[j,k], extended chain
            viol = sub_ext_array(sub_ext_array(E, E[:, j][:, None]), E[j, :][None, :])
            v = float(np.max(viol))
            if v > worst_tri:
                worst_tri = v
                i, k = np.unravel_index(int(np.argmax(viol)), viol.shape)
                tri_witness = (float(x[i]), float(x[j]), float(x[k]))
    else:
        mode = f"sampled(seed={_TRIANGLE_SEED})"
        rng = np.random.default_rng(_TRIANGLE_SEED)
        ii = rng.integers(0, n, _TRIANGLE_SAMPLES)
        jj = rng.integers(0, n, _TRIANGLE_SAMPLES)
        kk = rng.integers(0, n, _TRIANGLE_SAMPLES)
        viol = sub_ext_array(sub_ext_array(E[ii, kk], E[ii, jj]), E[jj, kk])
        t = int(np.argmax(viol))
        worst_tri = float(viol[t])
        tri_witness = (float(x[ii[t]]), float(x[jj[t]]), float(x[kk[t]]))
    triangle_ok = worst_tri <= 1e-12

    k_values = np.max(E, axis=0)
    bounded = bool(np.all(np.isfinite(k_values)))

    return ErrorValidationReport(
        symmetric_ok=symmetric_ok,
        worst_asymmetry=worst_asym,
        nonneg_ok=nonneg_ok,
        worst_negative=worst_neg,
        nonneg_witness=witness,
        zero_diag_ok=zero_diag_ok,
        worst_diag=worst_diag,
        triangle_ok=bool(triangle_ok),
        worst_triangle_violation=worst_tri,
        triangle_witness=tri_witness,
        triangle_mode=mode,
        k_values=k_values,
        bounded_flag=bounded,
    )


def k_value(e: ErrorFunction, grid: Grid, y: float) -> float:
    """Grid maximum of e(., y) for an arbitrary anchor y."""
    return float(np.max(e.evaluate(grid.points, float(y))))
