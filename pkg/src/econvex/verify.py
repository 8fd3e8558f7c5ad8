"""Machine checks for the budgeted-convexity inequalities and identities.

Every operation evaluates one stated inequality (or equivalence) over a
deterministic probe set and reports the worst violation with a witness
that reproduces it.  Probe sets are exhaustive over node triples up to
300 nodes and switch to seeded random sampling (at least 1e5 probes)
above that; sampling can falsify soundly and is labeled in the report
when it confirms.

Tolerance ladder used throughout: structural identities at 1e-12,
inequality checks at 1e-9, Dini-based checks at 1e-6.  The ladder
separates floating-point noise from discretization error from
limit-estimation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .extreal import INF, NEG_INF, add_ext, add_ext_array, sub_ext, sub_ext_array
from .funcmodel import (
    AnyFunction,
    ClosedFormFunction,
    Grid,
    SampledFunction,
    sample,
    validate_proper,
)
from .errorfn import (
    ErrorFunction,
    QuadraticError,
    ScaledDistanceError,
    ZeroError,
    eval_error,
    pairwise_matrix,
    scale_error,
    add_errors,
    validate_error,
    k_value,
)
from .transform import (
    ConjugateTable,
    anchored_values,
    biconjugate_of_table,
    default_dual_grid,
    e_biconjugate,
    e_conjugate_at,
    e_conjugate_brute,
)
from .subdiff import SubdiffInterval, e_subdiff_interval, e_subdiff_membership
from .reporting import PropertyRecord, ViolationReport

__all__ = [
    "check_e_convex_def",
    "check_char_slopes",
    "econvex_violation_at",
    "fenchel_young_gap",
    "ThreeWayResult",
    "check_three_way_equivalence",
    "check_conjugate_properties",
    "StabilityReport",
    "check_conjugate_stability",
    "MinCertificate",
    "certify_global_min",
    "certify_local_min",
    "check_subdiff_inclusion",
    "InfconvCheck",
    "check_sum_conjugate_infconv",
    "sigma_lower_bound",
]

TRIPLE_CAP = 300
MIN_PROBES = 100_000
STRUCT_TOL = 1e-12
INEQ_TOL = 1e-9
DINI_TOL = 1e-6
_T_SET = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


def _as_sampled(f: AnyFunction, grid: Optional[Grid]) -> SampledFunction:
    if isinstance(f, SampledFunction):
        return f
    if grid is None:
        raise ValueError("a grid is required to probe a closed-form function")
    return sample(f, grid)


def _sampled_triples(n: int, count: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """`count` strictly increasing index triples i < k < j, seeded."""
    out_i, out_k, out_j = [], [], []
    have = 0
    while have < count:
        draw = rng.integers(0, n, size=(3, int(1.5 * (count - have)) + 16))
        draw.sort(axis=0)
        keep = (draw[0] < draw[1]) & (draw[1] < draw[2])
        out_i.append(draw[0][keep])
        out_k.append(draw[1][keep])
        out_j.append(draw[2][keep])
        have += int(keep.sum())
    ii = np.concatenate(out_i)[:count]
    kk = np.concatenate(out_k)[:count]
    jj = np.concatenate(out_j)[:count]
    return ii, kk, jj


def econvex_violation_at(f: AnyFunction, e: ErrorFunction, x: float, y: float, t: float) -> float:
    """Single-probe convexity-inequality violation (for witness re-evaluation).

    v = f(t x + (1-t) y) - t f(x) - (1-t) f(y) - t (1-t) e(x, y), evaluated
    left to right under the extended addition rule.  For sampled functions
    the combination must land on a grid node.
    """
    comb = t * x + (1.0 - t) * y
    fc = f.eval_at(comb)
    fx = f.eval_at(x)
    fy = f.eval_at(y)
    ev = eval_error(e, x, y)
    return sub_ext(sub_ext(sub_ext(fc, t * fx), (1.0 - t) * fy), t * (1.0 - t) * ev)


def check_e_convex_def(
    f: AnyFunction,
    e: ErrorFunction,
    grid: Optional[Grid] = None,
    t_mode: str = "all_node_triples",
    seed: int = 0,
    min_probes: int = MIN_PROBES,
) -> ViolationReport:
    """Worst violation of the budgeted convexity inequality.

    `all_node_triples` probes combinations that land exactly on grid nodes
    (uniform grids only; exhaustive up to 300 nodes, seeded sampling above).
    `t_set` probes a fixed t ladder with exact closed-form evaluation and is
    available for closed-form functions only.  Probe pairs with an infinite
    budget are skipped: the inequality is vacuous there.
    """
    if t_mode == "t_set":
        if not isinstance(f, ClosedFormFunction):
            raise ValueError("t_set mode requires a closed-form function")
        if grid is None:
            raise ValueError("t_set mode requires a probe grid")
        x = grid.points
        E = pairwise_matrix(e, grid)
        worst = NEG_INF
        witness = None
        checked = 0
        for t in _T_SET:
            comb = t * x[:, None] + (1.0 - t) * x[None, :]
            fc = f.eval_many(comb)
            fx = f.eval_many(x)[:, None]
            fy = f.eval_many(x)[None, :]
            v = sub_ext_array(sub_ext_array(sub_ext_array(fc, t * fx), (1.0 - t) * fy), t * (1.0 - t) * E)
            live = np.isfinite(E)
            checked += int(live.sum())
            v = np.where(live, v, NEG_INF)
            m = float(np.max(v))
            if m > worst:
                worst = m
                i, j = np.unravel_index(int(np.argmax(v)), v.shape)
                witness = (float(x[i]), float(x[j]), float(t))
        return ViolationReport(max_violation=worst, witness=witness, checked_count=checked,
                               mode="exhaustive", tolerance=INEQ_TOL)

    if t_mode != "all_node_triples":
        raise ValueError(f"unknown t_mode: {t_mode!r}")
    fs = _as_sampled(f, grid)
    if not fs.grid.uniform:
        raise ValueError("grid not uniform")
    x = fs.grid.points
    fv = fs.values
    E = pairwise_matrix(e, fs.grid)
    n = x.size

    worst = NEG_INF
    witness = None
    checked = 0
    if n <= TRIPLE_CAP:
        mode = "exhaustive"
        for k in range(1, n - 1):
            ii = np.arange(0, k)
            jj = np.arange(k + 1, n)
            t = (jj[None, :] - k) / (jj[None, :] - ii[:, None])
            fi = fv[ii][:, None]
            fj = fv[jj][None, :]
            eij = E[np.ix_(ii, jj)]
            live = np.isfinite(eij)
            v = sub_ext_array(sub_ext_array(sub_ext_array(fv[k], t * fi), (1.0 - t) * fj), t * (1.0 - t) * eij)
            v = np.where(live, v, NEG_INF)
            checked += int(live.sum())
            m = float(np.max(v))
            if m > worst:
                worst = m
                a, b = np.unravel_index(int(np.argmax(v)), v.shape)
                witness = (float(x[ii[a]]), float(x[jj[b]]), float(t[a, b]))
    else:
        mode = f"sampled(seed={seed})"
        rng = np.random.default_rng(seed)
        ii, kk, jj = _sampled_triples(n, int(min_probes), rng)
        t = (jj - kk) / (jj - ii)
        eij = E[ii, jj]
        live = np.isfinite(eij)
        v = sub_ext_array(sub_ext_array(sub_ext_array(fv[kk], t * fv[ii]), (1.0 - t) * fv[jj]), t * (1.0 - t) * eij)
        v = np.where(live, v, NEG_INF)
        checked = int(live.sum())
        a = int(np.argmax(v))
        worst = float(v[a])
        witness = (float(x[ii[a]]), float(x[jj[a]]), float(t[a]))
    return ViolationReport(max_violation=worst, witness=witness, checked_count=checked,
                           mode=mode, tolerance=INEQ_TOL)


def check_char_slopes(
    f: AnyFunction,
    e: ErrorFunction,
    grid: Optional[Grid] = None,
    seed: int = 0,
    min_probes: int = MIN_PROBES,
) -> ViolationReport:
    """Worst violation of the two slope characterizations along the grid.

    Probes every node triple p < q < r (direction +1, offsets in grid
    steps): the three-slope inequality anchored mid-domain and the
    two-slope inequality anchored at the left index.  Reports the worse of
    the two maxima; they are jointly equivalent to the convexity
    inequality on the same triples.
    """
    fs = _as_sampled(f, grid)
    if not fs.grid.uniform:
        raise ValueError("grid not uniform")
    x = fs.grid.points
    h = float(fs.grid.step)
    fv = fs.values
    E = pairwise_matrix(e, fs.grid)
    n = x.size

    worst = NEG_INF
    witness = None
    checked = 0

    def _bundle(ii, kk, jj, t_char1_block=None):
        nonlocal worst, witness, checked
        s_rel = (kk - ii).astype(float) * h
        t_rel = (jj - ii).astype(float) * h
        mid_rel = (jj - kk).astype(float) * h
        eij = E[ii, jj]
        live = np.isfinite(eij)
        fk_finite = np.isfinite(fv[kk])
        # three-slope form needs the middle point in the domain
        q_left = sub_ext_array(fv[kk], fv[ii]) / s_rel
        q_right = sub_ext_array(fv[jj], fv[kk]) / mid_rel
        v1 = sub_ext_array(sub_ext_array(q_left, q_right), eij / t_rel)
        v1 = np.where(live & fk_finite, v1, NEG_INF)
        # two-slope form anchored at the left index, offsets s < t
        q1 = sub_ext_array(fv[kk], fv[ii]) / s_rel
        q2 = sub_ext_array(fv[jj], fv[ii]) / t_rel
        coeff = (t_rel - s_rel) / (t_rel * t_rel)
        v2 = sub_ext_array(sub_ext_array(q1, q2), coeff * eij)
        v2 = np.where(live, v2, NEG_INF)
        checked += 2 * int(live.sum())
        for v, tag in ((v1, "three-slope"), (v2, "two-slope")):
            a = int(np.argmax(v))
            m = float(v[a])
            if m > worst:
                worst = m
                witness = (tag, float(x[ii[a]]), float(x[kk[a]]), float(x[jj[a]]))

    if n <= TRIPLE_CAP:
        mode = "exhaustive"
        for k in range(1, n - 1):
            ii0 = np.arange(0, k)
            jj0 = np.arange(k + 1, n)
            II, JJ = np.meshgrid(ii0, jj0, indexing="ij")
            _bundle(II.ravel(), np.full(II.size, k), JJ.ravel())
    else:
        mode = f"sampled(seed={seed})"
        rng = np.random.default_rng(seed)
        ii, kk, jj = _sampled_triples(n, int(min_probes), rng)
        _bundle(ii, kk, jj)
    return ViolationReport(max_violation=worst, witness=witness, checked_count=checked,
                           mode=mode, tolerance=INEQ_TOL)


def fenchel_young_gap(
    f: SampledFunction,
    e: ErrorFunction,
    x: float,
    xstar: float,
    dual_grid: Optional[Grid] = None,
) -> float:
    """Signed gap F(x*) + f(x) - x*·x with the conjugate anchored at y = x.

    The supremum runs over the primal grid and x* is evaluated directly
    (never snapped to a dual grid; the dual_grid argument is accepted for
    interface symmetry only).  The gap is always >= -1e-12, and it is
    <= 1e-9 exactly when x* belongs to the budgeted subdifferential at x
    on this grid.
    """
    del dual_grid
    if abs(eval_error(e, x, x)) > STRUCT_TOL:
        raise ValueError("anchor precondition violated: e(x, x) must be 0")
    fx = f.eval_at(x)
    conj = e_conjugate_at(f, e, x, float(xstar))
    return add_ext(conj, fx) - float(xstar) * float(x)


@dataclass(frozen=True)
class ThreeWayResult:
    """Agreement record for the three equivalent subgradient descriptions."""

    probes: Tuple[Tuple[float, bool, bool, bool], ...]
    interval: SubdiffInterval
    triangle_ok: bool

    @property
    def agree_all(self) -> bool:
        return all(b1 == b2 == b3 for _, b1, b2, b3 in self.probes)


def check_three_way_equivalence(
    f: ClosedFormFunction,
    e: ErrorFunction,
    x: float,
    primal_grid: Grid,
    dual_grid: Optional[Grid] = None,
) -> ThreeWayResult:
    """Probe slopes three ways: direct membership, via the conjugate table,
    and via the biconjugate, and record whether the booleans agree.

    Intended for smooth closed-form functions (where a derivative exists)
    with zero-diagonal kernels; the kernel's grid triangle flag is recorded
    alongside.  Probes are the interval endpoints and midpoint, plus two
    exterior points; an empty interval is probed on exterior points only.
    """
    fs = sample(f, primal_grid)
    if abs(eval_error(e, x, x)) > STRUCT_TOL:
        raise ValueError("anchor precondition violated: e(x, x) must be 0")
    interval = e_subdiff_interval(fs, e, x)
    if dual_grid is None:
        dual_grid = default_dual_grid(fs, e, x)
    triangle_ok = validate_error(e, primal_grid).triangle_ok

    # an analytically degenerate singleton may cross by float noise; only a
    # gap beyond tolerance counts as genuinely empty for probe selection
    genuinely_empty = interval.lower > interval.upper + INEQ_TOL
    if genuinely_empty or not (math.isfinite(interval.lower) and math.isfinite(interval.upper)):
        width = 1.0
        g = anchored_values(fs, e, x)
        finite = np.isfinite(g)
        slopes = np.diff(g[finite]) / np.diff(primal_grid.points[finite])
        center = float(np.median(slopes)) if slopes.size else 0.0
        probes = [center - 2 * width, center + 2 * width]
    else:
        lo = min(interval.lower, interval.upper)
        hi = max(interval.lower, interval.upper)
        width = max(1.0, hi - lo)
        probes = [lo, 0.5 * (lo + hi), hi, lo - width, hi + width]

    E = pairwise_matrix(e, primal_grid)
    zero = ZeroError()

    results = []
    for s in probes:
        direct = e_subdiff_membership(primal_grid.points, fs.values, E, x, s, tol=INEQ_TOL)
        # the probe slope joins the dual grid so both dual-side descriptions
        # see it exactly rather than through slope quantization
        aug = np.unique(np.concatenate([dual_grid.points, [s]]))
        aug_grid = Grid.from_points(aug)
        table = e_conjugate_brute(fs, e, x, aug_grid)
        via_table = e_subdiff_interval(table.as_sampled(), zero, s).contains(float(x), tol=INEQ_TOL)
        bic = biconjugate_of_table(table, primal_grid)
        via_bic = e_subdiff_interval(bic, zero, x).contains(float(s), tol=INEQ_TOL)
        results.append((float(s), bool(direct), bool(via_table), bool(via_bic)))
    return ThreeWayResult(probes=tuple(results), interval=interval, triangle_ok=triangle_ok)


def _ext_abs_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """|a - b| treating equal infinities as zero distance."""
    both_inf = np.isinf(a) & np.isinf(b) & (a == b)
    d = np.abs(np.where(both_inf, 0.0, a - b))
    return np.where(both_inf, 0.0, d)


def _record(pid: str, gap: float, witness, tol: float, details=None) -> PropertyRecord:
    return PropertyRecord(property_id=pid, passed=bool(gap <= tol), worst_gap=float(gap),
                          witness=witness, tolerance=tol, details=details or {})


def _skip(pid: str, reason: str, tol: float) -> PropertyRecord:
    return PropertyRecord(property_id=pid, passed=True, worst_gap=None, witness=None,
                          tolerance=tol, skipped=reason)


def check_conjugate_properties(
    f: SampledFunction,
    g: Optional[SampledFunction],
    e: ErrorFunction,
    e_prime: Optional[ErrorFunction],
    y: float,
    lam: float = 0.5,
    dual_grid: Optional[Grid] = None,
    y2: Optional[float] = None,
    smooth_f: bool = False,
) -> List[PropertyRecord]:
    """Pointwise checks of the ten transform calculus rules on the dual grid.

    Items with unmet preconditions are marked skipped with a reason, never
    silently passed.  Equalities (shift, positive scaling, argument
    scaling) are checked two-sided; inequalities one-sided at 1e-9.
    """
    records: List[PropertyRecord] = []
    grid = f.grid
    if dual_grid is None:
        dual_grid = default_dual_grid(f, e, y)
    s = dual_grid.points
    T_f = e_conjugate_brute(f, e, y, dual_grid).values

    # (i) the budgeted transform never exceeds the classical one
    T_classic = e_conjugate_brute(f, ZeroError(), y, dual_grid).values
    gap = sub_ext_array(T_f, T_classic)
    a = int(np.argmax(gap))
    records.append(_record("conjugacy-upper-bound", float(gap[a]), (float(s[a]),), INEQ_TOL))

    # (ii) pointwise order of functions reverses under the transform
    if g is None:
        records.append(_skip("conjugacy-order-reversal", "no comparison function supplied", INEQ_TOL))
    elif not np.all(f.values <= g.values):
        records.append(_skip("conjugacy-order-reversal", "f <= g fails on the grid", INEQ_TOL))
    else:
        T_g = e_conjugate_brute(g, e, y, dual_grid).values
        gap = sub_ext_array(T_g, T_f)
        a = int(np.argmax(gap))
        records.append(_record("conjugacy-order-reversal", float(gap[a]), (float(s[a]),), INEQ_TOL))

    # (iii) pointwise order of kernels reverses under the transform
    if e_prime is None:
        records.append(_skip("conjugacy-kernel-order", "no second kernel supplied", INEQ_TOL))
    else:
        E = pairwise_matrix(e, grid)
        E2 = pairwise_matrix(e_prime, grid)
        if not np.all(E <= E2):
            records.append(_skip("conjugacy-kernel-order", "e <= e' fails on grid pairs", INEQ_TOL))
        else:
            T_e2 = e_conjugate_brute(f, e_prime, y, dual_grid).values
            gap = sub_ext_array(T_e2, T_f)
            a = int(np.argmax(gap))
            records.append(_record("conjugacy-kernel-order", float(gap[a]), (float(s[a]),), INEQ_TOL))

    # (iv) adding a constant shifts the transform by its negation
    h = SampledFunction(grid=grid, values=add_ext_array(f.values, lam))
    T_h = e_conjugate_brute(h, e, y, dual_grid).values
    gap = _ext_abs_diff(T_h, T_f - lam)
    a = int(np.argmax(gap))
    records.append(_record("conjugacy-shift", float(gap[a]), (float(s[a]),), INEQ_TOL))

    # (v) positive scaling identity
    if not lam > 0:
        records.append(_skip("conjugacy-positive-scaling", "needs lambda > 0", INEQ_TOL))
    else:
        hv = np.where(np.isfinite(f.values), lam * f.values, INF)
        h = SampledFunction(grid=grid, values=hv)
        T_h = e_conjugate_brute(h, e, y, dual_grid).values
        rhs = lam * e_conjugate_at(f, scale_error(e, 1.0 / lam), y, s / lam)
        gap = _ext_abs_diff(T_h, rhs)
        a = int(np.argmax(gap))
        records.append(_record("conjugacy-positive-scaling", float(gap[a]), (float(s[a]),), INEQ_TOL))

    # (vi) argument scaling with a homogeneous kernel
    degree = None
    if isinstance(e, QuadraticError):
        degree = 2.0
    elif isinstance(e, ScaledDistanceError):
        degree = 1.0
    elif isinstance(e, ZeroError):
        degree = 1.0
    if degree is None:
        records.append(_skip("conjugacy-argument-scaling", "kernel not positively homogeneous", INEQ_TOL))
    elif not lam > 0:
        records.append(_skip("conjugacy-argument-scaling", "needs lambda > 0", INEQ_TOL))
    else:
        h_grid = Grid.from_points(grid.points / lam)
        h = SampledFunction(grid=h_grid, values=f.values)
        T_h = e_conjugate_brute(h, e, y, dual_grid).values
        rhs = e_conjugate_at(f, scale_error(e, 1.0 / lam**degree), lam * y, s / lam)
        gap = _ext_abs_diff(T_h, np.atleast_1d(rhs))
        a = int(np.argmax(gap))
        records.append(_record("conjugacy-argument-scaling", float(gap[a]), (float(s[a]),), INEQ_TOL))

    # (vii) anchor stability bounded by the kernel's grid variation
    yb = y2 if y2 is not None else y + 0.25 * (grid.b - grid.a)
    dvar = _ext_abs_diff(
        np.asarray(e.evaluate(grid.points, float(y)), dtype=float),
        np.asarray(e.evaluate(grid.points, float(yb)), dtype=float),
    )
    bound = float(np.max(dvar))
    T_yb = e_conjugate_brute(f, e, yb, dual_grid).values
    gap = _ext_abs_diff(T_f, T_yb) - bound
    a = int(np.argmax(gap))
    records.append(_record("conjugacy-anchor-lipschitz", float(gap[a]), (float(s[a]), float(yb)), INEQ_TOL,
                           details={"grid_variation_bound": bound}))

    # (viii) convexity of the transform in the function argument
    if g is None:
        records.append(_skip("conjugacy-map-convexity", "no second function supplied", INEQ_TOL))
    elif not (0.0 < lam < 1.0):
        records.append(_skip("conjugacy-map-convexity", "needs lambda in (0, 1)", INEQ_TOL))
    elif not np.any(np.isfinite(f.values) & np.isfinite(g.values)):
        records.append(_skip("conjugacy-map-convexity", "empty common domain", INEQ_TOL))
    else:
        hv = add_ext_array(np.where(np.isfinite(f.values), lam * f.values, INF),
                           np.where(np.isfinite(g.values), (1.0 - lam) * g.values, INF))
        h = SampledFunction(grid=grid, values=hv)
        T_h = e_conjugate_brute(h, e, y, dual_grid).values
        T_g = e_conjugate_brute(g, e, y, dual_grid).values
        rhs = add_ext_array(lam * T_f, (1.0 - lam) * T_g)
        gap = sub_ext_array(T_h, rhs)
        a = int(np.argmax(gap))
        records.append(_record("conjugacy-map-convexity", float(gap[a]), (float(s[a]),), INEQ_TOL))

    # (ix) the double transform never exceeds the budgeted function
    bic = e_biconjugate(f, e, y, dual_grid, grid, algorithm="brute")
    g_anchored = anchored_values(f, e, y)
    gap = sub_ext_array(bic.values, g_anchored)
    a = int(np.argmax(gap))
    records.append(_record("biconjugate-upper-bound", float(gap[a]), (float(grid.points[a]),), INEQ_TOL))

    # (x) lower bound under the triangle property, smooth functions only
    if not smooth_f:
        records.append(_skip("biconjugate-lower-bound", "f not declared smooth", INEQ_TOL))
    else:
        tri = validate_error(e, grid).triangle_ok
        if not tri:
            records.append(_skip("biconjugate-lower-bound", "kernel lacks the triangle property on this grid", INEQ_TOL))
        else:
            ev = np.asarray(e.evaluate(grid.points, float(y)), dtype=float)
            lower = sub_ext_array(f.values, ev)
            gap = sub_ext_array(lower, bic.values)
            gap = np.where(np.isfinite(f.values), gap, NEG_INF)
            a = int(np.argmax(gap))
            records.append(_record("biconjugate-lower-bound", float(gap[a]), (float(grid.points[a]),), INEQ_TOL))

    return records


@dataclass(frozen=True)
class StabilityReport:
    """Anchor-stability bounds on the transform; at least one must apply."""

    triangle: Optional[ViolationReport]
    bounded: Optional[ViolationReport]

    @property
    def ok(self) -> bool:
        parts = [r for r in (self.triangle, self.bounded) if r is not None]
        return all(r.ok for r in parts)


def check_conjugate_stability(
    f: SampledFunction,
    e: ErrorFunction,
    y1: float,
    y2: float,
    dual_grid: Optional[Grid] = None,
) -> StabilityReport:
    """Check |F_{y1}(s) - F_{y2}(s)| against the two anchor-stability bounds.

    The triangle bound e(y1, y2) applies when the kernel passes the grid
    triangle validation and both anchors are grid nodes; the bounded-kernel
    bound max{k_{y1}, k_{y2}} applies when the grid k values are finite.
    If neither applies this is an error.
    """
    grid = f.grid
    if dual_grid is None:
        dual_grid = default_dual_grid(f, e, y1)
    T1 = e_conjugate_brute(f, e, y1, dual_grid).values
    T2 = e_conjugate_brute(f, e, y2, dual_grid).values
    diff = _ext_abs_diff(T1, T2)
    s = dual_grid.points

    triangle_report = None
    y_nodes_ok = True
    try:
        grid.node_index(float(y1))
        grid.node_index(float(y2))
    except ValueError:
        y_nodes_ok = False
    if y_nodes_ok and validate_error(e, grid).triangle_ok:
        bound = eval_error(e, y1, y2)
        gap = diff - bound
        a = int(np.argmax(gap))
        triangle_report = ViolationReport(max_violation=float(gap[a]), witness=(float(s[a]),),
                                          checked_count=int(s.size), tolerance=INEQ_TOL)

    bounded_report = None
    k1 = k_value(e, grid, y1)
    k2 = k_value(e, grid, y2)
    if math.isfinite(k1) and math.isfinite(k2):
        bound = max(k1, k2)
        gap = diff - bound
        a = int(np.argmax(gap))
        bounded_report = ViolationReport(max_violation=float(gap[a]), witness=(float(s[a]),),
                                         checked_count=int(s.size), tolerance=INEQ_TOL)

    if triangle_report is None and bounded_report is None:
        raise ValueError("no applicable stability bound")
    return StabilityReport(triangle=triangle_report, bounded=bounded_report)


@dataclass(frozen=True)
class MinCertificate:
    """Zero-slope certificate at a candidate minimizer, plus the grid facts."""

    zero_included: bool
    is_grid_argmin: bool
    interval: SubdiffInterval
    window: Optional[int] = None

    def __bool__(self) -> bool:
        return self.zero_included


def certify_global_min(f: SampledFunction, e: ErrorFunction, x0: float) -> MinCertificate:
    """Necessary-condition certificate 0 in the budgeted subdifferential at x0.

    Also reports whether x0 is the grid argmin so callers can probe the
    implication direction (minimum implies certificate; the converse is
    not asserted).
    """
    i = f.grid.node_index(float(x0))
    if not math.isfinite(float(f.values[i])):
        raise ValueError("improper primal: f(x0) must be finite")
    interval = e_subdiff_interval(f, e, x0)
    finite_vals = np.where(np.isfinite(f.values), f.values, INF)
    is_argmin = bool(f.values[i] <= float(np.min(finite_vals)) + 0.0)
    return MinCertificate(zero_included=interval.contains(0.0), is_grid_argmin=is_argmin,
                          interval=interval)


def certify_local_min(f: SampledFunction, e: ErrorFunction, x0: float, window: int = 5) -> MinCertificate:
    """Certificate 0 in the doubled-budget subdifferential at x0.

    Requires e(x0, x0) = 0 and a midpoint-convex kernel slice e(., x0) on
    the grid (checked via nondecreasing divided differences).  "Local
    minimum" on a grid means minimal among nodes within +-window steps;
    the window is recorded in the certificate.
    """
    i = f.grid.node_index(float(x0))
    if not math.isfinite(float(f.values[i])):
        raise ValueError("improper primal: f(x0) must be finite")
    if abs(eval_error(e, x0, x0)) > STRUCT_TOL:
        raise ValueError("kernel precondition violated: e(x0, x0) must be 0")
    slice_vals = np.asarray(e.evaluate(f.grid.points, float(x0)), dtype=float)
    finite = np.isfinite(slice_vals)
    if finite.sum() >= 3:
        pts = f.grid.points[finite]
        sv = slice_vals[finite]
        dd = np.diff(sv) / np.diff(pts)
        if np.any(np.diff(dd) < -STRUCT_TOL):
            raise ValueError("kernel precondition violated: e(., x0) is not convex on the grid")
    interval = e_subdiff_interval(f, scale_error(e, 2.0), x0)
    lo = max(0, i - window)
    hi = min(len(f.grid), i + window + 1)
    neighborhood = np.where(np.isfinite(f.values[lo:hi]), f.values[lo:hi], INF)
    is_window_min = bool(f.values[i] <= float(np.min(neighborhood)))
    return MinCertificate(zero_included=interval.contains(0.0), is_grid_argmin=is_window_min,
                          interval=interval, window=window)


def check_subdiff_inclusion(
    f: SampledFunction,
    g: SampledFunction,
    e: ErrorFunction,
    x0: float,
    factor: float = 1.0,
    window: int = 5,
    seed: int = 0,
) -> ViolationReport:
    """Interval inclusion: subdifferential of g at x0 inside that of f with
    the budget scaled by `factor` (1 for a global, 2 for a local minimum
    of f - g at x0).

    The minimizer hypothesis and the budgeted convexity of both functions
    are verified before the inclusion is measured; endpoint gaps beyond
    1e-9 fail the report.
    """
    if factor not in (1.0, 2.0):
        raise ValueError("invalid constant: factor must be 1 (global) or 2 (local)")
    i = f.grid.node_index(float(x0))
    if not np.array_equal(f.grid.points, g.grid.points):
        raise ValueError("hypothesis violated: f and g must share a grid")
    both = np.isfinite(f.values) & np.isfinite(g.values)
    if not both[i]:
        raise ValueError("hypothesis violated: x0 must be in both domains")
    d = np.where(both, f.values - g.values, INF)
    if factor == 1.0:
        if d[i] > float(np.min(d)) + STRUCT_TOL:
            raise ValueError("hypothesis violated: x0 is not a grid minimizer of f - g")
    else:
        lo = max(0, i - window)
        hi = min(len(f.grid), i + window + 1)
        if d[i] > float(np.min(d[lo:hi])) + STRUCT_TOL:
            raise ValueError("hypothesis violated: x0 is not a windowed local minimizer of f - g")
    for name, func in (("f", f), ("g", g)):
        rep = check_e_convex_def(func, e, seed=seed)
        if rep.max_violation > INEQ_TOL:
            raise ValueError(f"hypothesis violated: {name} is not budget-convex on the grid")

    Ig = e_subdiff_interval(g, e, x0)
    ef = e if factor == 1.0 else scale_error(e, factor)
    If = e_subdiff_interval(f, ef, x0)
    if Ig.empty:
        return ViolationReport(max_violation=NEG_INF, witness=None, checked_count=2, tolerance=INEQ_TOL)
    gap_lower = sub_ext(If.lower, Ig.lower)
    gap_upper = sub_ext(Ig.upper, If.upper)
    if gap_lower >= gap_upper:
        worst, witness = gap_lower, ("lower-endpoint", If.lower, Ig.lower)
    else:
        worst, witness = gap_upper, ("upper-endpoint", Ig.upper, If.upper)
    return ViolationReport(max_violation=float(worst), witness=witness, checked_count=2, tolerance=INEQ_TOL)


@dataclass(frozen=True)
class InfconvCheck:
    """Sum-transform vs. split-infimum comparison at one dual slope."""

    lhs: float
    rhs: float
    inequality_ok: bool
    equality_flag: bool
    hypothesis_holds: bool


def check_sum_conjugate_infconv(
    f: SampledFunction,
    g: SampledFunction,
    e: ErrorFunction,
    e_prime: ErrorFunction,
    y: float,
    xstar: float,
    dual_grid: Optional[Grid] = None,
    window: int = 5,
    seed: int = 0,
) -> InfconvCheck:
    """Transform of the sum (with summed budgets) vs. the split infimum.

    lhs uses the brute transform of f + g with kernel e + e'; rhs minimizes
    F(s) + G(x* - s) over dual-grid splits, the second factor evaluated at
    its exact slope.  The inequality lhs <= rhs holds grid-exactly; the
    equality flag is set when |lhs - rhs| is within the dual resolution and
    y is a windowed local minimizer of f + g - x*·(.) on the grid.
    """
    if not np.array_equal(f.grid.points, g.grid.points):
        raise ValueError("improper input: f and g must share a grid")
    for name, func, kern in (("f", f, e), ("g", g, e_prime)):
        rep = check_e_convex_def(func, kern, seed=seed)
        if rep.max_violation > INEQ_TOL:
            raise ValueError(f"hypothesis violated: {name} is not budget-convex on the grid")
    fg = SampledFunction(grid=f.grid, values=add_ext_array(f.values, g.values))
    if not validate_proper(fg):
        raise ValueError("improper input: f + g is identically infinite")
    lhs = e_conjugate_at(fg, add_errors(e, e_prime), y, float(xstar))
    if dual_grid is None:
        dual_grid = default_dual_grid(fg, add_errors(e, e_prime), y)
    s = dual_grid.points
    F = e_conjugate_brute(f, e, y, dual_grid).values
    G = e_conjugate_at(g, e_prime, y, float(xstar) - s)
    rhs = float(np.min(add_ext_array(F, G)))

    h = add_ext_array(fg.values, -float(xstar) * f.grid.points)
    hypothesis = False
    try:
        i = f.grid.node_index(float(y))
        if math.isfinite(h[i]):
            lo = max(0, i - window)
            hi = min(len(f.grid), i + window + 1)
            hypothesis = bool(h[i] <= float(np.min(np.where(np.isfinite(h[lo:hi]), h[lo:hi], INF))) + STRUCT_TOL)
    except ValueError:
        hypothesis = False

    step = float(dual_grid.step) if dual_grid.step is not None else float(np.max(np.diff(s)))
    equality = bool(hypothesis and abs(sub_ext(lhs, rhs)) <= step)
    return InfconvCheck(lhs=float(lhs), rhs=rhs, inequality_ok=bool(lhs <= rhs + INEQ_TOL),
                        equality_flag=equality, hypothesis_holds=hypothesis)


def sigma_lower_bound(
    f: AnyFunction,
    y: float,
    grid: Optional[Grid] = None,
    t_set: Sequence[float] = _T_SET,
) -> Tuple[float, Tuple[float, float]]:
    """Largest distance-normalized convexity violation anchored at y.

    Any pointwise budget map admissible for f must majorize this bound at
    y; growth of the bound with the grid width certifies that no finite
    pointwise budget exists.  Combinations are node-snapped: the weight is
    recomputed from the snapped node so the probe stays grid-exact.
    """
    fs = _as_sampled(f, grid)
    pts = fs.grid.points
    iy = fs.grid.node_index(float(y))
    fy = float(fs.values[iy])
    if not math.isfinite(fy):
        raise ValueError("no probes: f(y) must be finite")
    best = NEG_INF
    witness = None
    checked = 0
    yv = float(pts[iy])
    for ix, xv in enumerate(pts):
        if ix == iy or not math.isfinite(fs.values[ix]):
            continue
        fx = float(fs.values[ix])
        for t in t_set:
            comb = t * xv + (1.0 - t) * yv
            k = fs.grid.nearest_index(comb)
            xk = float(pts[k])
            t_exact = (xk - yv) / (xv - yv)
            if not (0.0 < t_exact < 1.0) or k == ix or k == iy:
                continue
            fk = float(fs.values[k])
            num = sub_ext(sub_ext(fk, t_exact * fx), (1.0 - t_exact) * fy)
            denom = t_exact * (1.0 - t_exact) * abs(xv - yv)
            val = num / denom
            checked += 1
            if val > best:
                best = val
                witness = (xv, t_exact)
    if checked == 0:
        raise ValueError("no probes")
    return float(best), witness
