"""The proposition suite: every checkable statement run on concrete instances.

Each registry entry produces one or more PropertyRecords with a unique
property id.  Runs are reproducible from the seed alone; randomized
entries derive child generators from a spawned seed sequence in registry
order.  Set ECONVEX_THREADS to cap the worker pool (1 forces a serial
run); records come back in registry order either way.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .extreal import INF, NEG_INF, add_ext, sub_ext
from .funcmodel import ClosedFormFunction, Grid, SampledFunction, make_uniform_grid, sample
from .errorfn import (
    ErrorFunction,
    eval_error,
    exp_error,
    lipschitz_error,
    pairwise_matrix,
    product_error,
    quadratic_error,
    scale_error,
    validate_error,
    zero_error,
)
from .transform import (
    affine_minorant,
    anchored_values,
    default_dual_grid,
    e_biconjugate,
    e_conjugate_at,
    e_conjugate_brute,
    e_conjugate_fast,
    inf_convolution,
)
from .subdiff import OperatorSample, check_e_monotone, dini_upper, e_subdiff_interval, e_subdiff_membership
from .reporting import PropertyRecord, SuiteReport
from .verify import (
    INEQ_TOL,
    STRUCT_TOL,
    DINI_TOL,
    certify_global_min,
    certify_local_min,
    check_char_slopes,
    check_conjugate_properties,
    check_conjugate_stability,
    check_e_convex_def,
    check_subdiff_inclusion,
    check_sum_conjugate_infconv,
    check_three_way_equivalence,
    econvex_violation_at,
    fenchel_young_gap,
    sigma_lower_bound,
)

__all__ = ["run_suite", "PROPERTY_IDS", "random_sampled", "random_convex_sampled", "random_kernel"]


# ---------------------------------------------------------------------------
# randomized instance generators
# ---------------------------------------------------------------------------

def random_sampled(rng: np.random.Generator, n: int = 64, a: float = -2.0, b: float = 2.0,
                   inf_frac: float = 0.1, low: float = -10.0, high: float = 10.0) -> SampledFunction:
    """Proper sampled function with uniform values and a sprinkle of +inf nodes."""
    grid = make_uniform_grid(a, b, n)
    vals = rng.uniform(low, high, n)
    mask = rng.random(n) < inf_frac
    if mask.all():
        mask[rng.integers(0, n)] = False
    vals = np.where(mask, INF, vals)
    return SampledFunction(grid=grid, values=vals)


def random_convex_sampled(rng: np.random.Generator, n: int = 64, a: float = -2.0, b: float = 2.0) -> SampledFunction:
    """Convex sampled function built from nonnegative second differences."""
    grid = make_uniform_grid(a, b, n)
    h = float(grid.step)
    curv = rng.uniform(0.0, 4.0, n - 2)
    slopes = rng.uniform(-3.0, 3.0) + np.concatenate([[0.0], np.cumsum(curv)]) * h
    vals = rng.uniform(-2.0, 2.0) + np.concatenate([[0.0], np.cumsum(slopes)]) * h
    return SampledFunction(grid=grid, values=vals)


def random_kernel(rng: np.random.Generator, kinds: Sequence[str] = ("zero", "quadratic", "scaled_distance")) -> ErrorFunction:
    kind = kinds[int(rng.integers(0, len(kinds)))]
    if kind == "zero":
        return zero_error()
    if kind == "quadratic":
        return quadratic_error(float(rng.uniform(0.1, 4.0)))
    if kind == "scaled_distance":
        return lipschitz_error(float(rng.uniform(0.1, 4.0)))
    if kind == "exp_kernel":
        return exp_error()
    raise ValueError(f"unknown kernel kind {kind!r}")


def _pass(pid: str, gap: float, witness=None, tol: float = INEQ_TOL, details=None) -> PropertyRecord:
    return PropertyRecord(property_id=pid, passed=bool(gap <= tol), worst_gap=float(gap),
                          witness=witness, tolerance=tol, details=details or {})


def _bool_prop(pid: str, ok: bool, witness=None, details=None) -> PropertyRecord:
    return PropertyRecord(property_id=pid, passed=bool(ok), worst_gap=None if ok else INF,
                          witness=witness, tolerance=0.0, details=details or {})


# ---------------------------------------------------------------------------
# property runners
# ---------------------------------------------------------------------------

def _prop_add_convention(rng) -> List[PropertyRecord]:
    cases = {
        (NEG_INF, NEG_INF): NEG_INF, (NEG_INF, 2.0): NEG_INF, (NEG_INF, INF): NEG_INF,
        (3.0, NEG_INF): NEG_INF, (3.0, 2.0): 5.0, (3.0, INF): INF,
        (INF, NEG_INF): NEG_INF, (INF, 2.0): INF, (INF, INF): INF,
    }
    bad = [(a, b) for (a, b), want in cases.items() if add_ext(a, b) != want]
    commutes = all(add_ext(a, b) == add_ext(b, a) for a in (NEG_INF, -1.0, 4.0, INF) for b in (NEG_INF, -1.0, 4.0, INF))
    return [_bool_prop("extended-add-convention", not bad and commutes, witness=bad or None,
                       details={"cases": len(cases)})]


def _prop_econvex_negsq(rng) -> List[PropertyRecord]:
    grid = make_uniform_grid(-2.0, 2.0, 401)
    f = sample(ClosedFormFunction("neg_square"), grid)
    rep = check_e_convex_def(f, quadratic_error(1.0), seed=int(rng.integers(0, 2**31)))
    gap = abs(rep.max_violation)  # the inequality holds with equality here
    return [_pass("econvex-definition-negsq", gap, rep.witness, tol=STRUCT_TOL,
                  details={"mode": rep.mode, "checked": rep.checked_count})]


def _prop_econvex_xexp(rng) -> List[PropertyRecord]:
    # the exp kernel certifies x*exp(-x) on nonnegative grids only: the
    # certificate's inequality step multiplies by t*x, which flips sign for
    # x < 0, and indeed (-2, 2, t=0.825) violates it on a symmetric grid
    grid = make_uniform_grid(0.0, 2.0, 201)
    f = sample(ClosedFormFunction("x_exp_neg"), grid)
    rep = check_e_convex_def(f, exp_error())
    val = validate_error(exp_error(), grid)
    ok = val.symmetric_ok and val.nonneg_ok and val.zero_diag_ok
    recs = [_pass("econvex-definition-xexp", rep.max_violation, rep.witness, tol=STRUCT_TOL,
                  details={"mode": rep.mode, "domain": "[0, 2]"})]
    recs.append(_bool_prop("exp-kernel-validation", ok,
                           details={"worst_asymmetry": val.worst_asymmetry,
                                    "worst_negative": val.worst_negative,
                                    "bounded_on_grid": val.bounded_flag}))
    return recs


def _prop_char_equivalence(rng) -> List[PropertyRecord]:
    mismatches = 0
    witness = None
    for _ in range(50):
        f = random_sampled(rng, n=41, inf_frac=float(rng.choice([0.0, 0.15])))
        e = random_kernel(rng, kinds=("zero", "quadratic"))
        d = check_e_convex_def(f, e)
        c = check_char_slopes(f, e)
        if (d.max_violation <= INEQ_TOL) != (c.max_violation <= INEQ_TOL):
            mismatches += 1
            if witness is None:
                witness = (d.max_violation, c.max_violation)
    return [_bool_prop("econvex-char-equivalence", mismatches == 0, witness=witness,
                       details={"instances": 50, "mismatches": mismatches})]


def _prop_product_kernel(rng) -> List[PropertyRecord]:
    grid = make_uniform_grid(-2.0, 2.0, 81)
    fa = ClosedFormFunction("quad", {"a": 2.0})                      # x^2
    fb = ClosedFormFunction("quad", {"a": 2.0, "b": -2.0, "c": 1.0})  # (x-1)^2
    e = product_error(fa, fb, grid)
    prod_vals = fa.eval_many(grid.points) * fb.eval_many(grid.points)
    fg = SampledFunction(grid=grid, values=prod_vals)
    rep = check_e_convex_def(fg, e)
    return [_pass("product-kernel-econvex", rep.max_violation, rep.witness, tol=INEQ_TOL)]


def _prop_lipschitz_kernel(rng) -> List[PropertyRecord]:
    grid = make_uniform_grid(-math.pi, math.pi, 201)
    f = sample(ClosedFormFunction("sine"), grid)
    rep = check_e_convex_def(f, lipschitz_error(1.0))
    return [_pass("lipschitz-kernel-econvex", rep.max_violation, rep.witness, tol=INEQ_TOL)]


def _prop_gradient_chain(rng) -> List[PropertyRecord]:
    grid = make_uniform_grid(-2.0, 2.0, 161)
    x = grid.points
    f = sample(ClosedFormFunction("neg_square"), grid)
    e = quadratic_error(1.0)
    grad = -2.0 * x
    E = pairwise_matrix(e, grid)
    # gradient inequality at every ordered node pair
    lhs = grad[:, None] * (x[None, :] - x[:, None])
    rhs = f.values[None, :] - f.values[:, None] + E
    gap = float(np.max(lhs - rhs))
    i, j = np.unravel_index(int(np.argmax(lhs - rhs)), lhs.shape)
    recs = [_pass("gradient-inequality", gap, (float(x[i]), float(x[j])), tol=INEQ_TOL)]
    mono = check_e_monotone(OperatorSample(points=x, duals=grad), e, factor=2.0)
    recs.append(_pass("gradient-2e-monotone", mono.max_violation, mono.witness, tol=INEQ_TOL,
                      details={"worst_slack": mono.max_violation}))
    return recs


def _dini_pair_worst(f: ClosedFormFunction, e: ErrorFunction, xs: np.ndarray) -> tuple[float, float]:
    """Worst violation of the paired Dini bound and the converged fraction.

    Each point's derivative estimate is taken in the direction of the
    other point; the pair sum must stay within twice the budget.
    """
    worst = NEG_INF
    converged = 0
    total = 0
    for xv in xs:
        for yv in xs:
            if xv == yv:
                continue
            dx = dini_upper(f, float(xv), float(yv - xv))
            dy = dini_upper(f, float(yv), float(xv - yv))
            total += 1
            converged += int(dx.converged and dy.converged)
            v = sub_ext(add_ext(dx.value, dy.value), 2.0 * eval_error(e, float(xv), float(yv)))
            worst = max(worst, v)
    return worst, converged / max(1, total)


def _prop_dini_bound(rng) -> List[PropertyRecord]:
    xs1 = np.linspace(-1.0, 1.0, 20)
    w1, c1 = _dini_pair_worst(ClosedFormFunction("neg_square"), quadratic_error(1.0), xs1)
    xs2 = np.linspace(-math.pi / 2, math.pi / 2, 20)
    w2, c2 = _dini_pair_worst(ClosedFormFunction("sine"), lipschitz_error(1.0), xs2)
    worst = max(w1, w2)
    ok = worst <= DINI_TOL and min(c1, c2) >= 0.95
    return [PropertyRecord(property_id="dini-pair-bound", passed=bool(ok), worst_gap=float(worst),
                           witness=None, tolerance=DINI_TOL,
                           details={"converged_fraction": min(c1, c2)})]


def _prop_sigma_growth(rng) -> List[PropertyRecord]:
    f = ClosedFormFunction("neg_square")
    bounds = {}
    ok = True
    for a in (10.0, 100.0):
        grid = make_uniform_grid(-a, a, 401)
        step = float(grid.step)
        bound, _ = sigma_lower_bound(f, 0.0, grid)
        bounds[a] = bound
        ok = ok and bound >= a - step
    ok = ok and bounds[100.0] > bounds[10.0] + 80.0
    return [_bool_prop("sigma-growth-falsifier", ok, details={str(k): v for k, v in bounds.items()})]


def _prop_oracle_agreement(rng) -> List[PropertyRecord]:
    worst = 0.0
    for _ in range(20):
        f = random_sampled(rng, n=128)
        e = random_kernel(rng)
        y = float(rng.uniform(-2.0, 2.0))
        dual = default_dual_grid(f, e, y, m=129)
        tb = e_conjugate_brute(f, e, y, dual).values
        tf = e_conjugate_fast(f, e, y, dual).values
        both_inf = np.isinf(tb) & np.isinf(tf) & (tb == tf)
        d = np.abs(np.where(both_inf, 0.0, tb - tf))
        worst = max(worst, float(np.max(np.where(both_inf, 0.0, d))))
    return [_pass("conjugate-oracle-agreement", worst, tol=STRUCT_TOL, details={"instances": 20})]


def _prop_conjugate_convexity(rng) -> List[PropertyRecord]:
    worst = NEG_INF
    for _ in range(20):
        f = random_sampled(rng, n=96)
        e = random_kernel(rng)
        y = float(rng.uniform(-2.0, 2.0))
        dual = default_dual_grid(f, e, y, m=97)
        vals = e_conjugate_fast(f, e, y, dual).values
        if not np.all(np.isfinite(vals)):
            continue
        second = np.diff(vals, 2)
        worst = max(worst, float(np.max(-second)) if second.size else 0.0)
    return [_pass("conjugate-convexity", worst, tol=1e-9, details={"instances": 20})]


_CONJUGACY_IDS = (
    "conjugacy-upper-bound", "conjugacy-order-reversal", "conjugacy-kernel-order",
    "conjugacy-shift", "conjugacy-positive-scaling", "conjugacy-argument-scaling",
    "conjugacy-anchor-lipschitz", "conjugacy-map-convexity",
    "biconjugate-upper-bound", "biconjugate-lower-bound",
)


def conjugacy_property_sweep(rng: np.random.Generator, instances: int) -> List[PropertyRecord]:
    """Aggregate the ten transform-calculus items over randomized instances.

    Every third instance is a smooth convex function with a triangle-true
    kernel so the lower-bound item gets non-skipped coverage.
    """
    worst: Dict[str, float] = {pid: NEG_INF for pid in _CONJUGACY_IDS}
    witness: Dict[str, Optional[tuple]] = {pid: None for pid in _CONJUGACY_IDS}
    skipped: Dict[str, int] = {pid: 0 for pid in _CONJUGACY_IDS}
    reasons: Dict[str, str] = {}
    ran: Dict[str, int] = {pid: 0 for pid in _CONJUGACY_IDS}
    for k in range(instances):
        if k % 3 == 0:
            a = float(rng.uniform(0.5, 2.0))
            b = float(rng.uniform(-1.0, 1.0))
            grid = make_uniform_grid(-2.0, 2.0, 64)
            f = sample(ClosedFormFunction("quad", {"a": a, "b": b}), grid)
            e = lipschitz_error(float(rng.uniform(0.5, 2.0)))
            smooth = True
        else:
            f = random_sampled(rng, n=64)
            e = random_kernel(rng)
            smooth = False
        bump = np.where(np.isfinite(f.values), rng.uniform(0.0, 3.0, len(f.grid)), 0.0)
        g = SampledFunction(grid=f.grid, values=f.values + bump)
        e2 = scale_error(e, float(rng.uniform(1.0, 2.0))) if e.kind != "zero" else zero_error()
        y = float(rng.uniform(-2.0, 2.0))
        lam = float(rng.uniform(0.2, 0.8))
        recs = check_conjugate_properties(f, g, e, e2, y, lam=lam, smooth_f=smooth)
        for r in recs:
            if r.skipped is not None:
                skipped[r.property_id] += 1
                reasons[r.property_id] = r.skipped
                continue
            ran[r.property_id] += 1
            if r.worst_gap is not None and r.worst_gap > worst[r.property_id]:
                worst[r.property_id] = r.worst_gap
                witness[r.property_id] = r.witness
    out = []
    for pid in _CONJUGACY_IDS:
        if ran[pid] == 0:
            out.append(PropertyRecord(property_id=pid, passed=True, worst_gap=None, witness=None,
                                      tolerance=INEQ_TOL, skipped=reasons.get(pid, "no applicable instance")))
        else:
            out.append(PropertyRecord(property_id=pid, passed=bool(worst[pid] <= INEQ_TOL),
                                      worst_gap=float(worst[pid]), witness=witness[pid], tolerance=INEQ_TOL,
                                      details={"instances": ran[pid], "skipped": skipped[pid]}))
    return out


def _prop_conjugacy(rng) -> List[PropertyRecord]:
    return conjugacy_property_sweep(rng, instances=36)


_FY_FIXTURES = (
    ("neg_square", {}, "quadratic", (-2.0, 2.0, 401), 0.5),
    ("abs", {}, "zero", (-1.0, 1.0, 201), 0.0),
    ("quad", {"a": 1.0}, "zero", (-3.0, 3.0, 301), 1.0),
    ("sine", {}, "scaled_distance", (-math.pi, math.pi, 257), None),
)


def _fy_kernel(kind: str) -> ErrorFunction:
    return {"quadratic": quadratic_error(1.0), "zero": zero_error(),
            "scaled_distance": lipschitz_error(1.0)}[kind]


def _prop_fenchel_young(rng) -> List[PropertyRecord]:
    worst = NEG_INF
    witness = None
    for name, params, kind, (a, b, n), x in _FY_FIXTURES:
        grid = make_uniform_grid(a, b, n)
        f = sample(ClosedFormFunction(name, params), grid)
        e = _fy_kernel(kind)
        if x is None:
            x = float(grid.points[len(grid) // 3])
        interval = e_subdiff_interval(f, e, x)
        members = [interval.lower, 0.5 * (interval.lower + interval.upper), interval.upper]
        exterior = [interval.lower - 0.5, interval.upper + 0.5]
        for s in members + exterior:
            gap = fenchel_young_gap(f, e, x, s)
            m = STRUCT_TOL * -1.0 - gap  # nonnegativity margin
            if m > worst:
                worst, witness = m, (name, s, "nonneg")
        for s in members:
            m = fenchel_young_gap(f, e, x, s) - INEQ_TOL
            if m > worst:
                worst, witness = m, (name, s, "member")
        for s in exterior:
            m = 1e-6 - fenchel_young_gap(f, e, x, s)
            if m > worst:
                worst, witness = m, (name, s, "exterior")
    return [_pass("fenchel-young-equality", worst, witness, tol=0.0)]


def _prop_three_way(rng) -> List[PropertyRecord]:
    bad = 0
    witness = None
    for k in range(20):
        if rng.random() < 0.7:
            a = float(rng.uniform(0.5, 3.0))
            b = float(rng.uniform(-2.0, 2.0))
            f = ClosedFormFunction("quad", {"a": a, "b": b})
            e = quadratic_error(float(rng.uniform(0.2, 3.0)))
        else:
            f = ClosedFormFunction("neg_square")
            e = quadratic_error(float(rng.uniform(1.0, 3.0)))
        grid = make_uniform_grid(-2.0, 2.0, 161)
        x = float(grid.points[int(rng.integers(10, 151))])
        res = check_three_way_equivalence(f, e, x, grid)
        if not res.agree_all:
            bad += 1
            if witness is None:
                witness = (f.name, x, res.probes)
    return [_bool_prop("three-way-equivalence", bad == 0, witness=witness,
                       details={"instances": 20, "disagreements": bad})]


def _prop_stability(rng) -> List[PropertyRecord]:
    worst_tri = NEG_INF
    worst_bnd = NEG_INF
    grid = make_uniform_grid(-2.0, 2.0, 161)
    for _ in range(15):
        f = random_sampled(rng, n=161)
        y1 = float(grid.points[int(rng.integers(0, 161))])
        y2 = float(grid.points[int(rng.integers(0, 161))])
        tri_kernel = lipschitz_error(float(rng.uniform(0.2, 2.0)))
        rep = check_conjugate_stability(f, tri_kernel, y1, y2)
        if rep.triangle is not None:
            worst_tri = max(worst_tri, rep.triangle.max_violation)
        bnd_kernel = quadratic_error(float(rng.uniform(0.2, 2.0)))
        rep2 = check_conjugate_stability(f, bnd_kernel, y1, y2)
        if rep2.bounded is not None:
            worst_bnd = max(worst_bnd, rep2.bounded.max_violation)
    return [
        _pass("stability-triangle-kernel", worst_tri, tol=INEQ_TOL, details={"instances": 15}),
        _pass("stability-bounded-kernel", worst_bnd, tol=INEQ_TOL, details={"instances": 15}),
    ]


def _quartic_fixture() -> SampledFunction:
    grid = make_uniform_grid(-1.5, 1.5, 301)
    return sample(ClosedFormFunction("quartic_well"), grid)


def _prop_optimality(rng) -> List[PropertyRecord]:
    recs = []
    # global: parabola at its minimum, and not at a non-minimum
    grid = make_uniform_grid(-2.0, 2.0, 201)
    parab = sample(ClosedFormFunction("quad", {"a": 2.0}), grid)
    ok = bool(certify_global_min(parab, zero_error(), 0.0))
    ok &= certify_global_min(parab, zero_error(), 0.0).is_grid_argmin
    ok &= not bool(certify_global_min(parab, zero_error(), 1.0))
    q = _quartic_fixture()
    argmin = float(q.grid.points[int(np.argmin(q.values))])
    cert = certify_global_min(q, quadratic_error(1.0), argmin)
    ok &= bool(cert) and cert.is_grid_argmin
    recs.append(_bool_prop("global-min-certificate", ok))

    # local: both wells certify, the center (a local max) does not
    wells = [float(q.grid.points[i]) for i in (np.argmin(q.values),
                                               len(q.grid) - 1 - int(np.argmin(q.values)))]
    ok = all(bool(certify_local_min(q, quadratic_error(1.0), w)) for w in wells)
    ok &= all(bool(certify_local_min(q, quadratic_error(0.25), w)) for w in wells)
    center_small = certify_local_min(q, quadratic_error(0.25), 0.0)
    ok &= not bool(center_small)
    center_big = certify_local_min(q, quadratic_error(1.0), 0.0)
    recs.append(_bool_prop("local-min-certificate", ok,
                           details={"center_with_unit_budget": bool(center_big),
                                    "note": "a unit quadratic budget absorbs the center dip; "
                                            "the certificate there is genuinely true"}))
    ok = bool(certify_local_min(parab, zero_error(), 0.0))
    recs.append(_bool_prop("local-min-parabola", ok))
    return recs


def _prop_inclusion(rng) -> List[PropertyRecord]:
    grid = make_uniform_grid(-2.0, 2.0, 201)
    zero_f = SampledFunction(grid=grid, values=np.zeros(201))
    parab = sample(ClosedFormFunction("quad", {"a": 2.0}), grid)
    half = sample(ClosedFormFunction("quad", {"a": 1.0}), grid)
    r1 = check_subdiff_inclusion(parab, zero_f, zero_error(), 0.0, factor=1.0)
    r2 = check_subdiff_inclusion(parab, half, zero_error(), 0.0, factor=1.0)
    q = _quartic_fixture()
    half_q = sample(ClosedFormFunction("quad", {"a": 1.0}), q.grid)
    comp = SampledFunction(grid=q.grid, values=q.values + half_q.values)
    x0 = float(q.grid.points[int(np.argmin(q.values))])
    r3 = check_subdiff_inclusion(comp, half_q, quadratic_error(1.0), x0, factor=1.0)
    worst = max(r1.max_violation, r2.max_violation, r3.max_violation)
    recs = [_pass("subdiff-inclusion-global", worst, tol=INEQ_TOL)]
    r4 = check_subdiff_inclusion(comp, half_q, quadratic_error(1.0), x0, factor=2.0)
    r5 = check_subdiff_inclusion(parab, zero_f, zero_error(), 0.0, factor=2.0)
    recs.append(_pass("subdiff-inclusion-local", max(r4.max_violation, r5.max_violation), tol=INEQ_TOL))
    return recs


def _prop_infconv_fixtures(rng) -> List[PropertyRecord]:
    grid = make_uniform_grid(-4.0, 4.0, 161)
    ind = sample(ClosedFormFunction("indicator_point", {"x0": 0.0}), grid)
    quad = sample(ClosedFormFunction("quad", {"a": 1.0}), grid)
    ident = inf_convolution(ind, quad, grid)
    worst = float(np.max(np.abs(ident.values - quad.values)))
    half = inf_convolution(quad, quad, grid)
    target = 0.25 * np.square(grid.points)
    h = float(grid.step)
    worst = max(worst, float(np.max(np.abs(half.values - target))) - (h * h / 4.0 + STRUCT_TOL))
    ab = sample(ClosedFormFunction("abs"), grid)
    conv_abs = inf_convolution(ab, ab, grid)
    worst = max(worst, float(np.max(np.abs(conv_abs.values - ab.values))))
    return [_pass("infconv-fixtures", worst, tol=STRUCT_TOL)]


def _prop_infconv_theorem(rng) -> List[PropertyRecord]:
    worst = NEG_INF
    for _ in range(50):
        f = random_convex_sampled(rng, n=48)
        g = random_convex_sampled(rng, n=48)
        e = random_kernel(rng)
        e2 = random_kernel(rng)
        y = float(f.grid.points[int(rng.integers(0, 48))])
        xstar = float(rng.uniform(-4.0, 4.0))
        res = check_sum_conjugate_infconv(f, g, e, e2, y, xstar)
        worst = max(worst, sub_ext(res.lhs, res.rhs))
    recs = [_pass("infconv-inequality", worst, tol=INEQ_TOL, details={"instances": 50})]

    grid = make_uniform_grid(-2.0, 2.0, 81)
    fq = sample(ClosedFormFunction("quad", {"a": 1.0}), grid)
    res = check_sum_conjugate_infconv(fq, fq, zero_error(), zero_error(), 0.0, 0.0)
    recs.append(_bool_prop("infconv-equality-case", res.equality_flag and res.inequality_ok,
                           details={"lhs": res.lhs, "rhs": res.rhs}))
    return recs


def _prop_interval_membership(rng) -> List[PropertyRecord]:
    mismatches = 0
    witness = None
    for _ in range(25):
        f = random_sampled(rng, n=41, inf_frac=float(rng.choice([0.0, 0.2])))
        e = random_kernel(rng)
        finite_idx = np.flatnonzero(np.isfinite(f.values))
        x = float(f.grid.points[int(rng.choice(finite_idx))])
        interval = e_subdiff_interval(f, e, x)
        E = pairwise_matrix(e, f.grid)
        lo = interval.lower if math.isfinite(interval.lower) else -10.0
        hi = interval.upper if math.isfinite(interval.upper) else 10.0
        lo, hi = min(lo, hi), max(lo, hi)
        width = max(1.0, hi - lo)
        for s in rng.uniform(lo - 2 * width, hi + 2 * width, 20):
            member = e_subdiff_membership(f.grid.points, f.values, E, x, float(s))
            if member != interval.contains(float(s)):
                mismatches += 1
                if witness is None:
                    witness = (x, float(s))
    return [_bool_prop("interval-membership-agreement", mismatches == 0, witness=witness,
                       details={"instances": 25, "probes_each": 20})]


def _prop_interval_monotone(rng) -> List[PropertyRecord]:
    worst = NEG_INF
    for _ in range(25):
        f = random_sampled(rng, n=41, inf_frac=0.0)
        c1 = float(rng.uniform(0.1, 2.0))
        c2 = c1 + float(rng.uniform(0.0, 2.0))
        x = float(f.grid.points[int(rng.integers(1, 40))])
        i1 = e_subdiff_interval(f, quadratic_error(c1), x)
        i2 = e_subdiff_interval(f, quadratic_error(c2), x)
        if i1.empty:
            continue
        worst = max(worst, sub_ext(i2.lower, i1.lower), sub_ext(i1.upper, i2.upper))
    return [_pass("interval-monotone-in-budget", worst, tol=STRUCT_TOL, details={"instances": 25})]


def _prop_affine_minorant(rng) -> List[PropertyRecord]:
    worst = NEG_INF
    fixtures = []
    grid = make_uniform_grid(-2.0, 2.0, 161)
    fixtures.append((sample(ClosedFormFunction("quad", {"a": 1.0}), grid), zero_error(), 0.0))
    fixtures.append((sample(ClosedFormFunction("neg_square"), grid), quadratic_error(1.0), 0.0))
    for _ in range(10):
        fixtures.append((random_sampled(rng, n=81), random_kernel(rng), float(rng.uniform(-1.5, 1.5))))
    for f, e, y in fixtures:
        s0, b = affine_minorant(f, e, y)
        bound = s0 * f.grid.points + b
        g = anchored_values(f, e, y)
        gap = np.where(np.isfinite(g), bound - g, NEG_INF)
        worst = max(worst, float(np.max(gap)))
    return [_pass("affine-minorant-bound", worst, tol=STRUCT_TOL, details={"fixtures": len(fixtures)})]


def _prop_biconjugate_pinch(rng) -> List[PropertyRecord]:
    grid = make_uniform_grid(-2.0, 2.0, 401)
    f = sample(ClosedFormFunction("neg_square"), grid)
    e = quadratic_error(1.0)
    dual = make_uniform_grid(-6.0, 6.0, 241)
    worst = 0.0
    for x in (0.5, -1.0, 0.25):
        bic = e_biconjugate(f, e, x, dual, grid, algorithm="brute")
        worst = max(worst, abs(bic.eval_at(x) - f.eval_at(x)))
    return [_pass("biconjugate-anchor-pinch", worst, tol=INEQ_TOL)]


def _prop_witnesses(rng) -> List[PropertyRecord]:
    worst = 0.0
    grid = make_uniform_grid(-2.0, 2.0, 81)
    f = sample(ClosedFormFunction("neg_square"), grid)
    rep = check_e_convex_def(f, zero_error())
    x, y, t = rep.witness
    worst = max(worst, abs(econvex_violation_at(f, zero_error(), x, y, t) - rep.max_violation))
    tri_grid = make_uniform_grid(0.0, 2.0, 3)
    val = validate_error(quadratic_error(1.0), tri_grid)
    z, ymid, xw = val.triangle_witness
    e = quadratic_error(1.0)
    re_tri = sub_ext(sub_ext(eval_error(e, z, xw), eval_error(e, z, ymid)), eval_error(e, ymid, xw))
    worst = max(worst, abs(re_tri - val.worst_triangle_violation))
    T = OperatorSample(points=grid.points, duals=-grid.points)
    mono = check_e_monotone(T, zero_error(), 1.0)
    xw, yw = mono.witness
    re_mono = -(xw - yw) * (-(xw) - (-(yw)))
    worst = max(worst, abs(re_mono - mono.max_violation))
    return [_pass("witness-reproducibility", worst, tol=STRUCT_TOL)]


# registry order is the report order; ids must be globally unique
_REGISTRY: List[Callable[[np.random.Generator], List[PropertyRecord]]] = [
    _prop_add_convention,
    _prop_econvex_negsq,
    _prop_econvex_xexp,
    _prop_char_equivalence,
    _prop_product_kernel,
    _prop_lipschitz_kernel,
    _prop_gradient_chain,
    _prop_dini_bound,
    _prop_sigma_growth,
    _prop_oracle_agreement,
    _prop_conjugate_convexity,
    _prop_conjugacy,
    _prop_fenchel_young,
    _prop_three_way,
    _prop_stability,
    _prop_optimality,
    _prop_inclusion,
    _prop_infconv_fixtures,
    _prop_infconv_theorem,
    _prop_interval_membership,
    _prop_interval_monotone,
    _prop_affine_minorant,
    _prop_biconjugate_pinch,
    _prop_witnesses,
]

PROPERTY_IDS = (
    "extended-add-convention",
    "econvex-definition-negsq",
    "econvex-definition-xexp",
    "exp-kernel-validation",
    "econvex-char-equivalence",
    "product-kernel-econvex",
    "lipschitz-kernel-econvex",
    "gradient-inequality",
    "gradient-2e-monotone",
    "dini-pair-bound",
    "sigma-growth-falsifier",
    "conjugate-oracle-agreement",
    "conjugate-convexity",
    *_CONJUGACY_IDS,
    "fenchel-young-equality",
    "three-way-equivalence",
    "stability-triangle-kernel",
    "stability-bounded-kernel",
    "global-min-certificate",
    "local-min-certificate",
    "local-min-parabola",
    "subdiff-inclusion-global",
    "subdiff-inclusion-local",
    "infconv-fixtures",
    "infconv-inequality",
    "infconv-equality-case",
    "interval-membership-agreement",
    "interval-monotone-in-budget",
    "affine-minorant-bound",
    "biconjugate-anchor-pinch",
    "witness-reproducibility",
)


def run_suite(seed: int = 0, threads: Optional[int] = None) -> SuiteReport:
    """Run every registered property with seeded determinism.

    Thread count comes from `threads`, else ECONVEX_THREADS, else 1.
    Records are returned in registry order regardless of scheduling.
    """
    if threads is None:
        threads = int(os.environ.get("ECONVEX_THREADS", "1"))
    seqs = np.random.SeedSequence(seed).spawn(len(_REGISTRY))
    jobs = [(runner, np.random.default_rng(seq)) for runner, seq in zip(_REGISTRY, seqs)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda j: j[0](j[1]), jobs))
    else:
        chunks = [runner(rng) for runner, rng in jobs]
    records = [r for chunk in chunks for r in chunk]
    ids = [r.property_id for r in records]
    if sorted(ids) != sorted(set(ids)) or set(ids) != set(PROPERTY_IDS):
        raise RuntimeError("property registry ids are inconsistent")
    return SuiteReport(seed=seed, records=records)
