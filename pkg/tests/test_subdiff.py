import math

import numpy as np
import pytest

from econvex.extreal import INF, NEG_INF, add_ext
from econvex.funcmodel import ClosedFormFunction, SampledFunction, make_uniform_grid, sample
from econvex.errorfn import eval_error, pairwise_matrix, quadratic_error, scale_error, zero_error
from econvex.subdiff import (
    OperatorSample,
    check_e_monotone,
    dini_upper,
    e_subdiff_interval,
    e_subdiff_membership,
)


def ref_interval(f, e, x):
    """Test-local quotient loop."""
    i = f.grid.node_index(x)
    fx = f.values[i]
    lower, upper = NEG_INF, INF
    for j, y in enumerate(f.grid.points):
        if j == i:
            continue
        rhs = add_ext(f.values[j] - fx, eval_error(e, float(x), float(y)))
        q = rhs / (float(y) - float(x))
        if y > x:
            upper = min(upper, q)
        else:
            lower = max(lower, q)
    return lower, upper


def test_negsq_quadratic_interval_collapses():
    grid = make_uniform_grid(-2, 2, 41)
    f = sample(ClosedFormFunction("neg_square"), grid)
    e = quadratic_error(1.0)
    # the quotient is identically -2x, so both bounds coincide there
    for x in (1.0, -0.5, 0.0):
        iv = e_subdiff_interval(f, e, x)
        assert iv.lower == pytest.approx(-2 * x, abs=1e-12)
        assert iv.upper == pytest.approx(-2 * x, abs=1e-12)
        lo, hi = ref_interval(f, e, x)
        assert iv.lower == lo and iv.upper == hi


def test_abs_classical_subdifferential_at_kink():
    grid = make_uniform_grid(-1, 1, 201)
    f = sample(ClosedFormFunction("abs"), grid)
    iv = e_subdiff_interval(f, zero_error(), 0.0)
    assert (iv.lower, iv.upper, iv.empty) == (-1.0, 1.0, False)


def test_negsq_zero_budget_empty():
    grid = make_uniform_grid(-1, 1, 3)
    f = sample(ClosedFormFunction("neg_square"), grid)
    iv = e_subdiff_interval(f, zero_error(), 0.0)
    assert iv.empty
    assert iv.lower == 1.0 and iv.upper == -1.0


def test_interval_at_infinite_node_is_empty():
    grid = make_uniform_grid(-1, 1, 3)
    f = sample(ClosedFormFunction("indicator_point", {"x0": 0.0}), grid)
    iv = e_subdiff_interval(f, zero_error(), 1.0)
    assert iv.empty


def test_interval_off_grid_is_error():
    grid = make_uniform_grid(-1, 1, 3)
    f = sample(ClosedFormFunction("abs"), grid)
    with pytest.raises(ValueError, match="off-grid"):
        e_subdiff_interval(f, zero_error(), 0.25)


def test_boundary_node_has_one_sided_infinite_bound():
    grid = make_uniform_grid(0, 1, 11)
    f = sample(ClosedFormFunction("quad", {"a": 1.0}), grid)
    iv = e_subdiff_interval(f, zero_error(), 0.0)
    assert iv.lower == NEG_INF and math.isfinite(iv.upper)
    iv2 = e_subdiff_interval(f, zero_error(), 1.0)
    assert iv2.upper == INF and math.isfinite(iv2.lower)


def test_indicator_support_interval_is_whole_line():
    grid = make_uniform_grid(-1, 1, 3)
    f = sample(ClosedFormFunction("indicator_point", {"x0": 0.0}), grid)
    iv = e_subdiff_interval(f, zero_error(), 0.0)
    assert iv.lower == NEG_INF and iv.upper == INF and not iv.empty


def test_membership_matches_interval_in_1d():
    rng = np.random.default_rng(77)
    grid = make_uniform_grid(-2, 2, 41)
    for _ in range(10):
        vals = rng.uniform(-5, 5, 41)
        f = SampledFunction(grid=grid, values=vals)
        e = quadratic_error(float(rng.uniform(0.2, 2.0)))
        x = float(grid.points[int(rng.integers(1, 40))])
        iv = e_subdiff_interval(f, e, x)
        E = pairwise_matrix(e, grid)
        for s in rng.uniform(-8, 8, 20):
            got = e_subdiff_membership(grid.points, vals, E, x, float(s))
            assert got == iv.contains(float(s))


def test_membership_constant_function():
    grid = make_uniform_grid(-1, 1, 5)
    vals = np.zeros(5)
    E = pairwise_matrix(zero_error(), grid)
    assert e_subdiff_membership(grid.points, vals, E, 0.0, 0.0)


def test_membership_2d_cloud():
    points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    vals = np.zeros(3)
    E = np.zeros((3, 3))
    assert not e_subdiff_membership(points, vals, E, [0.0, 0.0], [1.0, 1.0])
    assert e_subdiff_membership(points, vals, E, [0.0, 0.0], [0.0, 0.0])
    assert e_subdiff_membership(points, vals, E, [0.0, 0.0], [-1.0, -0.5])


def test_membership_unknown_base_point():
    grid = make_uniform_grid(-1, 1, 5)
    E = pairwise_matrix(zero_error(), grid)
    with pytest.raises(ValueError, match="unknown base point"):
        e_subdiff_membership(grid.points, np.zeros(5), E, 0.3, 0.0)


def test_dini_square_slope():
    est = dini_upper(ClosedFormFunction("quad", {"a": 2.0}), 1.0, 1.0)
    assert est.value == pytest.approx(2.0, abs=1e-6)
    assert est.converged
    assert len(est.quotients) == 21


def test_dini_abs_at_kink_is_exact():
    est = dini_upper(ClosedFormFunction("abs"), 0.0, 1.0)
    assert est.value == 1.0
    assert est.converged
    est_neg = dini_upper(ClosedFormFunction("abs"), 0.0, -1.0)
    assert est_neg.value == 1.0


def test_dini_outside_domain_is_negative_infinity():
    est = dini_upper(ClosedFormFunction("indicator_point", {"x0": 0.0}), 1.0, 1.0)
    assert est.value == NEG_INF
    assert est.converged


def test_dini_direction_exits_domain():
    with pytest.raises(ValueError, match="direction exits domain"):
        dini_upper(ClosedFormFunction("indicator_point", {"x0": 0.0}), 0.0, 1.0)


def test_dini_negative_direction_and_anchor():
    # d/dt of -(x+tu)^2 at t=0+ is -2xu
    est = dini_upper(ClosedFormFunction("neg_square"), 1.5, -2.0)
    assert est.value == pytest.approx(6.0, abs=1e-5)


def test_monotone_gradient_of_negsq_doubled_budget():
    grid = make_uniform_grid(-2, 2, 81)
    T = OperatorSample(points=grid.points, duals=-2.0 * grid.points)
    rep = check_e_monotone(T, quadratic_error(1.0), factor=2.0)
    assert rep.max_violation == 0.0  # algebraic identity, exact in floats
    assert rep.ok


def test_monotone_identity_operator():
    grid = make_uniform_grid(-2, 2, 41)
    T = OperatorSample(points=grid.points, duals=grid.points.copy())
    rep = check_e_monotone(T, zero_error(), factor=1.0)
    assert rep.ok and rep.max_violation <= 0.0


def test_monotone_decreasing_operator_fails():
    grid = make_uniform_grid(-2, 2, 41)
    T = OperatorSample(points=grid.points, duals=-grid.points)
    rep = check_e_monotone(T, zero_error(), factor=1.0)
    assert not rep.ok
    x, y = rep.witness
    assert -(x - y) * (-x + y) == pytest.approx(rep.max_violation, abs=1e-12)


def test_monotone_invalid_factor():
    T = OperatorSample(points=np.array([0.0, 1.0]), duals=np.array([0.0, 1.0]))
    with pytest.raises(ValueError, match="invalid constant"):
        check_e_monotone(T, zero_error(), factor=0.0)


def test_operator_sample_distinct_points():
    with pytest.raises(ValueError, match="distinct"):
        OperatorSample(points=np.array([0.0, 0.0]), duals=np.array([1.0, 2.0]))


def test_interval_monotone_in_budget():
    rng = np.random.default_rng(4)
    grid = make_uniform_grid(-2, 2, 41)
    for _ in range(10):
        f = SampledFunction(grid=grid, values=rng.uniform(-5, 5, 41))
        x = float(grid.points[int(rng.integers(1, 40))])
        i1 = e_subdiff_interval(f, quadratic_error(0.5), x)
        i2 = e_subdiff_interval(f, quadratic_error(1.5), x)
        if i1.empty:
            continue
        assert i2.lower <= i1.lower + 1e-12
        assert i1.upper <= i2.upper + 1e-12


def test_doubled_budget_via_scaled_kernel():
    grid = make_uniform_grid(-2, 2, 41)
    f = sample(ClosedFormFunction("neg_square"), grid)
    iv1 = e_subdiff_interval(f, quadratic_error(2.0), 1.0)
    iv2 = e_subdiff_interval(f, scale_error(quadratic_error(1.0), 2.0), 1.0)
    assert iv1.lower == iv2.lower and iv1.upper == iv2.upper
