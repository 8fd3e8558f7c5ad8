import itertools
import math

import numpy as np
import pytest

from econvex.extreal import INF
from econvex.errorfn import (
    add_errors,
    eval_error,
    exp_error,
    lipschitz_error,
    product_error,
    quadratic_error,
    sampled_matrix_error,
    scale_error,
    validate_error,
    zero_error,
    k_value,
)
from econvex.funcmodel import ClosedFormFunction, Grid, SampledFunction, make_uniform_grid, sample

ALL_KERNELS = [
    zero_error(),
    quadratic_error(1.0),
    quadratic_error(0.3),
    lipschitz_error(2.0),
    exp_error(),
]


def test_quadratic_value():
    assert eval_error(quadratic_error(1.0), 3.0, 1.0) == 4.0


def test_exp_kernel_vanishes_on_diagonal():
    for x in (-1.0, 0.0, 2.5):
        assert eval_error(exp_error(), x, x) == 0.0


def test_scaled_distance_value():
    assert eval_error(lipschitz_error(2.0), 0.0, 1.5) == 6.0
    assert eval_error(lipschitz_error(1.0), 0.0, 3.0) == 6.0
    assert eval_error(lipschitz_error(0.5), -1.0, 1.0) == 2.0


def test_invalid_constants():
    with pytest.raises(ValueError, match="invalid constant"):
        lipschitz_error(0.0)
    with pytest.raises(ValueError, match="invalid constant"):
        quadratic_error(-1.0)
    with pytest.raises(ValueError, match="invalid constant"):
        lipschitz_error(-2.0)


def _triangle_oracle(e, pts):
    """Independent exhaustive triple loop for the triangle property."""
    worst = -INF
    witness = None
    for z, y, x in itertools.product(pts, repeat=3):
        lhs = eval_error(e, z, x)
        rhs = eval_error(e, z, y) + eval_error(e, y, x)
        if lhs - rhs > worst:
            worst = lhs - rhs
            witness = (z, y, x)
    return worst, witness


def test_quadratic_triangle_fails_with_witness():
    grid = make_uniform_grid(0, 2, 3)
    rep = validate_error(quadratic_error(1.0), grid)
    want_worst, want_witness = _triangle_oracle(quadratic_error(1.0), [0.0, 1.0, 2.0])
    assert not rep.triangle_ok
    assert rep.worst_triangle_violation == want_worst == 2.0
    assert rep.triangle_witness == want_witness == (0.0, 1.0, 2.0)


def test_scaled_distance_triangle_holds():
    grid = make_uniform_grid(-3, 2, 41)
    rep = validate_error(lipschitz_error(1.7), grid)
    assert rep.triangle_ok
    worst, _ = _triangle_oracle(lipschitz_error(1.7), list(grid.points[::8]))
    assert worst <= 1e-12


def test_exp_kernel_validation_flags():
    grid = make_uniform_grid(-1, 1, 3)
    rep = validate_error(exp_error(), grid)
    assert rep.symmetric_ok and rep.nonneg_ok and rep.zero_diag_ok
    # independent pair enumeration
    for x, y in itertools.product(grid.points, repeat=2):
        v = eval_error(exp_error(), float(x), float(y))
        assert v >= 0.0
        assert v == eval_error(exp_error(), float(y), float(x))


@pytest.mark.parametrize("e", ALL_KERNELS)
def test_symmetry_is_bit_exact(e):
    grid = make_uniform_grid(-2.3, 1.9, 29)
    for x, y in itertools.product(grid.points[::4], repeat=2):
        assert eval_error(e, float(x), float(y)) == eval_error(e, float(y), float(x))


def test_positive_homogeneity_degrees():
    # quadratic scales with degree 2, scaled_distance with degree 1
    for lam in (0.5, 2.0, 3.7):
        for x, y in [(1.0, -0.5), (0.25, 2.0)]:
            q = quadratic_error(1.3)
            assert eval_error(q, lam * x, lam * y) == pytest.approx(lam**2 * eval_error(q, x, y), rel=1e-14)
            d = lipschitz_error(0.7)
            assert eval_error(d, lam * x, lam * y) == pytest.approx(lam * eval_error(d, x, y), rel=1e-14)


def test_product_error_example():
    grid = make_uniform_grid(-2, 2, 41)
    f = ClosedFormFunction("quad", {"a": 2.0})                      # x^2
    g = ClosedFormFunction("quad", {"a": 2.0, "b": -2.0, "c": 1.0})  # (x-1)^2
    e = product_error(f, g, grid)
    assert eval_error(e, 0.0, 1.0) == 1.0  # 0*0 + 1*1
    assert eval_error(e, 1.0, 0.0) == 1.0


def test_product_error_zero_functions():
    grid = make_uniform_grid(-1, 1, 21)
    z = ClosedFormFunction("quad", {"a": 0.0})
    e = product_error(z, z, grid)
    assert eval_error(e, 0.3, -0.7) == 0.0


def test_product_error_rejects_nonconvex():
    grid = make_uniform_grid(-1, 1, 3)
    with pytest.raises(ValueError, match="product precondition violated"):
        product_error(ClosedFormFunction("neg_square"), ClosedFormFunction("abs"), grid)


def test_product_error_rejects_negative():
    grid = make_uniform_grid(-1, 1, 11)
    # x is convex but takes negative values
    with pytest.raises(ValueError, match="product precondition violated"):
        product_error(ClosedFormFunction("quad", {"a": 0.0, "b": 1.0}), ClosedFormFunction("abs"), grid)


def test_product_error_with_sampled_inputs():
    grid = make_uniform_grid(-1, 1, 21)
    f = sample(ClosedFormFunction("abs"), grid)
    e = product_error(f, f, grid)
    assert eval_error(e, 1.0, 0.5) == pytest.approx(2 * 1.0 * 0.5)


def test_sampled_matrix_kernel():
    grid = make_uniform_grid(0, 1, 2)
    m = [[0.0, 2.0], [2.0, 0.0]]
    e = sampled_matrix_error(grid, m)
    assert eval_error(e, 0.0, 1.0) == 2.0
    with pytest.raises(ValueError, match="off-grid"):
        eval_error(e, 0.5, 1.0)
    rep = validate_error(e, grid)
    assert rep.symmetric_ok and rep.nonneg_ok and rep.zero_diag_ok


def test_validation_catches_asymmetry_and_negativity():
    grid = make_uniform_grid(0, 1, 2)
    e = sampled_matrix_error(grid, [[0.0, -1.0], [2.0, 0.0]])
    rep = validate_error(e, grid)
    assert not rep.symmetric_ok and rep.worst_asymmetry == 3.0
    assert not rep.nonneg_ok and rep.worst_negative == -1.0
    assert rep.nonneg_witness == (0.0, 1.0)


def test_k_values_and_boundedness():
    grid = make_uniform_grid(-1, 1, 5)
    rep = validate_error(quadratic_error(1.0), grid)
    # k at y is the grid max of e(., y): farthest node squared
    assert rep.k_values[0] == 4.0
    assert rep.k_values[2] == 1.0
    assert rep.bounded_flag
    e_inf = sampled_matrix_error(make_uniform_grid(0, 1, 2), [[0.0, INF], [INF, 0.0]])
    rep2 = validate_error(e_inf, make_uniform_grid(0, 1, 2))
    assert not rep2.bounded_flag
    assert k_value(quadratic_error(1.0), grid, 0.5) == pytest.approx(2.25)


def test_scaled_and_summed_wrappers():
    q = quadratic_error(1.0)
    assert eval_error(scale_error(q, 2.0), 0.0, 2.0) == 8.0
    both = add_errors(q, lipschitz_error(1.0))
    assert eval_error(both, 0.0, 1.0) == 1.0 + 2.0
    with pytest.raises(ValueError, match="invalid constant"):
        scale_error(q, 0.0)


def test_triangle_sampling_mode_on_large_grids():
    grid = make_uniform_grid(-2, 2, 256)
    rep = validate_error(quadratic_error(1.0), grid)
    assert rep.triangle_mode.startswith("sampled(seed=")
    assert not rep.triangle_ok  # sampling still falsifies the quadratic kernel
    z, y, x = rep.triangle_witness
    e = quadratic_error(1.0)
    re_violation = eval_error(e, z, x) - eval_error(e, z, y) - eval_error(e, y, x)
    assert re_violation == pytest.approx(rep.worst_triangle_violation, abs=1e-12)
