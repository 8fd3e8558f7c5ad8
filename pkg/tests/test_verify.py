import math

import numpy as np
import pytest

from econvex.extreal import INF
from econvex.funcmodel import ClosedFormFunction, Grid, SampledFunction, make_uniform_grid, sample
from econvex.errorfn import (
    exp_error,
    lipschitz_error,
    product_error,
    quadratic_error,
    sampled_matrix_error,
    zero_error,
)
from econvex.transform import e_conjugate_at
from econvex.subdiff import e_subdiff_interval
from econvex.verify import (
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


def negsq_on(a, b, n):
    return sample(ClosedFormFunction("neg_square"), make_uniform_grid(a, b, n))


class TestEConvexDef:
    def test_negsq_quadratic_exact_equality_exhaustive(self):
        f = negsq_on(-2, 2, 201)
        rep = check_e_convex_def(f, quadratic_error(1.0))
        assert rep.mode == "exhaustive"
        assert abs(rep.max_violation) <= 1e-12

    def test_negsq_quadratic_sampled_mode_above_cap(self):
        f = negsq_on(-2, 2, 401)
        rep = check_e_convex_def(f, quadratic_error(1.0), seed=3)
        assert rep.mode == "sampled(seed=3)"
        assert rep.checked_count >= 100_000
        assert abs(rep.max_violation) <= 1e-12

    def test_negsq_zero_budget_fails_with_exact_witness_value(self):
        f = negsq_on(-1, 1, 3)
        # the single midpoint triple: violation f(0) - f(1)/2 - f(-1)/2 = 1
        rep = check_e_convex_def(f, zero_error())
        assert rep.max_violation == 1.0
        assert rep.witness == (-1.0, 1.0, 0.5) or rep.witness == (1.0, -1.0, 0.5)
        assert econvex_violation_at(f, zero_error(), -1.0, 1.0, 0.5) == 1.0

    def test_xexp_kernel_on_nonnegative_grid(self):
        grid = make_uniform_grid(0, 2, 201)
        f = sample(ClosedFormFunction("x_exp_neg"), grid)
        rep = check_e_convex_def(f, exp_error())
        assert rep.max_violation <= 1e-12

    def test_xexp_kernel_fails_on_negative_arguments(self):
        # the kernel's certificate multiplies by t*x, which flips for x < 0;
        # on a symmetric grid the inequality genuinely fails
        grid = make_uniform_grid(-2, 2, 201)
        f = sample(ClosedFormFunction("x_exp_neg"), grid)
        rep = check_e_convex_def(f, exp_error())
        assert rep.max_violation > 1.0
        x, y, t = rep.witness
        assert econvex_violation_at(f, exp_error(), x, y, t) == pytest.approx(rep.max_violation, abs=1e-12)

    def test_t_set_mode_on_closed_form(self):
        grid = make_uniform_grid(-2, 2, 41)
        rep = check_e_convex_def(ClosedFormFunction("neg_square"), quadratic_error(1.0),
                                 grid=grid, t_mode="t_set")
        assert abs(rep.max_violation) <= 1e-12
        rep2 = check_e_convex_def(ClosedFormFunction("neg_square"), zero_error(),
                                  grid=grid, t_mode="t_set")
        assert rep2.max_violation > 0.1

    def test_non_uniform_grid_rejected(self):
        g = Grid.from_points([0.0, 1.0, 3.0])
        f = SampledFunction(grid=g, values=[0.0, 1.0, 2.0])
        with pytest.raises(ValueError, match="grid not uniform"):
            check_e_convex_def(f, zero_error())

    def test_infinite_midpoint_is_a_violation(self):
        g = make_uniform_grid(0, 2, 3)
        f = SampledFunction(grid=g, values=[0.0, INF, 0.0])
        rep = check_e_convex_def(f, zero_error())
        assert rep.max_violation == INF

    def test_domain_hole_at_endpoint_is_vacuous(self):
        g = make_uniform_grid(0, 2, 3)
        f = SampledFunction(grid=g, values=[INF, 0.0, 0.0])
        rep = check_e_convex_def(f, zero_error())
        assert rep.max_violation <= 0.0


class TestCharSlopes:
    def test_negsq_with_quadratic_budget_passes(self):
        f = negsq_on(-2, 2, 81)
        rep = check_char_slopes(f, quadratic_error(1.0))
        assert rep.max_violation <= 1e-9

    def test_convex_function_passes_with_zero_budget(self):
        grid = make_uniform_grid(-2, 2, 81)
        f = sample(ClosedFormFunction("quad", {"a": 1.5, "b": -0.3}), grid)
        rep = check_char_slopes(f, zero_error())
        assert rep.max_violation <= 1e-9

    def test_negsq_with_zero_budget_fails_with_witness(self):
        f = negsq_on(-2, 2, 81)
        rep = check_char_slopes(f, zero_error())
        assert rep.max_violation > 1e-9
        assert rep.witness is not None

    def test_cross_equivalence_with_definition(self):
        rng = np.random.default_rng(21)
        grid = make_uniform_grid(-2, 2, 41)
        for _ in range(50):
            vals = rng.uniform(-5, 5, 41)
            if rng.random() < 0.3:
                vals[rng.random(41) < 0.15] = INF
            f = SampledFunction(grid=grid, values=vals)
            e = zero_error() if rng.random() < 0.5 else quadratic_error(float(rng.uniform(0.1, 3)))
            d_pass = check_e_convex_def(f, e).max_violation <= 1e-9
            c_pass = check_char_slopes(f, e).max_violation <= 1e-9
            assert d_pass == c_pass

    def test_domain_hole_detected_by_two_slope_form(self):
        g = make_uniform_grid(0, 2, 3)
        f = SampledFunction(grid=g, values=[0.0, INF, 0.0])
        rep = check_char_slopes(f, zero_error())
        assert rep.max_violation == INF


class TestFenchelYoung:
    def test_negsq_member_gap_zero(self):
        f = negsq_on(-2, 2, 401)
        e = quadratic_error(1.0)
        # anchored at x = 0.5 the budgeted function is affine: conjugate -0.25
        assert e_conjugate_at(f, e, 0.5, -1.0) == pytest.approx(-0.25, abs=1e-12)
        gap = fenchel_young_gap(f, e, 0.5, -1.0)
        assert -1e-12 <= gap <= 1e-9

    def test_negsq_nonmember_gap_positive(self):
        f = negsq_on(-2, 2, 401)
        gap = fenchel_young_gap(f, quadratic_error(1.0), 0.5, 0.0)
        assert gap == pytest.approx(1.5, abs=1e-12)
        assert gap > 1e-6

    def test_abs_classical_equality(self):
        f = sample(ClosedFormFunction("abs"), make_uniform_grid(-1, 1, 201))
        gap = fenchel_young_gap(f, zero_error(), 0.0, 0.5)
        assert abs(gap) <= 1e-12

    def test_anchor_precondition(self):
        grid = make_uniform_grid(-1, 1, 21)
        one = ClosedFormFunction("quad", {"a": 0.0, "c": 1.0})
        e = product_error(one, one, grid)  # e(x, x) = 2 everywhere
        f = sample(ClosedFormFunction("abs"), grid)
        with pytest.raises(ValueError, match="anchor precondition violated"):
            fenchel_young_gap(f, e, 0.0, 0.0)

    def test_gap_nonnegative_randomized(self):
        rng = np.random.default_rng(13)
        grid = make_uniform_grid(-2, 2, 81)
        for _ in range(20):
            f = SampledFunction(grid=grid, values=rng.uniform(-5, 5, 81))
            e = quadratic_error(float(rng.uniform(0.1, 2)))
            x = float(grid.points[int(rng.integers(0, 81))])
            s = float(rng.uniform(-6, 6))
            assert fenchel_young_gap(f, e, x, s) >= -1e-12


class TestThreeWay:
    def test_negsq_worked_probes(self):
        grid = make_uniform_grid(-2, 2, 401)
        f = ClosedFormFunction("neg_square")
        e = quadratic_error(1.0)
        res = check_three_way_equivalence(f, e, 0.5, grid)
        assert res.agree_all
        probes = {round(s, 6): (b1, b2, b3) for s, b1, b2, b3 in res.probes}
        # the subgradient set collapses to {-1}; half a unit off is outside
        assert probes[-1.0] == (True, True, True)
        outside = [v for s, v in probes.items() if abs(s - (-1.0)) > 0.4]
        assert all(v == (False, False, False) for v in outside)

    def test_classical_parabola(self):
        grid = make_uniform_grid(-3, 3, 301)
        res = check_three_way_equivalence(ClosedFormFunction("quad", {"a": 1.0}), zero_error(), 1.0, grid)
        assert res.agree_all
        member = [p for p in res.probes if abs(p[0] - 1.0) < 1e-9]
        assert member and member[0][1:] == (True, True, True)

    def test_empty_interval_probes_outside_only(self):
        grid = make_uniform_grid(-2, 2, 161)
        res = check_three_way_equivalence(ClosedFormFunction("neg_square"), quadratic_error(0.5), 0.5, grid)
        assert res.interval.empty
        assert res.agree_all
        assert all(p[1:] == (False, False, False) for p in res.probes)


class TestConjugateProperties:
    def test_shift_identity_exact(self):
        f = negsq_on(-2, 2, 161)
        recs = {r.property_id: r for r in check_conjugate_properties(
            f, None, quadratic_error(1.0), None, 1.0, lam=3.0)}
        r = recs["conjugacy-shift"]
        assert r.skipped is None and r.worst_gap <= 1e-12

    def test_positive_scaling_identity_two_sided(self):
        f = negsq_on(-2, 2, 161)
        recs = {r.property_id: r for r in check_conjugate_properties(
            f, None, quadratic_error(1.0), None, 1.0, lam=2.0)}
        r = recs["conjugacy-positive-scaling"]
        assert r.skipped is None and r.worst_gap <= 1e-12
        r = recs["conjugacy-argument-scaling"]
        assert r.skipped is None and r.worst_gap <= 1e-12

    def test_biconjugate_upper_bound_xexp(self):
        grid = make_uniform_grid(-2, 2, 161)
        f = sample(ClosedFormFunction("x_exp_neg"), grid)
        recs = {r.property_id: r for r in check_conjugate_properties(
            f, None, exp_error(), None, 0.0)}
        r = recs["biconjugate-upper-bound"]
        assert r.skipped is None and r.worst_gap <= 1e-9

    def test_lower_bound_with_triangle_kernel(self):
        grid = make_uniform_grid(-2, 2, 161)
        f = sample(ClosedFormFunction("quad", {"a": 1.0}), grid)
        recs = {r.property_id: r for r in check_conjugate_properties(
            f, None, lipschitz_error(1.0), None, 0.0, smooth_f=True)}
        r = recs["biconjugate-lower-bound"]
        assert r.skipped is None and r.worst_gap <= 1e-9

    def test_lower_bound_skipped_without_triangle(self):
        f = negsq_on(-2, 2, 81)
        recs = {r.property_id: r for r in check_conjugate_properties(
            f, None, quadratic_error(1.0), None, 0.0, smooth_f=True)}
        r = recs["biconjugate-lower-bound"]
        assert r.skipped is not None and "triangle" in r.skipped

    def test_order_reversal_skipped_loudly_when_precondition_fails(self):
        f = negsq_on(-2, 2, 81)
        g = SampledFunction(grid=f.grid, values=f.values - 1.0)  # g < f
        recs = {r.property_id: r for r in check_conjugate_properties(
            f, g, quadratic_error(1.0), None, 0.0)}
        r = recs["conjugacy-order-reversal"]
        assert r.skipped is not None and "f <= g" in r.skipped

    def test_all_items_pass_on_well_formed_instance(self):
        rng = np.random.default_rng(2)
        grid = make_uniform_grid(-2, 2, 64)
        f = sample(ClosedFormFunction("quad", {"a": 1.2, "b": 0.3}), grid)
        g = SampledFunction(grid=grid, values=f.values + rng.uniform(0, 2, 64))
        e = lipschitz_error(1.0)
        from econvex.errorfn import scale_error
        recs = check_conjugate_properties(f, g, e, scale_error(e, 1.5), 0.5, lam=0.5, smooth_f=True)
        for r in recs:
            assert r.skipped is None, r.property_id
            assert r.passed, (r.property_id, r.worst_gap)


class TestStability:
    def test_triangle_bound_abs(self):
        f = sample(ClosedFormFunction("abs"), make_uniform_grid(-2, 2, 401))
        rep = check_conjugate_stability(f, lipschitz_error(1.0), 0.0, 0.5)
        assert rep.triangle is not None and rep.triangle.ok
        # bound is e(0, 0.5) = 1
        assert rep.triangle.max_violation <= 1e-9

    def test_same_anchor_zero_difference(self):
        f = sample(ClosedFormFunction("abs"), make_uniform_grid(-2, 2, 101))
        rep = check_conjugate_stability(f, lipschitz_error(1.0), 0.5, 0.5)
        assert rep.triangle.max_violation == pytest.approx(-eval_bound(f, 0.5), abs=1e-12)

    def test_bounded_version_quadratic_kernel(self):
        f = negsq_on(-2, 2, 401)
        rep = check_conjugate_stability(f, quadratic_error(1.0), 0.0, 1.0)
        assert rep.triangle is None  # quadratic kernel lacks the triangle property
        assert rep.bounded is not None and rep.bounded.ok

    def test_no_applicable_bound(self):
        grid = make_uniform_grid(0, 2, 3)
        matrix = [[0.0, 1.0, INF], [1.0, 0.0, 1.0], [INF, 1.0, 0.0]]
        e = sampled_matrix_error(grid, matrix)
        f = SampledFunction(grid=grid, values=[0.0, 1.0, 0.0])
        with pytest.raises(ValueError, match="no applicable stability bound"):
            check_conjugate_stability(f, e, 0.0, 1.0)


def eval_bound(f, y):
    from econvex.errorfn import eval_error
    return eval_error(lipschitz_error(1.0), y, y)


class TestOptimality:
    def test_parabola_fermat(self):
        grid = make_uniform_grid(-2, 2, 201)
        f = sample(ClosedFormFunction("quad", {"a": 2.0}), grid)
        cert = certify_global_min(f, zero_error(), 0.0)
        assert bool(cert) and cert.is_grid_argmin
        cert_off = certify_global_min(f, zero_error(), 1.0)
        assert not bool(cert_off) and not cert_off.is_grid_argmin

    def test_quartic_well_global(self):
        grid = make_uniform_grid(-1.5, 1.5, 301)
        f = sample(ClosedFormFunction("quartic_well"), grid)
        x0 = float(f.grid.points[int(np.argmin(f.values))])
        assert abs(abs(x0) - 1 / math.sqrt(2)) < 0.01
        cert = certify_global_min(f, quadratic_error(1.0), x0)
        assert bool(cert) and cert.is_grid_argmin

    def test_quartic_well_local_certificates(self):
        grid = make_uniform_grid(-1.5, 1.5, 301)
        f = sample(ClosedFormFunction("quartic_well"), grid)
        i = int(np.argmin(f.values))
        wells = [float(f.grid.points[i]), float(f.grid.points[len(grid) - 1 - i])]
        for w in wells:
            assert bool(certify_local_min(f, quadratic_error(1.0), w))
            assert bool(certify_local_min(f, quadratic_error(0.25), w))
        # with a sub-critical budget, the center (a local max) is refuted
        assert not bool(certify_local_min(f, quadratic_error(0.25), 0.0))
        # with the unit budget 2e(0,y) = 2y^2 dominates the dip y^4 - y^2,
        # so the certificate at the center is genuinely (if unhelpfully) true
        assert bool(certify_local_min(f, quadratic_error(1.0), 0.0))

    def test_local_min_kernel_preconditions(self):
        grid = make_uniform_grid(-3, 3, 61)
        f = sample(ClosedFormFunction("quad", {"a": 1.0}), grid)
        with pytest.raises(ValueError, match="kernel precondition violated"):
            certify_local_min(f, exp_error(), 0.0)  # kernel slice nonconvex on wide grids

    def test_inclusion_reduces_to_fermat_for_zero_g(self):
        grid = make_uniform_grid(-2, 2, 201)
        f = sample(ClosedFormFunction("quad", {"a": 2.0}), grid)
        zero_f = SampledFunction(grid=grid, values=np.zeros(201))
        rep = check_subdiff_inclusion(f, zero_f, zero_error(), 0.0, factor=1.0)
        assert rep.ok

    def test_inclusion_parabola_pair(self):
        grid = make_uniform_grid(-2, 2, 201)
        f = sample(ClosedFormFunction("quad", {"a": 2.0}), grid)
        g = sample(ClosedFormFunction("quad", {"a": 1.0}), grid)
        rep = check_subdiff_inclusion(f, g, zero_error(), 0.0, factor=1.0)
        assert rep.ok

    def test_inclusion_composite_quartic(self):
        grid = make_uniform_grid(-1.5, 1.5, 301)
        q = sample(ClosedFormFunction("quartic_well"), grid)
        g = sample(ClosedFormFunction("quad", {"a": 1.0}), grid)
        f = SampledFunction(grid=grid, values=q.values + g.values)
        x0 = float(grid.points[int(np.argmin(q.values))])
        for factor in (1.0, 2.0):
            rep = check_subdiff_inclusion(f, g, quadratic_error(1.0), x0, factor=factor)
            assert rep.ok

    def test_inclusion_hypothesis_violated(self):
        grid = make_uniform_grid(-2, 2, 201)
        f = sample(ClosedFormFunction("quad", {"a": 2.0}), grid)
        g = sample(ClosedFormFunction("quad", {"a": 1.0}), grid)
        with pytest.raises(ValueError, match="hypothesis violated"):
            check_subdiff_inclusion(f, g, zero_error(), 1.0, factor=1.0)
        f2 = negsq_on(-2, 2, 201)
        with pytest.raises(ValueError, match="hypothesis violated"):
            check_subdiff_inclusion(f2, g, zero_error(), 0.0, factor=1.0)


class TestInfconvTheorem:
    def test_equality_case(self):
        grid = make_uniform_grid(-2, 2, 81)
        f = sample(ClosedFormFunction("quad", {"a": 1.0}), grid)
        res = check_sum_conjugate_infconv(f, f, zero_error(), zero_error(), 0.0, 0.0)
        assert res.inequality_ok and res.hypothesis_holds and res.equality_flag
        assert res.lhs == pytest.approx(0.0, abs=1e-12)
        assert res.rhs == pytest.approx(0.0, abs=1e-12)

    def test_mixed_kernels_inequality(self):
        grid = make_uniform_grid(-2, 2, 81)
        f = sample(ClosedFormFunction("neg_square"), grid)
        g = sample(ClosedFormFunction("quad", {"a": 2.0}), grid)
        res = check_sum_conjugate_infconv(f, g, quadratic_error(1.0), zero_error(), 0.0, 0.0)
        assert res.inequality_ok

    def test_indicator_second_function(self):
        grid = make_uniform_grid(-2, 2, 81)
        f = sample(ClosedFormFunction("quad", {"a": 1.0}), grid)
        g = sample(ClosedFormFunction("indicator_point", {"x0": 0.0}), grid)
        res = check_sum_conjugate_infconv(f, g, quadratic_error(1.0), zero_error(), 0.0, 1.0)
        assert res.inequality_ok


class TestSigmaFalsifier:
    def test_negsq_bound_grows_with_width(self):
        f = ClosedFormFunction("neg_square")
        bounds = {}
        for a in (10.0, 100.0):
            grid = make_uniform_grid(-a, a, 401)
            bound, witness = sigma_lower_bound(f, 0.0, grid)
            assert bound >= a - float(grid.step)
            bounds[a] = bound
        assert bounds[100.0] > bounds[10.0] + 80.0

    def test_convex_function_needs_no_budget(self):
        grid = make_uniform_grid(-5, 5, 201)
        bound, _ = sigma_lower_bound(ClosedFormFunction("quad", {"a": 1.3, "b": 0.7}), 0.0, grid)
        assert bound <= 1e-9

    def test_no_probes(self):
        grid = make_uniform_grid(0, 1, 2)
        f = SampledFunction(grid=grid, values=[0.0, 1.0])
        with pytest.raises(ValueError, match="no probes"):
            sigma_lower_bound(f, 0.0)
