import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asbarron import CapabilityError, InputError
from asbarron.bounds import (
    admissible_p,
    bound_cell,
    bound_sweep,
    check_lowrank,
    compositions,
    detbound_check,
    eigenvalue_bound_check,
    lowrank_terms,
    norm_curve,
    norm_curve_log_bound,
    numerical_rank,
    scaled_random_wave,
    tail_sum,
)
from asbarron.planewave import slater_norm_sq


def small_pair(rng, n, d, scale=0.4):
    return rng.uniform(-scale, scale, (n, d)), rng.uniform(-scale, scale, (n, d))


class TestLowRank:
    def test_zeroth_term_is_all_ones(self, rng):
        v, w = small_pair(rng, 5, 2)
        np.testing.assert_array_equal(lowrank_terms(v, w, 0)[0].matrix, np.ones((5, 5)))

    def test_one_dimensional_terms_have_rank_one(self, rng):
        v, w = small_pair(rng, 6, 1)
        for t in lowrank_terms(v, w, 6)[1:]:
            assert t.rank_bound == 1
            assert numerical_rank(t.matrix) == 1

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_terms_sum_to_exponential(self, rng, d):
        v, w = small_pair(rng, 7, d)
        reports, err, tail = check_lowrank(v, w, 25)
        assert err <= 1e-13
        assert all(r.ok for r in reports)

    def test_truncated_error_below_tail(self, rng):
        v, w = small_pair(rng, 8, 2, scale=0.7)
        for K in (1, 2, 3, 5):
            _, err, tail = check_lowrank(v, w, K)
            assert err <= tail

    def test_order_cap(self, rng):
        v, w = small_pair(rng, 2, 1)
        with pytest.raises(CapabilityError):
            lowrank_terms(v, w, 61)

    @given(st.integers(0, 8), st.integers(1, 4))
    def test_compositions_count(self, k, d):
        comps = list(compositions(k, d))
        assert len(comps) == math.comb(k + d - 1, d - 1)
        assert len(set(comps)) == len(comps)
        assert all(sum(c) == k and min(c) >= 0 for c in comps)

    @given(st.floats(0.0, 3.0), st.integers(0, 10))
    def test_tail_sum(self, mu, K):
        direct = math.fsum(mu**k / math.factorial(k) for k in range(K + 1, K + 80))
        assert math.isclose(tail_sum(mu, K), direct, rel_tol=1e-13, abs_tol=1e-300)


class TestEigenvalues:
    def test_worked_example(self):
        w = scaled_random_wave(20, 1, 0.3, seed=4)
        rep = eigenvalue_bound_check(w, 3)
        assert rep.L == 3
        np.testing.assert_allclose(rep.bound_L, 40 / 6 * 0.09**3, rtol=1e-14)
        assert rep.bound_L <= 0.00486
        assert rep.ok and rep.lambda_L <= rep.bound_L

    def test_top_eigenvalue(self, rng):
        w = rng.uniform(-0.5, 0.5, (10, 2))
        rep = eigenvalue_bound_check(w, 2)
        assert rep.ok

    def test_preconditions(self):
        with pytest.raises(InputError):
            eigenvalue_bound_check(np.full((5, 1), 0.8), 1)
        with pytest.raises(InputError):
            eigenvalue_bound_check(scaled_random_wave(3, 1, 0.3, 0), 3)


class TestDeterminant:
    def test_admissible_p(self):
        assert admissible_p(40, 1) == 8
        assert admissible_p(20, 1) == 7
        assert admissible_p(20, 2) is None
        assert admissible_p(40, 2) is None

    def test_worked_example(self):
        rep = detbound_check(scaled_random_wave(40, 1, 0.2, seed=1), 8)
        np.testing.assert_allclose(rep.log_bound, -320 * math.log(5), rtol=1e-14)
        assert rep.ok and rep.log_det <= -320 * math.log(5)

    def test_log_det_matches_float_when_resolvable(self, rng):
        # small n: float64 determinant is accurate
        w = rng.uniform(-1, 1, (4, 1))
        from asbarron._mpdet import gram_exp_logdet

        sign, logdet = gram_exp_logdet(w)
        assert sign == 1
        np.testing.assert_allclose(logdet, math.log(np.linalg.det(np.exp(w @ w.T))), rtol=1e-9)

    def test_repeated_rows(self):
        w = np.full((20, 1), 0.1)
        w[::2] = -0.1
        assert detbound_check(w, 7).log_det == -math.inf

    def test_preconditions(self):
        with pytest.raises(InputError):
            detbound_check(scaled_random_wave(40, 1, 0.6, 0), 8)
        with pytest.raises(InputError):
            detbound_check(scaled_random_wave(40, 1, 0.2, 0), 4)

    def test_scaling_tightens(self):
        base = scaled_random_wave(30, 1, 1.0, seed=2)
        logs = [detbound_check(base * s, 7).log_det for s in (0.05, 0.1, 0.2)]
        assert logs[0] < logs[1] < logs[2]

    def test_infeasible_cell(self):
        row = bound_cell(20, 2, 0.1)
        assert row.p is None and "infeasible" in row.error

    @pytest.mark.slow
    def test_sweep_margins(self):
        rows = bound_sweep(ns=(20,), ds=(1,))
        assert rows and all(r.margin > 0 for r in rows)


class TestNormCurve:
    def test_matches_direct(self):
        w = scaled_random_wave(4, 1, 1.0, seed=0)
        curve = norm_curve(w, [0.0, 0.3, 1.0, 3.0])
        expected = [slater_norm_sq(t * w) for t in curve.theta]
        np.testing.assert_allclose(curve.norm_sq, expected, rtol=1e-10, atol=1e-300)
        assert curve.norm_sq[0] == 0.0  # a_0 vanishes for distinct rows

    def test_requires_unit_inf_norm(self):
        with pytest.raises(InputError):
            norm_curve(np.array([0.5, 0.2]), [1.0])

    def test_log_bound(self):
        assert norm_curve_log_bound(20, 2, 0.1) is None
        assert norm_curve_log_bound(20, 1, 0.6) is None
        np.testing.assert_allclose(norm_curve_log_bound(40, 1, 0.2), -320 * math.log(5))
        assert norm_curve_log_bound(40, 1, 0.0) == -math.inf
