import numpy as np
import pytest

from asbarron import InputError
from asbarron.experiments.fitting import TrainConfig, adjugate, fit_slater_sum
from asbarron.experiments.hermite import HermiteTarget
from asbarron.planewave import SlaterSum, slater_sum_norm_sq

FAST = TrainConfig(restarts=2, fit_steps=200)


def test_adjugate(rng):
    A = rng.standard_normal((4, 3, 3)) + 1j * rng.standard_normal((4, 3, 3))
    adj = adjugate(A)
    det = np.linalg.det(A)
    np.testing.assert_allclose(adj @ A, det[:, None, None] * np.eye(3), atol=1e-12)
    singular = np.array([[1.0, 2.0], [2.0, 4.0]])
    np.testing.assert_allclose(adjugate(singular), [[4.0, -2.0], [-2.0, 1.0]], atol=1e-14)


def test_single_slater_is_recovered():
    target = SlaterSum([1.0], [[[0.9], [-0.4]]])
    fit = fit_slater_sum(target, 1, FAST)
    assert fit.error <= 1e-6


@pytest.mark.parametrize("n,d", [(2, 1), (3, 1)])
def test_error_non_increasing_in_m(n, d):
    t = HermiteTarget.ground_state(n, d)
    errors = [fit_slater_sum(t, m, FAST).error for m in (1, 2, 4, 8)]
    assert all(e2 <= e1 for e1, e2 in zip(errors, errors[1:]))
    assert all(e >= 0 for e in errors)


def test_error_matches_reported_approximant():
    t = HermiteTarget.ground_state(2, 1)
    fit = fit_slater_sum(t, 4, FAST)
    from asbarron.experiments.hermite import slater_vs_hermite_inner

    A = fit.approximant
    direct = slater_sum_norm_sq(A) - 2 * slater_vs_hermite_inner(A, t).real + 1.0
    np.testing.assert_allclose(fit.error, np.sqrt(max(direct, fit.noise_floor)), rtol=1e-6, atol=1e-7)


@pytest.mark.slow
def test_two_particle_ground_state_many_terms():
    t = HermiteTarget.ground_state(2, 1)
    assert fit_slater_sum(t, 64, FAST).error <= fit_slater_sum(t, 1, FAST).error


def test_windowed_target_fits():
    t = HermiteTarget.ground_state(2, 1, window=(0.0, 2.0))
    fit = fit_slater_sum(t, 2, TrainConfig(restarts=1, fit_steps=100))
    assert 0 <= fit.error <= 1.0 + 1e-9


def test_validation():
    with pytest.raises(InputError):
        fit_slater_sum(HermiteTarget.ground_state(2, 1), 0)
    with pytest.raises(InputError):
        fit_slater_sum(lambda x: x, 1)
    with pytest.raises(InputError):
        TrainConfig(lam=0.0)
    with pytest.raises(InputError):
        TrainConfig(net_init="other")
