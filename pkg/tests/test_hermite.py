import math

import numpy as np
import pytest

from asbarron import CapabilityError, InputError
from asbarron.experiments.hermite import (
    HermiteTarget,
    ground_state_orbitals,
    hermite_orbital_overlap,
    hermite_values,
    slater_vs_hermite_inner,
    target_eval,
)
from asbarron.oracles import gauss_hermite_plane_wave
from asbarron.planewave import SlaterSum, gaussian_configurations


def mc_inner(A, t, n_samples, seed):
    vals = np.concatenate(
        [np.conj(A(xs)) * target_eval(t, xs) for xs in gaussian_configurations(t.n, t.d, n_samples, seed)]
    )
    return vals.mean(), np.std(vals.real, ddof=1) / math.sqrt(vals.size), np.std(vals.imag, ddof=1) / math.sqrt(vals.size)


class TestOrbitalOverlap:
    def test_order_zero_is_characteristic_function(self):
        for w in (0.0, 0.4, 1.3, 2.0):
            np.testing.assert_allclose(hermite_orbital_overlap(0, w), gauss_hermite_plane_wave(w), atol=1e-14)

    def test_vanishes_at_zero_frequency(self):
        assert all(hermite_orbital_overlap(k, 0.0) == 0 for k in range(1, 6))

    def test_first_order_example(self):
        np.testing.assert_allclose(hermite_orbital_overlap(1, 1.0), 1j * math.exp(-0.5), rtol=1e-15)

    @pytest.mark.parametrize("k", [2, 3, 5])
    def test_against_quadrature(self, k):
        nodes, weights = np.polynomial.hermite_e.hermegauss(60)
        for w in (-1.1, 0.7):
            quad = np.sum(weights * hermite_values(k, nodes)[k] * np.exp(1j * w * nodes)) / math.sqrt(2 * math.pi)
            np.testing.assert_allclose(hermite_orbital_overlap(k, w), quad, atol=1e-13)

    def test_order_cap(self):
        with pytest.raises(CapabilityError):
            hermite_orbital_overlap(31, 0.5)


def test_hermite_orthonormal_by_quadrature():
    nodes, weights = np.polynomial.hermite_e.hermegauss(40)
    H = hermite_values(10, nodes) * np.sqrt(weights / math.sqrt(2 * math.pi))
    np.testing.assert_allclose(H @ H.T, np.eye(11), atol=1e-12)


def test_occupied_orbitals_orthonormal_by_monte_carlo(rng):
    t = HermiteTarget.ground_state(4, 2)
    x = rng.standard_normal((1 << 16, 2))
    phis = np.stack([np.prod([hermite_values(int(k), x[:, q])[int(k)] for q, k in enumerate(orb)], axis=0) for orb in t.orbitals])
    prods = phis[:, None, :] * phis[None, :, :]
    gram = prods.mean(axis=-1)
    se = prods.std(axis=-1, ddof=1) / math.sqrt(x.shape[0])
    assert np.all(np.abs(gram - np.eye(4)) <= 3 * se + 1e-12)


class TestTargets:
    def test_ground_state_orbitals(self):
        np.testing.assert_array_equal(ground_state_orbitals(4, 2), [[0, 0], [1, 0], [0, 1], [2, 0]])
        np.testing.assert_array_equal(ground_state_orbitals(3, 1).ravel(), [0, 1, 2])

    def test_single_particle_constant(self, rng):
        t = HermiteTarget.ground_state(1, 3)
        np.testing.assert_array_equal(target_eval(t, rng.standard_normal((5, 1, 3))), np.ones(5))

    def test_two_particle_example(self, rng):
        t = HermiteTarget.ground_state(2, 1)
        for x in rng.standard_normal((5, 2)):
            np.testing.assert_allclose(target_eval(t, x), (x[1] - x[0]) / math.sqrt(2), rtol=1e-14, atol=1e-15)

    def test_window_masks_outside(self):
        t = HermiteTarget.ground_state(2, 1, window=(0.0, 1.0))
        assert target_eval(t, [0.2, 1.5]) == 0.0
        assert target_eval(t, [0.2, -0.9]) != 0.0

    def test_window_normalisation(self, rng):
        t = HermiteTarget.ground_state(2, 1, window=(0.3, 1.5))
        assert 0 < t.raw_norm < 1
        xs = rng.standard_normal((1 << 17, 2, 1))
        vals = target_eval(t, xs) ** 2
        assert abs(vals.mean() - 1.0) <= 4 * vals.std(ddof=1) / math.sqrt(vals.size)

    def test_antisymmetric(self, rng):
        t = HermiteTarget.ground_state(3, 2)
        x = rng.standard_normal((3, 2))
        np.testing.assert_allclose(target_eval(t, x[[1, 0, 2]]), -target_eval(t, x), rtol=1e-12)

    def test_validation(self):
        with pytest.raises(InputError):
            HermiteTarget(np.array([[0], [0]]))
        with pytest.raises(InputError):
            HermiteTarget.ground_state(2, 1, window=(0.0, -1.0))
        with pytest.raises(CapabilityError):
            HermiteTarget(np.array([[0], [31]]))


class TestInner:
    def test_zero_coefficients(self):
        t = HermiteTarget.ground_state(2, 1)
        A = SlaterSum(np.zeros(2), np.ones((2, 2, 1)) * [[[0.3], [-0.2]]])
        assert slater_vs_hermite_inner(A, t) == 0

    def test_single_particle(self):
        t = HermiteTarget.ground_state(1, 1)
        A = SlaterSum([0.5 - 0.25j], [[[0.8]]])
        np.testing.assert_allclose(slater_vs_hermite_inner(A, t), np.conj(0.5 - 0.25j) * math.exp(-0.32), rtol=1e-14)

    def test_against_monte_carlo(self, rng):
        t = HermiteTarget.ground_state(3, 1)
        A = SlaterSum(rng.standard_normal(3) + 1j * rng.standard_normal(3), rng.uniform(-1.5, 1.5, (3, 3, 1)))
        mc, se_re, se_im = mc_inner(A, t, 1 << 17, seed=4)
        exact = slater_vs_hermite_inner(A, t)
        assert abs(mc.real - exact.real) <= 3.5 * se_re
        assert abs(mc.imag - exact.imag) <= 3.5 * se_im

    def test_orbital_overlaps_gradient(self, rng):
        t = HermiteTarget.ground_state(3, 2, window=(0.2, 1.8))
        w = rng.uniform(-1, 1, (3, 2))
        _, dO = t.orbital_overlaps(w, with_grad=True)
        h = 1e-6
        for i, q in [(0, 0), (2, 1)]:
            up, dn = w.copy(), w.copy()
            up[i, q] += h
            dn[i, q] -= h
            fd = (t.orbital_overlaps(up) - t.orbital_overlaps(dn))[i] / (2 * h)
            np.testing.assert_allclose(dO[i, :, q], fd, atol=1e-8)

    def test_window_unsupported(self):
        t = HermiteTarget.ground_state(2, 1, window=(0.0, 2.0))
        with pytest.raises(InputError):
            slater_vs_hermite_inner(SlaterSum([1.0], [[[0.1], [0.2]]]), t)
