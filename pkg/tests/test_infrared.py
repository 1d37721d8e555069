import math

import numpy as np
import pytest

from asbarron import InputError
from asbarron.infrared import (
    infrared_sweep,
    norm_series,
    random_unit_wave,
    truncation_gap,
    truncation_gap_bound,
    truncation_gap_mc,
)
from asbarron.planewave import slater_norm_sq


@pytest.mark.parametrize("n,d", [(3, 1), (4, 1), (3, 2), (5, 1)])
def test_series_reproduces_norm(n, d):
    w = random_unit_wave(n, d, seed=3)
    series = norm_series(w)
    for t in (0.1, 0.5, 1.0, 1.7):
        np.testing.assert_allclose(series.norm_sq(t), slater_norm_sq(t * w), rtol=1e-10, atol=1e-15)


def test_series_coefficients_non_negative_and_start_late():
    w = random_unit_wave(4, 1, seed=1)
    series = norm_series(w)
    assert series.k0 == 6  # 0 + 1 + 2 + 3
    assert np.all(series.coeffs[: series.k0] == 0)
    assert np.all(series.coeffs >= 0)
    assert series.coeffs[series.k0] > 0


def test_needs_three_particles():
    with pytest.raises(InputError):
        truncation_gap(np.array([1.0, -0.5]), 0.3, 0.5)
    with pytest.raises(InputError):
        truncation_gap_bound(np.array([1.0, -0.5]), 0.5)


def test_gap_below_bound_and_monotone_in_gamma():
    w = random_unit_wave(3, 1, seed=5)
    series = norm_series(w)
    gaps = [truncation_gap(w, 0.3, g, series) for g in (0.1, 0.25, 0.5, 1.0)]
    bounds = [truncation_gap_bound(w, g, series) for g in (0.1, 0.25, 0.5, 1.0)]
    assert all(g1 < g2 for g1, g2 in zip(gaps, gaps[1:]))
    assert all(g <= b for g, b in zip(gaps, bounds))


def test_gap_against_monte_carlo_at_three_particles():
    w = random_unit_wave(3, 1, seed=2)
    exact = truncation_gap(w, 0.3, 0.5)
    mc, se = truncation_gap_mc(w, 0.3, 0.5, n_samples=1 << 15, seed=11)
    assert abs(mc - exact) <= 4 * se


def test_gap_decays_with_particle_number():
    rows = infrared_sweep((3, 4, 5, 6))
    gaps = [r.gap for r in rows]
    assert all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))
    assert all(r.gap <= r.bound for r in rows)


def test_bias_sign_symmetry():
    # |I_k(b)| = |I_k(-b)| since the integrand is real-symmetric in t
    w = random_unit_wave(3, 1, seed=8)
    np.testing.assert_allclose(truncation_gap(w, 0.4, 0.5), truncation_gap(w, -0.4, 0.5), rtol=1e-12)


def test_random_unit_wave():
    w = random_unit_wave(5, 2, seed=0)
    assert w.shape == (5, 2)
    assert math.isclose(np.max(np.abs(w)), 1.0)
