import math

import numpy as np
import pytest

from asbarron import CapabilityError
from asbarron.oracles import (
    gauss_hermite_norm_sq,
    gauss_hermite_overlap,
    gauss_hermite_plane_wave,
    sine_integral_by_quadrature,
    softplus_by_convolution,
)


def test_plane_wave_is_characteristic_function():
    for w in (0.0, 0.5, 1.7):
        np.testing.assert_allclose(gauss_hermite_plane_wave(w), math.exp(-w * w / 2), atol=1e-15)


def test_two_particle_norm_in_closed_form():
    # n=2, d=1: |a_w|^2 = 1 - exp(-(w1 - w2)^2)
    w = np.array([[0.9], [-0.3]])
    np.testing.assert_allclose(gauss_hermite_norm_sq(w), -math.expm1(-1.44), rtol=1e-13)


def test_overlap_hermitian(rng):
    v, w = rng.uniform(-1, 1, (2, 2, 1))
    np.testing.assert_allclose(gauss_hermite_overlap(v, w), np.conj(gauss_hermite_overlap(w, v)), atol=1e-15)


def test_grid_cap():
    with pytest.raises(CapabilityError):
        gauss_hermite_overlap(np.zeros((3, 3)), np.zeros((3, 3)))


def test_sine_integral_known_values():
    np.testing.assert_allclose(sine_integral_by_quadrature(math.pi), 1.8519370519824662, rtol=1e-13)
    assert sine_integral_by_quadrature(0.0) == 0.0


def test_softplus_convolution_at_zero():
    np.testing.assert_allclose(softplus_by_convolution(0.0), math.log(2), rtol=1e-11)
