import math

import numpy as np
import pytest

from asbarron.construction import construct, maurey_errors, rate_constant, shipped_measure, truncation_bound
from asbarron.measures import BarronMeasure, canonicalize


def test_rate_constant():
    assert rate_constant(1) == 2 / math.pi
    assert math.isclose(rate_constant(4), 4 / math.pi)


def test_unknown_shipped_measure():
    with pytest.raises(KeyError):
        shipped_measure("nope")


def test_truncation_bound_needs_three_particles():
    rho = canonicalize(BarronMeasure(2, 1, [1.0], [0.0], [[1.0, 0.5]]))
    assert truncation_bound(rho, 0.5) == math.inf


def test_truncation_bound_linear_in_weights():
    rho = canonicalize(shipped_measure("three_atom_n3d1"))
    double = BarronMeasure(3, 1, 2 * rho.a, rho.b, rho.w, norm=rho.norm)
    np.testing.assert_allclose(truncation_bound(double, 0.5), 2 * truncation_bound(rho, 0.5), rtol=1e-12)


def test_single_atom_within_bound():
    approx, rep = construct(shipped_measure("single_atom_n3d1"), 32, seed=3, n_samples=1 << 15)
    assert len(approx) == 32
    assert rep.slack >= 0
    assert rep.sampling_bound == rep.phi * rate_constant(1) / math.sqrt(32)


def test_report_is_deterministic():
    rho = shipped_measure("single_atom_n3d1")
    _, r1 = construct(rho, 8, seed=1, n_samples=4096)
    _, r2 = construct(rho, 8, seed=1, n_samples=4096)
    assert r1 == r2


def test_maurey_errors_shrink():
    errs, tv = maurey_errors(shipped_measure("single_atom_n3d1"), (4, 64), range(8), gamma=0.5, n_samples=4096)
    assert errs.shape == (2, 8)
    assert errs[1].mean() < errs[0].mean()
    assert np.all(errs.mean(axis=1) <= 1.5 * tv / np.sqrt([4, 64]))
