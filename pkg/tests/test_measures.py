import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from asbarron import CapabilityError, DegenerateAtomError, DegenerateMeasureError, InputError
from asbarron.activations import relu
from asbarron.construction import shipped_measure
from asbarron.measures import (
    BarronMeasure,
    ComplexMeasureSpec,
    TruncatedAntiRidge,
    antisym_f_rho,
    antisymmetrize_measure,
    canonicalize,
    dumps_measure,
    evaluate_f_rho,
    loads_measure,
    maurey_sample,
    phi,
    phi_tilde,
    psi_gamma_eval,
    total_variation,
    truncated_antiridge_eval,
)
from asbarron.oracles import total_variation_by_integration, truncated_antiridge_by_quadrature
from asbarron.planewave import antisymmetrize_pointwise

# 1 / (pi gamma) with gamma = 1/(2 sqrt 3)
TV_EXAMPLE = 1.1026577908435840


def atom_measure(n, d, *atoms):
    return BarronMeasure.from_atoms(n, d, atoms)


def random_measure(rng, n, d, k):
    return BarronMeasure(n, d, rng.standard_normal(k), rng.standard_normal(k), rng.standard_normal((k, n * d)))


class TestNorms:
    def test_phi_and_phi_tilde(self):
        rho = atom_measure(3, 1, (2.0, 5.0, [1.0, -1.0, 1.0]))
        assert phi(rho) == 6.0
        assert phi_tilde(rho) == 16.0

    def test_empty(self):
        rho = BarronMeasure(2, 1, [], [], np.zeros((0, 2)))
        assert phi(rho) == 0.0 and phi_tilde(rho) == 0.0

    def test_zero_bias_and_sign(self):
        rho = atom_measure(2, 1, (-1.5, 0.0, [0.5, 2.0]))
        assert phi_tilde(rho) == phi(rho) == 3.75

    def test_invalid(self):
        with pytest.raises(InputError):
            BarronMeasure(2, 1, [1.0], [0.0], [[1.0, np.inf]])
        with pytest.raises(InputError):
            BarronMeasure(2, 1, [1.0], [0.0, 1.0], [[1.0, 1.0]])
        with pytest.raises(InputError):
            BarronMeasure(2, 1, [1.0], [0.0], [[0.5, 0.5]], norm=math.inf)


class TestEvaluate:
    def test_constant_atom(self, rng):
        rho = atom_measure(2, 2, (1.0, 1.0, np.zeros(4)))
        np.testing.assert_array_equal(evaluate_f_rho(rho, rng.standard_normal((5, 2, 2))), np.ones(5))

    def test_cancellation(self, rng):
        w = rng.standard_normal(3)
        rho = atom_measure(3, 1, (1.0, 0.0, w), (-1.0, 0.0, w))
        np.testing.assert_array_equal(evaluate_f_rho(rho, rng.standard_normal((5, 3))), np.zeros(5))

    def test_split_sums_to_relu(self, rng):
        rho = random_measure(rng, 2, 1, 4)
        xs = rng.standard_normal((10, 2))
        split = evaluate_f_rho(rho, xs, "highpass", 0.7) + evaluate_f_rho(rho, xs, "lowpass", 0.7)
        np.testing.assert_allclose(split, evaluate_f_rho(rho, xs), atol=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(InputError):
            evaluate_f_rho(atom_measure(3, 1, (1.0, 0.0, [1, 2, 3])), np.zeros(4))


class TestCanonicalize:
    def test_arithmetic(self):
        out = canonicalize(atom_measure(2, 1, (1.0, 2.0, [3.0, 4.0])))
        assert (out.a[0], out.b[0], tuple(out.w[0])) == (4.0, 0.5, (0.75, 1.0))
        assert out.canonical

    def test_function_values_preserved(self):
        rho = atom_measure(2, 1, (1.0, 2.0, [3.0, 4.0]), (-0.5, -1.0, [0.2, -0.1]))
        x = np.array([0.3, -1.2])
        np.testing.assert_allclose(evaluate_f_rho(canonicalize(rho), x), evaluate_f_rho(rho, x), rtol=1e-12)

    @given(arrays(np.float64, (3, 4), elements=st.floats(-5, 5)), st.sampled_from([1, 2, math.inf]))
    def test_phi_invariant(self, w, p):
        w = np.where(np.abs(w) < 1e-3, 1.0, w)
        rho = BarronMeasure(2, 2, [1.0, -2.0, 0.5], [0.1, 0.2, -0.3], w)
        np.testing.assert_allclose(phi(canonicalize(rho, p)), phi(rho), rtol=1e-12)

    def test_degenerate_atoms_listed(self):
        rho = atom_measure(2, 1, (1.0, 0.0, [1.0, 0.0]), (1.0, 1.0, [0.0, 0.0]), (2.0, 0.0, [0.0, 0.0]))
        with pytest.raises(DegenerateAtomError) as info:
            canonicalize(rho)
        assert info.value.indices == [1, 2]

    def test_bad_selector(self):
        with pytest.raises(InputError):
            canonicalize(atom_measure(1, 1, (1.0, 0.0, [1.0])), p=3)


class TestAntisymmetrize:
    def test_symmetric_atom_vanishes(self, rng):
        rho = atom_measure(2, 2, (1.0, 0.3, [0.5, -1.0, 0.5, -1.0]))
        vals = evaluate_f_rho(antisymmetrize_measure(rho), rng.standard_normal((10, 2, 2)))
        np.testing.assert_allclose(vals, 0.0, atol=1e-15)

    def test_two_particle_atoms(self):
        rho_p = antisymmetrize_measure(atom_measure(2, 1, (3.0, 0.5, [1.0, 2.0])))
        assert len(rho_p) == 2
        np.testing.assert_array_equal(np.sort(rho_p.a), [-1.5, 1.5])
        assert phi(rho_p) == phi(atom_measure(2, 1, (3.0, 0.5, [1.0, 2.0])))

    def test_identity_against_pointwise(self, rng):
        for _ in range(5):
            rho = random_measure(rng, 3, 1, 3)
            rho_p = antisymmetrize_measure(rho)
            for x in rng.standard_normal((100, 3)):
                lhs = math.sqrt(6) * evaluate_f_rho(rho_p, x)
                rhs = antisymmetrize_pointwise(lambda y: evaluate_f_rho(rho, y), x)
                assert abs(lhs - rhs) <= 1e-10

    def test_kernel_route(self, rng):
        rho = random_measure(rng, 3, 2, 4)
        xs = rng.standard_normal((50, 3, 2))
        expected = [antisymmetrize_pointwise(lambda y: evaluate_f_rho(rho, y), x) for x in xs]
        np.testing.assert_allclose(antisym_f_rho(rho, xs), expected, atol=1e-12)

    def test_cap(self):
        with pytest.raises(CapabilityError):
            antisymmetrize_measure(atom_measure(9, 1, (1.0, 0.0, np.arange(9.0))))


class TestTruncatedRidges:
    def test_symmetric_vanishes(self):
        t = TruncatedAntiRidge([0.7, 0.7], 0.2, 0.5)
        assert abs(truncated_antiridge_eval(t, [0.3, -1.0])) <= 1e-15

    def test_against_fourier_quadrature(self, rng):
        w = np.array([[0.8], [-0.3], [1.0]])
        for x in rng.standard_normal((3, 3, 1)):
            t = TruncatedAntiRidge(w, 0.4, 0.5)
            np.testing.assert_allclose(
                truncated_antiridge_eval(t, x), truncated_antiridge_by_quadrature(w, 0.4, 0.5, x), atol=1e-5
            )

    def test_bias_shift_is_ridge_shift(self):
        # b -> b + w.s is the same as moving every particle by s
        w = np.array([[1.0], [0.0], [-0.5]])
        x = np.array([[0.2], [1.1], [-0.4]])
        s = 0.35
        shifted = truncated_antiridge_eval(TruncatedAntiRidge(w, 0.1 + s * w.sum(), 0.5), x)
        moved = truncated_antiridge_eval(TruncatedAntiRidge(w, 0.1, 0.5), x + s)
        np.testing.assert_allclose(shifted, moved, rtol=1e-12)

    def test_psi_gamma_empty_and_linear(self, rng):
        empty = canonicalize(BarronMeasure(3, 1, [], [], np.zeros((0, 3))))
        assert psi_gamma_eval(empty, 0.5, np.zeros(3)) == 0.0
        rho = canonicalize(random_measure(rng, 3, 1, 2))
        double = BarronMeasure(3, 1, 2 * rho.a, rho.b, rho.w, norm=rho.norm)
        x = rng.standard_normal(3)
        np.testing.assert_allclose(psi_gamma_eval(double, 0.5, x), 2 * psi_gamma_eval(rho, 0.5, x), rtol=1e-14)

    def test_psi_gamma_needs_canonical(self, rng):
        with pytest.raises(InputError):
            psi_gamma_eval(random_measure(rng, 3, 1, 2), 0.5, np.zeros(3))


class TestComplexMeasure:
    def test_total_variation_example(self):
        base = canonicalize(atom_measure(1, 1, (1.0, 0.0, [1.0])), p=1)
        mu = ComplexMeasureSpec(base, 1 / (2 * math.sqrt(3)))
        np.testing.assert_allclose(total_variation(mu), TV_EXAMPLE, rtol=1e-15)

    def test_scaling(self, rng):
        base = canonicalize(random_measure(rng, 2, 1, 3))
        mu = ComplexMeasureSpec(base, 0.5)
        double = ComplexMeasureSpec(BarronMeasure(2, 1, 2 * base.a, base.b, base.w, norm=base.norm), 0.5)
        assert total_variation(double) == 2 * total_variation(mu)
        assert total_variation(ComplexMeasureSpec(base, 1.0)) == 0.5 * total_variation(mu)

    def test_total_variation_matches_density_integral(self, rng):
        mu = ComplexMeasureSpec(canonicalize(random_measure(rng, 3, 1, 4)), 0.37)
        np.testing.assert_allclose(total_variation(mu), total_variation_by_integration(mu), rtol=1e-8)

    def test_l1_canonical_total_variation_is_phi(self, rng):
        mu = ComplexMeasureSpec(canonicalize(random_measure(rng, 3, 1, 4), p=1), 0.5)
        np.testing.assert_allclose(total_variation(mu), phi(mu.base) / (math.pi * 0.5), rtol=1e-14)

    def test_needs_canonical_base(self, rng):
        with pytest.raises(InputError):
            ComplexMeasureSpec(random_measure(rng, 2, 1, 2), 0.5)


class TestMaurey:
    def test_support_and_count(self, rng):
        mu = ComplexMeasureSpec(canonicalize(random_measure(rng, 3, 1, 3)), 0.5)
        S = maurey_sample(mu, 500, seed=1)
        assert len(S) == 500
        theta = np.max(np.abs(S.waves.reshape(500, -1)), axis=1)  # |theta| since ||w||_inf = 1
        assert np.all(theta >= 0.5 * (1 - 1e-15))
        np.testing.assert_allclose(np.abs(S.coefficients), total_variation(mu) / 500, rtol=1e-14)

    def test_deterministic(self, rng):
        mu = ComplexMeasureSpec(canonicalize(random_measure(rng, 2, 1, 3)), 0.5)
        a, b = maurey_sample(mu, 20, seed=7), maurey_sample(mu, 20, seed=7)
        np.testing.assert_array_equal(a.waves, b.waves)
        np.testing.assert_array_equal(a.coefficients, b.coefficients)

    def test_mean_is_psi_gamma(self):
        rho = canonicalize(shipped_measure("single_atom_n3d1"))
        mu = ComplexMeasureSpec(rho, 0.5)
        x0 = np.array([0.4, -0.9, 1.3])
        vals = np.array([maurey_sample(mu, 64, seed=s)(x0) for s in range(200)])
        target = rho.a[0] * truncated_antiridge_eval(TruncatedAntiRidge(rho.waves()[0], rho.b[0], 0.5), x0)
        se = np.std(vals.real, ddof=1) / math.sqrt(len(vals))
        assert abs(vals.real.mean() - target) <= 3 * se
        np.testing.assert_allclose(psi_gamma_eval(rho, 0.5, x0), target, rtol=1e-14)

    def test_degenerate(self):
        base = canonicalize(atom_measure(2, 1, (0.0, 0.0, [1.0, 0.5])))
        with pytest.raises(DegenerateMeasureError):
            maurey_sample(ComplexMeasureSpec(base, 0.5), 4, seed=0)

    def test_bad_m(self, rng):
        mu = ComplexMeasureSpec(canonicalize(random_measure(rng, 2, 1, 1)), 0.5)
        with pytest.raises(InputError):
            maurey_sample(mu, 0, seed=0)


class TestSerialisation:
    def test_round_trip_is_bit_exact(self, rng):
        rho = random_measure(rng, 2, 2, 5)
        back = loads_measure(dumps_measure(rho))
        for attr in ("a", "b", "w"):
            np.testing.assert_array_equal(getattr(back, attr), getattr(rho, attr))
        assert dumps_measure(back) == dumps_measure(rho)

    def test_shipped_files(self):
        for name in ("single_atom_n3d1", "three_atom_n3d1"):
            rho = shipped_measure(name)
            assert (rho.n, rho.d) == (3, 1)
            np.testing.assert_array_equal(np.max(np.abs(rho.w), axis=1), 1.0)

    @pytest.mark.parametrize(
        "text",
        [
            "not json",
            '{"n": 2, "d": 1}',
            '{"n": 2, "d": 1, "atoms": [{"a": 1, "b": 0, "w": [1]}]}',
            '{"n": 2, "d": 1, "atoms": [{"a": 1, "b": 0, "w": [1, NaN]}]}',
            '{"n": 2, "d": 1, "atoms": [{"a": "x", "b": 0, "w": [1, 2]}]}',
            '{"n": 2, "d": 1, "atoms": [], "extra": 1}',
        ],
    )
    def test_rejects_malformed(self, text):
        with pytest.raises(InputError):
            loads_measure(text)

    def test_empty_allowed_only_when_asked(self):
        text = json.dumps({"n": 2, "d": 1, "atoms": []})
        assert len(loads_measure(text)) == 0
        with pytest.raises(InputError):
            loads_measure(text, allow_empty=False)


def test_relu_homogeneity_used_by_canonicalisation():
    y = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(relu(2.5 * y), 2.5 * relu(y), rtol=0)
