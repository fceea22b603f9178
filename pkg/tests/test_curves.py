"""Curve embedding, derivatives, density, and anisotropic dilation."""

import numpy as np
import pytest

from avglab.curves import (
    ComplexCurve,
    Monomial,
    Poly,
    affine_density,
    anisotropic_dilate,
    curve_derivative,
    density_constant,
    eval_curve,
)
from avglab.errors import AvglabError


def test_eval_origin_maps_to_origin():
    curve = ComplexCurve(2, Monomial(2))
    assert np.array_equal(eval_curve(curve, 0j), np.zeros(4))


def test_eval_d2_square():
    curve = ComplexCurve(2, Monomial(2))
    # (1+i)^2 = 2i
    np.testing.assert_allclose(eval_curve(curve, 1 + 1j), [1, 1, 0, 2], atol=1e-15)


def test_eval_d3_at_i():
    curve = ComplexCurve(3, Monomial(3))
    # i^2 = -1, i^3 = -i
    np.testing.assert_allclose(eval_curve(curve, 1j), [0, 1, -1, 0, 0, -1], atol=1e-15)


def test_first_derivative_d2():
    curve = ComplexCurve(2, Monomial(2))
    w = 0.3 - 0.4j
    np.testing.assert_allclose(curve_derivative(curve, w, 1), [1, 2 * w])


def test_third_derivative_d3_n5():
    curve = ComplexCurve(3, Monomial(5))
    w = 0.7 + 0.2j
    np.testing.assert_allclose(curve_derivative(curve, w, 3), [0, 0, 60 * w**2])


def test_derivative_past_degree_vanishes():
    curve = ComplexCurve(3, Monomial(4))
    np.testing.assert_array_equal(curve_derivative(curve, 1.5 + 0.5j, 5), np.zeros(3))


def test_derivative_matches_finite_difference():
    curve = ComplexCurve(3, Monomial(6))
    rng = np.random.default_rng(11)
    h = 1e-5
    for _ in range(20):
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        exact = curve_derivative(curve, z, 1)
        fd_re = (eval_curve(curve, z + h) - eval_curve(curve, z - h)) / (2 * h)
        approx = fd_re[0::2] + 1j * fd_re[1::2]
        np.testing.assert_allclose(approx, exact, atol=1e-6)


def test_affine_density_values():
    assert affine_density(ComplexCurve(2, Monomial(2)), 0.5 + 2j) == pytest.approx(2 ** (2 / 3))
    assert affine_density(ComplexCurve(3, Monomial(3)), -1j) == pytest.approx(6 ** (1 / 3))
    # degenerate monomial: the density vanishes identically
    assert affine_density(ComplexCurve(3, Monomial(2)), 0.3) == 0.0


def test_density_constant_matches_pointwise():
    curve = ComplexCurve(3, Monomial(5))
    z = 0.8 - 0.1j
    expected = density_constant(curve) * abs(z) ** (4 * 2 / 12)
    assert affine_density(curve, z) == pytest.approx(expected)


def test_density_vanishes_only_at_origin_when_degenerate_torsion():
    curve = ComplexCurve(2, Monomial(5))  # K = 3
    assert affine_density(curve, 0j) == 0.0
    assert affine_density(curve, 1e-8 + 0j) > 0.0


def test_dilate_identity_and_powers():
    x = np.array([1.0, 1.0, 1.0, 1.0])
    np.testing.assert_array_equal(anisotropic_dilate(x, 1.0), x)
    np.testing.assert_array_equal(anisotropic_dilate(x, 2.0), [2, 2, 4, 4])


def test_dilate_group_law():
    rng = np.random.default_rng(3)
    x = rng.normal(size=6)
    r, s = 1.7, 0.23
    lhs = anisotropic_dilate(anisotropic_dilate(x, r), s)
    rhs = anisotropic_dilate(x, r * s)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


def test_dilation_covariance_monomial_n_eq_d():
    # h(rz) = D_r h(z) exactly when phi = z^d
    rng = np.random.default_rng(7)
    for d in (2, 3, 4):
        curve = ComplexCurve(d, Monomial(d))
        for _ in range(100):
            r = rng.uniform(0.1, 3.0)
            z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            lhs = eval_curve(curve, r * z)
            rhs = anisotropic_dilate(eval_curve(curve, z), r)
            np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-14)


def test_poly_requires_d3():
    with pytest.raises(AvglabError):
        ComplexCurve(2, Poly((0, 1, 1)))
    curve = ComplexCurve(3, Poly((0, 0, 0, 2.0)))
    assert affine_density(curve, 5j) == pytest.approx(12 ** (1 / 3))


def test_dimension_floor():
    with pytest.raises(AvglabError):
        ComplexCurve(1, Monomial(3))
