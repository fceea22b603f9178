"""Determinant identities, factorization, and lower-bound ratio estimation."""

import math

import numpy as np
import pytest

from avglab.curves import ComplexCurve, Monomial, Poly
from avglab.errors import DegenerateConfig, MembershipViolation
from avglab.jacobian import (
    complete_homogeneous,
    d3_poly_lower_bound_ratio,
    estimate_sector_constant,
    factorization_residual,
    jacobian_complex,
    lower_bound_ratio,
    real_jacobian_check,
    sample_in_region,
    vandermonde,
)
from avglab.regions import Intersection, RegionConfig, Sector, build_regions


def random_configs(rng, n, d):
    """(n, d) complex points in the unit disk."""
    radii = np.sqrt(rng.random((n, d)))
    angles = rng.random((n, d)) * 2 * np.pi
    return radii * np.exp(1j * angles)


# ---------------------------------------------------------------- vandermonde

def test_vandermonde_pair():
    assert vandermonde([0, 1]) == 1


def test_vandermonde_repeated_point_vanishes():
    w = 0.3 + 0.1j
    assert vandermonde([w, w, 2.0]) == 0


def test_vandermonde_integer_triple():
    assert vandermonde([1, 2, 3]) == 2


def test_vandermonde_antisymmetry():
    rng = np.random.default_rng(5)
    for _ in range(50):
        zs = random_configs(rng, 1, 4)[0]
        i, j = rng.choice(4, size=2, replace=False)
        swapped = zs.copy()
        swapped[[i, j]] = swapped[[j, i]]
        v0, v1 = vandermonde(zs), vandermonde(swapped)
        assert abs(v0 + v1) <= 1e-13 * max(1.0, abs(v0))


# --------------------------------------------------- complete homogeneous Q_m

def test_q0_is_one():
    assert complete_homogeneous(0, [9.0, -3.0, 1j]) == 1


def test_q1_is_sum():
    assert complete_homogeneous(1, [2.5, -1.0]) == 1.5


def test_q2_all_ones_counts_monomials():
    assert complete_homogeneous(2, [1, 1, 1]) == 6


def test_counting_identity_exact_integers():
    for d in range(2, 7):
        for m in range(0, 8):
            value = complete_homogeneous(m, [1] * d)
            assert value == math.comb(m + d - 1, d - 1)
            assert isinstance(value, int)


def test_q_symmetric_under_permutation():
    rng = np.random.default_rng(8)
    zs = random_configs(rng, 1, 5)[0]
    base = complete_homogeneous(3, zs)
    for _ in range(10):
        perm = rng.permutation(5)
        assert complete_homogeneous(3, zs[perm]) == pytest.approx(base)


# ------------------------------------------------------------------ jacobian

def test_jacobian_d2_n2_closed_form():
    curve = ComplexCurve(2, Monomial(2))
    z1, z2 = 0.3 + 0.2j, -0.5 + 0.9j
    assert jacobian_complex(curve, [z1, z2]) == pytest.approx(2 * (z2 - z1))


def test_jacobian_equal_points_vanishes():
    curve = ComplexCurve(3, Monomial(5))
    w = 0.4 - 0.7j
    assert abs(jacobian_complex(curve, [w, w, 0.1])) < 1e-14


def test_jacobian_d2_n3_closed_form():
    curve = ComplexCurve(2, Monomial(3))
    z1, z2 = 0.25 + 0.5j, -0.6 - 0.1j
    expected = 3 * (z2 - z1) * (z1 + z2)
    assert jacobian_complex(curve, [z1, z2]) == pytest.approx(expected)


def test_factorization_residual_d2_n2():
    curve = ComplexCurve(2, Monomial(2))
    rng = np.random.default_rng(2)
    res = factorization_residual(curve, random_configs(rng, 100, 2))
    assert np.max(res) < 1e-12


def test_factorization_residual_d4_n7():
    curve = ComplexCurve(4, Monomial(7))
    rng = np.random.default_rng(3)
    res = factorization_residual(curve, random_configs(rng, 1000, 4))
    assert np.max(res) < 1e-9


def test_factorization_d3_n3_value_12():
    curve = ComplexCurve(3, Monomial(3))
    zs = np.array([1.0, 2.0, 3.0], dtype=complex)
    assert jacobian_complex(curve, zs) == pytest.approx(12.0)
    assert factorization_residual(curve, zs) < 1e-12


# ---------------------------------------------------------- lower-bound ratio

def test_ratio_d2_n2_is_constant_two():
    curve = ComplexCurve(2, Monomial(2))
    rng = np.random.default_rng(4)
    ratios = lower_bound_ratio(curve, random_configs(rng, 200, 2))
    np.testing.assert_allclose(ratios, 2.0, rtol=1e-12)


def test_ratio_d2_n3_sector_bracket():
    # ratio = 3 |z1 + z2| / max|z|, bracketed on a narrow sector
    curve = ComplexCurve(2, Monomial(3))
    eps = math.pi / 16
    grid_r = np.linspace(0.05, 1.0, 12)
    grid_t = np.linspace(0.0, eps, 7)
    pts = np.array([r * np.exp(1j * t) for r in grid_r for t in grid_t])
    lo = 3 * math.cos(eps / 2)
    worst, best = math.inf, 0.0
    for i in range(0, len(pts), 3):
        for j in range(len(pts) - 1, 0, -17):
            if pts[i] == pts[j]:
                continue
            val = lower_bound_ratio(curve, [pts[i], pts[j]])
            worst, best = min(worst, val), max(best, val)
    assert worst >= lo - 1e-9
    assert best <= 6.0 + 1e-9


def test_ratio_coincident_points_rejected():
    curve = ComplexCurve(2, Monomial(2))
    with pytest.raises(DegenerateConfig):
        lower_bound_ratio(curve, [0.5 + 0j, 0.5 + 0j])


def test_ratio_all_zero_rejected():
    curve = ComplexCurve(2, Monomial(3))
    with pytest.raises(DegenerateConfig):
        lower_bound_ratio(curve, [0j, 0j])


# -------------------------------------------------------------------- regions

def test_monomial_sector_count():
    regions = build_regions(ComplexCurve(3, Monomial(5)), RegionConfig(sector_angle=math.pi / 8))
    assert len(regions) == 16


def test_monomial_sector_cover_unique():
    regions = build_regions(ComplexCurve(3, Monomial(5)), RegionConfig(sector_angle=math.pi / 16))
    rng = np.random.default_rng(6)
    pts = random_configs(rng, 1, 500)[0]
    counts = sum(np.asarray(s.contains(pts), dtype=int) for s in regions)
    assert np.all(counts == 1)


def test_poly_constant_third_derivative_sectors_only():
    curve = ComplexCurve(3, Poly((0.0, 0.0, 0.0, 1.0)))  # phi = z^3
    regions = build_regions(curve)
    assert all(isinstance(r, Intersection) for r in regions)
    assert all(r.local_degree == 0 for r in regions)
    assert all(len(r.members) == 1 and isinstance(r.members[0], Sector) for r in regions)


def test_poly_z6_cells():
    curve = ComplexCurve(3, Poly((0.0,) * 6 + (1.0,)))  # phi = z^6, phi''' = 120 z^3
    regions = build_regions(curve)
    hits = [r for r in regions if bool(r.contains(np.array([1.0 + 0.0j]))[0])]
    assert len(hits) == 1
    assert hits[0].local_degree == 3
    assert hits[0].root_product == pytest.approx(1.0)


def test_poly_cells_at_most_one():
    coeffs = (0.1, 0.0, 0.3, -0.2, 0.0, 0.05, 0.4 + 0.1j, 0.02)
    curve = ComplexCurve(3, Poly(coeffs))
    regions = build_regions(curve)
    rng = np.random.default_rng(9)
    pts = 2.5 * random_configs(rng, 1, 400)[0]
    counts = np.zeros(len(pts), dtype=int)
    for r in regions:
        counts += np.asarray(r.contains(pts), dtype=int)
    assert np.all(counts <= 1)


def test_poly_z5_cell_matches_monomial_ratio():
    poly_curve = ComplexCurve(3, Poly((0.0,) * 5 + (1.0,)))  # phi = z^5
    mono_curve = ComplexCurve(3, Monomial(5))
    regions = build_regions(poly_curve)
    rng = np.random.default_rng(10)
    for _ in range(50):
        zs = sample_in_region(regions[0], rng, 1, 3)[0]
        cell = next(r for r in regions if np.all(r.contains(zs)))
        assert cell.local_degree == 2
        assert cell.root_product == pytest.approx(1.0)
        lhs = d3_poly_lower_bound_ratio(poly_curve, cell, zs)
        rhs = lower_bound_ratio(mono_curve, zs)
        assert lhs == pytest.approx(rhs, rel=1e-9)


def test_poly_ratio_membership_violation():
    curve = ComplexCurve(3, Poly((0.0,) * 5 + (1.0,)))
    cell = build_regions(curve)[0]
    outside = np.array([10.0 * np.exp(1j * 3.0)] * 3)
    outside[1] += 0.1
    outside[2] -= 0.2j
    with pytest.raises(MembershipViolation):
        d3_poly_lower_bound_ratio(curve, cell, outside)


def test_poly_cell_sampled_minimum_positive():
    curve = ComplexCurve(3, Poly((0.0,) * 5 + (1.0,)))
    cell = build_regions(curve)[0]
    report = estimate_sector_constant(curve, cell, 10_000, seed=21)
    assert report.min_ratio > 0


# ----------------------------------------------------- sector-constant report

def test_estimate_d2_n2_exact_two():
    curve = ComplexCurve(2, Monomial(2))
    sector = Sector(0.0, math.pi / 16)
    report = estimate_sector_constant(curve, sector, 2000, seed=1)
    assert report.min_ratio == pytest.approx(2.0, abs=1e-12)


def test_estimate_monotone_in_samples():
    curve = ComplexCurve(3, Monomial(4))
    sector = Sector(0.0, math.pi / 16)
    small = estimate_sector_constant(curve, sector, 500, seed=2)
    large = estimate_sector_constant(curve, sector, 1000, seed=2)
    assert large.min_ratio <= small.min_ratio
    mins = [m for _, m in large.convergence_series]
    assert all(a >= b for a, b in zip(mins, mins[1:]))


def test_estimate_deterministic():
    curve = ComplexCurve(3, Monomial(5))
    sector = Sector(0.0, math.pi / 16)
    a = estimate_sector_constant(curve, sector, 3000, seed=33)
    b = estimate_sector_constant(curve, sector, 3000, seed=33)
    assert a.min_ratio == b.min_ratio
    assert a.min_witness == b.min_witness
    assert a.convergence_series == b.convergence_series


def test_estimate_seed_sensitivity():
    curve = ComplexCurve(3, Monomial(5))
    sector = Sector(0.0, math.pi / 16)
    a = estimate_sector_constant(curve, sector, 3000, seed=33)
    b = estimate_sector_constant(curve, sector, 3000, seed=34)
    assert a.min_ratio != b.min_ratio


# ---------------------------------------------------------------- holomorphy

def test_real_jacobian_matches_squared_modulus():
    curve = ComplexCurve(2, Monomial(2))
    res = real_jacobian_check(curve, [0.3 + 0j, 0.7 + 0.1j], 1e-5)
    assert res < 1e-6


def test_real_jacobian_coincident_zero():
    curve = ComplexCurve(2, Monomial(2))
    w = 0.2 + 0.2j
    assert real_jacobian_check(curve, [w, w], 1e-5) < 1e-9


def test_real_jacobian_step_refinement():
    curve = ComplexCurve(3, Monomial(4))
    zs = [0.5 + 0.1j, -0.3 + 0.4j, 0.1 - 0.6j]
    coarse = real_jacobian_check(curve, zs, 1e-3)
    fine = real_jacobian_check(curve, zs, 1e-5)
    assert fine < coarse
