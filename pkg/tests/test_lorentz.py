"""Lorentz quasi-norm closed forms against independent numeric integration."""

import math

import numpy as np
import pytest

from avglab.errors import ZeroFunction
from avglab.lorentz import (
    LayeredFunction,
    discrete_lorentz,
    discrete_sum_norm,
    lorentz_norm,
    normalize,
    numeric_rearrangement_norm,
    rearrangement_norm,
)
from avglab.sets import Box, IndicatorSet


def box_layer(k, vol, dim=4, offset=0.0):
    side = vol ** (1.0 / dim)
    center = (offset,) + (0.0,) * (dim - 1)
    return (k, IndicatorSet([Box(center, (side / 2,) * dim)]))


def random_layered(rng, n_layers, dim=4):
    ks = rng.choice(np.arange(-8, 9), size=n_layers, replace=False)
    layers = []
    offset = 0.0
    vols = []
    for k in ks:
        vol = float(rng.uniform(0.05, 4.0))
        side = vol ** (1.0 / dim)
        offset += side + 1.0
        layers.append(box_layer(int(k), vol, dim, offset))
        vols.append(vol)
    return LayeredFunction.build(layers, check_disjoint=False)


def test_single_indicator_closed_form():
    for p, u in [(1.5, 1.0), (2.0, 2.0), (3.0, 1.7), (1.5, 3.0)]:
        vol = 2.37
        norm = rearrangement_norm([(1.0, vol)], p, u)
        assert norm == pytest.approx((p / u) ** (1 / u) * vol ** (1 / p), rel=1e-12)


def test_lp_consistency_u_equals_p():
    vol = 5.0
    assert rearrangement_norm([(1.0, vol)], 2.0, 2.0) == pytest.approx(vol ** 0.5)


def test_two_layer_against_numeric_oracle():
    plateaus = [(2.0, 1.0), (1.0, 1.0)]
    closed = rearrangement_norm(plateaus, 2.0, 2.0)
    numeric = numeric_rearrangement_norm(plateaus, 2.0, 2.0)
    assert closed == pytest.approx(numeric, rel=1e-6)


def test_random_layers_against_numeric_oracle():
    rng = np.random.default_rng(17)
    for _ in range(25):
        n = int(rng.integers(1, 10))
        values = np.sort(rng.uniform(0.1, 10.0, size=n))[::-1]
        measures = rng.uniform(0.01, 5.0, size=n)
        plateaus = list(zip(values, measures))
        for p, u in [(1.5, 1.0), (2.0, 3.0), (3.0, 1.5)]:
            closed = rearrangement_norm(plateaus, p, u)
            numeric = numeric_rearrangement_norm(plateaus, p, u)
            assert closed == pytest.approx(numeric, rel=1e-6)


def test_weak_norm_is_sup_over_plateau_endpoints():
    plateaus = [(4.0, 0.5), (1.0, 10.0)]
    expect = max(4.0 * 0.5 ** (1 / 2), 1.0 * 10.5 ** (1 / 2))
    assert rearrangement_norm(plateaus, 2.0, math.inf) == pytest.approx(expect)


def test_discrete_single_layer():
    f = LayeredFunction.build([box_layer(0, 3.0)], check_disjoint=False)
    assert discrete_lorentz(f, 2.0, 1.5) == pytest.approx(3.0 ** 0.5)


def test_discrete_homogeneity_exact():
    f = LayeredFunction.build(
        [box_layer(0, 1.0), box_layer(3, 0.25, offset=9.0)], check_disjoint=False
    )
    doubled = f.shifted(1)
    for p, u in [(1.5, 1.0), (2.0, math.inf)]:
        assert discrete_lorentz(doubled, p, u) == 2.0 * discrete_lorentz(f, p, u)
        assert lorentz_norm(doubled, p, u) == pytest.approx(2.0 * lorentz_norm(f, p, u), rel=1e-12)


def test_comparability_envelope_positive_finite():
    rng = np.random.default_rng(23)
    ratios = []
    for _ in range(200):
        f = random_layered(rng, int(rng.integers(1, 11)))
        p, u = 1.5, 2.0
        ratios.append(discrete_lorentz(f, p, u) / lorentz_norm(f, p, u))
    assert 0.0 < min(ratios) <= max(ratios) < math.inf


def test_monotone_in_u_single_indicator_calibrated():
    # the u-dependence of the norm of an indicator is explicit: (p/u)^{1/u} |E|^{1/p}
    p = 1.5
    vol = 2.0
    for u, v in [(1.0, 2.0), (1.5, 3.0), (2.0, math.inf)]:
        cu = rearrangement_norm([(1.0, vol)], p, u)
        cv = rearrangement_norm([(1.0, vol)], p, v)
        assert cv <= cu * (1 + 1e-12)


def test_general_nesting_with_indicator_constant():
    rng = np.random.default_rng(29)
    p = 2.0
    for u, v in [(1.0, 2.0), (1.5, 4.0)]:
        c = ((p / v) ** (1 / v)) / ((p / u) ** (1 / u))
        for _ in range(50):
            f = random_layered(rng, int(rng.integers(1, 8)))
            lhs = lorentz_norm(f, p, v)
            rhs = c * lorentz_norm(f, p, u)
            assert lhs <= rhs * (1 + 1e-12)


def test_normalize_identity():
    f = LayeredFunction.build([box_layer(0, 1.0)], check_disjoint=False)
    out = normalize(f, 2.0, 2.0)
    assert out.shift == 0
    assert out.residual == pytest.approx(1.0)


def test_normalize_power_of_two():
    # single layer with |E| = 1 at level k=3 and p=1: norm 8
    f = LayeredFunction.build([box_layer(3, 1.0)], check_disjoint=False)
    out = normalize(f, 1.0, 1.0)
    assert out.shift == -3
    assert out.residual == pytest.approx(1.0)


def test_normalize_non_power():
    f = LayeredFunction.build([box_layer(0, 9.0)], check_disjoint=False)
    out = normalize(f, 1.0, 1.0)  # norm 9 -> shift -3, residual 9/8
    assert out.shift == -3
    assert 0.5 <= out.residual <= 2.0
    renorm = discrete_lorentz(out.function, 1.0, 1.0)
    assert renorm == pytest.approx(out.residual)
    assert 0.5 <= renorm <= 2.0


def test_normalize_zero_function_rejected():
    f = LayeredFunction((), ())
    with pytest.raises(ZeroFunction):
        normalize(f, 2.0, 2.0)


def test_disjointness_check_catches_overlap():
    a = box_layer(0, 1.0)
    b = box_layer(1, 1.0)  # same center: overlapping
    with pytest.raises(Exception):
        LayeredFunction.build([a, b], check_disjoint=True, disjoint_probes=1000)


def test_disjointness_check_passes_for_disjoint():
    layers = [box_layer(0, 1.0, offset=0.0), box_layer(1, 1.0, offset=5.0)]
    f = LayeredFunction.build(layers, check_disjoint=True, disjoint_probes=1000)
    assert len(f.layers) == 2


def test_discrete_sum_weak_form():
    assert discrete_sum_norm([(2.0, 4.0), (8.0, 0.01)], 2.0, math.inf) == pytest.approx(
        max(2.0 * 2.0, 8.0 * 0.1)
    )
