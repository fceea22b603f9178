"""The averaging operator on indicator sets and its pairing functionals.

T f(x) integrates f(x - h(z)) against the affine-arclength-type density over
(region ∩ unit disk); the adjoint translates by +h(z).  Pointwise values use
polar midpoint quadrature (optionally with a fine inner band when the
integrand support is known to be small); set pairings <T chi_E, chi_F> use
joint Monte Carlo over (x, z), stratified over the atoms of F and over
radial bands of the z-domain, with counter-based substreams so results are
bit-identical for a fixed seed regardless of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng as rnglib
from .curves import ComplexCurve, affine_density, complex_components, density_constant, interleave
from .errors import AvglabError, BadExponents, EmptySet, HypothesisViolated
from .exponents import conjugate, critical_p, critical_q
from .regions import Intersection, Region, Sector
from .sets import IndicatorSet

TWO_PI = 2.0 * math.pi


def _angular_bounds(region: Region | None) -> tuple[float, float]:
    if region is None:
        return 0.0, TWO_PI
    if isinstance(region, Sector):
        return region.angle_lo, region.angle_hi
    if isinstance(region, Intersection):
        sec = region.member_of_type(Sector)
        if sec is not None:
            return sec.angle_lo, sec.angle_hi
    return 0.0, TWO_PI


def _region_center(region: Region | None) -> complex:
    if isinstance(region, Sector):
        return region.center
    if isinstance(region, Intersection):
        return region.center
    return 0j


def sigma_mass(curve: ComplexCurve, region: Region | None, r_lo: float, r_hi: float) -> float:
    """Closed-form sigma measure of a centered sector band for monomial curves."""
    if not curve.is_monomial:
        raise AvglabError("closed-form sigma mass requires a monomial curve")
    if _region_center(region) != 0:
        raise AvglabError("closed-form sigma mass requires an origin-centered region")
    a = 4.0 * curve.torsion_degree / (curve.d * (curve.d + 1))
    lo, hi = _angular_bounds(region)
    c = density_constant(curve)
    return c * (hi - lo) * (r_hi ** (2 + a) - r_lo ** (2 + a)) / (2 + a)


@dataclass(frozen=True)
class QuadSpec:
    """Polar midpoint rule; a positive focus_radius adds a fine inner band."""

    n_radial: int = 96
    n_angular: int = 128
    focus_radius: float | None = None
    coarse_radial: int = 16

    def bands(self, rmax: float = 1.0) -> list[tuple[float, float, int]]:
        if self.focus_radius is None or self.focus_radius >= rmax:
            return [(0.0, rmax, self.n_radial)]
        return [
            (0.0, self.focus_radius, self.n_radial),
            (self.focus_radius, rmax, self.coarse_radial),
        ]


def _quad_nodes(curve: ComplexCurve, region: Region | None, quad: QuadSpec):
    """(nodes, weights) for ∫_{region ∩ unit disk} f(z) dsigma(z)."""
    lo_a, hi_a = _angular_bounds(region)
    center = _region_center(region)
    zs, ws = [], []
    for r_lo, r_hi, n_r in quad.bands(1.0):
        radii = r_lo + (r_hi - r_lo) * (np.arange(n_r) + 0.5) / n_r
        dr = (r_hi - r_lo) / n_r
        dth = (hi_a - lo_a) / quad.n_angular
        thetas = lo_a + dth * (np.arange(quad.n_angular) + 0.5)
        z = center + (radii[:, None] * np.exp(1j * thetas)[None, :]).ravel()
        w = np.repeat(radii * dr * dth, quad.n_angular)
        keep = np.abs(z) <= 1.0
        if region is not None:
            keep &= region.contains(z)
        z, w = z[keep], w[keep]
        zs.append(z)
        ws.append(w * affine_density(curve, z))
    return np.concatenate(zs), np.concatenate(ws)


def apply_T(
    curve: ComplexCurve,
    region: Region | None,
    s: IndicatorSet,
    x,
    quad: QuadSpec = QuadSpec(),
    adjoint: bool = False,
) -> float:
    """Quadrature estimate of ∫ chi_s(x -/+ h(z)) dsigma(z) over region ∩ disk."""
    if s.empty:
        return 0.0
    x = np.asarray(x, dtype=float)
    z, w = _quad_nodes(curve, region, quad)
    H = interleave(complex_components(curve, z))
    P = x[None, :] + H if adjoint else x[None, :] - H
    chi = s.contains(P)
    return float(np.sum(w[chi]))


def apply_T_star(curve, region, s, x, quad: QuadSpec = QuadSpec()) -> float:
    return apply_T(curve, region, s, x, quad, adjoint=True)


@dataclass(frozen=True)
class PairingEstimate:
    value: float
    std_error: float
    n_samples: int
    seed: int


@dataclass(frozen=True)
class MCSpec:
    """Budget and z-domain stratification for pairing estimates."""

    n_samples: int = 200_000
    z_rmax: float = 1.0       # inner radial band; the tail band keeps estimates unbiased
    tail_fraction: float = 0.1

    def strata(self) -> list[tuple[float, float, float]]:
        """(r_lo, r_hi, sample share) radial strata of the z-domain."""
        if self.z_rmax >= 1.0:
            return [(0.0, 1.0, 1.0)]
        return [
            (0.0, self.z_rmax, 1.0 - self.tail_fraction),
            (self.z_rmax, 1.0, self.tail_fraction),
        ]


def _sample_sigma_band(
    curve: ComplexCurve,
    region: Region | None,
    r_lo: float,
    r_hi: float,
    gen: np.random.Generator,
    n: int,
) -> tuple[np.ndarray, float]:
    """n points z with constant weight w so that E[w * sum f(z_i)] = ∫_band f dsigma.

    Monomial curves sample the radial density exactly; the returned weight is
    sigma(band)/n.
    """
    if not curve.is_monomial:
        raise AvglabError("sigma sampling implemented for monomial curves")
    a = 4.0 * curve.torsion_degree / (curve.d * (curve.d + 1))
    lo_a, hi_a = _angular_bounds(region)
    u = gen.random(n)
    radii = (r_lo ** (2 + a) + u * (r_hi ** (2 + a) - r_lo ** (2 + a))) ** (1.0 / (2 + a))
    thetas = lo_a + (hi_a - lo_a) * gen.random(n)
    z = radii * np.exp(1j * thetas)
    mass = sigma_mass(curve, region, r_lo, r_hi)
    return z, mass / n


def _atom_sample_weighted(atom, gen: np.random.Generator, n: int):
    """(points, weights) with E[sum w_i f(p_i)] = ∫_atom f."""
    v = atom.volume_exact()
    if v is not None:
        return atom.sample(gen, n), np.full(n, v / n)
    return atom.sample_cover(gen, n)


def pairing(
    curve: ComplexCurve,
    region: Region | None,
    E: IndicatorSet,
    F: IndicatorSet,
    mc: MCSpec = MCSpec(),
    seed: int = 0,
    adjoint: bool = False,
) -> PairingEstimate:
    """Monte Carlo estimate of <T chi_E, chi_F> (or the adjoint pairing).

    Joint sampling of (x, z): x from the atoms of F (stratified proportionally
    to atom volume; F's atoms must not overlap), z from the sigma-distribution
    on radial strata of the z-domain.  Each (atom, stratum) pair draws from
    its own Philox substream and the reduction is a fixed-order sum.
    """
    if F.empty:
        raise EmptySet("pairing requires a target set of positive volume")
    if E.empty:
        return PairingEstimate(0.0, 0.0, 0, seed)
    atom_vols = []
    for atom in F.atoms:
        v = atom.volume_exact()
        if v is None:
            v = _cover_mass(atom, seed)
        atom_vols.append(v)
    total_vol = sum(atom_vols)
    if total_vol <= 0:
        raise EmptySet("pairing requires a target set of positive volume")

    total = 0.0
    var = 0.0
    n_used = 0
    strata = mc.strata()
    for ai, (atom, v) in enumerate(zip(F.atoms, atom_vols)):
        n_atom = max(int(round(mc.n_samples * v / total_vol)), 256)
        for si, (r_lo, r_hi, share) in enumerate(strata):
            n = max(int(round(n_atom * share)), 64)
            gen = rnglib.substream(seed, rnglib.STREAM_PAIRING, ai, si)
            X, wx = _atom_sample_weighted(atom, gen, n)
            Z, wz = _sample_sigma_band(curve, region, r_lo, r_hi, gen, n)
            H = interleave(complex_components(curve, Z))
            P = X + H if adjoint else X - H
            chi = E.contains(P).astype(float)
            contrib = wx * (wz * n) * chi  # per-sample integrand mass
            total += float(contrib.sum())
            var += float(np.var(contrib * n, ddof=1)) / n
            n_used += n
    return PairingEstimate(total, math.sqrt(var), n_used, seed)


def _cover_mass(atom, seed: int, n: int = 100_000) -> float:
    gen = rnglib.substream(seed, rnglib.STREAM_VOLUME, 7)
    _, w = atom.sample_cover(gen, n)
    return float(w.sum())


def pairing_star(curve, region, F, E, mc: MCSpec = MCSpec(), seed: int = 0) -> PairingEstimate:
    """<T* chi_F, chi_E> = <chi_F, T chi_E>: an independent estimator of pairing(E, F)."""
    return pairing(curve, region, F, E, mc=mc, seed=seed, adjoint=True)


def alpha_beta(vol_E: float, vol_F: float, pairing_value: float) -> tuple[float, float]:
    """alpha = pairing/|F| and beta = pairing/|E|; alpha|F| = beta|E| by construction."""
    if vol_E <= 0 or vol_F <= 0:
        raise EmptySet("alpha/beta require sets of positive volume")
    return pairing_value / vol_F, pairing_value / vol_E


def rwt_ratio(d: int, pairing_value: float, vol_E: float, vol_F: float) -> float:
    """pairing / (|E|^{1/p_d} |F|^{1/q_d'})."""
    if vol_E <= 0 or vol_F <= 0:
        raise EmptySet("ratio requires sets of positive volume")
    p = float(critical_p(d))
    qc = float(conjugate(critical_q(d)))
    return pairing_value / (vol_E ** (1.0 / p) * vol_F ** (1.0 / qc))


def sampled_min_T(
    curve: ComplexCurve,
    region: Region | None,
    s: IndicatorSet,
    on: IndicatorSet,
    n_points: int,
    seed: int,
    quad: QuadSpec = QuadSpec(),
    adjoint: bool = False,
) -> float:
    """Minimum of (T or T*) chi_s over points sampled from the atoms of `on`."""
    best = math.inf
    per_atom = max(n_points // max(len(on.atoms), 1), 1)
    for ai, atom in enumerate(on.atoms):
        gen = rnglib.substream(seed, rnglib.STREAM_HYPOTHESIS, ai)
        if atom.volume_exact() is None:
            P, w = atom.sample_cover(gen, max(4 * per_atom, 64))
            P = P[w > 0][:per_atom]
        else:
            P = atom.sample(gen, per_atom)
        for x in P:
            best = min(best, apply_T(curve, region, s, x, quad, adjoint=adjoint))
    return best


@dataclass(frozen=True)
class TrilinearResult:
    ratio: float
    numerator_volume: float
    denominator: float
    sampled_min_1: float
    sampled_min_2: float


def trilinear_ratio_E(
    curve: ComplexCurve,
    region: Region | None,
    E1: IndicatorSet,
    E2: IndicatorSet,
    G: IndicatorSet,
    d: int,
    alpha1: float,
    alpha2: float,
    beta: float,
    vol_E2: float,
    seed: int = 0,
    hypothesis_points: int = 8,
    quad: QuadSpec = QuadSpec(),
    tolerance: float = 0.05,
) -> TrilinearResult:
    """|E2| over the refined lower-bound combination at levels (alpha1, alpha2, beta).

    The pointwise hypotheses T chi_{E_i} >= alpha_i on G are spot-checked by
    sampled minima with a relative tolerance band before the ratio is formed.
    """
    if alpha1 > alpha2:
        raise HypothesisViolated("levels must satisfy alpha1 <= alpha2")
    m1 = sampled_min_T(curve, region, E1, G, hypothesis_points, seed, quad)
    m2 = sampled_min_T(curve, region, E2, G, hypothesis_points, seed + 1, quad)
    if m1 < alpha1 * (1 - tolerance) or m2 < alpha2 * (1 - tolerance):
        raise HypothesisViolated(
            f"sampled minima ({m1:.3e}, {m2:.3e}) fall below levels ({alpha1:.3e}, {alpha2:.3e})"
        )
    denom = (
        alpha1 ** (d * (d + 1) / 2.0)
        * (beta / alpha1) ** (d - 1)
        * (alpha2 / alpha1) ** d
    )
    return TrilinearResult(vol_E2 / denom, vol_E2, denom, m1, m2)


def check_exponent_tuple(d: int, r1: float, r2: float, s1: float, s2: float) -> None:
    """Structural constraints for the second trilinear form."""
    q = critical_q(d)
    qc = conjugate(q)
    if abs((r1 + r2) - d * (d - 1) / 2.0) > 1e-12:
        raise BadExponents(f"r1 + r2 must equal d(d-1)/2 = {d * (d - 1) / 2}")
    if abs((s1 + s2) - d) > 1e-12:
        raise BadExponents(f"s1 + s2 must equal d = {d}")
    margin = s2 / float(qc) - r2 / float(q) - 1.0
    if margin <= 0:
        raise BadExponents(f"s2/q' - r2/q - 1 = {margin:.6f} must be positive")


def trilinear_ratio_F(
    curve: ComplexCurve,
    region: Region | None,
    F1: IndicatorSet,
    F2: IndicatorSet,
    E: IndicatorSet,
    d: int,
    beta1: float,
    beta2: float,
    alpha1: float,
    alpha2: float,
    exponents: tuple[float, float, float, float],
    vol_F2: float,
    seed: int = 0,
    hypothesis_points: int = 8,
    quad: QuadSpec = QuadSpec(),
    tolerance: float = 0.05,
) -> TrilinearResult:
    """|F2| over alpha1^r1 alpha2^r2 beta1^s1 beta2^s2 with adjoint hypotheses on E."""
    r1, r2, s1, s2 = exponents
    check_exponent_tuple(d, r1, r2, s1, s2)
    if beta1 > beta2:
        raise HypothesisViolated("levels must satisfy beta1 <= beta2")
    if alpha2 > alpha1:
        raise HypothesisViolated("levels must satisfy alpha2 <= alpha1")
    m1 = sampled_min_T(curve, region, F1, E, hypothesis_points, seed, quad, adjoint=True)
    m2 = sampled_min_T(curve, region, F2, E, hypothesis_points, seed + 1, quad, adjoint=True)
    if m1 < beta1 * (1 - tolerance) or m2 < beta2 * (1 - tolerance):
        raise HypothesisViolated(
            f"sampled adjoint minima ({m1:.3e}, {m2:.3e}) fall below levels ({beta1:.3e}, {beta2:.3e})"
        )
    denom = alpha1**r1 * alpha2**r2 * beta1**s1 * beta2**s2
    return TrilinearResult(vol_F2 / denom, vol_F2, denom, m1, m2)
