"""Membership-testable regions of the complex plane.

Monomial curves get a fan of narrow sectors; polynomial curves (d = 3) get,
for every distinct root u of phi''', cells of the form

    nearest-root cell  ∩  sector centered at u  ∩  (gap or dyadic annulus),

with the annuli built from the sorted distances of the other roots to u.
Each polynomial cell carries the local torsion degree k (number of roots at
or inside its annulus scale) and the product of the outside-root distances,
so that |phi'''(z)| is comparable to root_product * |z - u|^k on the cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import ComplexCurve, _derivative_coeffs, _polyval
from .errors import AvglabError, RootFindingFailure

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Sector:
    """Angular slice angle_lo <= arg(z - center) < angle_hi, vertex at center."""

    angle_lo: float
    angle_hi: float
    center: complex = 0j

    def __post_init__(self):
        if not (0.0 <= self.angle_lo < self.angle_hi <= TWO_PI + 1e-12):
            raise AvglabError(f"bad sector angles [{self.angle_lo}, {self.angle_hi})")

    def contains(self, z) -> np.ndarray:
        w = np.asarray(z, dtype=complex) - self.center
        ang = np.mod(np.angle(w), TWO_PI)
        return (ang >= self.angle_lo) & (ang < self.angle_hi)


@dataclass(frozen=True)
class GapAnnulus:
    """lo <= |z - center| <= hi, with hi possibly infinite."""

    lo: float
    hi: float
    center: complex = 0j

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi):
            raise AvglabError(f"bad annulus radii [{self.lo}, {self.hi}]")

    def contains(self, z) -> np.ndarray:
        m = np.abs(np.asarray(z, dtype=complex) - self.center)
        return (m >= self.lo) & (m <= self.hi)


@dataclass(frozen=True)
class DyadicAnnulus:
    """center_modulus / ratio <= |z - center| <= center_modulus * ratio."""

    center_modulus: float
    ratio: float
    center: complex = 0j

    def __post_init__(self):
        if self.center_modulus <= 0 or self.ratio <= 1:
            raise AvglabError("dyadic annulus needs positive modulus and ratio > 1")

    @property
    def lo(self) -> float:
        return self.center_modulus / self.ratio

    @property
    def hi(self) -> float:
        return self.center_modulus * self.ratio

    def contains(self, z) -> np.ndarray:
        m = np.abs(np.asarray(z, dtype=complex) - self.center)
        return (m >= self.lo) & (m <= self.hi)


@dataclass(frozen=True)
class NearestRootCell:
    """Points strictly closer to roots[root_index] than to any other listed root."""

    root_index: int
    roots: tuple[complex, ...]

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        own = np.abs(z - self.roots[self.root_index])
        ok = np.ones(z.shape, dtype=bool)
        for i, u in enumerate(self.roots):
            if i == self.root_index:
                continue
            ok &= own < np.abs(z - u)
        return ok


@dataclass(frozen=True)
class Intersection:
    """Intersection of member regions; polynomial cells carry local-degree meta."""

    members: tuple
    local_degree: int = 0
    root_product: float = 1.0

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        ok = np.ones(z.shape, dtype=bool)
        for m in self.members:
            ok &= m.contains(z)
        return ok

    def member_of_type(self, cls):
        for m in self.members:
            if isinstance(m, cls):
                return m
        return None

    @property
    def center(self) -> complex:
        sec = self.member_of_type(Sector)
        return sec.center if sec is not None else 0j


Region = Sector | GapAnnulus | DyadicAnnulus | NearestRootCell | Intersection


@dataclass(frozen=True)
class RegionConfig:
    """Tunable constants of the decomposition."""

    sector_angle: float = math.pi / 16
    gap_factor: float = 4.0       # A: gap annulus clearance
    dyadic_factor: float = 2.0    # A1: dyadic annulus half-width ratio
    root_residual_tol: float = 1e-10
    root_cluster_tol: float = 1e-5


def sector_fan(angle: float, center: complex = 0j) -> list[Sector]:
    """Sectors of the given angle covering [0, 2pi); the last one may be narrower."""
    n = math.ceil(TWO_PI / angle - 1e-12)
    edges = [min(i * angle, TWO_PI) for i in range(n)] + [TWO_PI]
    return [Sector(edges[i], edges[i + 1], center) for i in range(n)]


def third_derivative_roots(curve: ComplexCurve, cfg: RegionConfig) -> np.ndarray:
    """Roots of phi''' by companion matrix, residual-checked; multiplicities kept."""
    c = _derivative_coeffs(curve.phi.coefficients(), 3)
    c = np.trim_zeros(c, "b")
    if len(c) <= 1:
        return np.empty(0, dtype=complex)
    roots = np.roots(c[::-1])
    scale = np.max(np.abs(c))
    for r in roots:
        residual = abs(_polyval(c, r)) / (scale * max(1.0, abs(r)) ** (len(c) - 1))
        if residual > cfg.root_residual_tol:
            raise RootFindingFailure(
                f"root {r} of the third derivative has relative residual {residual:.3e}"
            )
    return roots


def _cluster_roots(roots: np.ndarray, tol: float) -> list[tuple[complex, int]]:
    """Greedy clustering into (location, multiplicity), tolerance `tol` absolute."""
    remaining = list(roots)
    clusters: list[tuple[complex, int]] = []
    scale = max(1.0, max((abs(r) for r in remaining), default=1.0))
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        rest = []
        for r in remaining:
            if abs(r - seed) <= tol * scale:
                members.append(r)
            else:
                rest.append(r)
        remaining = rest
        clusters.append((complex(np.mean(members)), len(members)))
    return clusters


def build_regions(curve: ComplexCurve, cfg: RegionConfig | None = None) -> list[Region]:
    """Decompose the plane for the Jacobian lower bounds.

    Monomial curves: the sector fan.  Polynomial curves (d = 3): for each
    distinct root of phi''', all nondegenerate (annulus x sector) cells inside
    its nearest-root cell.  The annuli need not cover the plane (the clearance
    constants leave gaps); membership in at most one cell is what is promised.
    """
    cfg = cfg or RegionConfig()
    if curve.is_monomial:
        return sector_fan(cfg.sector_angle)

    roots = third_derivative_roots(curve, cfg)
    if len(roots) == 0:
        # phi''' is constant: a single scale, degree zero.
        return [
            Intersection((s,), local_degree=0, root_product=1.0)
            for s in sector_fan(cfg.sector_angle)
        ]

    clusters = _cluster_roots(roots, cfg.root_cluster_tol)
    locations = tuple(c for c, _ in clusters)
    regions: list[Region] = []
    for idx, (u, mult) in enumerate(clusters):
        others = []
        for jdx, (v, m) in enumerate(clusters):
            others.extend([abs(v - u)] * (m if jdx != idx else m - 1))
        others.sort()
        annuli = _annuli_for_root(u, others, cfg)
        cell_members: list[tuple] = []
        for annulus, k_local, product in annuli:
            for sec in sector_fan(cfg.sector_angle, center=u):
                members: tuple = (sec, annulus) if annulus is not None else (sec,)
                if len(clusters) > 1:
                    members = (NearestRootCell(idx, locations),) + members
                cell_members.append((members, k_local, product))
        for members, k_local, product in cell_members:
            regions.append(
                Intersection(members, local_degree=k_local, root_product=product)
            )
    return regions


def _annuli_for_root(u: complex, others: list[float], cfg: RegionConfig):
    """Nondegenerate, pairwise-disjoint annuli around u.

    `others` are sorted distances of the remaining roots (with multiplicity).
    Each annulus carries the local degree (u itself plus the roots at or
    inside its scale) and the product of the strictly-outside distances.
    Dyadic annuli of roots with nearly equal distances would overlap, so
    scales within a factor A1^2 of each other are merged into one annulus.
    """
    A, A1 = cfg.gap_factor, cfg.dyadic_factor
    n = 1 + len(others)
    rel = 1e-12

    def inside_count(threshold: float) -> int:
        return 1 + sum(1 for r in others if r <= threshold * (1 + rel))

    def outside_product(threshold: float) -> float:
        prod = 1.0
        for r in others:
            if r > threshold * (1 + rel):
                prod *= r
        return prod

    positive = sorted(r for r in others if r > 0.0)
    groups: list[list[float]] = []
    for r in positive:
        if groups and r <= groups[-1][-1] * A1 * A1 * (1 + rel):
            groups[-1].append(r)
        else:
            groups.append([r])

    out = []
    prev_scale = 0.0
    for g in groups:
        lo, hi = A * prev_scale, g[0] / A
        if lo < hi:
            out.append((GapAnnulus(lo, hi, center=u), inside_count(prev_scale), outside_product(prev_scale)))
        if g[-1] <= g[0] * (1 + rel):
            ann: GapAnnulus | DyadicAnnulus = DyadicAnnulus(g[0], A1, center=u)
        else:
            ann = GapAnnulus(g[0] / A1, g[-1] * A1, center=u)
        out.append((ann, inside_count(g[-1]), outside_product(g[-1])))
        prev_scale = g[-1]
    out.append((GapAnnulus(A * prev_scale, math.inf, center=u), n, 1.0))
    return out
