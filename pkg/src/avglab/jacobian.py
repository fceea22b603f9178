"""Jacobian determinants of the point-sum map and their lower-bound ratios.

The holomorphic Jacobian of (z_1, ..., z_d) -> sum_i h(z_i) is the d x d
determinant with columns h'(z_i).  For monomial curves it factors exactly
into N (d-1)! times the Vandermonde product times the complete homogeneous
symmetric polynomial of degree N - d; the module checks that identity and
estimates, by seeded sampling, the infimum of |J| over region-confined
configurations relative to its predicted lower bound.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as rnglib
from .curves import ComplexCurve, curve_derivative, eval_curve
from .errors import AvglabError, DegenerateConfig, MembershipViolation
from .regions import (
    DyadicAnnulus,
    GapAnnulus,
    Intersection,
    Region,
    RegionConfig,
    Sector,
    build_regions,
)


def vandermonde(zs) -> complex:
    """Signed product prod_{i<j} (z_j - z_i); antisymmetric in its arguments."""
    zs = np.asarray(zs, dtype=complex)
    if zs.shape[-1] < 2:
        raise AvglabError("need at least two points")
    out = np.ones(zs.shape[:-1], dtype=complex)
    n = zs.shape[-1]
    for i in range(n):
        for j in range(i + 1, n):
            out = out * (zs[..., j] - zs[..., i])
    return out if out.shape else complex(out)


def complete_homogeneous(m: int, zs):
    """Complete homogeneous symmetric polynomial Q_m; exact for integer inputs.

    Uses the variable-by-variable recurrence Q_m(x_1..x_i) =
    Q_m(x_1..x_{i-1}) + x_i Q_{m-1}(x_1..x_i), which keeps Python integers
    exact and vectorizes over leading axes for ndarray inputs.
    """
    if m < 0:
        raise AvglabError(f"degree must be >= 0, got {m}")
    if isinstance(zs, np.ndarray):
        table = [np.ones(zs.shape[:-1], dtype=zs.dtype)] + [
            np.zeros(zs.shape[:-1], dtype=zs.dtype) for _ in range(m)
        ]
        for i in range(zs.shape[-1]):
            zi = zs[..., i]
            for t in range(1, m + 1):
                table[t] = table[t] + zi * table[t - 1]
        return table[m]
    table = [1] + [0] * m
    for zi in zs:
        for t in range(1, m + 1):
            table[t] = table[t] + zi * table[t - 1]
    return table[m]


def jacobian_complex(curve: ComplexCurve, zs) -> complex:
    """det(h'(z_1), ..., h'(z_d)); vanishes when two points coincide."""
    zs = np.asarray(zs, dtype=complex)
    if zs.shape[-1] != curve.d:
        raise AvglabError(f"expected {curve.d} points, got {zs.shape[-1]}")
    cols = curve_derivative(curve, zs, 1)  # (..., d points, d components)
    mats = np.swapaxes(cols, -1, -2)
    det = np.linalg.det(mats)
    return det if det.shape else complex(det)


def monomial_factor(curve: ComplexCurve, zs):
    """Closed-form N (d-1)! V(zs) Q_{N-d}(zs) for monomial curves with N >= d."""
    if not curve.is_monomial or curve.phi.N < curve.d:
        raise AvglabError("factorization applies to monomial curves with N >= d")
    N, d = curve.phi.N, curve.d
    zs = np.asarray(zs, dtype=complex)
    return N * math.factorial(d - 1) * vandermonde(zs) * complete_homogeneous(N - d, zs)


def factorization_residual(curve: ComplexCurve, zs) -> float:
    """|J - N(d-1)! V Q_{N-d}| / (1 + |J|), elementwise over leading axes."""
    jac = jacobian_complex(curve, zs)
    fac = monomial_factor(curve, zs)
    return np.abs(jac - fac) / (1.0 + np.abs(jac))


def lower_bound_ratio(curve: ComplexCurve, zs) -> float:
    """|J| / (max_j |z_j|^{N-d} prod_{i<j} |z_j - z_i|) for monomial curves."""
    if not curve.is_monomial or curve.phi.N < curve.d:
        raise AvglabError("lower-bound ratio applies to monomial curves with N >= d")
    zs = np.asarray(zs, dtype=complex)
    denom = _monomial_denominator(curve, zs)
    bad = denom == 0
    if np.any(bad):
        raise DegenerateConfig("coincident points or all points at the origin")
    out = np.abs(jacobian_complex(curve, zs)) / denom
    return out if out.shape else float(out)


def _monomial_denominator(curve: ComplexCurve, zs: np.ndarray) -> np.ndarray:
    K = curve.phi.N - curve.d
    mods = np.abs(zs)
    out = np.max(mods, axis=-1) ** K
    n = zs.shape[-1]
    for i in range(n):
        for j in range(i + 1, n):
            out = out * np.abs(zs[..., j] - zs[..., i])
    return out


def d3_poly_lower_bound_ratio(curve: ComplexCurve, cell: Intersection, zs) -> float:
    """|J| / (root_product * |V| * max_i |z_i - u|^k) on a polynomial cell.

    u is the cell's root center; moduli are taken relative to it, which
    coincides with plain moduli for cells centered at the origin.
    """
    if curve.is_monomial or curve.d != 3:
        raise AvglabError("polynomial cell ratio applies to d = 3 polynomial curves")
    zs = np.asarray(zs, dtype=complex)
    if zs.shape[-1] != 3:
        raise AvglabError("need exactly three points")
    inside = cell.contains(zs)
    if not np.all(inside):
        raise MembershipViolation("a point lies outside the cell")
    center = cell.center
    v = np.abs(vandermonde(zs))
    rel = np.max(np.abs(zs - center), axis=-1) ** cell.local_degree
    denom = cell.root_product * v * rel
    if np.any(denom == 0):
        raise DegenerateConfig("coincident points or all points at the cell center")
    out = np.abs(jacobian_complex(curve, zs)) / denom
    return out if out.shape else float(out)


@dataclass
class LowerBoundReport:
    """Empirical infimum of a lower-bound ratio over a sampled region."""

    region: Region
    samples: int
    min_ratio: float
    min_witness: tuple[complex, ...]
    convergence_series: list[tuple[int, float]] = field(default_factory=list)
    seed: int = 0
    last_decade_min: float = math.inf

    def to_json_dict(self) -> dict:
        return {
            "region": repr(self.region),
            "samples": self.samples,
            "min_ratio": self.min_ratio,
            "min_witness": [[z.real, z.imag] for z in self.min_witness],
            "convergence_series": [[c, m] for c, m in self.convergence_series],
            "seed": self.seed,
            "last_decade_min": self.last_decade_min,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["sample_count", "running_min"])
            for count, running in self.convergence_series:
                writer.writerow([count, f"{running:.17g}"])


def _radial_bounds(region: Region) -> tuple[float, float, complex]:
    lo, hi, center = 0.0, 1.0, 0j
    if isinstance(region, Intersection):
        for m in region.members:
            if isinstance(m, (GapAnnulus, DyadicAnnulus)):
                lo, hi, center = m.lo, m.hi, m.center
    elif isinstance(region, (GapAnnulus, DyadicAnnulus)):
        lo, hi, center = region.lo, region.hi, region.center
    if not math.isfinite(hi):
        hi = max(4.0 * lo, 1.0)
    return lo, hi, center


def _angular_bounds(region: Region) -> tuple[float, float]:
    if isinstance(region, Sector):
        return region.angle_lo, region.angle_hi
    if isinstance(region, Intersection):
        sec = region.member_of_type(Sector)
        if sec is not None:
            return sec.angle_lo, sec.angle_hi
    return 0.0, 2.0 * math.pi


def sample_in_region(region: Region, gen: np.random.Generator, n: int, d: int) -> np.ndarray:
    """(n, d) complex points inside `region`, area-uniform, by rejection."""
    lo, hi, center = _radial_bounds(region)
    alo, ahi = _angular_bounds(region)
    out = np.empty((n, d), dtype=complex)
    filled = 0
    attempts = 0
    while filled < n:
        attempts += 1
        if attempts > 200:
            raise DegenerateConfig("region has (near) zero area: sampling failed")
        m = max(2 * (n - filled) * d, 64)
        radii = np.sqrt(lo**2 + (hi**2 - lo**2) * gen.random(m))
        angles = alo + (ahi - alo) * gen.random(m)
        pts = center + radii * np.exp(1j * angles)
        pts = pts[region.contains(pts)]
        take = min(len(pts) // d, n - filled)
        if take > 0:
            out[filled : filled + take] = pts[: take * d].reshape(take, d)
            filled += take
    return out


_ESTIMATE_BLOCK = 4096


def estimate_sector_constant(
    curve: ComplexCurve,
    region: Region,
    n_samples: int,
    seed: int,
) -> LowerBoundReport:
    """Running minimum of the lower-bound ratio over seeded random configurations.

    Fixed-size blocks draw from per-block Philox substreams, so blocks may be
    evaluated concurrently and in any order: the reduction is a plain minimum
    and the output depends only on (seed, n_samples).
    """
    if n_samples < 1:
        raise AvglabError("need at least one sample")
    chunk = _ESTIMATE_BLOCK
    d = curve.d
    poly_cell = isinstance(region, Intersection) and not curve.is_monomial
    best = math.inf
    witness: tuple[complex, ...] = ()
    series: list[tuple[int, float]] = []
    checkpoints = _checkpoints(n_samples)
    done = 0
    last_decade = math.inf
    decade_start = n_samples - n_samples // 10
    for index in range(math.ceil(n_samples / chunk)):
        gen = rnglib.substream(seed, rnglib.STREAM_SECTOR_CONSTANT, index)
        take = min(chunk, n_samples - done)
        zs = sample_in_region(region, gen, take, d)
        zs = _ensure_distinct(zs, region, gen, d)
        if poly_cell:
            ratios = d3_poly_lower_bound_ratio(curve, region, zs)
        else:
            ratios = lower_bound_ratio(curve, zs)
        ratios = np.atleast_1d(ratios)
        local_min = int(np.argmin(ratios))
        if ratios[local_min] < best:
            best = float(ratios[local_min])
            witness = tuple(zs[local_min])
        tail = max(decade_start - done, 0)
        if tail < take:
            last_decade = min(last_decade, float(np.min(ratios[tail:])))
        done += take
        while checkpoints and done >= checkpoints[0]:
            series.append((checkpoints.pop(0), best))
    return LowerBoundReport(
        region=region,
        samples=n_samples,
        min_ratio=best,
        min_witness=witness,
        convergence_series=series,
        seed=seed,
        last_decade_min=last_decade if math.isfinite(last_decade) else best,
    )


def _checkpoints(n: int) -> list[int]:
    pts = sorted({min(10**k, n) for k in range(0, 10)} | {n})
    return [p for p in pts if p <= n]


def _ensure_distinct(zs: np.ndarray, region, gen, d: int) -> np.ndarray:
    """Resample the (measure-zero) rows with coincident points."""
    for _ in range(8):
        bad = np.zeros(len(zs), dtype=bool)
        for i in range(d):
            for j in range(i + 1, d):
                bad |= zs[:, i] == zs[:, j]
        if not bad.any():
            return zs
        zs[bad] = sample_in_region(region, gen, int(bad.sum()), d)
    return zs


def real_jacobian_check(curve: ComplexCurve, zs, fd_step: float) -> float:
    """| |J_R| - |J_C|^2 | / (1 + |J_C|^2) with J_R from central differences.

    J_R is the 2d x 2d Jacobian determinant of the real point-sum map; for a
    holomorphic map it must equal |J_C|^2.
    """
    if fd_step <= 0:
        raise AvglabError("finite-difference step must be positive")
    zs = np.asarray(zs, dtype=complex)
    d = curve.d

    def total(point_vec: np.ndarray) -> np.ndarray:
        pts = point_vec[0::2] + 1j * point_vec[1::2]
        return eval_curve(curve, pts).sum(axis=0)

    base = np.empty(2 * d)
    base[0::2] = zs.real
    base[1::2] = zs.imag
    jac = np.empty((2 * d, 2 * d))
    for k in range(2 * d):
        plus = base.copy()
        minus = base.copy()
        plus[k] += fd_step
        minus[k] -= fd_step
        jac[:, k] = (total(plus) - total(minus)) / (2 * fd_step)
    jr = abs(np.linalg.det(jac))
    jc2 = abs(jacobian_complex(curve, zs)) ** 2
    return abs(jr - jc2) / (1.0 + jc2)


__all__ = [
    "vandermonde",
    "complete_homogeneous",
    "jacobian_complex",
    "monomial_factor",
    "factorization_residual",
    "lower_bound_ratio",
    "d3_poly_lower_bound_ratio",
    "LowerBoundReport",
    "estimate_sector_constant",
    "sample_in_region",
    "real_jacobian_check",
    "build_regions",
    "RegionConfig",
]
