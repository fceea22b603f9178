"""Complex curves of simple type and their geometry.

A curve is the map z -> (z, z^2, ..., z^{d-1}, phi(z)) from a planar domain
into C^d, viewed as a 2-surface in R^{2d}.  The last component phi is either
a single monomial z^N or, for d = 3, an arbitrary complex polynomial.  The
module also provides the affine-arclength-type density |phi^(d)|^{4/(d(d+1))}
and the anisotropic dilation that scales coordinate pair j by r^j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AvglabError

RealPoint = np.ndarray  # shape (2d,), pairs (Re z_j, Im z_j)


@dataclass(frozen=True)
class Monomial:
    """phi(z) = z^N."""

    N: int

    def __post_init__(self):
        if self.N < 0:
            raise AvglabError(f"monomial degree must be >= 0, got {self.N}")

    def coefficients(self) -> np.ndarray:
        c = np.zeros(self.N + 1, dtype=complex)
        c[self.N] = 1.0
        return c


@dataclass(frozen=True)
class Poly:
    """phi(z) = sum_j coeffs[j] z^j, allowed only with d = 3."""

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    def coefficients(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=complex)


def _derivative_coeffs(coeffs: np.ndarray, order: int) -> np.ndarray:
    """Exact coefficient shift for the order-th derivative of a polynomial."""
    c = np.asarray(coeffs, dtype=complex)
    for _ in range(order):
        if len(c) <= 1:
            return np.zeros(1, dtype=complex)
        c = c[1:] * np.arange(1, len(c), dtype=float)
    return c


def _polyval(coeffs: np.ndarray, z):
    """Horner evaluation; `z` may be scalar or ndarray."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


@dataclass(frozen=True)
class ComplexCurve:
    """Curve of simple type in C^d with torsion component phi."""

    d: int
    phi: Monomial | Poly
    N_max: int = 24
    _phi_coeffs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.d < 2:
            raise AvglabError(f"dimension must be >= 2, got {self.d}")
        if isinstance(self.phi, Poly):
            if self.d != 3:
                raise AvglabError("polynomial torsion components require d = 3")
            if len(self.phi.coeffs) - 1 > self.N_max:
                raise AvglabError(
                    f"polynomial degree {len(self.phi.coeffs) - 1} exceeds N_max={self.N_max}"
                )
        object.__setattr__(self, "_phi_coeffs", self.phi.coefficients())

    @property
    def is_monomial(self) -> bool:
        return isinstance(self.phi, Monomial)

    @property
    def torsion_degree(self) -> int:
        """K = N - d for phi = z^N with N >= d; degenerate monomials give 0."""
        if not self.is_monomial:
            raise AvglabError("torsion degree is defined for monomial curves only")
        return max(self.phi.N - self.d, 0)

    def phi_derivative(self, z, order: int = 0):
        return _polyval(_derivative_coeffs(self._phi_coeffs, order), z)

    def component_derivative(self, j: int, z, order: int):
        """order-th derivative of component j (1-based; j = d is phi)."""
        z = np.asarray(z, dtype=complex)
        if j == self.d:
            return self.phi_derivative(z, order)
        if order > j:
            return np.zeros_like(z)
        factor = math.perm(j, order)
        return factor * z ** (j - order)


def eval_curve(curve: ComplexCurve, z) -> RealPoint:
    """Real embedding (Re z, Im z, Re z^2, ..., Re phi, Im phi) of the curve point."""
    z = np.asarray(z, dtype=complex)
    comps = complex_components(curve, z)
    return interleave(comps)


def complex_components(curve: ComplexCurve, z) -> np.ndarray:
    """Complex vector (z, z^2, ..., z^{d-1}, phi(z)); trailing axis indexes components."""
    z = np.asarray(z, dtype=complex)
    comps = np.empty(z.shape + (curve.d,), dtype=complex)
    power = np.ones_like(z)
    for j in range(curve.d - 1):
        power = power * z
        comps[..., j] = power
    comps[..., curve.d - 1] = curve.phi_derivative(z, 0)
    return comps


def interleave(comps: np.ndarray) -> np.ndarray:
    """Complex (..., d) -> real (..., 2d) with pairs (Re, Im)."""
    shape = comps.shape[:-1] + (2 * comps.shape[-1],)
    out = np.empty(shape, dtype=float)
    out[..., 0::2] = comps.real
    out[..., 1::2] = comps.imag
    return out


def curve_derivative(curve: ComplexCurve, z: complex, order: int) -> np.ndarray:
    """Complex vector of order-th derivatives of each component at z."""
    if order < 1:
        raise AvglabError(f"derivative order must be >= 1, got {order}")
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (curve.d,), dtype=complex)
    for j in range(1, curve.d + 1):
        out[..., j - 1] = curve.component_derivative(j, z, order)
    return out


def affine_density(curve: ComplexCurve, z) -> np.ndarray:
    """|phi^(d)(z)|^{4/(d(d+1))}, the affine-arclength-type weight."""
    z = np.asarray(z, dtype=complex)
    exponent = 4.0 / (curve.d * (curve.d + 1))
    mag = np.abs(curve.phi_derivative(z, curve.d))
    return mag**exponent


def density_constant(curve: ComplexCurve) -> float:
    """For phi = z^N with N >= d: the constant (N! / (N-d)!)^{4/(d(d+1))}."""
    if not curve.is_monomial:
        raise AvglabError("density constant is closed-form for monomial curves only")
    N, d = curve.phi.N, curve.d
    if N < d:
        return 0.0
    return float(math.perm(N, d)) ** (4.0 / (d * (d + 1)))


def anisotropic_dilate(x: RealPoint, r: float) -> RealPoint:
    """Scale coordinate pair j by r^j; D_r D_s = D_{rs} and D_1 = id."""
    if r <= 0:
        raise AvglabError(f"dilation parameter must be positive, got {r}")
    x = np.asarray(x, dtype=float)
    d = x.shape[-1] // 2
    powers = np.repeat(r ** np.arange(1, d + 1, dtype=float), 2)
    return x * powers


def dilation_volume_factor(d: int, r: float) -> float:
    """Jacobian of the anisotropic dilation: r^{d(d+1)}."""
    return float(r) ** (d * (d + 1))
