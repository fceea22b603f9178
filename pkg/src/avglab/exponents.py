"""Exact rational arithmetic for the critical Lebesgue/Lorentz exponents.

All exponent bookkeeping for the scaling families is done in `Fraction`s so
that predicted slopes are free of transcription and rounding errors; floats
appear only at the final comparison against measured values.
"""

from __future__ import annotations

from fractions import Fraction


def critical_p(d: int) -> Fraction:
    """Input Lebesgue exponent at the vertex of the boundedness region."""
    return Fraction(d + 1, 2)


def critical_q(d: int) -> Fraction:
    """Output Lebesgue exponent at the vertex of the boundedness region."""
    return Fraction(d * (d + 1), 2 * (d - 1))


def conjugate(p: Fraction) -> Fraction:
    """Holder conjugate p' = p / (p - 1)."""
    p = Fraction(p)
    return p / (p - 1)


def torsion_weight(d: int, K: int) -> Fraction:
    """Exponent 4K / (d(d+1)) of |z| in the affine density."""
    return Fraction(4 * K, d * (d + 1))


def modulus_floor_exponent(d: int, K: int) -> Fraction:
    """The exponent nu = d(d+1) / (4K + 2d(d+1)) controlling modulus floors."""
    return Fraction(d * (d + 1), 4 * K + 2 * d * (d + 1))


def dilation_weight(d: int) -> int:
    """Volume scaling degree of the anisotropic dilation: sum of 2j = d(d+1)."""
    return d * (d + 1)


def vertex_identity_gap(d: int) -> Fraction:
    """d/q_d - (d-1)/p_d, exactly zero at the critical pair."""
    return Fraction(d, 1) / critical_q(d) - Fraction(d - 1, 1) / critical_p(d)


def dual_identity_gap(d: int) -> Fraction:
    """(1 + (d-1)/p_d') - d/q_d', the conjugate form of the vertex identity."""
    pd_c = conjugate(critical_p(d))
    qd_c = conjugate(critical_q(d))
    return 1 + Fraction(d - 1, 1) / pd_c - Fraction(d, 1) / qd_c
