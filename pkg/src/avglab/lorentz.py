"""Lorentz quasi-norms of layered functions.

A layered function is a finite sum of 2^k indicators of pairwise disjoint
sets, so its decreasing rearrangement is a right-continuous step function
and the quasi-norm integral has an exact closed form per plateau.  The
discrete dyadic-sum form used for normalization is provided alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng as rnglib
from .errors import AvglabError, ZeroFunction
from .sets import IndicatorSet, volume


def rearrangement_norm(plateaus: list[tuple[float, float]], p: float, u: float) -> float:
    """Lorentz (p, u) quasi-norm of a step function given as (value, measure) pairs.

    Exact plateau integration of (t^{1/p} f*(t))^u dt/t; u = inf gives the
    weak norm sup_t t^{1/p} f*(t).
    """
    if p < 1:
        raise AvglabError("p must be >= 1")
    data = sorted(((v, m) for v, m in plateaus if m > 0 and v > 0), reverse=True)
    if not data:
        return 0.0
    if math.isinf(u):
        t = 0.0
        best = 0.0
        for v, m in data:
            t += m
            best = max(best, v * t ** (1.0 / p))
        return best
    if u < 1:
        raise AvglabError("u must be >= 1 or infinity")
    total = 0.0
    t_prev = 0.0
    for v, m in data:
        t_next = t_prev + m
        total += v**u * (p / u) * (t_next ** (u / p) - t_prev ** (u / p))
        t_prev = t_next
    return total ** (1.0 / u)


def discrete_sum_norm(plateaus: list[tuple[float, float]], p: float, u: float) -> float:
    """(sum_k (v_k m_k^{1/p})^u)^{1/u}; u = inf gives sup_k v_k m_k^{1/p}."""
    terms = [v * m ** (1.0 / p) for v, m in plateaus if m > 0 and v > 0]
    if not terms:
        return 0.0
    if math.isinf(u):
        return max(terms)
    return float(np.sum(np.asarray(terms) ** u) ** (1.0 / u))


@dataclass(frozen=True)
class LayeredFunction:
    """Finite sum of 2^k chi_{E_k} over pairwise disjoint sets, volumes attached."""

    layers: tuple[tuple[int, IndicatorSet], ...]
    volumes: tuple[float, ...]

    @classmethod
    def build(
        cls,
        layers,
        seed: int = 0,
        volume_samples: int = 100_000,
        check_disjoint: bool = True,
        disjoint_probes: int = 10_000,
    ) -> "LayeredFunction":
        layers = tuple((int(k), s) for k, s in layers)
        vols = tuple(volume(s, n_samples=volume_samples, seed=seed + i).value
                     for i, (_, s) in enumerate(layers))
        f = cls(layers, vols)
        if check_disjoint:
            f.assert_disjoint(disjoint_probes, seed)
        return f

    def assert_disjoint(self, probes: int, seed: int) -> None:
        """Sampled cross-membership between every pair of layers must find no hits."""
        for i in range(len(self.layers)):
            for j in range(len(self.layers)):
                if i == j:
                    continue
                _, src = self.layers[i]
                _, dst = self.layers[j]
                if src.empty or dst.empty:
                    continue
                gen = rnglib.substream(seed, rnglib.STREAM_DISJOINTNESS, i, j)
                pts = _sample_in_set(src, gen, probes)
                if pts is not None and len(pts) and np.any(dst.contains(pts)):
                    raise AvglabError(f"layers {i} and {j} overlap")

    def plateaus(self) -> list[tuple[float, float]]:
        return [(2.0**k, v) for (k, _), v in zip(self.layers, self.volumes)]

    def shifted(self, shift: int) -> "LayeredFunction":
        return LayeredFunction(
            tuple((k + shift, s) for k, s in self.layers), self.volumes
        )


def _sample_in_set(s: IndicatorSet, gen, n: int):
    pts = []
    for atom in s.atoms:
        if atom.volume_exact() is not None:
            pts.append(atom.sample(gen, max(n // len(s.atoms), 1)))
        else:
            P, w = atom.sample_cover(gen, max(n // len(s.atoms), 1))
            pts.append(P[w > 0])
    return np.concatenate(pts) if pts else None


def lorentz_norm(f: LayeredFunction, p: float, u: float) -> float:
    """Exact rearrangement-based Lorentz (p, u) quasi-norm."""
    return rearrangement_norm(f.plateaus(), p, u)


def discrete_lorentz(f: LayeredFunction, p: float, u: float) -> float:
    """Dyadic-sum form (sum_k (2^k |E_k|^{1/p})^u)^{1/u}."""
    return discrete_sum_norm(f.plateaus(), p, u)


@dataclass(frozen=True)
class NormalizeResult:
    function: LayeredFunction
    shift: int
    residual: float


def normalize(f: LayeredFunction, p: float, u: float) -> NormalizeResult:
    """Shift the dyadic levels by the nearest power of two to 1/norm.

    The renormalized discrete norm (the residual) lands in [1/sqrt2, sqrt2].
    """
    norm = discrete_lorentz(f, p, u)
    if norm <= 0:
        raise ZeroFunction("cannot normalize the zero function")
    shift = -round(math.log2(norm))
    return NormalizeResult(f.shifted(shift), shift, norm * 2.0**shift)


def numeric_rearrangement_norm(
    plateaus: list[tuple[float, float]], p: float, u: float, n_grid: int = 1_000_000
) -> float:
    """Independent midpoint-quadrature oracle for the rearrangement integral."""
    data = sorted(((v, m) for v, m in plateaus if m > 0 and v > 0), reverse=True)
    if not data:
        return 0.0
    if math.isinf(u):
        ts = []
        t = 0.0
        for v, m in data:
            t += m
            ts.append(v * t ** (1.0 / p))
        return max(ts)
    total = 0.0
    t_prev = 0.0
    per = max(n_grid // len(data), 1)
    for v, m in data:
        ts = t_prev + m * (np.arange(per) + 0.5) / per
        total += float(np.sum((ts ** (1.0 / p) * v) ** u / ts)) * (m / per)
        t_prev += m
    return total ** (1.0 / u)
