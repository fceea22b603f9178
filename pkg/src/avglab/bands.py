"""Band structure on finite point configurations.

Indices carry parity roles (even indices seed clusters, odd indices can be
absorbed, the largest index plays a special role), and points cluster by
transitive chaining through metric balls whose radius is
delta * level^{1/2} |z z_j|^{-K/(d(d+1))}.  Every band has one free index
(its minimum); a two-element band's other index is quasi-free; larger bands'
remaining indices are bound.  Construction is deterministic, verification is
post-hoc, and a shrink loop retries the build at a smaller radius whenever
the bound-radius property fails.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng as rnglib
from .errors import AvglabError, IterationLimit, TargetUnreachable, ZeroModulus

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BandParams:
    """Levels and radii constants for one clustering run."""

    d: int
    K: int
    alpha1: float
    beta: float
    alpha2: float
    delta: float
    delta_prime: float
    c_tilde: float
    nu: float = field(init=False)

    def __post_init__(self):
        if self.K < 0:
            raise AvglabError("torsion degree K must be >= 0")
        if not (self.alpha1 <= self.alpha2):
            raise AvglabError("levels must satisfy alpha1 <= alpha2")
        if min(self.alpha1, self.beta, self.alpha2) <= 0:
            raise AvglabError("levels must be positive")
        if not (0 < self.delta_prime < self.delta):
            raise AvglabError("radius constants must satisfy 0 < delta' < delta")
        if self.c_tilde <= 0:
            raise AvglabError("c_tilde must be positive")
        nu = self.d * (self.d + 1) / (4 * self.K + 2 * self.d * (self.d + 1))
        object.__setattr__(self, "nu", nu)

    @property
    def gamma(self) -> float:
        return max(self.alpha1, self.beta)

    @property
    def modulus_exponent(self) -> float:
        """Exponent K / (d(d+1)) applied to |z_i z_j| in separation radii."""
        return self.K / (self.d * (self.d + 1))


@dataclass(frozen=True)
class PointConfig:
    """Ordered points with their original (1-based) indices."""

    points: tuple[complex, ...]
    indices: tuple[int, ...] = ()

    def __post_init__(self):
        pts = tuple(complex(z) for z in self.points)
        object.__setattr__(self, "points", pts)
        if not self.indices:
            object.__setattr__(self, "indices", tuple(range(1, len(pts) + 1)))
        if len(self.indices) != len(pts):
            raise AvglabError("indices and points must have equal length")
        if any(abs(z) == 0 for z in pts):
            raise AvglabError("all points must have positive modulus")

    def point(self, index: int) -> complex:
        return self.points[self.indices.index(index)]

    @property
    def last_index(self) -> int:
        return max(self.indices)

    def restrict(self, keep: set[int]) -> "PointConfig":
        pairs = [(i, z) for i, z in zip(self.indices, self.points) if i in keep]
        return PointConfig(tuple(z for _, z in pairs), tuple(i for i, _ in pairs))


def separation_radius(z_i: complex, z_j: complex, level: float, params: BandParams) -> float:
    """level^{1/2} |z_i z_j|^{-K/(d(d+1))}."""
    if z_i == 0 or z_j == 0:
        raise ZeroModulus("separation radius undefined at the origin")
    if level <= 0:
        raise AvglabError("level must be positive")
    return math.sqrt(level) * abs(z_i * z_j) ** (-params.modulus_exponent)


def single_point_radius(z: complex, level: float, params: BandParams) -> float:
    """level^{1/2} |z|^{-2K/(d(d+1))}, the one-point form used by the setup predicates."""
    if z == 0:
        raise ZeroModulus("separation radius undefined at the origin")
    return math.sqrt(level) * abs(z) ** (-2.0 * params.modulus_exponent)


@dataclass
class PredicateRow:
    kind: str
    i: int
    j: int
    distance: float
    required: float
    passed: bool

    @property
    def margin(self) -> float:
        return self.distance / self.required if self.required > 0 else math.inf


@dataclass
class SetupReport:
    """Outcome of the pairwise separation and modulus-floor predicates."""

    rows: list[PredicateRow]
    floor_rows: list[PredicateRow]

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows) and all(r.passed for r in self.floor_rows)

    def failures(self) -> list[PredicateRow]:
        return [r for r in self.rows + self.floor_rows if not r.passed]


def check_setup_predicates(config: PointConfig, params: BandParams, c: float = 1.0) -> SetupReport:
    """Evaluate the pairwise separations (odd/even/last) and modulus floors.

    For i < j: odd j gets the beta-level radius, even j < last the alpha1
    level, and the last index the alpha2 level with a dichotomy on which
    modulus enters the radius.  Moduli floors are gamma^nu scaled by
    (4 pi nu)^{-nu} (alpha2^nu for the last index).  `c` multiplies every
    required pairwise radius.
    """
    nu = params.nu
    floor_base = (4 * math.pi * nu) ** (-nu)
    last = config.last_index
    rows: list[PredicateRow] = []
    for a, j in enumerate(config.indices):
        z_j = config.points[a]
        for b, i in enumerate(config.indices):
            if i >= j:
                continue
            z_i = config.points[b]
            dist = abs(z_j - z_i)
            if j == last:
                threshold = 0.5 * floor_base * params.alpha2**nu
                if abs(z_i) < threshold:
                    required = c * single_point_radius(z_j, params.alpha2, params)
                else:
                    required = c * single_point_radius(z_i, params.alpha2, params)
                kind = "last"
            elif j % 2 == 0:
                required = c * single_point_radius(z_i, params.alpha1, params)
                kind = "even"
            else:
                required = c * single_point_radius(z_i, params.beta, params)
                kind = "odd"
            rows.append(PredicateRow(kind, i, j, dist, required, dist >= required))
    floor_rows = []
    for a, j in enumerate(config.indices):
        level = params.alpha2 if j == last else params.gamma
        required = floor_base * level**nu
        modulus = abs(config.points[a])
        floor_rows.append(PredicateRow("floor", j, j, modulus, required, modulus >= required))
    return SetupReport(rows, floor_rows)


@dataclass
class Band:
    """One cluster: free index (the minimum), quasi-free or bound companions."""

    members: tuple[int, ...]

    def __post_init__(self):
        self.members = tuple(sorted(self.members))
        if not self.members:
            raise AvglabError("band cannot be empty")

    @property
    def free(self) -> int:
        return self.members[0]

    @property
    def quasi_free(self) -> tuple[int, ...]:
        return self.members[1:] if len(self.members) == 2 else ()

    @property
    def bound(self) -> tuple[int, ...]:
        return self.members[1:] if len(self.members) >= 3 else ()


@dataclass
class BandStructure:
    """Partition of an index set into bands."""

    bands: list[Band]
    indices: tuple[int, ...]
    ambiguous: tuple[int, ...] = ()

    @property
    def n_free(self) -> int:
        return len(self.bands)

    @property
    def n_quasi_free(self) -> int:
        return sum(len(b.quasi_free) for b in self.bands)

    @property
    def count(self) -> int:
        """Free plus quasi-free indices."""
        return self.n_free + self.n_quasi_free

    def band_of(self, index: int) -> Band:
        for b in self.bands:
            if index in b.members:
                return b
        raise AvglabError(f"index {index} not in structure")

    def is_partition(self) -> bool:
        seen = [i for b in self.bands for i in b.members]
        return sorted(seen) == sorted(self.indices) and len(seen) == len(set(seen))

    def to_json_dict(self) -> dict:
        return {
            "bands": [
                {
                    "free": b.free,
                    "quasi_free": list(b.quasi_free),
                    "bound": list(b.bound),
                }
                for b in self.bands
            ],
            "k": len(self.indices),
            "M": self.n_free,
            "N": self.n_quasi_free,
        }


def _in_chain_ball(z: complex, z_j: complex, params: BandParams) -> bool:
    return abs(z - z_j) <= separation_radius(z_j, z, params.delta**2 * params.alpha1, params)


def build_bands(config: PointConfig, params: BandParams) -> BandStructure:
    """Deterministic chaining partition.

    Even indices seed bands in decreasing order; each band transitively
    absorbs unassigned odd indices lying in a member's chaining ball; the
    leftovers seed bands at the smallest remaining index.  An odd index
    reachable from more than one band is kept by the first processed (the
    larger seed) and logged as ambiguous.
    """
    idx = sorted(config.indices)
    unassigned = set(idx)
    evens = [j for j in reversed(idx) if j % 2 == 0]
    bands: list[Band] = []
    membership: dict[int, int] = {}

    def chain_from(seed: int) -> list[int]:
        members = [seed]
        unassigned.discard(seed)
        frontier = [seed]
        while frontier:
            m = frontier.pop(0)
            z_m = config.point(m)
            absorbed = []
            for i in sorted(unassigned):
                if i % 2 == 0:
                    continue
                if _in_chain_ball(config.point(i), z_m, params):
                    absorbed.append(i)
            for i in absorbed:
                unassigned.discard(i)
                members.append(i)
                frontier.append(i)
        return members

    for seed in evens:
        if seed not in unassigned:
            continue
        members = chain_from(seed)
        for m in members:
            membership[m] = len(bands)
        bands.append(Band(tuple(members)))
    while unassigned:
        seed = min(unassigned)
        members = chain_from(seed)
        for m in members:
            membership[m] = len(bands)
        bands.append(Band(tuple(members)))

    ambiguous = []
    for i in idx:
        if i % 2 == 0:
            continue
        owners = set()
        for j in idx:
            if i == j:
                continue
            if _in_chain_ball(config.point(i), config.point(j), params):
                owners.add(membership[j])
        if len(owners) > 1:
            ambiguous.append(i)
    if ambiguous:
        log.debug("ambiguous chaining for indices %s", ambiguous)
    return BandStructure(bands, tuple(idx), tuple(ambiguous))


@dataclass
class PropertyCheck:
    passed: bool
    worst_margin: float
    witness: tuple[int, int] | None = None


@dataclass
class BandPropertyReport:
    """Post-hoc verification of the clustering properties."""

    cross_band: PropertyCheck
    quasi_lower: PropertyCheck
    quasi_upper: PropertyCheck
    bound_radius: PropertyCheck
    same_band_moduli: PropertyCheck

    @property
    def all_pass(self) -> bool:
        return (
            self.cross_band.passed
            and self.quasi_lower.passed
            and self.quasi_upper.passed
            and self.bound_radius.passed
            and self.same_band_moduli.passed
        )


def _min_margin(margins: list[tuple[float, tuple[int, int]]]) -> PropertyCheck:
    """Pass iff every margin exceeds 1; worst is the smallest margin."""
    if not margins:
        return PropertyCheck(True, math.inf)
    worst, witness = min(margins, key=lambda t: t[0])
    return PropertyCheck(worst > 1.0, worst, witness)


def _max_margin(margins: list[tuple[float, tuple[int, int]]]) -> PropertyCheck:
    """Pass iff every margin stays below 1; worst is the largest margin."""
    if not margins:
        return PropertyCheck(True, 0.0)
    worst, witness = max(margins, key=lambda t: t[0])
    return PropertyCheck(worst < 1.0, worst, witness)


def verify_band_properties(
    structure: BandStructure, config: PointConfig, params: BandParams
) -> BandPropertyReport:
    """Check cross-band separation, the quasi-bound bracket, the bound radius,
    and same-band modulus comparability; margins are distance / radius."""
    pts = {i: config.point(i) for i in structure.indices}
    level_hi = params.delta**2 * params.alpha1
    level_lo = params.c_tilde**2 * params.beta
    level_bound = params.delta_prime**2 * params.alpha1

    cross = []
    for a, band_a in enumerate(structure.bands):
        for band_b in structure.bands[a + 1 :]:
            for i in band_a.members:
                for j in band_b.members:
                    radius = separation_radius(pts[i], pts[j], level_hi, params)
                    cross.append((abs(pts[i] - pts[j]) / radius, (i, j)))

    q_lo, q_hi = [], []
    for band in structure.bands:
        for i in band.quasi_free:
            j = band.free
            dist = abs(pts[i] - pts[j])
            q_lo.append((dist / separation_radius(pts[i], pts[j], level_lo, params), (i, j)))
            q_hi.append((dist / separation_radius(pts[i], pts[j], level_hi, params), (i, j)))

    bound = []
    for band in structure.bands:
        for i in band.bound:
            j = band.free
            radius = separation_radius(pts[i], pts[j], level_bound, params)
            bound.append((abs(pts[i] - pts[j]) / radius, (i, j)))

    comparability = (1.0 + params.delta * math.sqrt(4 * math.pi * params.nu)) ** params.d
    ratios = []
    for band in structure.bands:
        mods = [abs(pts[i]) for i in band.members]
        ratios.append((max(mods) / min(mods) / comparability, (band.free, band.free)))
    same = _max_margin(ratios)
    # the comparability bound is non-strict
    if ratios and not same.passed:
        same = PropertyCheck(same.worst_margin <= 1.0 + 1e-12, same.worst_margin, same.witness)

    quasi_upper = _max_margin(q_hi)
    if q_hi and not quasi_upper.passed:
        # the upper bracket is non-strict as well
        quasi_upper = PropertyCheck(
            quasi_upper.worst_margin <= 1.0 + 1e-12, quasi_upper.worst_margin, quasi_upper.witness
        )
    return BandPropertyReport(
        cross_band=_min_margin(cross),
        quasi_lower=_min_margin(q_lo),
        quasi_upper=quasi_upper,
        bound_radius=_max_margin(bound),
        same_band_moduli=same,
    )


def shrink_and_rebuild(
    config: PointConfig, params: BandParams, max_iters: int = 20
) -> tuple[BandParams, BandStructure]:
    """Rebuild with delta <- delta'/d until the bound-radius property holds."""
    ratio = params.delta_prime / params.delta
    c_ratio = params.c_tilde / params.delta_prime
    p = params
    structure = build_bands(config, p)
    for _ in range(max_iters + 1):
        report = verify_band_properties(structure, config, p)
        if report.bound_radius.passed:
            return p, structure
        new_delta = p.delta_prime / p.d
        p = replace_params(
            p,
            delta=new_delta,
            delta_prime=new_delta * ratio,
            c_tilde=new_delta * ratio * c_ratio,
        )
        structure = build_bands(config, p)
    raise IterationLimit(f"bound-radius property unresolved after {max_iters} shrink iterations")


def replace_params(params: BandParams, **kwargs) -> BandParams:
    return replace(params, **kwargs)


def eliminate_indices(
    structure: BandStructure,
    config: PointConfig,
    params: BandParams,
    target: int | None = None,
) -> tuple[BandStructure, int]:
    """Drop the smallest surviving index and reclassify until free + quasi-free
    hits the target (default d).  Returns the suffix structure and its size."""
    target = params.d if target is None else target
    current = structure
    trajectory: list[tuple[int, int]] = [(len(current.indices), current.count)]
    while current.count != target:
        if len(current.indices) <= 1:
            raise TargetUnreachable(
                f"free/quasi-free count never reached {target}", trajectory
            )
        smallest = min(current.indices)
        bands = []
        for band in current.bands:
            members = tuple(i for i in band.members if i != smallest)
            if members:
                bands.append(Band(members))
        current = BandStructure(bands, tuple(i for i in current.indices if i != smallest))
        trajectory.append((len(current.indices), current.count))
    return current, len(current.indices)


def two_stage_refine(
    structure: BandStructure,
    config: PointConfig,
    params: BandParams,
    gamma2: float,
    rho: float,
    rho_prime: float,
) -> BandStructure:
    """Split the band containing the largest index at level gamma2 with radii
    (rho, rho'), merge the sub-bands back, and re-run the elimination."""
    if gamma2 > params.alpha1:
        raise AvglabError("second-stage level gamma2 must be <= alpha1")
    if not (0 < rho_prime < rho):
        raise AvglabError("second-stage radii must satisfy 0 < rho' < rho")
    last = max(structure.indices)
    parent = structure.band_of(last)
    sub_config = config.restrict(set(parent.members))
    sub_params = replace_params(params, alpha1=gamma2, delta=rho, delta_prime=rho_prime)
    sub_structure = build_bands(sub_config, sub_params)
    bands = [b for b in structure.bands if b is not parent] + sub_structure.bands
    merged = BandStructure(bands, structure.indices)
    refined, _ = eliminate_indices(merged, config, params)
    return refined


def default_band_params(
    config: PointConfig,
    d: int,
    K: int,
    alpha1: float,
    beta: float,
    alpha2: float,
    delta_scale: float = 0.1,
) -> BandParams:
    """Radii constants scaled from the config's empirical separation constant.

    c is the smallest observed distance/radius quotient at level alpha1 over
    pairs (i, j) with even j; delta = delta_scale * c, delta' = delta / (2d),
    c_tilde = delta' / 2.
    """
    probe = BandParams(
        d=d, K=K, alpha1=alpha1, beta=beta, alpha2=alpha2,
        delta=1.0, delta_prime=0.5, c_tilde=0.25,
    )
    c = math.inf
    for a, j in enumerate(config.indices):
        if j % 2 != 0:
            continue
        for b, i in enumerate(config.indices):
            if i >= j:
                continue
            radius = separation_radius(config.points[a], config.points[b], alpha1, probe)
            c = min(c, abs(config.points[a] - config.points[b]) / radius)
    if not math.isfinite(c) or c <= 0:
        c = 1.0
    delta = delta_scale * c
    return BandParams(
        d=d, K=K, alpha1=alpha1, beta=beta, alpha2=alpha2,
        delta=delta, delta_prime=delta / (2 * d), c_tilde=delta / (4 * d),
    )


def generate_admissible_config(
    d: int,
    K: int,
    alpha1: float,
    beta: float,
    alpha2: float,
    seed: int,
    sector_angle: float = math.pi / 16,
    clustered: bool = False,
    max_tries: int = 200,
) -> tuple[PointConfig, BandParams]:
    """Rejection-sample a 2d-point configuration passing the setup predicates.

    Points live in the sector with moduli above the floors; `clustered` moves
    some odd points inside the chaining radius of a smaller even index so the
    build produces nontrivial bands while the predicates still hold.
    """
    params_probe = BandParams(
        d=d, K=K, alpha1=alpha1, beta=beta, alpha2=alpha2,
        delta=0.5, delta_prime=0.25, c_tilde=0.1,
    )
    nu = params_probe.nu
    floor = (4 * math.pi * nu) ** (-nu) * max(params_probe.gamma, alpha2) ** nu
    lo = min(max(1.2 * floor, 0.05), 0.5)
    m = 2 * d
    for attempt in range(max_tries):
        gen = rnglib.substream(seed, rnglib.STREAM_BAND_CONFIG, attempt)
        moduli = lo + (1.0 - lo) * gen.random(m)
        angles = sector_angle * gen.random(m)
        pts = list(moduli * np.exp(1j * angles))
        config = PointConfig(tuple(pts))
        params = default_band_params(config, d, K, alpha1, beta, alpha2)
        if clustered:
            pts = _attach_odd_companions(pts, d, params, gen)
            config = PointConfig(tuple(pts))
        if check_setup_predicates(config, params, c=1.0).all_pass:
            return config, params
    raise AvglabError(f"no admissible configuration found in {max_tries} tries")


def _attach_odd_companions(pts: list[complex], d: int, params: BandParams, gen) -> list[complex]:
    """Move some odd-index points within chaining range of an earlier even index."""
    for j_even in range(2, 2 * d, 2):  # skip the last (even) index
        if gen.random() < 0.5:
            continue
        odd_candidates = [i for i in range(j_even + 1, 2 * d, 2)]
        if not odd_candidates:
            continue
        i_odd = int(gen.choice(odd_candidates))
        anchor = pts[j_even - 1]
        radius = separation_radius(anchor, anchor, params.delta**2 * params.alpha1, params)
        lower = 4.0 * single_point_radius(anchor, params.beta, params)
        if lower >= 0.8 * radius:
            continue
        dist = lower + (0.8 * radius - lower) * gen.random()
        angle = 2 * math.pi * gen.random()
        pts[i_odd - 1] = anchor + dist * complex(math.cos(angle), math.sin(angle))
    return pts
