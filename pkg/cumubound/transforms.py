"""Moment <-> cumulant conversion, univariate and multivariate.

Exact rationals are the canonical scalar. Floats are accepted anywhere a
rational is, and the same code then runs in floating point.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb, factorial, prod
from typing import Iterable, Mapping, Sequence

from cumubound.combinatorics import block_signatures, enumerate_partitions
from cumubound.constants import ENUMERATION_LIMIT, LYAPUNOV_RTOL, PartitionClass
from cumubound.errors import ConsistencyError, InvalidOrderError, MissingMomentError
from cumubound.utils import Scalar, to_float

logger = logging.getLogger(__name__)


def _as_scalar(value) -> Scalar:
    if isinstance(value, float):
        return value
    return Fraction(value)


@dataclass(frozen=True)
class MomentSequence:
    """Raw moments m_1..m_n, with optional absolute and central absolute moments.

    abs_values holds E|X|^k and central_abs_values holds E|X - E X|^k, both
    1-indexed like values. Entries may be floats where no closed form exists.
    """

    values: tuple[Scalar, ...]
    abs_values: tuple[Scalar, ...] | None = None
    central_abs_values: tuple[Scalar, ...] | None = None
    mean_known_zero: bool = False
    symmetric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(_as_scalar(v) for v in self.values))
        for name in ("abs_values", "central_abs_values"):
            seq = getattr(self, name)
            if seq is not None:
                object.__setattr__(self, name, tuple(_as_scalar(v) for v in seq))

    def __len__(self):
        return len(self.values)

    @property
    def order(self) -> int:
        return len(self.values)

    def moment(self, k: int) -> Scalar:
        if k == 0:
            return Fraction(1)
        if not 1 <= k <= len(self.values):
            raise MissingMomentError(f"Raw moment of order {k} not available (have {len(self.values)})")
        return self.values[k - 1]

    def abs_moment(self, k: int) -> Scalar:
        if self.abs_values is None or not 1 <= k <= len(self.abs_values):
            raise MissingMomentError(f"Absolute moment of order {k} not available")
        return self.abs_values[k - 1]

    def central_abs_moment(self, k: int) -> Scalar:
        if self.central_abs_values is not None and 1 <= k <= len(self.central_abs_values):
            return self.central_abs_values[k - 1]
        if self.mean_known_zero:
            return self.abs_moment(k)
        raise MissingMomentError(f"Central absolute moment of order {k} not available")

    def has_central_abs(self, k: int) -> bool:
        try:
            self.central_abs_moment(k)
        except MissingMomentError:
            return False
        return True

    def float_view(self) -> "MomentSequence":
        def floats(seq):
            return None if seq is None else tuple(to_float(v) for v in seq)

        return MomentSequence(
            floats(self.values),
            floats(self.abs_values),
            floats(self.central_abs_values),
            self.mean_known_zero,
            self.symmetric,
        )

    def validate(self, rtol: float = LYAPUNOV_RTOL) -> None:
        """Check Jensen, Lyapunov and symmetry; raise ConsistencyError on the first failure."""
        if self.symmetric:
            for k in range(1, len(self.values) + 1, 2):
                if self.values[k - 1] != 0:
                    raise ConsistencyError(f"Sequence flagged symmetric but m_{k} = {self.values[k - 1]}")
        if self.mean_known_zero and self.values and self.values[0] != 0:
            raise ConsistencyError(f"Sequence flagged centered but m_1 = {self.values[0]}")
        if self.abs_values is None:
            return
        for k, (m, mu) in enumerate(zip(self.values, self.abs_values), start=1):
            if abs(to_float(m)) > to_float(mu) * (1 + rtol):
                raise ConsistencyError(f"|m_{k}| = {m} exceeds mu_{k} = {mu}")
        roots = [to_float(mu) ** (1 / k) for k, mu in enumerate(self.abs_values, start=1)]
        for k in range(1, len(roots)):
            if roots[k - 1] > roots[k] * (1 + rtol):
                raise ConsistencyError(f"Lyapunov inequality fails between orders {k} and {k + 1}")


@dataclass(frozen=True)
class CumulantSequence:
    values: tuple[Scalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(_as_scalar(v) for v in self.values))

    def __len__(self):
        return len(self.values)

    def cumulant(self, k: int) -> Scalar:
        if not 1 <= k <= len(self.values):
            raise MissingMomentError(f"Cumulant of order {k} not available (have {len(self.values)})")
        return self.values[k - 1]

    def centered(self) -> "CumulantSequence":
        """Cumulants of X - E X: only the first one changes."""
        if not self.values:
            return self
        return CumulantSequence((Fraction(0),) + self.values[1:])


def moments_to_cumulants(moments: MomentSequence) -> CumulantSequence:
    """kappa_n = m_n - sum_{k<n} C(n-1, k-1) kappa_k m_{n-k}."""
    n_max = len(moments)
    if n_max == 0:
        raise InvalidOrderError("Cannot convert an empty moment sequence")
    m = (Fraction(1),) + moments.values
    kappa: list[Scalar] = [Fraction(0)]
    for n in range(1, n_max + 1):
        kappa.append(m[n] - sum((comb(n - 1, k - 1) * kappa[k] * m[n - k] for k in range(1, n)), Fraction(0)))
    return CumulantSequence(tuple(kappa[1:]))


def cumulants_to_moments(cumulants: CumulantSequence, symmetric: bool = False) -> MomentSequence:
    """m_n = sum_{k<=n} C(n-1, k-1) kappa_k m_{n-k}, with m_0 = 1."""
    n_max = len(cumulants)
    if n_max == 0:
        raise InvalidOrderError("Cannot convert an empty cumulant sequence")
    kappa = (Fraction(0),) + cumulants.values
    m: list[Scalar] = [Fraction(1)]
    for n in range(1, n_max + 1):
        m.append(sum((comb(n - 1, k - 1) * kappa[k] * m[n - k] for k in range(1, n + 1)), Fraction(0)))
    return MomentSequence(tuple(m[1:]), mean_known_zero=kappa[1] == 0, symmetric=symmetric)


def partition_cumulant(
    moments: MomentSequence,
    n: int,
    partition_class: PartitionClass = PartitionClass.ALL,
    limit: int = ENUMERATION_LIMIT,
) -> Scalar:
    """The alternating partition sum for kappa_n, restricted to one partition family.

    With PartitionClass.ALL this is the defining formula; the restricted sums
    equal kappa_n once the dropped blocks have vanishing moments.
    """
    total: Scalar = Fraction(0)
    for sizes, count in block_signatures(n, partition_class, limit).items():
        blocks = len(sizes)
        term = prod((moments.moment(size) for size in sizes), start=Fraction(1))
        total += (-1) ** (blocks - 1) * factorial(blocks - 1) * count * term
    return total


def partition_moment(cumulants: CumulantSequence, n: int, limit: int = ENUMERATION_LIMIT) -> Scalar:
    """m_n as the sum over all partitions of products of block cumulants."""
    total: Scalar = Fraction(0)
    for sizes, count in block_signatures(n, PartitionClass.ALL, limit).items():
        total += count * prod((cumulants.cumulant(size) for size in sizes), start=Fraction(1))
    return total


def shift_moments(moments: MomentSequence, shift: Scalar) -> MomentSequence:
    """Raw moments of X + shift: E[(X+c)^k] = sum_j C(k, j) c^(k-j) m_j."""
    values = tuple(
        sum((comb(k, j) * shift ** (k - j) * moments.moment(j) for j in range(k + 1)), Fraction(0))
        for k in range(1, len(moments) + 1)
    )
    return MomentSequence(values)


def center_moments(moments: MomentSequence) -> MomentSequence:
    if len(moments) == 0:
        raise InvalidOrderError("Cannot center an empty moment sequence")
    if moments.mean_known_zero or moments.values[0] == 0:
        return MomentSequence(
            moments.values,
            moments.abs_values,
            moments.central_abs_values,
            mean_known_zero=True,
            symmetric=moments.symmetric,
        )
    shifted = shift_moments(moments, -moments.values[0])
    zero = 0.0 if isinstance(shifted.values[0], float) else Fraction(0)
    values = (zero,) + shifted.values[1:]
    return MomentSequence(
        values,
        abs_values=moments.central_abs_values,
        central_abs_values=moments.central_abs_values,
        mean_known_zero=True,
    )


@dataclass(frozen=True)
class MultiIndex:
    nu: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "nu", tuple(int(v) for v in self.nu))
        if not self.nu:
            raise InvalidOrderError("Multi-index needs at least one component")
        if any(v < 0 for v in self.nu):
            raise InvalidOrderError(f"Multi-index entries must be nonnegative, got {self.nu}")
        if self.N < 1:
            raise InvalidOrderError("Multi-index must have total order N >= 1")

    @property
    def N(self) -> int:
        return sum(self.nu)

    @property
    def dimension(self) -> int:
        return len(self.nu)

    def slot_map(self) -> tuple[int, ...]:
        """Canonical slot-to-variable map: the first nu_1 slots go to variable 0, and so on."""
        return tuple(j for j, count in enumerate(self.nu) for _ in range(count))


@dataclass(frozen=True)
class MixedMomentTable:
    """E[prod_j X_j^e_j] for exponent vectors e, plus E|X_j|^r keyed by (j, r)."""

    dimension: int
    entries: Mapping[tuple[int, ...], Scalar] = field(repr=False)
    absolute: Mapping[tuple[int, int], Scalar] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        zero = (0,) * self.dimension
        if self.entries.get(zero, 1) != 1:
            raise ConsistencyError(f"Mixed moment at the zero vector must be 1, got {self.entries[zero]}")

    def moment(self, exponents: Sequence[int]) -> Scalar:
        key = tuple(exponents)
        if not any(key):
            return Fraction(1)
        try:
            return self.entries[key]
        except KeyError:
            raise MissingMomentError(f"Mixed moment {key} not in table") from None

    def abs_moment(self, component: int, order: int) -> Scalar:
        try:
            return self.absolute[(component, order)]
        except KeyError:
            raise MissingMomentError(f"Absolute moment E|X_{component}|^{order} not in table") from None

    def mean(self, component: int) -> Scalar:
        unit = tuple(1 if j == component else 0 for j in range(self.dimension))
        return self.moment(unit)

    @classmethod
    def from_atoms(
        cls, atoms: Iterable[tuple[Sequence[Scalar], Scalar]], max_degree: int
    ) -> "MixedMomentTable":
        """Exact table for a discrete law given as (point, probability) pairs."""
        atoms = [(tuple(_as_scalar(x) for x in point), _as_scalar(p)) for point, p in atoms]
        if not atoms:
            raise ConsistencyError("A discrete law needs at least one atom")
        total = sum((p for _, p in atoms), Fraction(0))
        if total != 1:
            raise ConsistencyError(f"Atom probabilities sum to {total}, not 1")
        dimension = len(atoms[0][0])
        entries = {}
        for exponents in product(range(max_degree + 1), repeat=dimension):
            if sum(exponents) <= max_degree:
                entries[exponents] = sum(
                    (p * prod((x**e for x, e in zip(point, exponents)), start=Fraction(1)) for point, p in atoms),
                    Fraction(0),
                )
        absolute = {
            (j, r): sum((p * abs(point[j]) ** r for point, p in atoms), Fraction(0))
            for j in range(dimension)
            for r in range(1, max_degree + 1)
        }
        return cls(dimension, entries, absolute)


def joint_cumulant(moments: MixedMomentTable, nu: MultiIndex, limit: int = ENUMERATION_LIMIT) -> Scalar:
    """Joint cumulant as the alternating sum over partitions of the N labelled slots."""
    if nu.dimension != moments.dimension:
        raise InvalidOrderError(f"Multi-index has {nu.dimension} components, table has {moments.dimension}")
    sigma = nu.slot_map()
    total: Scalar = Fraction(0)
    for partition in enumerate_partitions(nu.N, PartitionClass.ALL, limit):
        term: Scalar = Fraction(1)
        for block in partition.blocks:
            exponents = [0] * nu.dimension
            for slot in block:
                exponents[sigma[slot - 1]] += 1
            term *= moments.moment(exponents)
        blocks = len(partition)
        total += (-1) ** (blocks - 1) * factorial(blocks - 1) * term
    return total


def shift_mixed_moments(moments: MixedMomentTable, shifts: Sequence[Scalar]) -> MixedMomentTable:
    """Mixed moments of (X_1 - c_1, ..., X_d - c_d), over the same exponent set.

    Absolute moments cannot be shifted from signed ones and are dropped.
    """
    if len(shifts) != moments.dimension:
        raise InvalidOrderError(f"Need {moments.dimension} shifts, got {len(shifts)}")
    entries = {}
    for exponents in moments.entries:
        value: Scalar = Fraction(0)
        for lower in product(*(range(e + 1) for e in exponents)):
            weight = prod(
                (comb(e, f) * (-c) ** (e - f) for e, f, c in zip(exponents, lower, shifts)), start=Fraction(1)
            )
            if weight:
                value += weight * moments.moment(lower)
        entries[exponents] = value
    return MixedMomentTable(moments.dimension, entries)


def center_mixed_moments(moments: MixedMomentTable) -> MixedMomentTable:
    return shift_mixed_moments(moments, [moments.mean(j) for j in range(moments.dimension)])

