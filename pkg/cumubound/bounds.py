"""Cumulant bounds from absolute moments, their converses, and slack reports.

A forward bound is coefficient_mass(class, n) times a moment functional. The
coefficient is an exact integer; the bound stays exact when the functional is
rational and is evaluated in extended precision otherwise.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Sequence

from cumubound.combinatorics import (
    bell_ordinary,
    coefficient_mass,
    enumerate_partitions,
    no_singleton_bell,
)
from cumubound.constants import (
    COLLAPSE_RTOL,
    ENUMERATION_LIMIT,
    FUNCTIONAL_NAMES,
    STRICT_RTOL,
    Functional,
    PartitionClass,
)
from cumubound.errors import ConsistencyError, InvalidOrderError, ParameterError
from cumubound.transforms import (
    CumulantSequence,
    MixedMomentTable,
    MomentSequence,
    MultiIndex,
    center_moments,
    moments_to_cumulants,
)
from cumubound.utils import Scalar, is_exact, leq, lt, mp, ratio, to_float

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ForwardBound:
    """Value of a forward bound.

    vanishes is set for the symmetric family at odd order, where the bound
    is the exact statement kappa_n = 0 rather than a number to compare against.
    """

    partition_class: PartitionClass
    order: int
    coefficient: int
    value: Scalar
    vanishes: bool = False

    def __float__(self):
        return to_float(self.value)


def _check_order(partition_class: PartitionClass, n: int) -> bool:
    """Validate (class, n); return True when the class forces the cumulant to vanish."""
    if n < 1:
        raise InvalidOrderError(f"Order must be >= 1, got {n}")
    if partition_class == PartitionClass.NO_SINGLETONS and n < 2:
        raise InvalidOrderError("The central-moment bound needs n >= 2")
    if partition_class == PartitionClass.EVEN_BLOCKS:
        if n < 2:
            raise InvalidOrderError("The symmetric bound needs n >= 2")
        return n % 2 == 1
    return False


def _scale(coefficient: int, functional: Scalar) -> Scalar:
    if is_exact(functional):
        return coefficient * Fraction(functional)
    return float(mp.mpf(coefficient) * mp.mpf(functional))


def forward_bound(partition_class: PartitionClass, n: int, moment_functional: Scalar) -> ForwardBound:
    if to_float(moment_functional) < 0:
        raise ParameterError(f"Moment functional must be nonnegative, got {moment_functional}")
    if _check_order(partition_class, n):
        return ForwardBound(partition_class, n, 0, Fraction(0), vanishes=True)
    coefficient = coefficient_mass(partition_class, n)
    return ForwardBound(partition_class, n, coefficient, _scale(coefficient, moment_functional))


@dataclass(frozen=True)
class BoundReport:
    order: int
    partition_class: PartitionClass
    functional: Functional
    cumulant_abs: Scalar
    coefficient: int
    moment_functional: Scalar
    bound_value: Scalar
    slack_ratio: float
    strict: bool
    tightest: bool = False

    @property
    def violated(self) -> bool:
        return not leq(self.cumulant_abs, self.bound_value, STRICT_RTOL)

    def as_row(self) -> dict:
        return {
            "n": self.order,
            "class": self.partition_class.name.lower(),
            "functional": FUNCTIONAL_NAMES[self.functional],
            "cumulant_abs": self.cumulant_abs,
            "coefficient": self.coefficient,
            "moment_functional": self.moment_functional,
            "bound": self.bound_value,
            "slack": self.slack_ratio,
            "strict": self.strict,
            "tightest": self.tightest,
        }


def _report(
    n: int,
    partition_class: PartitionClass,
    functional: Functional,
    cumulant: Scalar,
    moment_functional: Scalar,
    rtol: float,
) -> BoundReport:
    bound = forward_bound(partition_class, n, moment_functional)
    cumulant_abs = abs(cumulant)
    return BoundReport(
        order=n,
        partition_class=partition_class,
        functional=functional,
        cumulant_abs=cumulant_abs,
        coefficient=bound.coefficient,
        moment_functional=moment_functional,
        bound_value=bound.value,
        slack_ratio=ratio(cumulant_abs, bound.value),
        strict=lt(cumulant_abs, bound.value, rtol),
    )


def bound_report(moments: MomentSequence, n_max: int, rtol: float = STRICT_RTOL) -> list[BoundReport]:
    """Every applicable forward bound for orders 1..n_max, tightest first within an order.

    Raw bounds need E|X|^n. Central bounds are emitted where E|X - EX|^n is
    known (or equals E|X|^n because the mean is zero); the symmetric bound
    when the sequence is flagged symmetric, for even n.
    """
    if n_max < 1 or n_max > len(moments):
        raise InvalidOrderError(f"n_max must be in 1..{len(moments)}, got {n_max}")
    moments.validate()
    cumulants = moments_to_cumulants(MomentSequence(moments.values[:n_max]))
    reports = []
    for n in range(1, n_max + 1):
        kappa = cumulants.cumulant(n)
        order_reports = []
        if moments.symmetric and n >= 2:
            if n % 2 == 1:
                if kappa != 0:
                    raise ConsistencyError(f"Symmetric sequence has kappa_{n} = {kappa}")
            else:
                order_reports.append(
                    _report(n, PartitionClass.EVEN_BLOCKS, Functional.SYMMETRIC, kappa, moments.abs_moment(n), rtol)
                )
        if n >= 2 and moments.has_central_abs(n):
            central = moments.central_abs_moment(n)
            order_reports.append(_report(n, PartitionClass.NO_SINGLETONS, Functional.CENTRAL, kappa, central, rtol))
        order_reports.append(_report(n, PartitionClass.ALL, Functional.RAW, kappa, moments.abs_moment(n), rtol))
        if n >= 2 and moments.has_central_abs(n):
            central = moments.central_abs_moment(n)
            order_reports.append(_report(n, PartitionClass.ALL, Functional.CENTRAL, kappa, central, rtol))
        order_reports[0] = _mark_tightest(order_reports[0])
        for report in order_reports:
            if report.violated:
                logger.warning("Bound violated at n=%d (%s): |kappa|=%s > %s", n, report.partition_class.name,
                               report.cumulant_abs, report.bound_value)
        reports.extend(order_reports)
    return reports


def _mark_tightest(report: BoundReport) -> BoundReport:
    return BoundReport(**{**report.__dict__, "tightest": True})


@dataclass(frozen=True)
class CumulantEnvelope:
    n: int
    value: float


def envelope(cumulants: CumulantSequence, n: int | None = None) -> CumulantEnvelope:
    """K_n = max_{j <= n} |kappa_j|^(n/j)."""
    n = len(cumulants) if n is None else n
    if not 1 <= n <= len(cumulants):
        raise InvalidOrderError(f"Envelope order must be in 1..{len(cumulants)}, got {n}")
    value = max(mp.mpf(abs(to_float(cumulants.cumulant(j)))) ** (mp.mpf(n) / j) for j in range(1, n + 1))
    return CumulantEnvelope(n, float(value))


@dataclass(frozen=True)
class ConverseRecord:
    order: int
    raw_ok: bool
    central_ok: bool
    raw_slack: float
    central_slack: float
    raw_moment_abs: Scalar
    central_moment_abs: Scalar
    envelope: float

    def as_row(self) -> dict:
        return {
            "n": self.order,
            "check": "converse",
            "raw_moment_abs": self.raw_moment_abs,
            "raw_limit": bell_ordinary(self.order) * self.envelope,
            "raw_ok": self.raw_ok,
            "raw_slack": self.raw_slack,
            "central_moment_abs": self.central_moment_abs,
            "central_limit": no_singleton_bell(self.order) * self.envelope,
            "central_ok": self.central_ok,
            "central_slack": self.central_slack,
        }


def converse_check(
    cumulants: CumulantSequence, moments: MomentSequence, n: int | None = None, rtol: float = STRICT_RTOL
) -> ConverseRecord:
    """|m_n| <= B_n K_n and |m_n^(c)| <= B_n^(0) K_n at a single order (the last by default)."""
    n = min(len(cumulants), len(moments)) if n is None else n
    k_n = envelope(cumulants, n).value
    raw = abs(moments.moment(n))
    central = abs(center_moments(MomentSequence(moments.values[:n])).moment(n))
    raw_limit = bell_ordinary(n) * k_n
    central_limit = no_singleton_bell(n) * k_n
    return ConverseRecord(
        order=n,
        raw_ok=leq(raw, raw_limit, rtol),
        central_ok=leq(central, central_limit, rtol),
        raw_slack=ratio(raw, raw_limit),
        central_slack=ratio(central, central_limit),
        raw_moment_abs=raw,
        central_moment_abs=central,
        envelope=k_n,
    )


def converse_sweep(cumulants: CumulantSequence, moments: MomentSequence, n_max: int) -> list[ConverseRecord]:
    return [converse_check(cumulants, moments, n) for n in range(1, n_max + 1)]


def no_converse_witness(cumulants: CumulantSequence, moments: MomentSequence, n: int) -> bool:
    """True when kappa_n is exactly zero while E|X|^n is positive."""
    kappa = cumulants.cumulant(n)
    return is_exact(kappa) and kappa == 0 and to_float(moments.abs_moment(n)) > 0


def multivariate_bound(
    nu: MultiIndex, per_component_functionals: Sequence[Scalar], case: PartitionClass
) -> ForwardBound:
    """C_N prod_j M_N(X_j)^(nu_j / N) for the joint cumulant of order nu."""
    if len(per_component_functionals) != nu.dimension:
        raise InvalidOrderError(
            f"Need {nu.dimension} moment functionals, got {len(per_component_functionals)}"
        )
    if any(to_float(f) < 0 for f in per_component_functionals):
        raise ParameterError("Moment functionals must be nonnegative")
    if _check_order(case, nu.N):
        return ForwardBound(case, nu.N, 0, Fraction(0), vanishes=True)
    coefficient = coefficient_mass(case, nu.N)
    factor = mp.mpf(1)
    for functional, exponent in zip(per_component_functionals, nu.nu):
        if exponent:
            factor *= mp.mpf(to_float(functional)) ** (mp.mpf(exponent) / nu.N)
    return ForwardBound(case, nu.N, coefficient, float(coefficient * factor))


@dataclass(frozen=True)
class CollapseMargin:
    blocks: tuple[tuple[int, ...], ...]
    product: float
    limit: float

    @property
    def holds(self) -> bool:
        return self.product <= self.limit * (1 + COLLAPSE_RTOL)

    @property
    def is_equality(self) -> bool:
        return math.isclose(self.product, self.limit, rel_tol=COLLAPSE_RTOL)


def product_collapse_margins(
    mixed: MixedMomentTable, nu: MultiIndex, limit: int = ENUMERATION_LIMIT
) -> list[CollapseMargin]:
    """Both sides of the multivariate product collapse for every partition of the N slots."""
    sigma = nu.slot_map()
    N = nu.N
    norms = [to_float(mixed.abs_moment(j, N)) for j in range(nu.dimension)]
    rhs = float(prod((mp.mpf(norms[j]) ** (mp.mpf(nu.nu[j]) / N) for j in range(nu.dimension)), start=mp.mpf(1)))
    margins = []
    for partition in enumerate_partitions(N, PartitionClass.ALL, limit):
        lhs = 1.0
        for block in partition.blocks:
            exponents = [0] * nu.dimension
            for slot in block:
                exponents[sigma[slot - 1]] += 1
            block_value = abs(to_float(mixed.moment(exponents)))
            block_limit = prod((norms[j] ** (e / N) for j, e in enumerate(exponents) if e), start=1.0)
            if block_value > block_limit * (1 + COLLAPSE_RTOL):
                logger.warning("Blockwise Hoelder fails on block %s: %g > %g", block, block_value, block_limit)
            lhs *= block_value
        margins.append(CollapseMargin(partition.blocks, lhs, rhs))
    return margins


def holder_block_check(mixed: MixedMomentTable, nu: MultiIndex, limit: int = ENUMERATION_LIMIT) -> bool:
    if nu.dimension != mixed.dimension:
        raise InvalidOrderError(f"Multi-index has {nu.dimension} components, table has {mixed.dimension}")
    sigma = nu.slot_map()
    norms = [to_float(mixed.abs_moment(j, nu.N)) for j in range(nu.dimension)]
    for partition in enumerate_partitions(nu.N, PartitionClass.ALL, limit):
        for block in partition.blocks:
            exponents = [0] * nu.dimension
            for slot in block:
                exponents[sigma[slot - 1]] += 1
            block_limit = prod((norms[j] ** (e / nu.N) for j, e in enumerate(exponents) if e), start=1.0)
            if abs(to_float(mixed.moment(exponents))) > block_limit * (1 + COLLAPSE_RTOL):
                return False
    return all(margin.holds for margin in product_collapse_margins(mixed, nu, limit))


def univariate_product_collapse(moments: MomentSequence, n: int, limit: int = ENUMERATION_LIMIT) -> bool:
    """prod_B mu_|B| <= mu_n for every partition of [n]."""
    mu_n = to_float(moments.abs_moment(n))
    for partition in enumerate_partitions(n, PartitionClass.ALL, limit):
        product = prod((to_float(moments.abs_moment(size)) for size in partition.block_sizes), start=1.0)
        if product > mu_n * (1 + COLLAPSE_RTOL):
            return False
    return True
