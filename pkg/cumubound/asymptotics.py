"""Rate constants, asymptotic approximants and exact EGF series for the coefficient families.

Every coefficient family grows like A (n-1)! / rho^n where rho is the modulus
of the dominant singularity of its exponential generating function:

    raw        1 / (2 - e^x)           rho = ln 2
    central    -log(2 - e^x + x)       rho = root of e^rho = 2 + rho
    symmetric  -log(2 - cosh x)        rho = arcosh 2 = ln(2 + sqrt 3)

The raw family is read off the ordered Bell series, C_n = 2 Bell(n-1).
"""

import functools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from cumubound.combinatorics import CoefficientTable, coefficient_mass
from cumubound.constants import EGF_MAX_ORDER, RATIO_MAX_ORDER, PartitionClass, Provenance
from cumubound.errors import ConsistencyError, InvalidOrderError, ParameterError, SeriesCapError
from cumubound.transforms import MomentSequence, moments_to_cumulants
from cumubound.utils import mp

logger = logging.getLogger(__name__)

_DEFINING_EQUATIONS = {
    PartitionClass.ALL: "exp(rho) = 2",
    PartitionClass.NO_SINGLETONS: "exp(rho) = 2 + rho",
    PartitionClass.EVEN_BLOCKS: "cosh(rho) = 2",
}

# Leading-order prefactor A in C_n ~ A (n-1)! / rho^n
_PREFACTOR = {
    PartitionClass.ALL: 1,
    PartitionClass.NO_SINGLETONS: 1,
    PartitionClass.EVEN_BLOCKS: 2,
}

_NEWTON_MAX_STEPS = 200


@dataclass(frozen=True)
class RateConstant:
    partition_class: PartitionClass
    rho: float
    defining_equation: str
    residual: float


def _residual(partition_class: PartitionClass, rho):
    if partition_class == PartitionClass.ALL:
        return mp.exp(rho) - 2
    if partition_class == PartitionClass.NO_SINGLETONS:
        return mp.exp(rho) - 2 - rho
    return mp.cosh(rho) - 2


def _solve_central_rate():
    """Newton on f(r) = e^r - 2 - r from r = 1, falling back to bisection on [1, 1.5]."""
    low, high = mp.mpf(1), mp.mpf("1.5")
    if not (_residual(PartitionClass.NO_SINGLETONS, low) < 0 < _residual(PartitionClass.NO_SINGLETONS, high)):
        raise ConsistencyError("Central rate is not bracketed by [1, 1.5]")
    tolerance = mp.mpf(10) ** (-(mp.dps - 5))
    rho = mp.mpf(1)
    for step in range(1, _NEWTON_MAX_STEPS + 1):
        value = mp.exp(rho) - 2 - rho
        if value < 0:
            low = rho
        else:
            high = rho
        candidate = rho - value / (mp.exp(rho) - 1)
        if not low < candidate < high:
            candidate = (low + high) / 2
        if abs(candidate - rho) < tolerance:
            logger.debug("Central rate converged after %d steps", step)
            return candidate
        rho = candidate
    raise ConsistencyError("Central rate iteration did not converge")


@functools.cache
def rate_mp(partition_class: PartitionClass):
    """The rate constant as an mpmath number at the fixed working precision."""
    if partition_class == PartitionClass.ALL:
        return mp.log(2)
    if partition_class == PartitionClass.NO_SINGLETONS:
        return _solve_central_rate()
    return mp.log(2 + mp.sqrt(3))


def rate(partition_class: PartitionClass) -> RateConstant:
    rho = rate_mp(partition_class)
    residual = float(abs(_residual(partition_class, rho)))
    return RateConstant(partition_class, float(rho), _DEFINING_EQUATIONS[partition_class], residual)


def _check_class_order(partition_class: PartitionClass, n: int) -> None:
    minimum = 2 if partition_class == PartitionClass.NO_SINGLETONS else 1
    if n < minimum:
        raise InvalidOrderError(f"Order {n} is not valid for {partition_class.name} (need n >= {minimum})")


def log_asymptotic_coefficient(partition_class: PartitionClass, n: int):
    """log(A (n-1)! / rho^n) as an mpmath number; -inf where the family vanishes."""
    _check_class_order(partition_class, n)
    if partition_class == PartitionClass.EVEN_BLOCKS and n % 2 == 1:
        return mp.ninf
    return mp.log(_PREFACTOR[partition_class]) + mp.loggamma(n) - n * mp.log(rate_mp(partition_class))


def asymptotic_coefficient(partition_class: PartitionClass, n: int) -> float:
    """Leading-order approximant of coefficient_mass(class, n).

    Evaluated in log space; orders past the float range come back as inf.
    """
    log_value = log_asymptotic_coefficient(partition_class, n)
    if log_value == mp.ninf:
        return 0.0
    return float(mp.exp(log_value))


@dataclass(frozen=True)
class RatioDiagnostic:
    partition_class: PartitionClass
    orders: tuple[int, ...]
    ratios: tuple[float, ...]

    @property
    def final_deviation(self) -> float:
        return abs(self.ratios[-1] - 1.0)


def ratio_diagnostic(partition_class: PartitionClass, n_max: int) -> RatioDiagnostic:
    """Exact coefficient over its asymptotic approximant for n = 2..n_max.

    Odd orders are skipped for the symmetric family.
    """
    if not 2 <= n_max <= RATIO_MAX_ORDER:
        raise InvalidOrderError(f"n_max must be in 2..{RATIO_MAX_ORDER}, got {n_max}")
    step = 2 if partition_class == PartitionClass.EVEN_BLOCKS else 1
    orders = tuple(range(2, n_max + 1, step))
    ratios = []
    for n in orders:
        exact = mp.mpf(coefficient_mass(partition_class, n))
        ratios.append(float(exact / mp.exp(log_asymptotic_coefficient(partition_class, n))))
    return RatioDiagnostic(partition_class, orders, tuple(ratios))


def _exp_series(N: int) -> list[Fraction]:
    return [Fraction(1, factorial(k)) for k in range(N + 1)]


def series_reciprocal(a: list[Fraction]) -> list[Fraction]:
    if a[0] == 0:
        raise ParameterError("Series with zero constant term has no reciprocal")
    result = [1 / a[0]]
    for n in range(1, len(a)):
        total = sum((a[k] * result[n - k] for k in range(1, n + 1)), Fraction(0))
        result.append(-total / a[0])
    return result


def series_log(a: list[Fraction]) -> list[Fraction]:
    """log of a power series with constant term 1, via n f_n = n a_n - sum_k k f_k a_(n-k)."""
    if a[0] != 1:
        raise ParameterError(f"Series log needs constant term 1, got {a[0]}")
    f = [Fraction(0)]
    for n in range(1, len(a)):
        total = n * a[n] - sum((k * f[k] * a[n - k] for k in range(1, n)), Fraction(0))
        f.append(total / n)
    return f


def _check_cap(N: int) -> None:
    if N < 0:
        raise InvalidOrderError(f"Series order must be >= 0, got {N}")
    if N > EGF_MAX_ORDER:
        raise SeriesCapError(f"Series order {N} exceeds the cap of {EGF_MAX_ORDER}")


def ordered_bell_egf(N: int) -> list[Fraction]:
    """Coefficients of 1/(2 - e^x) up to x^N, that is Bell(m)/m!."""
    _check_cap(N)
    inner = [-c for c in _exp_series(N)]
    inner[0] += 2
    return series_reciprocal(inner)


def egf_coefficients(partition_class: PartitionClass, N: int) -> list[Fraction]:
    """c_0..c_N with c_n = C_n / n!, expanded in exact rationals."""
    _check_cap(N)
    if partition_class == PartitionClass.ALL:
        bell = ordered_bell_egf(max(N - 1, 0))
        # C_1 = 1; C_n = 2 Bell(n-1) from n = 2 on
        coefficients = [Fraction(0), Fraction(1)][: N + 1]
        coefficients.extend(2 * bell[n - 1] / n for n in range(2, N + 1))
        return coefficients
    inner = [-c for c in _exp_series(N)]
    inner[0] += 2
    if partition_class == PartitionClass.NO_SINGLETONS:
        if N >= 1:
            inner[1] += 1
    else:
        inner = [c if k % 2 == 0 else Fraction(0) for k, c in enumerate(inner)]
    return [-c for c in series_log(inner)]


def egf_coefficient_table(partition_class: PartitionClass, max_order: int) -> CoefficientTable:
    if max_order < 1:
        raise InvalidOrderError(f"max_order must be >= 1, got {max_order}")
    coefficients = egf_coefficients(partition_class, max_order)
    values = {}
    for n in range(1, max_order + 1):
        value = factorial(n) * coefficients[n]
        if value.denominator != 1:
            raise ConsistencyError(f"Series coefficient {n}! c_{n} = {value} is not an integer")
        values[n] = int(value)
    return CoefficientTable(partition_class, values, max_order, Provenance.EGF_SERIES)


def cgf_radius_lower_bound(rho: float, L: float) -> float:
    """Radius rho / L on which the cumulant generating function converges; inf when L = 0."""
    if rho <= 0:
        raise ParameterError(f"Rate must be positive, got {rho}")
    if L < 0:
        raise ParameterError(f"Moment growth scale must be nonnegative, got {L}")
    if L == 0:
        return math.inf
    return rho / L


def crude_radius_lower_bound(L: float) -> float:
    """Radius 1/(e L) obtained from n^n-type coefficient bounds."""
    if L < 0:
        raise ParameterError(f"Moment growth scale must be nonnegative, got {L}")
    if L == 0:
        return math.inf
    return 1 / (math.e * L)


def crude_coefficient(n: int) -> int:
    if n < 1:
        raise InvalidOrderError(f"Order must be >= 1, got {n}")
    return n**n


@dataclass(frozen=True)
class EfficiencyGap:
    """Symmetric rate against the pi/2 growth rate of Rademacher cumulants.

    rademacher_rate normalizes |kappa_2m| by its asymptotic shape
    2 (2m-1)!, rademacher_raw_rate by (2m)!; both tend to pi/2, the
    normalized one much faster.
    """

    rho_sym: float
    pi_half: float
    eta: float
    order: int
    rademacher_rate: float
    rademacher_raw_rate: float
    rademacher_ratio: float


def rademacher_cumulants(n: int):
    moments = MomentSequence(tuple(1 if k % 2 == 0 else 0 for k in range(1, n + 1)), symmetric=True)
    return moments_to_cumulants(moments)


def efficiency_gap(order: int = 40) -> EfficiencyGap:
    if order < 2 or order % 2:
        raise InvalidOrderError(f"Rademacher rate needs an even order >= 2, got {order}")
    kappa = abs(rademacher_cumulants(order).cumulant(order))
    rho_sym = rate_mp(PartitionClass.EVEN_BLOCKS)
    pi_half = mp.pi / 2
    kappa_mp = mp.mpf(kappa.numerator) / kappa.denominator
    shape = 2 * mp.factorial(order - 1)
    normalized = (kappa_mp / shape) ** (-mp.mpf(1) / order)
    raw = (kappa_mp / mp.factorial(order)) ** (-mp.mpf(1) / order)
    asymptote = shape / pi_half**order
    return EfficiencyGap(
        rho_sym=float(rho_sym),
        pi_half=float(pi_half),
        eta=float(rho_sym / pi_half),
        order=order,
        rademacher_rate=float(normalized),
        rademacher_raw_rate=float(raw),
        rademacher_ratio=float(kappa_mp / asymptote),
    )
