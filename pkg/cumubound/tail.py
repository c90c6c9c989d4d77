"""Cumulant-method Bernstein tail bounds.

If a centered X satisfies |kappa_n| <= (n-1)! v b^(n-2) for n >= 2, then its
CGF obeys K(t) <= v t^2 / (2 (1 - b t)) on [0, 1/b), and the Chernoff bound
at t = x / (v + b x) gives P(X >= x) <= exp(-x^2 / (2 (v + b x))).
"""

import functools
import logging
import math
from dataclasses import dataclass
from math import factorial

from cumubound.asymptotics import rate_mp
from cumubound.combinatorics import coefficient_mass
from cumubound.constants import A_CEN_SWEEP, STRICT_RTOL, PartitionClass
from cumubound.errors import ConsistencyError, InvalidOrderError, ParameterError
from cumubound.transforms import CumulantSequence
from cumubound.utils import Scalar, is_exact, leq, mp, to_float

logger = logging.getLogger(__name__)

# Orders checked when validating a moment-growth assumption against a law
GROWTH_CHECK_ORDER = 16


@dataclass(frozen=True)
class BernsteinParams:
    v: Scalar
    b: Scalar

    def __post_init__(self):
        if not to_float(self.v) > 0:
            raise ParameterError(f"v must be positive, got {self.v}")
        if not to_float(self.b) > 0:
            raise ParameterError(f"b must be positive, got {self.b}")

    @property
    def domain_end(self) -> float:
        return 1 / to_float(self.b)


@dataclass(frozen=True)
class DerivedParams:
    v_prime: float
    b: float
    A_cen: float
    L: float
    v: float

    def bernstein(self) -> BernsteinParams:
        return BernsteinParams(self.v_prime, self.b)


def _check_deviation(x: float) -> float:
    x = to_float(x)
    if not x > 0:
        raise ParameterError(f"Deviation x must be positive, got {x}")
    return x


def bernstein_tail(params: BernsteinParams, x: float, two_sided: bool = False) -> float:
    """exp(-x^2 / (2 (v + b x))), doubled for |X| >= x, capped at 1."""
    x = _check_deviation(x)
    v, b = to_float(params.v), to_float(params.b)
    value = math.exp(-x / (2 * (v / x + b)))
    if two_sided:
        value *= 2
    return min(1.0, value)


def chernoff_point(params: BernsteinParams, x: float) -> float:
    x = _check_deviation(x)
    return x / (to_float(params.v) + to_float(params.b) * x)


def _check_domain(params: BernsteinParams, t: float) -> float:
    t = to_float(t)
    if not 0 <= t < params.domain_end:
        raise ParameterError(f"t = {t} lies outside [0, {params.domain_end})")
    return t


def cgf_quadratic_bound(params: BernsteinParams, t: float) -> float:
    t = _check_domain(params, t)
    v, b = to_float(params.v), to_float(params.b)
    return v * t * t / (2 * (1 - b * t))


def chernoff_exponent(params: BernsteinParams, t: float, x: float) -> float:
    """-t x + v t^2 / (2 (1 - b t)); equals -x^2 / (2 (v + b x)) at chernoff_point."""
    return -t * to_float(x) + cgf_quadratic_bound(params, t)


def elementary_gap(u: float) -> float:
    """u^2 / (2 (1 - u)) - (-u - log(1 - u)), nonnegative on [0, 1)."""
    if not 0 <= u < 1:
        raise ParameterError(f"u must lie in [0, 1), got {u}")
    return u**2 / (2 * (1 - u)) - (-u - math.log1p(-u))


@dataclass(frozen=True)
class CgfMargin:
    t: float
    cgf: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.cgf <= self.bound * (1 + STRICT_RTOL) + STRICT_RTOL


def cgf_dominance(cgf, params: BernsteinParams, points: int = 100, fraction: float = 0.99) -> list[CgfMargin]:
    """Compare a CGF against the quadratic bound on an even grid of [0, fraction/b]."""
    if points < 2:
        raise ParameterError(f"Need at least two grid points, got {points}")
    end = fraction * params.domain_end
    margins = []
    for i in range(points):
        t = end * i / (points - 1)
        margins.append(CgfMargin(t, cgf(t), cgf_quadratic_bound(params, t)))
    return margins


def a_cen_ratios(n_max: int = A_CEN_SWEEP) -> list[tuple[int, float]]:
    """(n, Ccen(n) rho_cen^n / (n-1)!) for n = 2..n_max."""
    if n_max < 2:
        raise InvalidOrderError(f"A_cen sweep needs n_max >= 2, got {n_max}")
    return list(_a_cen_ratios(n_max))


@functools.cache
def _a_cen_ratios(n_max: int) -> tuple[tuple[int, float], ...]:
    rho = rate_mp(PartitionClass.NO_SINGLETONS)
    return tuple(
        (n, float(coefficient_mass(PartitionClass.NO_SINGLETONS, n) * rho**n / mp.factorial(n - 1)))
        for n in range(2, n_max + 1)
    )


def compute_A_cen(n_max: int = A_CEN_SWEEP) -> float:
    ratios = a_cen_ratios(n_max)
    order, largest = max(ratios, key=lambda item: item[1])
    logger.debug("A_cen sweep to %d peaks at n=%d (%.12g)", n_max, order, largest)
    return max(1.0, largest)


def derive_params(v: float, L: float, n_max: int = A_CEN_SWEEP, law=None) -> DerivedParams:
    """Bernstein parameters for a centered law with E|X - E X|^n <= v L^(n-2), n >= 2.

    When a reference law is given, the growth assumption is checked on its
    central absolute moments up to GROWTH_CHECK_ORDER and a violation raises
    ConsistencyError. The true limsup scale is never estimated.
    """
    v, L = to_float(v), to_float(L)
    if not v > 0:
        raise ParameterError(f"v must be positive, got {v}")
    if not L > 0:
        raise ParameterError(f"L must be positive, got {L}")
    if law is not None:
        _check_growth(law, v, L)
    A_cen = compute_A_cen(n_max)
    rho = rate_mp(PartitionClass.NO_SINGLETONS)
    v_prime = float(mp.mpf(A_cen) * v / rho**2)
    b = float(mp.mpf(L) / rho)
    return DerivedParams(v_prime=v_prime, b=b, A_cen=A_cen, L=L, v=v)


def _check_growth(law, v: float, L: float) -> None:
    for n in range(2, GROWTH_CHECK_ORDER + 1):
        moment = to_float(law.central_abs_moment(n))
        limit = v * L ** (n - 2)
        if moment > limit * (1 + STRICT_RTOL):
            raise ConsistencyError(
                f"{law.label} breaks the growth assumption at n={n}: E|X - EX|^{n} = {moment:.6g} > {limit:.6g}"
            )


@dataclass(frozen=True)
class ConditionCheck:
    ok: bool
    first_violation: int | None
    violations: tuple[int, ...]


def cumulant_condition_check(
    cumulants: CumulantSequence, params: BernsteinParams, rtol: float = STRICT_RTOL
) -> ConditionCheck:
    """Check |kappa_n| <= (n-1)! v b^(n-2) for 2 <= n <= len(cumulants)."""
    if cumulants.values and cumulants.cumulant(1) != 0:
        raise ConsistencyError(f"Cumulant condition needs a centered law, kappa_1 = {cumulants.cumulant(1)}")
    exact = is_exact(params.v) and is_exact(params.b)
    violations = []
    for n in range(2, len(cumulants) + 1):
        if exact:
            limit = factorial(n - 1) * params.v * params.b ** (n - 2)
        else:
            limit = float(mp.factorial(n - 1) * to_float(params.v) * mp.mpf(to_float(params.b)) ** (n - 2))
        if not leq(abs(cumulants.cumulant(n)), limit, rtol):
            violations.append(n)
    if violations:
        logger.warning("Cumulant condition fails at orders %s", violations)
    return ConditionCheck(not violations, violations[0] if violations else None, tuple(violations))
