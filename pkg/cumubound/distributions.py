"""Closed-form reference laws and a seeded sampler.

Laws are immutable value objects. Moments come back as Fractions whenever a
closed form in the law's rational parameters exists, and as floats otherwise
(Gaussian odd absolute moments, Poisson and Exponential central absolute
moments).
"""

import functools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, prod
from typing import ClassVar

import numpy as np

from cumubound.asymptotics import EfficiencyGap, efficiency_gap
from cumubound.bounds import BoundReport, ConverseRecord, bound_report, converse_sweep
from cumubound.constants import DEFAULT_SEED
from cumubound.errors import InvalidOrderError, ParameterError
from cumubound.transforms import CumulantSequence, MomentSequence, moments_to_cumulants
from cumubound.utils import Scalar, mp, to_float

logger = logging.getLogger(__name__)


def _double_factorial(n: int) -> int:
    return prod(range(n, 0, -2), start=1)


@dataclass(frozen=True)
class ReferenceLaw(ABC):
    """A law with closed-form moments; subclasses declare what is exact."""

    name: ClassVar[str]
    parameter_names: ClassVar[tuple[str, ...]] = ()
    exact_moments: ClassVar[bool] = True
    exact_abs_moments: ClassVar[bool] = True
    exact_cumulants: ClassVar[bool] = True
    symmetric: ClassVar[bool] = False
    centered: ClassVar[bool] = False

    @property
    def parameters(self) -> dict[str, Fraction]:
        return {key: getattr(self, key) for key in self.parameter_names}

    @property
    def label(self) -> str:
        if not self.parameter_names:
            return self.name
        return self.name + ":" + ",".join(f"{key}={value}" for key, value in self.parameters.items())

    @property
    def mean(self) -> Scalar:
        return self.moment(1)

    @abstractmethod
    def moment(self, n: int) -> Scalar: ...

    def abs_moment(self, n: int) -> Scalar:
        return self.moment(n)

    def central_abs_moment(self, n: int) -> Scalar:
        return self.abs_moment(n)

    def cumulant(self, n: int) -> Scalar:
        return _transform_cumulants(self, n)[n - 1]

    @abstractmethod
    def centered_cgf(self, t: float) -> float:
        """log E exp(t (X - E X))."""

    @abstractmethod
    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray: ...


@functools.cache
def _transform_cumulants(law: ReferenceLaw, n: int) -> tuple[Scalar, ...]:
    return moments_to_cumulants(MomentSequence(tuple(law.moment(k) for k in range(1, n + 1)))).values


def _positive(name: str, value) -> Fraction:
    value = Fraction(value)
    if value <= 0:
        raise ParameterError(f"{name} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class Rademacher(ReferenceLaw):
    name: ClassVar[str] = "rademacher"
    symmetric: ClassVar[bool] = True
    centered: ClassVar[bool] = True

    def moment(self, n: int) -> Fraction:
        return Fraction(1 if n % 2 == 0 else 0)

    def abs_moment(self, n: int) -> Fraction:
        return Fraction(1)

    def centered_cgf(self, t: float) -> float:
        return float(mp.log(mp.cosh(t)))

    def draw(self, rng, count):
        return rng.choice(np.array([-1.0, 1.0]), size=count)


@dataclass(frozen=True)
class Gaussian(ReferenceLaw):
    """Centered normal law with standard deviation sigma; sigma = 0 is the point mass at 0."""

    sigma: Fraction = Fraction(1)
    name: ClassVar[str] = "gaussian"
    parameter_names: ClassVar[tuple[str, ...]] = ("sigma",)
    exact_abs_moments: ClassVar[bool] = False
    symmetric: ClassVar[bool] = True
    centered: ClassVar[bool] = True

    def __post_init__(self):
        sigma = Fraction(self.sigma)
        if sigma < 0:
            raise ParameterError(f"sigma must be nonnegative, got {sigma}")
        object.__setattr__(self, "sigma", sigma)

    def moment(self, n: int) -> Fraction:
        if n % 2 == 1:
            return Fraction(0)
        return _double_factorial(n - 1) * self.sigma**n

    def abs_moment(self, n: int) -> Scalar:
        if n % 2 == 0 or self.sigma == 0:
            return self.moment(n) if n % 2 == 0 else Fraction(0)
        # sigma^n 2^(n/2) Gamma((n+1)/2) / sqrt(pi)
        sigma = mp.mpf(self.sigma.numerator) / self.sigma.denominator
        return float(sigma**n * mp.mpf(2) ** (mp.mpf(n) / 2) * mp.gamma(mp.mpf(n + 1) / 2) / mp.sqrt(mp.pi))

    def cumulant(self, n: int) -> Fraction:
        return self.sigma**2 if n == 2 else Fraction(0)

    def centered_cgf(self, t: float) -> float:
        return float(self.sigma) ** 2 * t**2 / 2

    def draw(self, rng, count):
        return rng.normal(0.0, float(self.sigma), size=count)


@dataclass(frozen=True)
class Bernoulli(ReferenceLaw):
    p: Fraction = Fraction(1, 2)
    name: ClassVar[str] = "bernoulli"
    parameter_names: ClassVar[tuple[str, ...]] = ("p",)

    def __post_init__(self):
        p = Fraction(self.p)
        if not 0 <= p <= 1:
            raise ParameterError(f"p must lie in [0, 1], got {p}")
        object.__setattr__(self, "p", p)

    def moment(self, n: int) -> Fraction:
        return self.p

    def central_abs_moment(self, n: int) -> Fraction:
        q = 1 - self.p
        return self.p * q**n + q * self.p**n

    def centered_cgf(self, t: float) -> float:
        p = float(self.p)
        return float(mp.log(1 - p + p * mp.exp(t)) - p * t)

    def draw(self, rng, count):
        return rng.binomial(1, float(self.p), size=count).astype(float)


@dataclass(frozen=True)
class Poisson(ReferenceLaw):
    lam: Fraction = Fraction(1)
    name: ClassVar[str] = "poisson"
    parameter_names: ClassVar[tuple[str, ...]] = ("lam",)
    exact_abs_moments: ClassVar[bool] = False

    def __post_init__(self):
        object.__setattr__(self, "lam", _positive("lambda", self.lam))

    def moment(self, n: int) -> Fraction:
        return _touchard_moments(self.lam, n)[n]

    def cumulant(self, n: int) -> Fraction:
        return self.lam

    def central_abs_moment(self, n: int) -> float:
        lam = mp.mpf(self.lam.numerator) / self.lam.denominator
        weight = mp.exp(-lam)
        total = mp.mpf(0)
        k = 0
        while True:
            term = weight * abs(k - lam) ** n
            total += term
            if k > lam + n and term < total * mp.eps:
                return float(total)
            k += 1
            weight *= lam / k

    def centered_cgf(self, t: float) -> float:
        return float(float(self.lam) * (mp.exp(t) - 1 - t))

    def draw(self, rng, count):
        return rng.poisson(float(self.lam), size=count).astype(float)


@functools.cache
def _touchard_moments(lam: Fraction, n: int) -> tuple[Fraction, ...]:
    # m_(j+1) = lam sum_k C(j, k) m_k
    moments = [Fraction(1)]
    for j in range(n):
        moments.append(lam * sum(comb(j, k) * moments[k] for k in range(j + 1)))
    return tuple(moments)


@dataclass(frozen=True)
class Exponential(ReferenceLaw):
    rate: Fraction = Fraction(1)
    name: ClassVar[str] = "exponential"
    parameter_names: ClassVar[tuple[str, ...]] = ("rate",)
    exact_abs_moments: ClassVar[bool] = False

    def __post_init__(self):
        object.__setattr__(self, "rate", _positive("rate", self.rate))

    def moment(self, n: int) -> Fraction:
        return factorial(n) / self.rate**n

    def cumulant(self, n: int) -> Fraction:
        return factorial(n - 1) / self.rate**n

    def central_abs_moment(self, n: int) -> float:
        """E|X - 1/rate|^n = rate^-n e^-1 (n! + sum_k 1/(k! (n+k+1)))."""
        partial = mp.mpf(0)
        k = 0
        term = mp.mpf(1) / (n + 1)
        while term > partial * mp.eps:
            partial += term
            k += 1
            term = 1 / (mp.factorial(k) * (n + k + 1))
        rate = mp.mpf(self.rate.numerator) / self.rate.denominator
        return float((mp.factorial(n) + partial) / (mp.e * rate**n))

    def centered_cgf(self, t: float) -> float:
        rate = float(self.rate)
        if t >= rate:
            raise ParameterError(f"Exponential CGF diverges at t = {t} (rate {rate})")
        return float(-t / rate - mp.log(1 - t / rate))

    def draw(self, rng, count):
        return rng.exponential(1 / float(self.rate), size=count)


@dataclass(frozen=True)
class Uniform(ReferenceLaw):
    """Uniform law on [-a, a]."""

    a: Fraction = Fraction(1)
    name: ClassVar[str] = "uniform"
    parameter_names: ClassVar[tuple[str, ...]] = ("a",)
    symmetric: ClassVar[bool] = True
    centered: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))

    def moment(self, n: int) -> Fraction:
        return Fraction(0) if n % 2 else self.abs_moment(n)

    def abs_moment(self, n: int) -> Fraction:
        return self.a**n / (n + 1)

    def centered_cgf(self, t: float) -> float:
        if t == 0:
            return 0.0
        x = float(self.a) * t
        return float(mp.log(mp.sinh(x) / x))

    def draw(self, rng, count):
        return rng.uniform(-float(self.a), float(self.a), size=count)


LAW_REGISTRY: dict[str, type[ReferenceLaw]] = {
    law.name: law for law in (Rademacher, Gaussian, Bernoulli, Poisson, Exponential, Uniform)
}

_PARAMETER_ALIASES = {"lambda": "lam", "mu": "lam"}


def make_law(name: str, params: dict[str, Fraction] | None = None) -> ReferenceLaw:
    try:
        law_class = LAW_REGISTRY[name.lower()]
    except KeyError:
        raise ParameterError(f"Unknown law '{name}'; available: {', '.join(LAW_REGISTRY)}") from None
    kwargs = {}
    for key, value in (params or {}).items():
        key = _PARAMETER_ALIASES.get(key, key)
        if key not in law_class.parameter_names:
            allowed = ", ".join(law_class.parameter_names) or "none"
            raise ParameterError(f"Law '{law_class.name}' has no parameter '{key}' (allowed: {allowed})")
        kwargs[key] = value
    return law_class(**kwargs)


def _check_order(n: int) -> None:
    if n < 1:
        raise InvalidOrderError(f"Order must be >= 1, got {n}")


def law_moment(law: ReferenceLaw, n: int) -> Scalar:
    _check_order(n)
    return law.moment(n)


def law_abs_moment(law: ReferenceLaw, n: int) -> Scalar:
    _check_order(n)
    return law.abs_moment(n)


def law_central_abs_moment(law: ReferenceLaw, n: int) -> Scalar:
    _check_order(n)
    return law.central_abs_moment(n)


def law_cumulant(law: ReferenceLaw, n: int) -> Scalar:
    _check_order(n)
    return law.cumulant(n)


def moment_sequence(law: ReferenceLaw, n_max: int) -> MomentSequence:
    _check_order(n_max)
    orders = range(1, n_max + 1)
    return MomentSequence(
        values=tuple(law.moment(n) for n in orders),
        abs_values=tuple(law.abs_moment(n) for n in orders),
        central_abs_values=tuple(law.central_abs_moment(n) for n in orders),
        mean_known_zero=law.centered,
        symmetric=law.symmetric,
    )


def cumulant_sequence(law: ReferenceLaw, n_max: int) -> CumulantSequence:
    _check_order(n_max)
    return CumulantSequence(tuple(law.cumulant(n) for n in range(1, n_max + 1)))


def cgf_series(law: ReferenceLaw, t: float, n_max: int, centered: bool = True) -> float:
    """Partial sum of sum_n kappa_n t^n / n!, dropping kappa_1 when centered."""
    _check_order(n_max)
    start = 2 if centered else 1
    total = mp.fsum(
        mp.mpf(to_float(law.cumulant(n))) * mp.mpf(t) ** n / mp.factorial(n) for n in range(start, n_max + 1)
    )
    return float(total)


def is_unit_moment(law: ReferenceLaw, n_max: int = 16) -> bool:
    """E|X|^n = 1 exactly for n = 1..n_max."""
    values = (law.abs_moment(n) for n in range(1, n_max + 1))
    return all(isinstance(value, Fraction) and value == 1 for value in values)


@dataclass(frozen=True)
class LawVerification:
    law: ReferenceLaw
    reports: list[BoundReport] = field(repr=False)
    converse: list[ConverseRecord] = field(repr=False)
    efficiency: EfficiencyGap | None = None

    @property
    def violations(self) -> list[BoundReport]:
        return [report for report in self.reports if report.violated]

    @property
    def converse_failures(self) -> list[ConverseRecord]:
        return [record for record in self.converse if not (record.raw_ok and record.central_ok)]

    @property
    def ok(self) -> bool:
        return not self.violations and not self.converse_failures


def verify_law(law: ReferenceLaw, n_max: int = 16) -> LawVerification:
    """Forward bounds and converse envelopes for n = 1..n_max.

    Unit-moment laws also get the Rademacher efficiency-gap check.
    """
    moments = moment_sequence(law, n_max)
    reports = bound_report(moments, n_max)
    converse = converse_sweep(cumulant_sequence(law, n_max), moments, n_max)
    efficiency = None
    if law.symmetric and is_unit_moment(law, n_max):
        efficiency = efficiency_gap()
    verification = LawVerification(law, reports, converse, efficiency)
    if not verification.ok:
        logger.warning("Verification of %s found %d violations", law.label, len(verification.violations))
    return verification


def sample(law: ReferenceLaw, count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """count i.i.d. draws from a PCG64 generator seeded with seed."""
    if count < 1:
        raise ParameterError(f"Sample count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    return law.draw(rng, count)


def empirical_moments(samples: np.ndarray, n_max: int) -> MomentSequence:
    _check_order(n_max)
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ParameterError("No samples")
    deviations = np.abs(x - x.mean())
    orders = range(1, n_max + 1)
    return MomentSequence(
        values=tuple(float(np.mean(x**k)) for k in orders),
        abs_values=tuple(float(np.mean(np.abs(x) ** k)) for k in orders),
        central_abs_values=tuple(float(np.mean(deviations**k)) for k in orders),
    )
