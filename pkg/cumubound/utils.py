import math
from fractions import Fraction
from numbers import Rational

from mpmath import MPContext

from cumubound.constants import MP_DPS
from cumubound.errors import ParseError

Scalar = Fraction | int | float

# Fixed precision, never changed after import
mp = MPContext()
mp.dps = MP_DPS


def parse_rational(token: str) -> Fraction:
    """Parse an exact rational from "a", "a/b" or a decimal string.

    Decimal strings are converted digit by digit, so "0.1" is exactly 1/10.
    """
    text = token.strip()
    if not text:
        raise ParseError(token, "empty value")
    lowered = text.lower()
    if "nan" in lowered or "inf" in lowered:
        raise ParseError(token, "not a finite number")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(token, str(e) or "not a rational number") from e


def parse_rational_list(text: str) -> list[Fraction]:
    if not text or not text.strip():
        raise ParseError(text, "empty list")
    return [parse_rational(token) for token in text.split(",")]


def parse_law_spec(text: str) -> tuple[str, dict[str, Fraction]]:
    """Split "poisson:lambda=2" or "gaussian:sigma=1/2" into a law name and its parameters."""
    name, _, params_text = text.partition(":")
    name = name.strip().lower()
    if not name:
        raise ParseError(text, "missing law name")
    params = {}
    if params_text.strip():
        for item in params_text.split(","):
            key, sep, value = item.partition("=")
            if not sep or not key.strip():
                raise ParseError(item, "expected key=value")
            params[key.strip().lower()] = parse_rational(value)
    return name, params


def is_exact(value) -> bool:
    return isinstance(value, Rational)


def to_float(value) -> float:
    """Convert an exact or floating scalar to float, mapping overflow to +/-inf."""
    if isinstance(value, float):
        return value
    try:
        return float(value)
    except OverflowError:
        if isinstance(value, Fraction):
            return float(mp.mpf(value.numerator) / value.denominator)
        return float(mp.mpf(value))


def ratio(numerator, denominator) -> float:
    """Slack-style ratio with 0/0 read as an equality."""
    if denominator == 0:
        return 1.0 if numerator == 0 else math.inf
    if is_exact(numerator) and is_exact(denominator):
        return to_float(Fraction(numerator) / Fraction(denominator))
    return float(mp.mpf(to_float(numerator)) / mp.mpf(to_float(denominator)))


def leq(lhs, rhs, rtol: float) -> bool:
    """lhs <= rhs, decided exactly for rationals and with a relative tolerance otherwise."""
    if is_exact(lhs) and is_exact(rhs):
        return lhs <= rhs
    lhs_f, rhs_f = to_float(lhs), to_float(rhs)
    return lhs_f <= rhs_f + rtol * abs(rhs_f)


def lt(lhs, rhs, rtol: float) -> bool:
    """Strict lhs < rhs; floats must clear the relative tolerance."""
    if is_exact(lhs) and is_exact(rhs):
        return lhs < rhs
    lhs_f, rhs_f = to_float(lhs), to_float(rhs)
    return lhs_f < rhs_f - rtol * abs(rhs_f)
