"""Exceptions raised by cumubound.

Every error derives from CumulantError so that callers, and the command line
front end in particular, can separate bad input from genuine failures.
"""


class CumulantError(Exception):
    pass


class EnumerationLimitError(CumulantError, ValueError):
    def __init__(self, n: int, limit: int):
        super().__init__(f"Refusing to enumerate partitions of {n} elements (limit is {limit})")
        self.n = n
        self.limit = limit


class InvalidOrderError(CumulantError, ValueError):
    pass


class MissingMomentError(CumulantError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConsistencyError(CumulantError, ValueError):
    pass


class ParameterError(CumulantError, ValueError):
    pass


class SeriesCapError(CumulantError, ValueError):
    pass


class ParseError(CumulantError, ValueError):
    def __init__(self, token: str, reason: str = "not a rational number"):
        super().__init__(f"Cannot parse '{token}': {reason}")
        self.token = token
