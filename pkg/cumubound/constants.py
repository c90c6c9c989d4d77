from enum import IntEnum


class PartitionClass(IntEnum):
    """Set-partition family, and with it the coefficient family of a bound.

    ALL selects the raw-moment coefficients, NO_SINGLETONS the central-moment
    ones and EVEN_BLOCKS the coefficients for symmetric laws.
    """

    ALL = 1
    NO_SINGLETONS = 2
    EVEN_BLOCKS = 3


class Provenance(IntEnum):
    RECURRENCE = 1
    EGF_SERIES = 2
    BRUTE_FORCE = 3


class Functional(IntEnum):
    """Moment functional a bound is evaluated on."""

    RAW = 1
    CENTRAL = 2
    SYMMETRIC = 3


# Short names used on the command line and in output rows
CLASS_NAMES = {
    PartitionClass.ALL: "raw",
    PartitionClass.NO_SINGLETONS: "cen",
    PartitionClass.EVEN_BLOCKS: "sym",
}
CLASS_BY_NAME = {name: partition_class for partition_class, name in CLASS_NAMES.items()}

FUNCTIONAL_NAMES = {
    Functional.RAW: "raw",
    Functional.CENTRAL: "central",
    Functional.SYMMETRIC: "symmetric",
}

# Bell(12) is about 4.2 million partitions
ENUMERATION_LIMIT = 12

EGF_MAX_ORDER = 64
RATIO_MAX_ORDER = 200
A_CEN_SWEEP = 64

# Decimal digits carried by mpmath when computing rate constants and ratios
MP_DPS = 40

STRICT_RTOL = 1e-9
LYAPUNOV_RTOL = 1e-12
COLLAPSE_RTOL = 1e-10

SCHEMA_VERSION = "1.0"
DEFAULT_SEED = 20240101
