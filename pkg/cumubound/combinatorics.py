"""Exact counting of restricted set partitions and their coefficient masses.

All values are Python integers. Counts come from the block-of-the-last-element
convolution, which treats the three partition families uniformly; explicit
enumeration is kept as an oracle for small orders only.
"""

import functools
import logging
import threading
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, factorial
from typing import Iterator, Mapping

from cumubound.constants import ENUMERATION_LIMIT, PartitionClass, Provenance
from cumubound.errors import EnumerationLimitError, InvalidOrderError

logger = logging.getLogger(__name__)


def admissible(partition_class: PartitionClass, block_size: int) -> bool:
    if block_size < 1:
        return False
    if partition_class == PartitionClass.NO_SINGLETONS:
        return block_size >= 2
    if partition_class == PartitionClass.EVEN_BLOCKS:
        return block_size % 2 == 0
    return True


class TriangularTable:
    """Dense triangular table T[n][k], grown on demand and frozen row by row.

    Rows are tuples, and the row tuple is swapped in whole under a lock, so
    readers never see a half-built table.
    """

    def __init__(self, build_row):
        self._build_row = build_row
        self._rows: tuple[tuple[int, ...], ...] = ((1,),)
        self._lock = threading.Lock()

    def ensure(self, max_order: int) -> tuple[tuple[int, ...], ...]:
        rows = self._rows
        if max_order < len(rows):
            return rows
        with self._lock:
            rows = list(self._rows)
            start = len(rows)
            if max_order < start:
                return self._rows
            for n in range(start, max_order + 1):
                rows.append(tuple(self._build_row(rows, n)))
            self._rows = tuple(rows)
            logger.debug("Extended partition table from order %d to %d", start - 1, max_order)
            return self._rows

    def get(self, n: int, k: int) -> int:
        if n < 0 or k < 0 or k > n:
            return 0
        return self.ensure(n)[n][k]


def _convolution_builder(partition_class: PartitionClass):
    def build_row(rows, n):
        row = [0] * (n + 1)
        for k in range(1, n + 1):
            total = 0
            # j is the size of the block holding element n
            for j in range(1, n - k + 2):
                if admissible(partition_class, j) and k - 1 <= n - j:
                    total += comb(n - 1, j - 1) * rows[n - j][k - 1]
            row[k] = total
        return row

    return build_row


def _stirling_row(rows, n):
    previous = rows[n - 1]
    row = [0] * (n + 1)
    for k in range(1, n + 1):
        left = previous[k - 1]
        right = previous[k] if k < len(previous) else 0
        row[k] = left + k * right
    return row


def _no_singleton_row(rows, n):
    # T(n,k) = k T(n-1,k) + (n-1) T(n-2,k-1)
    row = [0] * (n + 1)
    previous = rows[n - 1]
    before = rows[n - 2] if n >= 2 else ()
    for k in range(1, n + 1):
        first = k * previous[k] if k < len(previous) else 0
        second = (n - 1) * before[k - 1] if 0 <= k - 1 < len(before) else 0
        row[k] = first + second
    return row


_RESTRICTED = {
    partition_class: TriangularTable(_convolution_builder(partition_class)) for partition_class in PartitionClass
}
_STIRLING = TriangularTable(_stirling_row)
_NO_SINGLETON_TWO_TERM = TriangularTable(_no_singleton_row)


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind, from S(n,k) = S(n-1,k-1) + k S(n-1,k)."""
    return _STIRLING.get(n, k)


def ordered_bell(m: int) -> int:
    """Ordered Bell (Fubini) number: the number of ordered set partitions of [m]."""
    if m < 0:
        raise InvalidOrderError(f"Ordered Bell number needs m >= 0, got {m}")
    return sum(stirling2(m, k) * factorial(k) for k in range(m + 1))


def bell_ordinary(n: int) -> int:
    if n < 0:
        raise InvalidOrderError(f"Bell number needs n >= 0, got {n}")
    return sum(stirling2(n, k) for k in range(n + 1))


def no_singleton_bell(n: int) -> int:
    if n < 0:
        raise InvalidOrderError(f"Bell number needs n >= 0, got {n}")
    return sum(count_restricted(PartitionClass.NO_SINGLETONS, n, k) for k in range(n + 1))


def count_restricted(partition_class: PartitionClass, n: int, k: int) -> int:
    """Number of partitions of [n] into k blocks, all admissible for the class."""
    return _RESTRICTED[partition_class].get(n, k)


def no_singleton_count_two_term(n: int, k: int) -> int:
    """Same counts as count_restricted(NO_SINGLETONS, n, k), through the two-term recurrence."""
    return _NO_SINGLETON_TWO_TERM.get(n, k)


def coefficient_mass(partition_class: PartitionClass, n: int) -> int:
    """Sum of (|pi| - 1)! over the admissible partitions of [n]."""
    if n < 1:
        raise InvalidOrderError(f"Coefficient mass needs n >= 1, got {n}")
    if partition_class == PartitionClass.ALL and n == 1:
        return 1
    return sum(count_restricted(partition_class, n, k) * factorial(k - 1) for k in range(1, n + 1))


@dataclass(frozen=True)
class SetPartition:
    """A partition of {1..n}; blocks are sorted tuples ordered by their least element."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = [element for block in self.blocks for element in block]
        if any(len(block) == 0 for block in self.blocks):
            raise ValueError("Partition blocks must be nonempty")
        if sorted(seen) != list(range(1, len(seen) + 1)):
            raise ValueError(f"Blocks {self.blocks} do not partition 1..{len(seen)}")

    def __len__(self):
        return len(self.blocks)

    @property
    def n(self) -> int:
        return sum(len(block) for block in self.blocks)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(block) for block in self.blocks)


def _iter_blocks(
    remaining: tuple[int, ...], partition_class: PartitionClass
) -> Iterator[tuple[tuple[int, ...], ...]]:
    if not remaining:
        yield ()
        return
    first, rest = remaining[0], remaining[1:]
    for size in range(1, len(remaining) + 1):
        if not admissible(partition_class, size):
            continue
        for others in combinations(rest, size - 1):
            taken = set(others)
            left = tuple(element for element in rest if element not in taken)
            for tail in _iter_blocks(left, partition_class):
                yield ((first,) + others,) + tail


def enumerate_partitions(
    n: int, partition_class: PartitionClass = PartitionClass.ALL, limit: int = ENUMERATION_LIMIT
) -> Iterator[SetPartition]:
    """Stream every admissible partition of {1..n} exactly once.

    The cap is checked before the stream is returned, so an oversized request
    fails at the call rather than on first iteration.
    """
    if n > limit:
        raise EnumerationLimitError(n, limit)
    if n < 0:
        raise InvalidOrderError(f"Cannot partition a set of size {n}")
    logger.debug("Enumerating partitions of %d elements (%s)", n, partition_class.name)
    return (SetPartition(blocks) for blocks in _iter_blocks(tuple(range(1, n + 1)), partition_class))


def block_signatures(
    n: int, partition_class: PartitionClass = PartitionClass.ALL, limit: int = ENUMERATION_LIMIT
) -> dict[tuple[int, ...], int]:
    """Count enumerated partitions by their sorted multiset of block sizes."""
    if n > limit:
        raise EnumerationLimitError(n, limit)
    return dict(_block_signatures(n, partition_class))


@functools.cache
def _block_signatures(n: int, partition_class: PartitionClass) -> tuple[tuple[tuple[int, ...], int], ...]:
    counts: Counter = Counter()
    for blocks in _iter_blocks(tuple(range(1, n + 1)), partition_class):
        counts[tuple(sorted(len(block) for block in blocks))] += 1
    return tuple(sorted(counts.items()))


def brute_force_coefficient_mass(
    partition_class: PartitionClass, n: int, limit: int = ENUMERATION_LIMIT
) -> int:
    if partition_class == PartitionClass.ALL and n == 1:
        return 1
    signatures = block_signatures(n, partition_class, limit)
    return sum(count * factorial(len(sizes) - 1) for sizes, count in signatures.items())


@dataclass(frozen=True)
class CoefficientTable:
    partition_class: PartitionClass
    values: Mapping[int, int] = field(repr=False)
    max_order: int
    provenance: Provenance

    def __getitem__(self, n: int) -> int:
        return self.values[n]

    def agrees_with(self, other: "CoefficientTable") -> bool:
        common = set(self.values) & set(other.values)
        return self.partition_class == other.partition_class and all(
            self.values[n] == other.values[n] for n in common
        )


def coefficient_table(
    partition_class: PartitionClass,
    max_order: int,
    provenance: Provenance = Provenance.RECURRENCE,
    limit: int = ENUMERATION_LIMIT,
) -> CoefficientTable:
    """Coefficient masses for n = 1..max_order, by recurrence or by enumeration.

    The series provenance lives in cumubound.asymptotics.egf_coefficient_table.
    """
    if max_order < 1:
        raise InvalidOrderError(f"max_order must be >= 1, got {max_order}")
    if provenance == Provenance.RECURRENCE:
        values = {n: coefficient_mass(partition_class, n) for n in range(1, max_order + 1)}
    elif provenance == Provenance.BRUTE_FORCE:
        values = {n: brute_force_coefficient_mass(partition_class, n, limit) for n in range(1, max_order + 1)}
    else:
        raise ValueError(f"Unsupported provenance {provenance!r} here; use asymptotics.egf_coefficient_table")
    return CoefficientTable(partition_class, values, max_order, provenance)
