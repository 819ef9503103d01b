"""
Exact combinatorics of the set-partition lattice.

Set partitions are enumerated as restricted-growth strings, shuffles as
lexicographic placement sets. All arithmetic is exact integer arithmetic.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from math import factorial, prod
from typing import Dict, Iterator, List, Sequence, Tuple

import networkx as nx

from models.errors import InvalidParameterError, SizeLimitError

logger = logging.getLogger(__name__)

MAX_ENUMERATION = 12
MAX_LATTICE = 6


@dataclass(frozen=True)
class SetPartition:
    """A partition of {1..n} into blocks, stored sorted by block minimum"""

    n: int
    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError(f"ground set size must be positive, got {self.n}")
        normalized = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0] if b else 0))
        if any(len(b) == 0 for b in normalized):
            raise InvalidParameterError("blocks must be nonempty")
        elements = [i for b in normalized for i in b]
        if sorted(elements) != list(range(1, self.n + 1)):
            raise InvalidParameterError(f"blocks {self.blocks} do not partition {{1..{self.n}}}")
        object.__setattr__(self, "blocks", normalized)

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    @property
    def minima(self) -> Tuple[int, ...]:
        """alpha(B) for every block, in block order"""
        return tuple(b[0] for b in self.blocks)

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "SetPartition":
        """Build from a restricted-growth string (0-based block labels)"""
        blocks: List[List[int]] = []
        for position, label in enumerate(rgs, start=1):
            if label == len(blocks):
                blocks.append([])
            blocks[label].append(position)
        return cls(len(rgs), tuple(tuple(b) for b in blocks))

    @classmethod
    def one(cls, n: int) -> "SetPartition":
        return cls(n, (tuple(range(1, n + 1)),))

    @classmethod
    def zero(cls, n: int) -> "SetPartition":
        return cls(n, tuple((i,) for i in range(1, n + 1)))

    def __str__(self) -> str:
        return "{" + ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


@dataclass(frozen=True)
class PartitionType:
    """Block-size multiplicities (k_1..k_n) of a partition of n"""

    n: int
    multiplicities: Tuple[int, ...]

    def __post_init__(self):
        if len(self.multiplicities) != self.n:
            raise InvalidParameterError("multiplicity vector must have length n")
        if any(k < 0 for k in self.multiplicities):
            raise InvalidParameterError("multiplicities must be nonnegative")
        if sum(j * k for j, k in enumerate(self.multiplicities, start=1)) != self.n:
            raise InvalidParameterError(f"type {self.multiplicities} is not a partition of {self.n}")

    @property
    def block_count(self) -> int:
        return sum(self.multiplicities)

    @property
    def factorial_weight(self) -> int:
        """lambda! = prod (j!)^k_j"""
        return prod(factorial(j) ** k for j, k in enumerate(self.multiplicities, start=1))

    @property
    def block_sizes(self) -> Tuple[int, ...]:
        """Block sizes in decreasing order"""
        sizes = [j for j, k in enumerate(self.multiplicities, start=1) for _ in range(k)]
        return tuple(sorted(sizes, reverse=True))

    def label(self) -> str:
        return " ".join(f"{j}^{k}" for j, k in enumerate(self.multiplicities, start=1) if k)


@dataclass(frozen=True)
class Shuffle:
    """Interleaving of decks: placements[i] lists the positions taken by deck i"""

    deck_sizes: Tuple[int, ...]
    placements: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.deck_sizes) != len(self.placements):
            raise InvalidParameterError("one placement list per deck is required")
        n = sum(self.deck_sizes)
        for size, positions in zip(self.deck_sizes, self.placements):
            if len(positions) != size:
                raise InvalidParameterError("placement length must equal deck size")
            if any(a >= b for a, b in zip(positions, positions[1:])):
                raise InvalidParameterError("placements must be strictly increasing")
        used = sorted(p for positions in self.placements for p in positions)
        if used != list(range(1, n + 1)):
            raise InvalidParameterError("placements must cover {1..n} without overlap")

    @property
    def n(self) -> int:
        return sum(self.deck_sizes)


def _check_enumeration_bound(n: int):
    if n < 0 or n > MAX_ENUMERATION:
        raise SizeLimitError(f"enumeration supports n <= {MAX_ENUMERATION}, got {n}")


def iter_partitions(n: int) -> Iterator[SetPartition]:
    """Yield every partition of {1..n} in restricted-growth-string order"""
    if n < 1:
        raise SizeLimitError(f"n must be at least 1, got {n}")
    _check_enumeration_bound(n)

    rgs = [0] * n
    # maxima[i] = max(rgs[:i+1])
    maxima = [0] * n
    while True:
        yield SetPartition.from_rgs(rgs)
        # rightmost position that can still grow
        i = n - 1
        while i > 0 and rgs[i] == maxima[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        rgs[i] += 1
        maxima[i] = max(maxima[i - 1], rgs[i])
        for j in range(i + 1, n):
            rgs[j] = 0
            maxima[j] = maxima[i]


@lru_cache(maxsize=None)
def _partitions_cached(n: int) -> Tuple[SetPartition, ...]:
    return tuple(iter_partitions(n))


def enumerate_partitions(n: int) -> List[SetPartition]:
    """All of Pi_n exactly once, in restricted-growth-string order"""
    if n < 1:
        raise SizeLimitError(f"n must be at least 1, got {n}")
    _check_enumeration_bound(n)
    if n <= 8:
        return list(_partitions_cached(n))
    logger.debug("enumerating %d-set partitions without caching", n)
    return list(iter_partitions(n))


def mobius_to_top(pi: SetPartition) -> int:
    """mu(pi, 1_n) = (-1)^(|pi|-1) (|pi|-1)!"""
    k = pi.block_count
    return (-1) ** (k - 1) * factorial(k - 1)


def type_of(pi: SetPartition) -> PartitionType:
    counts = [0] * pi.n
    for block in pi.blocks:
        counts[len(block) - 1] += 1
    return PartitionType(pi.n, tuple(counts))


def faa_di_bruno_count(lam: PartitionType) -> int:
    """Number of set partitions of the given type"""
    denominator = lam.factorial_weight * prod(factorial(k) for k in lam.multiplicities)
    return factorial(lam.n) // denominator


def partition_types(n: int) -> List[PartitionType]:
    """All integer partitions of n as multiplicity vectors"""
    if n < 1:
        raise SizeLimitError(f"n must be at least 1, got {n}")

    def parts(remaining: int, largest: int) -> Iterator[Tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, largest), 0, -1):
            for rest in parts(remaining - first, first):
                yield (first,) + rest

    result = []
    for sizes in parts(n, n):
        counts = [0] * n
        for s in sizes:
            counts[s - 1] += 1
        result.append(PartitionType(n, tuple(counts)))
    return result


def multinomial(deck_sizes: Sequence[int]) -> int:
    return factorial(sum(deck_sizes)) // prod(factorial(s) for s in deck_sizes)


def enumerate_shuffles(deck_sizes: Sequence[int]) -> List[Shuffle]:
    """All shuffles of decks with the given sizes, lexicographic in placement sets"""
    sizes = tuple(int(s) for s in deck_sizes)
    if any(s < 0 for s in sizes):
        raise InvalidParameterError(f"deck sizes must be nonnegative, got {sizes}")
    n = sum(sizes)
    _check_enumeration_bound(n)

    shuffles: List[Shuffle] = []

    def place(deck: int, free: Tuple[int, ...], chosen: List[Tuple[int, ...]]):
        if deck == len(sizes):
            shuffles.append(Shuffle(sizes, tuple(chosen)))
            return
        for positions in itertools.combinations(free, sizes[deck]):
            taken = set(positions)
            place(deck + 1, tuple(p for p in free if p not in taken), chosen + [positions])

    place(0, tuple(range(1, n + 1)), [])
    return shuffles


def shuffle_to_partition(s: Shuffle) -> SetPartition:
    """The partition whose blocks are the (nonempty) placement sets"""
    return SetPartition(s.n, tuple(p for p in s.placements if p))


def block_min_mask(pi: SetPartition) -> Tuple[int, ...]:
    """e_i = 1 iff i is the smallest element of its block"""
    minima = set(pi.minima)
    return tuple(1 if i in minima else 0 for i in range(1, pi.n + 1))


def bell_numbers(n: int) -> List[int]:
    """B_0..B_n from the Bell triangle"""
    bells = [1]
    row = [1]
    for _ in range(n):
        next_row = [row[-1]]
        for value in row:
            next_row.append(next_row[-1] + value)
        row = next_row
        bells.append(row[0])
    return bells


def lattice_graph(n: int) -> nx.DiGraph:
    """
    Hasse diagram of Pi_n under refinement.

    Nodes are SetPartitions; an edge pi -> sigma means sigma is obtained
    from pi by merging two blocks.
    """
    if n < 1 or n > MAX_LATTICE:
        raise SizeLimitError(f"lattice graphs support 1 <= n <= {MAX_LATTICE}, got {n}")

    graph = nx.DiGraph()
    for pi in enumerate_partitions(n):
        graph.add_node(pi, blocks=pi.block_count)
        for i, j in itertools.combinations(range(pi.block_count), 2):
            merged = [b for k, b in enumerate(pi.blocks) if k not in (i, j)]
            merged.append(pi.blocks[i] + pi.blocks[j])
            graph.add_edge(pi, SetPartition(n, tuple(merged)))
    return graph


def mobius_from_lattice(n: int) -> Dict[SetPartition, int]:
    """
    mu(pi, 1_n) from the defining recursion
    mu(1,1) = 1, mu(pi,1) = -sum_{pi < sigma <= 1} mu(sigma,1).
    """
    graph = lattice_graph(n)
    top = SetPartition.one(n)
    values: Dict[SetPartition, int] = {top: 1}
    # coarser partitions first, so every strict upper bound is known
    for pi in sorted(graph.nodes, key=lambda p: p.block_count):
        if pi == top:
            continue
        values[pi] = -sum(values[sigma] for sigma in nx.descendants(graph, pi))
    return values
