"""
Moment <-> cumulant transforms over the partition lattice.

Sequences may hold ints, Fractions or floats. Rational input gives exact
rational output; floats propagate as floats (the truncated-moment route
feeds floating values through the same formulas).
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, prod
from numbers import Number
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

from models.errors import InvalidParameterError, SizeLimitError
from models.partitions import (
    enumerate_partitions,
    faa_di_bruno_count,
    mobius_to_top,
    partition_types,
)

logger = logging.getLogger(__name__)

MAX_ORDER = 8
MAX_MULTIVARIATE_ORDER = 6


def _validated(values: Iterable[Number], what: str) -> Tuple[Number, ...]:
    values = tuple(values)
    if not values:
        raise InvalidParameterError(f"{what} needs at least one entry")
    for v in values:
        if isinstance(v, float) and not math.isfinite(v):
            raise InvalidParameterError(f"{what} entries must be finite, got {v}")
    return values


@dataclass(frozen=True)
class MomentSequence:
    """Raw moments m_1..m_N (m_0 = 1 implied)"""

    values: Tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _validated(self.values, "moment sequence"))

    @property
    def order(self) -> int:
        return len(self.values)

    def with_zeroth(self) -> List[Number]:
        return [1] + list(self.values)

    def __getitem__(self, n: int) -> Number:
        """m_n with m_0 = 1"""
        return 1 if n == 0 else self.values[n - 1]


@dataclass(frozen=True)
class CumulantSequence:
    """Cumulants kappa_1..kappa_N"""

    values: Tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _validated(self.values, "cumulant sequence"))

    @property
    def order(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int) -> Number:
        return self.values[n - 1]


@dataclass(frozen=True)
class MultivariateMomentTable:
    """Mixed moments E prod_{i in I} X_i for every nonempty I of {1..n}"""

    n: int
    entries: Dict[FrozenSet[int], Number]

    def __post_init__(self):
        expected = 2 ** self.n - 1
        if len(self.entries) != expected:
            raise InvalidParameterError(f"moment table for n={self.n} needs {expected} entries, got {len(self.entries)}")
        for subset in self.entries:
            if not subset or not subset <= set(range(1, self.n + 1)):
                raise InvalidParameterError(f"invalid subset {sorted(subset)} for n={self.n}")

    def means(self) -> Tuple[Number, ...]:
        return tuple(self.entries[frozenset({i})] for i in range(1, self.n + 1))

    def __getitem__(self, subset: Iterable[int]) -> Number:
        return self.entries[frozenset(subset)]


def _check_order(order: int, limit: int = MAX_ORDER):
    if order > limit:
        raise SizeLimitError(f"order {order} exceeds the supported bound {limit}")


def _partition_sum(values: Sequence[Number], n: int, weighted: bool) -> Number:
    """sum over Pi_n of prod_B values[|B|] (times mu(pi,1) when weighted)"""
    total = 0
    for pi in enumerate_partitions(n):
        term = prod((values[len(b)] for b in pi.blocks), start=1)
        total += mobius_to_top(pi) * term if weighted else term
    return total


def moments_to_cumulants(m: MomentSequence) -> CumulantSequence:
    """kappa_n = sum_{pi in Pi_n} m_pi mu(pi, 1_n)"""
    _check_order(m.order)
    values = m.with_zeroth()
    return CumulantSequence(tuple(_partition_sum(values, n, weighted=True) for n in range(1, m.order + 1)))


def moments_to_cumulants_condensed(m: MomentSequence) -> CumulantSequence:
    """Same transform summed over partition types with Faa di Bruno counts"""
    _check_order(m.order)
    values = m.with_zeroth()
    kappas = []
    for n in range(1, m.order + 1):
        total = 0
        for lam in partition_types(n):
            k = lam.block_count
            mu = (-1) ** (k - 1) * math.factorial(k - 1)
            m_lambda = prod((values[j] ** kj for j, kj in enumerate(lam.multiplicities, start=1)), start=1)
            total += faa_di_bruno_count(lam) * mu * m_lambda
        kappas.append(total)
    return CumulantSequence(tuple(kappas))


def cumulants_to_moments(k: CumulantSequence) -> MomentSequence:
    """m_n = sum_{pi in Pi_n} kappa_pi"""
    _check_order(k.order)
    values = [1] + list(k.values)
    return MomentSequence(tuple(_partition_sum(values, n, weighted=False) for n in range(1, k.order + 1)))


def translate_moments(m: MomentSequence, tau: Number) -> MomentSequence:
    """Moments of X + tau"""
    values = m.with_zeroth()
    shifted = []
    for n in range(1, m.order + 1):
        shifted.append(sum((comb(n, k) * tau ** (n - k) * values[k] for k in range(n + 1)), start=0))
    return MomentSequence(tuple(shifted))


def translate_cumulants(k: CumulantSequence, tau: Number) -> CumulantSequence:
    """Cumulants of X + tau: only kappa_1 moves"""
    return CumulantSequence((k.values[0] + tau,) + k.values[1:])


def moments_of_independent_sum(mx: MomentSequence, my: MomentSequence) -> MomentSequence:
    """Binomial convolution m_n(X+Y) for independent X, Y"""
    order = min(mx.order, my.order)
    x, y = mx.with_zeroth(), my.with_zeroth()
    return MomentSequence(
        tuple(sum((comb(n, k) * x[k] * y[n - k] for k in range(n + 1)), start=0) for n in range(1, order + 1))
    )


def multivariate_moments_to_cumulant(t: MultivariateMomentTable) -> Number:
    """kappa_n(X_1..X_n) = sum_pi mu(pi,1) prod_B E prod_{i in B} X_i"""
    _check_order(t.n, MAX_MULTIVARIATE_ORDER)
    total = 0
    for pi in enumerate_partitions(t.n):
        term = prod((t.entries[frozenset(b)] for b in pi.blocks), start=1)
        total += mobius_to_top(pi) * term
    return total


def diagonal_moment_table(m: MomentSequence, n: int) -> MultivariateMomentTable:
    """Table of (X, X, ..., X): every I maps to m_|I|"""
    if n > m.order:
        raise InvalidParameterError(f"need moments up to order {n}, have {m.order}")
    entries = {}
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(1, n + 1), size):
            entries[frozenset(subset)] = m[size]
    return MultivariateMomentTable(n, entries)


def empirical_moments(samples: Sequence[float], order: int) -> MomentSequence:
    """Exact raw moments of the empirical measure (each float taken at its exact binary value)"""
    xs = [Fraction(float(x)) for x in samples]
    if not xs:
        raise InvalidParameterError("empirical moments need at least one sample")
    count = len(xs)
    powers = list(xs)
    moments = []
    for _ in range(order):
        moments.append(sum(powers, Fraction(0)) / count)
        powers = [p * x for p, x in zip(powers, xs)]
    return MomentSequence(tuple(moments))


def empirical_moment_table(samples: np.ndarray) -> MultivariateMomentTable:
    """Exact mixed moments of an empirical n-variate measure (rows are sample vectors)"""
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[0] == 0:
        raise InvalidParameterError("samples must be a nonempty 2-D array")
    count, n = data.shape
    columns = [[Fraction(float(v)) for v in data[:, i]] for i in range(n)]
    entries = {}
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(1, n + 1), size):
            products = (prod((columns[i - 1][r] for i in subset), start=Fraction(1)) for r in range(count))
            entries[frozenset(subset)] = sum(products, Fraction(0)) / count
    return MultivariateMomentTable(n, entries)
