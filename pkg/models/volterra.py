"""
Iterated integrals of the distribution function and the cumulant routes
built on them.

Every route evaluates ordered-simplex integrals
    int_{a<t_1<...<t_n<b} g_1(t_1) ... g_n(t_n) dt
by n successive one-dimensional Volterra passes h_i = V(g_i * h_{i-1}),
h_0 = 1, on one shared grid. Partition integrands F_pi only depend on
pi through the block-minimum mask, so integrals are cached per mask.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from models.dists import DistributionModel, cdf_grid, mean_residual_life_profiles, truncate_support
from models.errors import NumericalGuardError, RangeError, SizeLimitError
from models.grid import GridFunction
from models.momentcalc import MomentSequence, moments_to_cumulants
from models.partitions import (
    SetPartition,
    block_min_mask,
    enumerate_partitions,
    enumerate_shuffles,
    mobius_to_top,
    shuffle_to_partition,
)

logger = logging.getLogger(__name__)

MAX_TRUNCATED_ORDER = 8
MAX_SIMPLEX_ORDER = 6
MAX_SHUFFLE_ORDER = 6
MRL_ORDERS = (3, 4)

# factor labels for iterated integrands
F_FACTOR = "F"
ONE_FACTOR = "1"
SURVIVAL_FACTOR = "S"


def volterra_apply(g: GridFunction) -> GridFunction:
    """Running integral of g from the lower grid end (output at lo is 0)"""
    return g.integrate()


@dataclass
class CumulativeGrid:
    """F and its iterated integrals F^[k] on one grid"""

    base: GridFunction
    levels: List[GridFunction] = field(default_factory=list)

    @property
    def lo(self) -> float:
        return self.base.lo

    @property
    def hi(self) -> float:
        return self.base.hi

    def level(self, k: int) -> GridFunction:
        return self.levels[k]


def build_cumulative_grid(d: DistributionModel, levels: int, eps_tail: Optional[float] = None,
                          points: Optional[int] = None) -> CumulativeGrid:
    """Levels 0..levels of F^[k] on the truncated support of d"""
    a, b = truncate_support(d, eps_tail)
    base = cdf_grid(d, a, b, points)
    grid = CumulativeGrid(base=base, levels=[base])
    for _ in range(levels):
        grid.levels.append(volterra_apply(grid.levels[-1]))
    logger.debug("built %d cumulative levels for %s on %r", levels, d.name, base)
    return grid


def _check_tau(grid: CumulativeGrid, tau: float):
    if not grid.lo < tau <= grid.hi:
        raise RangeError(f"tau={tau} outside the truncated support ({grid.lo}, {grid.hi}]")


def iterated_cdf(d: DistributionModel, n: int, tau: float, eps_tail: Optional[float] = None,
                 points: Optional[int] = None) -> float:
    """F^[n](tau) = E (tau - X)_+^n / n!"""
    if n < 0 or n > MAX_TRUNCATED_ORDER:
        raise SizeLimitError(f"iterated_cdf supports 0 <= n <= {MAX_TRUNCATED_ORDER}, got {n}")
    grid = build_cumulative_grid(d, n, eps_tail, points)
    _check_tau(grid, tau)
    if n == 0:
        return d.cdf(tau)
    return grid.level(n)(tau)


def truncated_y_moments(d: DistributionModel, tau: float, N: int, eps_tail: Optional[float] = None,
                        points: Optional[int] = None) -> List[float]:
    """y_n = E (X - tau)^n = (-1)^n n! F^[n](tau), n = 1..N"""
    if N < 1 or N > MAX_TRUNCATED_ORDER:
        raise SizeLimitError(f"truncated moments support 1 <= N <= {MAX_TRUNCATED_ORDER}, got {N}")
    grid = build_cumulative_grid(d, N, eps_tail, points)
    _check_tau(grid, tau)
    return [(-1) ** n * math.factorial(n) * grid.level(n)(tau) for n in range(1, N + 1)]


def cumulants_via_truncated(d: DistributionModel, N: int, tau: Optional[float] = None,
                            eps_tail: Optional[float] = None, points: Optional[int] = None) -> List[float]:
    """kappa_n from the moments of Y = X - tau; tau defaults to the upper truncation bound"""
    if N < 1 or N > MAX_TRUNCATED_ORDER:
        raise SizeLimitError(f"truncated route supports 1 <= N <= {MAX_TRUNCATED_ORDER}, got {N}")
    grid = build_cumulative_grid(d, N, eps_tail, points)
    tau = grid.hi if tau is None else float(tau)
    _check_tau(grid, tau)
    y = [(-1) ** n * math.factorial(n) * grid.level(n)(tau) for n in range(1, N + 1)]
    kappas = list(moments_to_cumulants(MomentSequence(tuple(y))).values)
    kappas[0] += tau
    return [float(k) for k in kappas]


class SimplexIntegrator:
    """
    Ordered-simplex integrals of products of F, 1 and 1 - F on one grid.

    Results are memoized by factor word, which for F_pi is the
    block-minimum mask of pi.
    """

    def __init__(self, d: DistributionModel, eps_tail: Optional[float] = None, points: Optional[int] = None):
        self.model = d
        self.a, self.b = truncate_support(d, eps_tail)
        self.F = cdf_grid(d, self.a, self.b, points)
        self.survival = self.F.complement()
        self._cache: Dict[Tuple[str, ...], float] = {}

    def _factor(self, label: str) -> Optional[GridFunction]:
        if label == F_FACTOR:
            return self.F
        if label == SURVIVAL_FACTOR:
            return self.survival
        return None

    def word_integral(self, word: Sequence[str]) -> float:
        """int_{a<t_1<...<t_n<b} prod_i g_{word[i]}(t_i) dt; the empty word is 1"""
        word = tuple(word)
        if not word:
            return 1.0
        if word in self._cache:
            return self._cache[word]

        h: Optional[GridFunction] = None
        for label in word:
            factor = self._factor(label)
            if h is None:
                integrand = factor if factor is not None else GridFunction.constant(self.F.nodes)
            else:
                integrand = h * factor if factor is not None else h
            h = volterra_apply(integrand)
        value = h(self.b)

        # integrands are nonnegative, so only rounding can push the value below 0
        scale = (self.b - self.a) ** len(word) / math.factorial(len(word))
        if value < -1e-9 * max(1.0, scale):
            raise NumericalGuardError(f"negative simplex integral {value:.3g} for word {''.join(word)}")
        self._cache[word] = value
        return value

    def mask_integral(self, mask: Sequence[int], final: Optional[str] = None) -> float:
        word = [F_FACTOR if e else ONE_FACTOR for e in mask]
        if final is not None:
            word.append(final)
        return self.word_integral(word)

    def partition_integral(self, pi: SetPartition) -> float:
        return self.mask_integral(block_min_mask(pi))

    def first_cumulant(self) -> float:
        """kappa_1 = int_0^inf (1 - F) - int_-inf^0 F on the truncated support"""
        a, b = self.a, self.b
        G = volterra_apply(self.F)
        c = min(max(0.0, a), b)
        positive = max(a, 0.0) + (b - c) - (G(b) - G(c))
        negative = G(c) + max(-b, 0.0)
        return positive - negative


def _check_simplex_order(N: int):
    if N < 1 or N > MAX_SIMPLEX_ORDER:
        raise SizeLimitError(f"simplex routes support 1 <= N <= {MAX_SIMPLEX_ORDER}, got {N}")


def first_cumulant(d: DistributionModel, eps_tail: Optional[float] = None, points: Optional[int] = None) -> float:
    return SimplexIntegrator(d, eps_tail, points).first_cumulant()


def simplex_partition_integral(d: DistributionModel, pi: SetPartition, eps_tail: Optional[float] = None,
                               points: Optional[int] = None) -> float:
    """int over a<t_1<...<t_n<b of prod_i F(t_i)^{e_i}, e = block_min_mask(pi)"""
    if pi.n > 8:
        raise SizeLimitError(f"simplex integrals support n <= 8, got {pi.n}")
    return SimplexIntegrator(d, eps_tail, points).partition_integral(pi)


def theorem1_cumulant(integrator: SimplexIntegrator, n: int) -> float:
    """kappa_n = (-1)^n n! sum_pi mu(pi,1) int F_pi, n >= 2"""
    total = 0.0
    # fixed enumeration order keeps the floating sum deterministic
    for pi in enumerate_partitions(n):
        total += mobius_to_top(pi) * integrator.partition_integral(pi)
    return (-1) ** n * math.factorial(n) * total


def cumulants_via_theorem1(d: DistributionModel, N: int, eps_tail: Optional[float] = None,
                           points: Optional[int] = None) -> List[float]:
    _check_simplex_order(N)
    integrator = SimplexIntegrator(d, eps_tail, points)
    kappas = [integrator.first_cumulant()]
    kappas.extend(theorem1_cumulant(integrator, n) for n in range(2, N + 1))
    return kappas


def factorized_cumulant(integrator: SimplexIntegrator, n: int) -> float:
    """kappa_n = (-1)^n n! sum_{pi in Pi_{n-1}} |pi| mu(pi,1) int F_pi(t_1..t_{n-1}) (1 - F(t_n))"""
    total = 0.0
    for pi in enumerate_partitions(n - 1):
        weight = pi.block_count * mobius_to_top(pi)
        total += weight * integrator.mask_integral(block_min_mask(pi), final=SURVIVAL_FACTOR)
    return (-1) ** n * math.factorial(n) * total


def cumulants_via_factorized(d: DistributionModel, N: int, eps_tail: Optional[float] = None,
                             points: Optional[int] = None) -> List[float]:
    _check_simplex_order(N)
    integrator = SimplexIntegrator(d, eps_tail, points)
    kappas = [integrator.first_cumulant()]
    kappas.extend(factorized_cumulant(integrator, n) for n in range(2, N + 1))
    return kappas


def verify_shuffle_relation(d: DistributionModel, m: int, n: int, eps_tail: Optional[float] = None,
                            points: Optional[int] = None) -> float:
    """
    |V^m F(b) V^n F(b) - sum over Sh(m,n) of the shuffled simplex integrals|.

    V^k F is the k-fold iterated integral with F on the lead variable; a
    deck of size zero is the empty iterated integral, equal to 1.
    """
    if m < 0 or n < 0 or m + n > MAX_SHUFFLE_ORDER:
        raise SizeLimitError(f"shuffle relation supports m + n <= {MAX_SHUFFLE_ORDER}, got {m}+{n}")
    if m + n == 0:
        return 0.0
    integrator = SimplexIntegrator(d, eps_tail, points)
    lead = lambda k: [1] + [0] * (k - 1) if k else []
    lhs = integrator.mask_integral(lead(m)) * integrator.mask_integral(lead(n))
    rhs = 0.0
    for s in enumerate_shuffles((m, n)):
        rhs += integrator.mask_integral(block_min_mask(shuffle_to_partition(s)))
    residual = abs(lhs - rhs)
    logger.debug("shuffle relation m=%d n=%d on %s: residual %.3g", m, n, d.name, residual)
    return residual


def cumulants_via_mrl(d: DistributionModel, n: int, eps_tail: Optional[float] = None,
                      points: Optional[int] = None) -> float:
    """
    Reduced formula in t_2 < ... < t_{n-1}: the t_1 integral becomes
    P(t_2) F(t_2), the t_n integral (1 - F(t_{n-1})) R(t_{n-1}).

    P and R enter as sampled profiles, so for n = 3 this is
    6 int P F (2F - 1) (1 - F) R.
    """
    if n not in MRL_ORDERS:
        raise SizeLimitError(f"mean residual life route supports n in {MRL_ORDERS}, got {n}")
    integrator = SimplexIntegrator(d, eps_tail, points)
    F = integrator.F
    nodes = F.nodes
    P, R = mean_residual_life_profiles(d, nodes)
    lead = GridFunction.linear(nodes, P * d.cdf(nodes))
    tail = GridFunction.linear(nodes, R * d.survival(nodes))

    total = 0.0
    for pi in enumerate_partitions(n - 1):
        mask = block_min_mask(pi)
        # mask[0] is the t_1 factor, already absorbed into `lead`
        h = lead
        for position, e in enumerate(mask[1:]):
            if position > 0:
                h = volterra_apply(h)
            if e:
                h = h * F
        value = volterra_apply(h * tail)(integrator.b)
        total += pi.block_count * mobius_to_top(pi) * value
    return (-1) ** n * math.factorial(n) * total
