"""
Multivariate side: joint CDF models on tensor grids, iterated integrals
F^[k_1..k_n], Hoeffding's covariance formula and the Block-Fang cumulant
formula for n <= 3.

Continuous models use the tensor trapezoid rule with one Richardson step
from the nested half-resolution grid. Empirical models snap their sample
coordinates onto grid nodes; the joint CDF is then constant on every cell
and the left-rectangle rule integrates it exactly.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from config.settings import settings
from data.loaders import PathLike, load_joint_samples
from models.dists import DistributionModel, truncate_support
from models.errors import InvalidParameterError, MemoryBudgetError, SizeLimitError
from models.partitions import enumerate_partitions, mobius_to_top
from models.volterra import cumulants_via_theorem1

logger = logging.getLogger(__name__)

JOINT_KINDS = ("independent", "comonotone", "empirical")
MAX_ITERATED_VARIABLES = 3
MAX_ITERATED_ORDER = 4

TRAPEZOID = "trapezoid"
RECTANGLE = "rectangle"


class JointDistributionModel:
    """n-variate joint distribution: independent product, comonotone, or empirical"""

    def __init__(self, n: int, kind: str, *, marginals: Sequence[DistributionModel] = (),
                 samples: Optional[np.ndarray] = None):
        if kind not in JOINT_KINDS:
            raise InvalidParameterError(f"unknown joint kind {kind!r}")
        if n < 1:
            raise InvalidParameterError(f"need at least one variable, got {n}")
        self.n = n
        self.kind = kind
        self.marginals = list(marginals)
        self.samples = samples

    @property
    def is_step(self) -> bool:
        return self.kind == "empirical"

    def joint_cdf(self, t) -> np.ndarray:
        """F(t_1..t_n) for points given along the last axis"""
        points = np.asarray(t, dtype=float)
        if points.shape[-1] != self.n:
            raise InvalidParameterError(f"expected {self.n} coordinates, got {points.shape[-1]}")
        if self.kind == "independent":
            columns = [self.marginals[i].cdf(points[..., i]) for i in range(self.n)]
            return np.prod(np.stack(columns, axis=-1), axis=-1)
        if self.kind == "comonotone":
            return self.marginals[0].cdf(points.min(axis=-1))
        flat = points.reshape(-1, self.n)
        below = np.all(self.samples[None, :, :] <= flat[:, None, :], axis=-1)
        return below.mean(axis=1).reshape(points.shape[:-1])

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "independent":
            return np.column_stack([m.sample(size, rng) for m in self.marginals])
        if self.kind == "comonotone":
            return np.repeat(self.marginals[0].sample(size, rng)[:, None], self.n, axis=1)
        return self.samples[rng.integers(0, self.samples.shape[0], size=size)]

    def __repr__(self) -> str:
        return f"JointDistributionModel(n={self.n}, kind={self.kind!r})"


def independent(marginals: Sequence[DistributionModel]) -> JointDistributionModel:
    return JointDistributionModel(len(marginals), "independent", marginals=marginals)


def comonotone(d: DistributionModel, n: int) -> JointDistributionModel:
    """X_1 = ... = X_n = X, so F_I(t) = F(min_{i in I} t_i)"""
    return JointDistributionModel(n, "comonotone", marginals=[d] * n)


def empirical_joint(samples) -> JointDistributionModel:
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[0] == 0 or data.shape[1] == 0:
        raise InvalidParameterError("joint samples must be a nonempty (N, n) array")
    if not np.all(np.isfinite(data)):
        raise InvalidParameterError("joint samples must be finite")
    return JointDistributionModel(data.shape[1], "empirical", samples=data)


def empirical_joint_from_csv(path: PathLike) -> JointDistributionModel:
    return empirical_joint(load_joint_samples(path))


def marginal_cdf(j: JointDistributionModel, I: Sequence[int]) -> Callable[[np.ndarray], np.ndarray]:
    """F_I on |I| coordinates (1-based indices); the others are sent to +inf"""
    subset = sorted(set(int(i) for i in I))
    if not subset or subset[0] < 1 or subset[-1] > j.n:
        raise InvalidParameterError(f"invalid coordinate subset {list(I)} for n={j.n}")

    def cdf(t):
        values = np.asarray(t, dtype=float)
        full = np.full(values.shape[:-1] + (j.n,), np.inf)
        for k, i in enumerate(subset):
            full[..., i - 1] = values[..., k]
        return j.joint_cdf(full)

    return cdf


# -- tensor grids -------------------------------------------------------------

@dataclass
class TensorGrid:
    """Per-axis nodes over the truncated box plus the quadrature rule"""

    axes: List[np.ndarray]
    rule: str
    snapped: Optional[np.ndarray] = None  # empirical sample indices per axis

    @property
    def box(self) -> List[Tuple[float, float]]:
        return [(float(x[0]), float(x[-1])) for x in self.axes]

    @property
    def points(self) -> int:
        return self.axes[0].size


@dataclass
class MultiIndexCumulative:
    """F^[k] on the tensor grid for the requested multi-indices"""

    grid: TensorGrid
    levels: Dict[Tuple[int, ...], np.ndarray]

    def corner(self, k: Tuple[int, ...]) -> float:
        return float(self.levels[tuple(k)][(-1,) * len(k)])


def _check_budget(n: int, points: int):
    cells = points ** n
    if cells > settings.max_tensor_cells:
        raise MemoryBudgetError(f"{points}^{n} = {cells} grid cells exceed the budget of {settings.max_tensor_cells}")


def joint_box(j: JointDistributionModel, eps_tail: Optional[float] = None) -> List[Tuple[float, float]]:
    """Per-coordinate truncation bounds (continuous) or sample range (empirical)"""
    if j.is_step:
        return [(float(j.samples[:, i].min()), float(j.samples[:, i].max())) for i in range(j.n)]
    eps = settings.joint_eps_tail if eps_tail is None else eps_tail
    return [truncate_support(m, eps) for m in j.marginals]


def tensor_grid(j: JointDistributionModel, points: Optional[int] = None,
                eps_tail: Optional[float] = None) -> TensorGrid:
    points = points or settings.joint_points.get(j.n, 101)
    if points < 5 or points % 2 == 0:
        raise InvalidParameterError(f"tensor grids need an odd point count >= 5, got {points}")
    _check_budget(j.n, points)

    if not j.is_step:
        axes = [np.linspace(a, b, points) for a, b in joint_box(j, eps_tail)]
        return TensorGrid(axes=axes, rule=TRAPEZOID)

    # min sits on node 1 and max on node points-2; node 0 stays below every sample
    axes, indices = [], []
    for lo, hi in joint_box(j):
        span = hi - lo
        if span > 0:
            step = span / (points - 3)
            nodes = lo - step + step * np.arange(points)
        else:
            nodes = np.linspace(lo - 1.0, hi + 1.0, points)
        axes.append(nodes)
    for i, nodes in enumerate(axes):
        step = nodes[1] - nodes[0]
        idx = np.rint((j.samples[:, i] - nodes[0]) / step).astype(int)
        indices.append(np.clip(idx, 1, points - 2))
    return TensorGrid(axes=axes, rule=RECTANGLE, snapped=np.column_stack(indices))


def snapped_samples(j: JointDistributionModel, points: Optional[int] = None) -> np.ndarray:
    """Empirical samples moved to their grid nodes: the measure the grid integrates exactly"""
    if not j.is_step:
        raise InvalidParameterError("only empirical joint models are snapped")
    grid = tensor_grid(j, points)
    return np.column_stack([grid.axes[i][grid.snapped[:, i]] for i in range(j.n)])


def _broadcast_shape(n: int, axis: int, size: int) -> Tuple[int, ...]:
    shape = [1] * n
    shape[axis] = size
    return tuple(shape)


def subset_cdf_on_grid(j: JointDistributionModel, grid: TensorGrid, subset: Sequence[int]) -> np.ndarray:
    """F_B on the tensor grid, broadcastable (size 1 along axes outside B); 0-based axes"""
    n, points = j.n, grid.points
    subset = sorted(subset)
    if j.kind == "independent":
        result = np.ones((1,) * n)
        for i in subset:
            result = result * j.marginals[i].cdf(grid.axes[i]).reshape(_broadcast_shape(n, i, points))
        return result
    if j.kind == "comonotone":
        lowest = None
        for i in subset:
            axis = grid.axes[i].reshape(_broadcast_shape(n, i, points))
            lowest = axis if lowest is None else np.minimum(lowest, axis)
        return j.marginals[0].cdf(lowest)

    counts = np.zeros((points,) * len(subset))
    np.add.at(counts, tuple(grid.snapped[:, i] for i in subset), 1.0)
    for axis in range(len(subset)):
        counts = np.cumsum(counts, axis=axis)
    shape = [1] * n
    for i in subset:
        shape[i] = points
    return (counts / j.samples.shape[0]).reshape(shape)


def _cumulate(values: np.ndarray, nodes: np.ndarray, axis: int, rule: str) -> np.ndarray:
    """Running integral along one axis, 0 at the lower end"""
    if rule == TRAPEZOID:
        return integrate.cumulative_trapezoid(values, x=nodes, axis=axis, initial=0)
    moved = np.moveaxis(values, axis, -1)
    cells = moved[..., :-1] * np.diff(nodes)
    running = np.concatenate([np.zeros(moved.shape[:-1] + (1,)), np.cumsum(cells, axis=-1)], axis=-1)
    return np.moveaxis(running, -1, axis)


def _box_integral_once(values: np.ndarray, axes: Sequence[np.ndarray], rule: str) -> float:
    result = values
    for axis in range(len(axes) - 1, -1, -1):
        nodes = axes[axis]
        if rule == TRAPEZOID:
            result = integrate.trapezoid(result, x=nodes, axis=axis)
        else:
            moved = np.moveaxis(result, axis, -1)
            result = np.sum(moved[..., :-1] * np.diff(nodes), axis=-1)
    return float(result)


def box_integral(values: np.ndarray, grid: TensorGrid) -> float:
    """Integral over the box; trapezoid values get one Richardson step"""
    fine = _box_integral_once(values, grid.axes, grid.rule)
    if grid.rule != TRAPEZOID:
        return fine
    coarse_slice = tuple(slice(None, None, 2) for _ in grid.axes)
    coarse = _box_integral_once(values[coarse_slice], [x[::2] for x in grid.axes], grid.rule)
    return (4.0 * fine - coarse) / 3.0


def multivariate_iterated_grid(j: JointDistributionModel, k: Sequence[int], order: Optional[Sequence[int]] = None,
                               points: Optional[int] = None, eps_tail: Optional[float] = None) -> MultiIndexCumulative:
    """
    F^[k] on the tensor grid: integrate k_i times along axis i, axes taken
    in `order` (default 0..n-1). On step models the first pass along an
    axis uses the rectangle rule and later passes the trapezoid rule.
    """
    k = tuple(int(v) for v in k)
    if j.n > MAX_ITERATED_VARIABLES:
        raise SizeLimitError(f"iterated integrals support n <= {MAX_ITERATED_VARIABLES}, got {j.n}")
    if len(k) != j.n or any(v < 0 for v in k) or sum(k) > MAX_ITERATED_ORDER:
        raise SizeLimitError(f"multi-index {k} invalid: need {j.n} nonnegative entries summing to <= {MAX_ITERATED_ORDER}")
    order = list(range(j.n)) if order is None else list(order)
    if sorted(order) != list(range(j.n)):
        raise InvalidParameterError(f"axis order {order} is not a permutation of 0..{j.n - 1}")

    grid = tensor_grid(j, points, eps_tail)
    values = np.broadcast_to(subset_cdf_on_grid(j, grid, range(j.n)), (grid.points,) * j.n).copy()
    levels = {(0,) * j.n: values}
    current = values
    for axis in order:
        for repeat in range(k[axis]):
            rule = grid.rule if repeat == 0 else TRAPEZOID
            current = _cumulate(current, grid.axes[axis], axis, rule)
    levels[k] = current
    return MultiIndexCumulative(grid=grid, levels=levels)


def multivariate_iterated(j: JointDistributionModel, k: Sequence[int], order: Optional[Sequence[int]] = None,
                          points: Optional[int] = None, eps_tail: Optional[float] = None) -> float:
    """F^[k_1..k_n] at the upper box corner"""
    return multivariate_iterated_grid(j, k, order, points, eps_tail).corner(tuple(k))


def _hoeffding_integrand(j: JointDistributionModel, grid: TensorGrid) -> np.ndarray:
    joint = subset_cdf_on_grid(j, grid, [0, 1])
    product = subset_cdf_on_grid(j, grid, [0]) * subset_cdf_on_grid(j, grid, [1])
    return np.broadcast_to(joint - product, (grid.points, grid.points))


def hoeffding_covariance(j: JointDistributionModel, points: Optional[int] = None,
                         eps_tail: Optional[float] = None) -> float:
    """Cov(X_1, X_2) = int int F(t_1,t_2) - F_1(t_1) F_2(t_2)"""
    if j.n != 2:
        raise InvalidParameterError(f"Hoeffding's formula needs a bivariate model, got n={j.n}")
    grid = tensor_grid(j, points, eps_tail)
    return box_integral(_hoeffding_integrand(j, grid), grid)


def block_fang_cumulant(j: JointDistributionModel, n: Optional[int] = None, points: Optional[int] = None,
                        eps_tail: Optional[float] = None) -> float:
    """kappa_n(X_1..X_n) = (-1)^n int sum_pi mu(pi,1) prod_B F_B"""
    n = j.n if n is None else n
    if n not in (2, 3):
        raise SizeLimitError(f"Block-Fang is implemented for n in (2, 3), got {n}")
    if n != j.n:
        raise InvalidParameterError(f"order {n} must match the model dimension {j.n}")
    if n == 2:
        return hoeffding_covariance(j, points, eps_tail)

    grid = tensor_grid(j, points, eps_tail)
    shape = (grid.points,) * n
    cache: Dict[Tuple[int, ...], np.ndarray] = {}
    integrand = np.zeros(shape)
    for pi in enumerate_partitions(n):
        term = np.ones((1,) * n)
        for block in pi.blocks:
            axes = tuple(i - 1 for i in block)
            if axes not in cache:
                cache[axes] = subset_cdf_on_grid(j, grid, axes)
            term = term * cache[axes]
        integrand += mobius_to_top(pi) * np.broadcast_to(term, shape)
    value = (-1) ** n * box_integral(integrand, grid)
    logger.debug("Block-Fang kappa_%d for %r on %d^%d grid: %.10g", n, j, grid.points, n, value)
    return value


def comonotone_reduction_check(d: DistributionModel, n: int, points: Optional[int] = None) -> float:
    """|Block-Fang on (X,..,X) - univariate simplex route| for n in (2, 3)"""
    if n not in (2, 3):
        raise SizeLimitError(f"comonotone reduction is checked for n in (2, 3), got {n}")
    multivariate = block_fang_cumulant(comonotone(d, n), n, points)
    univariate = cumulants_via_theorem1(d, n)[n - 1]
    return abs(multivariate - univariate)
