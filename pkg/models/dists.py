"""
Distribution models: CDFs, support truncation, reference moments and
mean residual life functions.

Models never expose a density; every downstream computation integrates
F (or 1 - F) only.
"""

import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, stats

from config.settings import settings
from data.loaders import PathLike, load_grid_cdf, load_samples
from models.errors import InvalidParameterError, ModelError, NumericalGuardError
from models.grid import GridFunction
from models.momentcalc import MomentSequence

logger = logging.getLogger(__name__)

KINDS = ("analytic", "grid", "empirical")
BUILTIN_NAMES = ("uniform01", "exponential1", "stdnormal", "twopoint")

_BISECTION_ITERATIONS = 200
_EXPANSIONS = 64


class DistributionModel:
    """
    Univariate distribution described by its CDF.

    Immutable after construction; `cdf` accepts scalars or arrays and
    always returns values clamped to [0, 1].
    """

    def __init__(
        self,
        name: str,
        kind: str,
        cdf: Callable[[np.ndarray], np.ndarray],
        support_hint: Tuple[float, float],
        *,
        survival: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        moment_fn: Optional[Callable[[int], Fraction]] = None,
        breakpoints: Sequence[float] = (),
        is_step: bool = False,
        sampler: Optional[Callable[[int, np.random.Generator], np.ndarray]] = None,
        samples: Optional[np.ndarray] = None,
    ):
        if kind not in KINDS:
            raise InvalidParameterError(f"unknown model kind {kind!r}")
        a, b = float(support_hint[0]), float(support_hint[1])
        if not a < b:
            raise InvalidParameterError(f"support hint must satisfy a < b, got ({a}, {b})")
        self.name = name
        self.kind = kind
        self._cdf = cdf
        self._survival = survival
        self.support_hint = (a, b)
        self._moment_fn = moment_fn
        self.breakpoints = np.unique(np.asarray(breakpoints, dtype=float))
        self.is_step = is_step
        self._sampler = sampler
        self.samples = samples

    def cdf(self, t):
        values = np.clip(self._cdf(np.asarray(t, dtype=float)), 0.0, 1.0)
        return float(values) if np.ndim(values) == 0 else values

    def survival(self, t):
        """1 - F(t), taken from the model's own tail function when it has one"""
        t = np.asarray(t, dtype=float)
        raw = self._survival(t) if self._survival is not None else 1.0 - self._cdf(t)
        values = np.clip(raw, 0.0, 1.0)
        return float(values) if np.ndim(values) == 0 else values

    @property
    def has_reference_moments(self) -> bool:
        return self._moment_fn is not None

    def reference_moments(self, order: int) -> Optional[MomentSequence]:
        """Exact moments m_1..m_order for builtins, None otherwise"""
        if self._moment_fn is None:
            return None
        return MomentSequence(tuple(self._moment_fn(n) for n in range(1, order + 1)))

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        if self._sampler is None:
            raise ModelError(f"model {self.name} has no sampler")
        return self._sampler(size, rng)

    def __repr__(self) -> str:
        return f"DistributionModel(name={self.name!r}, kind={self.kind!r})"


# -- builtins -----------------------------------------------------------------

def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def _frozen_model(name: str, frozen, hint: Tuple[float, float], moment_fn, breakpoints=()) -> DistributionModel:
    return DistributionModel(
        name,
        "analytic",
        frozen.cdf,
        hint,
        survival=frozen.sf,
        moment_fn=moment_fn,
        breakpoints=breakpoints,
        sampler=lambda size, rng: frozen.rvs(size=size, random_state=rng),
    )


def _as_fraction(value) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(str(value))


def builtin(name: str, p=None, x0=None, x1=None) -> DistributionModel:
    """
    Builtin test distributions with exact reference moments:
    uniform01, exponential1, stdnormal and twopoint(p, x0, x1).
    """
    if name == "uniform01":
        return _frozen_model(
            name, stats.uniform(loc=0.0, scale=1.0), (-0.01, 1.01),
            lambda n: Fraction(1, n + 1), breakpoints=(0.0, 1.0),
        )
    if name == "exponential1":
        return _frozen_model(
            name, stats.expon(), (-0.01, 40.0),
            lambda n: Fraction(math.factorial(n)), breakpoints=(0.0,),
        )
    if name == "stdnormal":
        return _frozen_model(
            name, stats.norm(), (-10.0, 10.0),
            lambda n: Fraction(0) if n % 2 else Fraction(_double_factorial(n - 1)),
        )
    if name == "twopoint":
        if p is None or x0 is None or x1 is None:
            raise InvalidParameterError("twopoint needs p, x0 and x1")
        p_q, x0_q, x1_q = _as_fraction(p), _as_fraction(x0), _as_fraction(x1)
        if not 0 < p_q < 1:
            raise InvalidParameterError(f"twopoint needs 0 < p < 1, got {p}")
        if not x0_q < x1_q:
            raise InvalidParameterError(f"twopoint needs x0 < x1, got {x0}, {x1}")
        pf, lo, hi = float(p_q), float(x0_q), float(x1_q)
        span = hi - lo

        def cdf(t):
            return np.where(t < lo, 0.0, np.where(t < hi, 1.0 - pf, 1.0))

        def survival(t):
            return np.where(t < lo, 1.0, np.where(t < hi, pf, 0.0))

        return DistributionModel(
            f"twopoint({p},{x0},{x1})",
            "analytic",
            cdf,
            (lo - 0.01 * span, hi + 0.01 * span),
            survival=survival,
            moment_fn=lambda n: (1 - p_q) * x0_q ** n + p_q * x1_q ** n,
            breakpoints=(lo, hi),
            is_step=True,
            sampler=lambda size, rng: np.where(rng.random(size) < pf, hi, lo),
        )
    raise InvalidParameterError(f"unknown builtin {name!r}; choose from {', '.join(BUILTIN_NAMES)}")


# -- data-backed models -------------------------------------------------------

def empirical_from_samples(xs: Sequence[float], grid_points: Optional[int] = None) -> DistributionModel:
    """Right-continuous step CDF F(t) = #{x_i <= t} / N"""
    data = np.sort(np.asarray(xs, dtype=float).ravel())
    if data.size == 0:
        raise InvalidParameterError("empirical model needs at least one sample")
    if not np.all(np.isfinite(data)):
        raise InvalidParameterError("empirical samples must be finite")

    points = grid_points or settings.grid_points
    span = max(float(data[-1] - data[0]), 1.0)
    slack = span / (points - 1)
    count = data.size

    def cdf(t):
        return np.searchsorted(data, t, side="right") / count

    def survival(t):
        return (count - np.searchsorted(data, t, side="right")) / count

    return DistributionModel(
        f"empirical(n={count})",
        "empirical",
        cdf,
        (float(data[0]) - slack, float(data[-1]) + slack),
        survival=survival,
        breakpoints=data,
        is_step=True,
        sampler=lambda size, rng: rng.choice(data, size=size, replace=True),
        samples=data,
    )


def grid_model(t: Sequence[float], F: Sequence[float], name: str = "grid") -> DistributionModel:
    """Piecewise-linear CDF through tabulated (t, F); 0 left and 1 right of the table"""
    ts = np.asarray(t, dtype=float)
    fs = np.asarray(F, dtype=float)
    if ts.ndim != 1 or ts.size < 2 or ts.size != fs.size:
        raise InvalidParameterError("grid CDF needs matching t and F columns with at least two rows")
    if np.any(np.diff(ts) <= 0):
        raise InvalidParameterError("grid CDF t values must be strictly increasing")
    if np.any(np.diff(fs) < 0) or fs.min() < 0 or fs.max() > 1:
        raise InvalidParameterError("grid CDF F values must be nondecreasing within [0, 1]")

    def cdf(x):
        return np.interp(x, ts, fs, left=0.0, right=1.0)

    span = float(ts[-1] - ts[0])
    return DistributionModel(
        name, "grid", cdf, (float(ts[0]) - 0.01 * span, float(ts[-1]) + 0.01 * span), breakpoints=ts,
    )


# -- truncation ---------------------------------------------------------------

def _expand(fn, start: float, width: float, accept, direction: float) -> float:
    point = start
    for _ in range(_EXPANSIONS):
        if accept(fn(point)):
            return point
        point += direction * width
        width *= 2.0
    raise ModelError("support truncation failed: tail condition never met")


def _bisect(fn, good: float, bad: float, accept) -> float:
    """Move `good` towards `bad` while keeping accept(fn(good))"""
    for _ in range(_BISECTION_ITERATIONS):
        mid = 0.5 * (good + bad)
        if mid == good or mid == bad:
            break
        if accept(fn(mid)):
            good = mid
        else:
            bad = mid
        if abs(bad - good) <= 1e-13 * max(1.0, abs(good)):
            break
    return good


def truncate_support(d: DistributionModel, eps_tail: Optional[float] = None) -> Tuple[float, float]:
    """
    Tightest (a, b) with F(a) <= eps_tail and 1 - F(b) <= eps_tail.

    The upper end is searched on the survival function, which keeps full
    relative precision where F itself rounds to 1. Step models are widened
    slightly so no atom sits on the boundary.
    """
    eps = settings.eps_tail if eps_tail is None else float(eps_tail)
    if not 0 < eps < 0.25:
        raise InvalidParameterError(f"eps_tail must lie in (0, 1/4), got {eps}")

    tail_ok = lambda value: value <= eps
    hint_a, hint_b = d.support_hint
    width = hint_b - hint_a

    a_good = _expand(d.cdf, hint_a, width, tail_ok, -1.0)
    b_good = _expand(d.survival, hint_b, width, tail_ok, +1.0)
    if tail_ok(d.cdf(b_good)) or tail_ok(d.survival(a_good)):
        raise ModelError(f"cdf of {d.name} is constant across its support hint")

    a = _bisect(d.cdf, a_good, b_good, tail_ok)
    b = _bisect(d.survival, b_good, a_good, tail_ok)
    if not a < b or d.cdf(a) > d.cdf(b):
        raise ModelError(f"cdf of {d.name} is not monotone (a={a}, b={b})")

    if d.is_step:
        pad = 1e-3 * max(b - a, 1.0)
        a, b = a - pad, b + pad
    logger.debug("truncated %s to (%.12g, %.12g) at eps=%g", d.name, a, b, eps)
    return a, b


def grid_nodes(d: DistributionModel, a: float, b: float, points: Optional[int] = None) -> np.ndarray:
    """Uniform nodes on [a, b] merged with the model's breakpoints inside (a, b)"""
    points = points or settings.grid_points
    if points < 3:
        raise InvalidParameterError(f"grid needs at least three points, got {points}")
    nodes = np.linspace(a, b, points)
    inside = d.breakpoints[(d.breakpoints > a) & (d.breakpoints < b)]
    return np.union1d(nodes, inside) if inside.size else nodes


def _sampled(d: DistributionModel, nodes: np.ndarray, values: np.ndarray) -> GridFunction:
    return GridFunction.step(nodes, values) if d.is_step else GridFunction.linear(nodes, values)


def cdf_grid(d: DistributionModel, a: float, b: float, points: Optional[int] = None) -> GridFunction:
    """
    F on (a, b) as a GridFunction: uniform nodes plus the model's breakpoints.

    Step models become exact piecewise constants, continuous models the
    piecewise-linear interpolant.
    """
    nodes = grid_nodes(d, a, b, points)
    return _sampled(d, nodes, d.cdf(nodes))


def survival_grid(d: DistributionModel, a: float, b: float, points: Optional[int] = None) -> GridFunction:
    """1 - F on (a, b), sampled from the model's survival function"""
    nodes = grid_nodes(d, a, b, points)
    return _sampled(d, nodes, d.survival(nodes))


# -- mean residual life -------------------------------------------------------

def _guard_eps(eps_guard: Optional[float]) -> float:
    return settings.eps_guard if eps_guard is None else eps_guard


def mean_residual_life_R(d: DistributionModel, y: float, eps_guard: Optional[float] = None,
                         points: Optional[int] = None) -> float:
    """R(y) = int_y^inf (1 - F) / (1 - F(y))"""
    guard = _guard_eps(eps_guard)
    tail = d.survival(y)
    if tail <= guard:
        raise NumericalGuardError(f"R({y}) undefined: 1 - F(y) = {tail:.3g} is below the guard")
    # truncate far enough that the neglected tail is negligible relative to 1 - F(y)
    _, b = truncate_support(d, min(settings.eps_tail, 1e-6 * tail))
    if b <= y:
        return 0.0
    return max(survival_grid(d, y, b, points).total(), 0.0) / tail


def mean_residual_life_P(d: DistributionModel, y: float, eps_guard: Optional[float] = None,
                         points: Optional[int] = None) -> float:
    """P(y) = int_-inf^y F / F(y)"""
    guard = _guard_eps(eps_guard)
    mass = d.cdf(y)
    if mass <= guard:
        raise NumericalGuardError(f"P({y}) undefined: F(y) = {mass:.3g} is below the guard")
    a, _ = truncate_support(d, min(settings.eps_tail, 1e-6 * mass))
    if a >= y:
        return 0.0
    return max(cdf_grid(d, a, y, points).total(), 0.0) / mass


def mean_residual_life_profiles(d: DistributionModel, nodes: np.ndarray,
                                eps_guard: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    P and R at every node of a grid spanning the truncated support.

    Cell integrals use the trapezoid rule for continuous models and the
    left value for step models, which is exact for a right-continuous step
    CDF. Entries where F (for P) or 1 - F (for R) falls below the guard are
    set to zero.
    """
    guard = _guard_eps(eps_guard)
    nodes = np.asarray(nodes, dtype=float)
    F = d.cdf(nodes)
    S = d.survival(nodes)
    if d.is_step:
        widths = np.diff(nodes)
        lower = np.concatenate([[0.0], np.cumsum(F[:-1] * widths)])
        upper_cells = S[:-1] * widths
    else:
        lower = integrate.cumulative_trapezoid(F, nodes, initial=0.0)
        upper_cells = np.diff(integrate.cumulative_trapezoid(S, nodes, initial=0.0))
    upper = np.concatenate([np.cumsum(upper_cells[::-1])[::-1], [0.0]])

    with np.errstate(divide="ignore", invalid="ignore"):
        P = np.where(F > guard, lower / F, 0.0)
        R = np.where(S > guard, upper / S, 0.0)
    if np.any(P < 0.0) or np.any(R < 0.0):
        raise NumericalGuardError(f"mean residual life of {d.name} went negative")
    logger.debug("mrl profiles of %s on %d nodes", d.name, nodes.size)
    return P, R


# -- file-backed constructors ---------------------------------------------------

def empirical_from_file(path: PathLike, grid_points: Optional[int] = None) -> DistributionModel:
    return empirical_from_samples(load_samples(path), grid_points)


def grid_from_csv(path: PathLike) -> DistributionModel:
    t, F = load_grid_cdf(path)
    return grid_model(t, F, name=f"grid({Path(path).name})")
