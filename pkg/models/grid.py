"""
Sampled functions on a shared one-dimensional grid.

A GridFunction is a piecewise polynomial: on cell [x_j, x_{j+1}) it is
sum_d c[j, d] (t - x_j)^d. Node samples of a continuous function become a
piecewise-linear interpolant, node samples of a right-continuous step
function become a piecewise constant. Cumulative integration is exact on
this representation, so on a piecewise-linear function it coincides with
the composite trapezoid rule.

Evaluation and antiderivatives go through scipy's PPoly; products of two
grid functions on the same nodes are formed here.
"""

import logging

import numpy as np
from scipy.interpolate import PPoly

from models.errors import InvalidParameterError

logger = logging.getLogger(__name__)


class GridFunction:
    """Piecewise polynomial on strictly increasing nodes"""

    def __init__(self, nodes: np.ndarray, coefficients: np.ndarray):
        nodes = np.asarray(nodes, dtype=float)
        coefficients = np.asarray(coefficients, dtype=float)
        if nodes.ndim != 1 or nodes.size < 3:
            raise InvalidParameterError("a grid needs at least three nodes")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidParameterError("grid nodes must be strictly increasing")
        if coefficients.ndim != 2 or coefficients.shape[0] != nodes.size - 1:
            raise InvalidParameterError("need one coefficient row per cell")
        self.nodes = nodes
        self.coefficients = coefficients
        self.widths = np.diff(nodes)
        # PPoly stores the highest power first, one column per cell
        self._poly = PPoly(np.ascontiguousarray(coefficients[:, ::-1].T), nodes, extrapolate=True)

    @classmethod
    def _from_ppoly(cls, poly: PPoly) -> "GridFunction":
        return cls(poly.x, poly.c[::-1].T)

    # -- constructors -----------------------------------------------------

    @classmethod
    def linear(cls, nodes: np.ndarray, values: np.ndarray) -> "GridFunction":
        """Piecewise-linear interpolant through (nodes, values)"""
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        slopes = np.diff(values) / np.diff(nodes)
        return cls(nodes, np.column_stack([values[:-1], slopes]))

    @classmethod
    def step(cls, nodes: np.ndarray, values: np.ndarray) -> "GridFunction":
        """Right-continuous step function equal to values[j] on [x_j, x_{j+1})"""
        values = np.asarray(values, dtype=float)
        return cls(nodes, values[:-1, None])

    @classmethod
    def constant(cls, nodes: np.ndarray, value: float = 1.0) -> "GridFunction":
        nodes = np.asarray(nodes, dtype=float)
        return cls(nodes, np.full((nodes.size - 1, 1), float(value)))

    # -- shape --------------------------------------------------------------

    @property
    def lo(self) -> float:
        return float(self.nodes[0])

    @property
    def hi(self) -> float:
        return float(self.nodes[-1])

    @property
    def degree(self) -> int:
        return self.coefficients.shape[1] - 1

    @property
    def values(self) -> np.ndarray:
        """Function values at every node (right limit at interior nodes)"""
        return self._poly(self.nodes)

    def shares_grid(self, other: "GridFunction") -> bool:
        return self.nodes is other.nodes or np.array_equal(self.nodes, other.nodes)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t):
        result = self._poly(np.asarray(t, dtype=float))
        return float(result) if np.ndim(t) == 0 else result

    # -- algebra ------------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return GridFunction(self.nodes, self.coefficients * other)
        if not self.shares_grid(other):
            raise InvalidParameterError("grid functions live on different grids")
        a, b = self.coefficients, other.coefficients
        product = np.zeros((a.shape[0], a.shape[1] + b.shape[1] - 1))
        for d in range(b.shape[1]):
            product[:, d:d + a.shape[1]] += a * b[:, d:d + 1]
        return GridFunction(self.nodes, product)

    __rmul__ = __mul__

    def __add__(self, other: "GridFunction") -> "GridFunction":
        if not self.shares_grid(other):
            raise InvalidParameterError("grid functions live on different grids")
        width = max(self.coefficients.shape[1], other.coefficients.shape[1])
        total = np.zeros((self.coefficients.shape[0], width))
        total[:, :self.coefficients.shape[1]] += self.coefficients
        total[:, :other.coefficients.shape[1]] += other.coefficients
        return GridFunction(self.nodes, total)

    def complement(self) -> "GridFunction":
        """1 - g"""
        coefficients = -self.coefficients.copy()
        coefficients[:, 0] += 1.0
        return GridFunction(self.nodes, coefficients)

    def integrate(self) -> "GridFunction":
        """Running integral from lo, exact on each cell"""
        return self._from_ppoly(self._poly.antiderivative())

    def total(self) -> float:
        """Integral over the whole grid"""
        return float(self._poly.integrate(self.lo, self.hi))

    def __repr__(self) -> str:
        return f"GridFunction(lo={self.lo:.6g}, hi={self.hi:.6g}, cells={self.widths.size}, degree={self.degree})"
