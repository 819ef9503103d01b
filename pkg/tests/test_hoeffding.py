import math

import numpy as np
import pytest

from config.settings import settings
from models.dists import builtin
from models.errors import InvalidParameterError, MemoryBudgetError, SizeLimitError
from models.hoeffding import (
    block_fang_cumulant,
    comonotone,
    comonotone_reduction_check,
    empirical_joint,
    empirical_joint_from_csv,
    hoeffding_covariance,
    independent,
    joint_box,
    marginal_cdf,
    multivariate_iterated,
    multivariate_iterated_grid,
    snapped_samples,
    subset_cdf_on_grid,
    tensor_grid,
)
from models.momentcalc import empirical_moment_table, multivariate_moments_to_cumulant


@pytest.fixture
def bivariate_samples():
    rng = np.random.default_rng(11)
    x = rng.normal(size=1000)
    y = 0.6 * x + 0.8 * rng.normal(size=1000)
    return np.column_stack([x, y])


class TestJointModels:
    def test_full_subset_is_joint_cdf(self, uniform, exponential):
        j = independent([uniform, exponential])
        point = np.array([0.4, 1.2])
        assert marginal_cdf(j, [1, 2])(point) == pytest.approx(j.joint_cdf(point))

    def test_independent_marginal(self, uniform, exponential):
        j = independent([uniform, exponential])
        ts = np.linspace(-0.5, 1.5, 9)[:, None]
        np.testing.assert_allclose(marginal_cdf(j, [1])(ts), uniform.cdf(ts[:, 0]))

    def test_comonotone_pair(self, exponential):
        j = comonotone(exponential, 2)
        assert marginal_cdf(j, [1, 2])(np.array([0.5, 2.0])) == pytest.approx(exponential.cdf(0.5))

    def test_empirical_joint_counts(self):
        j = empirical_joint([[0.0, 0.0], [1.0, 2.0], [2.0, 1.0]])
        assert j.joint_cdf(np.array([1.0, 2.0])) == pytest.approx(2 / 3)
        assert marginal_cdf(j, [2])(np.array([1.0])) == pytest.approx(2 / 3)

    def test_empirical_from_csv(self, tmp_path):
        path = tmp_path / "joint.csv"
        path.write_text("x,y\n0,1\n2,3\n")
        j = empirical_joint_from_csv(path)
        assert j.n == 2
        assert j.joint_cdf(np.array([0.0, 1.0])) == pytest.approx(0.5)

    def test_bad_subset(self, uniform):
        with pytest.raises(InvalidParameterError):
            marginal_cdf(independent([uniform, uniform]), [3])

    def test_sampling(self, uniform, rng):
        draws = comonotone(uniform, 3).sample(50, rng)
        assert draws.shape == (50, 3)
        assert np.all(draws[:, 0] == draws[:, 2])


class TestIteratedIntegrals:
    def test_zero_index_is_joint_cdf_at_corner(self, uniform, exponential):
        j = independent([uniform, exponential])
        assert multivariate_iterated(j, (0, 0)) == pytest.approx(1.0, abs=1e-7)

    def test_product_factorization(self, uniform, exponential, normal):
        for k in [(1, 1), (2, 1), (1, 2)]:
            joint = multivariate_iterated(independent([uniform, exponential]), k)
            first = multivariate_iterated(independent([uniform]), (k[0],), points=201)
            second = multivariate_iterated(independent([exponential]), (k[1],), points=201)
            assert joint == pytest.approx(first * second, rel=1e-12)
        triple = multivariate_iterated(independent([uniform, exponential, normal]), (1, 1, 1))
        parts = [multivariate_iterated(independent([d]), (1,), points=101) for d in (uniform, exponential, normal)]
        assert triple == pytest.approx(math.prod(parts), rel=1e-12)

    @pytest.mark.parametrize("k", [(1, 1), (2, 1), (0, 3)])
    def test_coordinate_order(self, k, exponential):
        j = comonotone(exponential, 2)
        forward = multivariate_iterated(j, k, order=[0, 1])
        backward = multivariate_iterated(j, k, order=[1, 0])
        assert forward == pytest.approx(backward, rel=1e-10)

    def test_coordinate_order_three_variables(self, uniform):
        j = comonotone(uniform, 3)
        values = [multivariate_iterated(j, (1, 2, 1), order=order) for order in ([0, 1, 2], [2, 0, 1], [1, 2, 0])]
        assert values[1] == pytest.approx(values[0], rel=1e-10)
        assert values[2] == pytest.approx(values[0], rel=1e-10)

    def test_levels_are_monotone(self, exponential):
        cumulative = multivariate_iterated_grid(comonotone(exponential, 2), (1, 1))
        level = cumulative.levels[(1, 1)]
        assert np.all(np.diff(level, axis=0) >= -1e-14)
        assert np.all(np.diff(level, axis=1) >= -1e-14)
        np.testing.assert_array_equal(cumulative.levels[(0, 0)][-1, -1], cumulative.levels[(0, 0)].max())

    def test_monte_carlo(self, uniform, exponential, rng):
        j = independent([uniform, exponential])
        k = (1, 2)
        corner = np.array([hi for _, hi in tensor_grid(j).box])
        draws = j.sample(200_000, rng)
        values = np.prod(np.clip(corner - draws, 0.0, None) ** np.array(k)
                         / np.array([math.factorial(v) for v in k]), axis=1)
        standard_error = values.std(ddof=1) / math.sqrt(values.size)
        assert abs(multivariate_iterated(j, k) - values.mean()) <= 4 * standard_error

    def test_limits(self, uniform):
        with pytest.raises(SizeLimitError):
            multivariate_iterated(independent([uniform, uniform]), (3, 2))
        with pytest.raises(SizeLimitError):
            multivariate_iterated(independent([uniform] * 4), (1, 0, 0, 0))
        with pytest.raises(InvalidParameterError):
            multivariate_iterated(independent([uniform, uniform]), (1, 1), order=[0, 0])

    def test_memory_budget(self, uniform, monkeypatch):
        monkeypatch.setattr(settings, "max_tensor_cells", 1000)
        with pytest.raises(MemoryBudgetError):
            hoeffding_covariance(comonotone(uniform, 2))


class TestHoeffding:
    def test_independent_pair(self, uniform, exponential):
        assert abs(hoeffding_covariance(independent([uniform, exponential]))) <= 1e-10

    def test_comonotone_uniform(self, uniform):
        assert hoeffding_covariance(comonotone(uniform, 2)) == pytest.approx(1 / 12, abs=1e-5)

    def test_comonotone_integrand_is_nonnegative(self, exponential):
        j = comonotone(exponential, 2)
        grid = tensor_grid(j)
        joint = subset_cdf_on_grid(j, grid, [0, 1])
        product = subset_cdf_on_grid(j, grid, [0]) * subset_cdf_on_grid(j, grid, [1])
        assert np.all(joint - product >= 0.0)

    def test_empirical_matches_snapped_covariance(self, bivariate_samples):
        j = empirical_joint(bivariate_samples)
        snapped = snapped_samples(j)
        expected = float(multivariate_moments_to_cumulant(empirical_moment_table(snapped)))
        assert hoeffding_covariance(j) == pytest.approx(expected, abs=1e-9)

    def test_snapping_bias_is_within_one_step(self, bivariate_samples):
        j = empirical_joint(bivariate_samples)
        grid = tensor_grid(j)
        steps = np.array([axis[1] - axis[0] for axis in grid.axes])
        moved = np.abs(snapped_samples(j) - bivariate_samples)
        assert np.all(moved <= steps / 2 + 1e-12)
        raw = float(multivariate_moments_to_cumulant(empirical_moment_table(bivariate_samples)))
        spread = np.abs(bivariate_samples).max(axis=0)
        assert abs(hoeffding_covariance(j) - raw) <= steps.max() * spread.sum()

    def test_needs_two_variables(self, uniform):
        with pytest.raises(InvalidParameterError):
            hoeffding_covariance(comonotone(uniform, 3))

    def test_empirical_box(self, bivariate_samples):
        box = joint_box(empirical_joint(bivariate_samples))
        assert box[0] == (bivariate_samples[:, 0].min(), bivariate_samples[:, 0].max())


class TestBlockFang:
    def test_second_order_is_hoeffding(self, exponential, bivariate_samples):
        for j in (comonotone(exponential, 2), empirical_joint(bivariate_samples)):
            assert block_fang_cumulant(j, 2) == hoeffding_covariance(j)

    @pytest.mark.slow
    def test_comonotone_exponential_triple(self, exponential):
        assert block_fang_cumulant(comonotone(exponential, 3), 3) == pytest.approx(2.0, rel=2e-2)

    @pytest.mark.slow
    def test_independent_triple(self, uniform, exponential, normal):
        scale = math.prod(math.sqrt(v) for v in (1 / 12, 1.0, 1.0))
        assert abs(block_fang_cumulant(independent([uniform, exponential, normal]), 3)) <= 2e-2 * scale

    @pytest.mark.slow
    def test_empirical_triple_matches_moment_table(self, rng):
        x = rng.exponential(size=300)
        samples = np.column_stack([x, x + rng.normal(size=300), x ** 2])
        j = empirical_joint(samples)
        expected = float(multivariate_moments_to_cumulant(empirical_moment_table(snapped_samples(j))))
        assert block_fang_cumulant(j, 3) == pytest.approx(expected, abs=1e-6 * max(1.0, abs(expected)))

    def test_order_limits(self, uniform):
        with pytest.raises(SizeLimitError):
            block_fang_cumulant(comonotone(uniform, 4), 4)
        with pytest.raises(InvalidParameterError):
            block_fang_cumulant(comonotone(uniform, 2), 3)


class TestComonotoneReduction:
    @pytest.mark.parametrize("n", [2, 3])
    def test_uniform(self, uniform, n):
        assert comonotone_reduction_check(uniform, n) <= 1e-4

    @pytest.mark.parametrize("n", [2, 3])
    def test_exponential(self, exponential, n):
        assert comonotone_reduction_check(exponential, n) <= 1e-3
