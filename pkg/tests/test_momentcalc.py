import itertools
from fractions import Fraction
from math import factorial

import numpy as np
import pytest

from models.errors import InvalidParameterError, SizeLimitError
from models.momentcalc import (
    CumulantSequence,
    MomentSequence,
    MultivariateMomentTable,
    cumulants_to_moments,
    diagonal_moment_table,
    empirical_moment_table,
    empirical_moments,
    moments_of_independent_sum,
    moments_to_cumulants,
    moments_to_cumulants_condensed,
    multivariate_moments_to_cumulant,
    translate_cumulants,
    translate_moments,
)
from tests.series_oracle import oracle_cumulants, oracle_moments

UNIFORM_MOMENTS = MomentSequence(tuple(Fraction(1, n + 1) for n in range(1, 7)))
EXPONENTIAL_MOMENTS = MomentSequence(tuple(Fraction(factorial(n)) for n in range(1, 7)))


def test_point_mass():
    c = Fraction(3, 2)
    kappas = moments_to_cumulants(MomentSequence((c, c ** 2, c ** 3, c ** 4)))
    assert kappas.values == (c, 0, 0, 0)


def test_uniform_cumulants_exact():
    kappas = moments_to_cumulants(UNIFORM_MOMENTS)
    assert kappas.values == (Fraction(1, 2), Fraction(1, 12), 0, Fraction(-1, 120), 0, Fraction(1, 252))
    assert list(kappas.values) == oracle_cumulants(UNIFORM_MOMENTS.values, 6)


def test_exponential_cumulants_exact():
    kappas = moments_to_cumulants(EXPONENTIAL_MOMENTS)
    assert kappas.values == tuple(factorial(n - 1) for n in range(1, 7))
    assert list(kappas.values) == oracle_cumulants(EXPONENTIAL_MOMENTS.values, 6)


@pytest.mark.parametrize("moments", [UNIFORM_MOMENTS, EXPONENTIAL_MOMENTS])
def test_condensed_form_agrees(moments):
    assert moments_to_cumulants_condensed(moments) == moments_to_cumulants(moments)


def test_normal_moments_from_cumulants():
    moments = cumulants_to_moments(CumulantSequence((0, 1, 0, 0, 0, 0)))
    assert moments.values == (0, 1, 0, 3, 0, 15)
    assert list(moments.values) == oracle_moments((0, 1, 0, 0, 0, 0), 6)


def test_point_mass_moments_from_cumulants():
    c = Fraction(-2, 3)
    assert cumulants_to_moments(CumulantSequence((c, 0, 0))).values == (c, c ** 2, c ** 3)


@pytest.mark.parametrize("moments", [UNIFORM_MOMENTS, EXPONENTIAL_MOMENTS])
def test_round_trip(moments):
    assert cumulants_to_moments(moments_to_cumulants(moments)) == moments


def test_float_input_stays_float():
    kappas = moments_to_cumulants(MomentSequence((0.5, 1 / 3, 0.25)))
    assert kappas[2] == pytest.approx(1 / 12)
    assert isinstance(kappas[2], float)


def test_order_bound():
    with pytest.raises(SizeLimitError):
        moments_to_cumulants(MomentSequence(tuple(range(1, 10))))


def test_rejects_empty_and_non_finite():
    with pytest.raises(InvalidParameterError):
        MomentSequence(())
    with pytest.raises(InvalidParameterError):
        MomentSequence((1.0, float("nan")))


def test_translate_moments():
    assert translate_moments(UNIFORM_MOMENTS, 0) == UNIFORM_MOMENTS
    assert translate_moments(MomentSequence((0, 1)), 1).values == (1, 2)
    tau = Fraction(5, 7)
    assert translate_moments(MomentSequence((0, 0, 0)), tau).values == (tau, tau ** 2, tau ** 3)


def test_translate_cumulants():
    kappas = CumulantSequence((1, 1, 2))
    assert translate_cumulants(kappas, 0) == kappas
    assert translate_cumulants(kappas, -1).values == (0, 1, 2)


def test_translation_moves_only_the_mean():
    tau = Fraction(3, 4)
    shifted = moments_to_cumulants(translate_moments(EXPONENTIAL_MOMENTS, tau))
    assert shifted == translate_cumulants(moments_to_cumulants(EXPONENTIAL_MOMENTS), tau)


def test_cumulants_add_under_independent_sums():
    total = moments_to_cumulants(moments_of_independent_sum(UNIFORM_MOMENTS, EXPONENTIAL_MOMENTS))
    u, e = moments_to_cumulants(UNIFORM_MOMENTS), moments_to_cumulants(EXPONENTIAL_MOMENTS)
    assert total.values == tuple(a + b for a, b in zip(u.values, e.values))


def test_bivariate_cumulant_is_covariance():
    table = MultivariateMomentTable(2, {
        frozenset({1}): Fraction(1, 2),
        frozenset({2}): Fraction(3),
        frozenset({1, 2}): Fraction(2),
    })
    assert multivariate_moments_to_cumulant(table) == Fraction(2) - Fraction(3, 2)
    assert table.means() == (Fraction(1, 2), 3)


def test_independent_pair_has_zero_covariance():
    a, b = Fraction(2, 5), Fraction(-7, 3)
    table = MultivariateMomentTable(2, {frozenset({1}): a, frozenset({2}): b, frozenset({1, 2}): a * b})
    assert multivariate_moments_to_cumulant(table) == 0


@pytest.mark.parametrize("n", range(1, 7))
def test_diagonal_table_matches_univariate(n):
    table = diagonal_moment_table(EXPONENTIAL_MOMENTS, n)
    assert multivariate_moments_to_cumulant(table) == moments_to_cumulants(EXPONENTIAL_MOMENTS)[n]


def test_table_needs_every_subset():
    with pytest.raises(InvalidParameterError):
        MultivariateMomentTable(2, {frozenset({1}): 0, frozenset({2}): 0})


def test_empirical_moments_exact():
    moments = empirical_moments([0.5, 1.5, 2.0], 3)
    assert moments.values == (Fraction(4, 3), Fraction(13, 6), Fraction(23, 6))


def test_empirical_moment_table():
    samples = np.array([[1.0, 2.0], [3.0, -1.0]])
    table = empirical_moment_table(samples)
    assert table[{1}] == 2
    assert table[{2}] == Fraction(1, 2)
    assert table[{1, 2}] == Fraction(-1, 2)
    assert multivariate_moments_to_cumulant(table) == Fraction(-3, 2)


def test_empirical_table_of_independent_product_grid():
    xs, ys = [0.0, 1.0], [2.0, 5.0, 8.0]
    samples = np.array(list(itertools.product(xs, ys)))
    assert multivariate_moments_to_cumulant(empirical_moment_table(samples)) == 0
