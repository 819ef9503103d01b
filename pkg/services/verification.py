"""
Verification suites: each runs a family of checks against exact or
independent oracles and reports one residual per check.
"""

import logging
import math
from typing import Callable, Dict, List

import numpy as np

from models.dists import DistributionModel, builtin
from models.errors import UsageError
from models.hoeffding import (
    block_fang_cumulant,
    comonotone,
    comonotone_reduction_check,
    hoeffding_covariance,
    independent,
)
from models.partitions import (
    bell_numbers,
    enumerate_partitions,
    enumerate_shuffles,
    faa_di_bruno_count,
    mobius_from_lattice,
    mobius_to_top,
    multinomial,
    partition_types,
)
from models.volterra import (
    MRL_ORDERS,
    SimplexIntegrator,
    cumulants_via_mrl,
    iterated_cdf,
    theorem1_cumulant,
    verify_shuffle_relation,
)
from services.reports import CheckResult, VerifyReport

logger = logging.getLogger(__name__)

SUITES = ("combinatorics", "shuffle", "hoeffding", "mrl", "lemma")

COMBINATORICS_MAX_N = 8
LATTICE_CHECK_MAX_N = 5
SHUFFLE_MAX_TOTAL = 5
SHUFFLE_TOL = 1e-6
MRL_REL_TOL = 1e-2
MRL_ABS_TOL = 1e-5
LEMMA_DRAWS = 1_000_000
LEMMA_MAX_ORDER = 4
LEMMA_STANDARD_ERRORS = 4.0

# tau for the truncated-moment checks, inside each support
LEMMA_TAUS = {"uniform01": 0.7, "exponential1": 1.5, "stdnormal": 0.5, "twopoint": 0.5}


def verification_builtins() -> List[DistributionModel]:
    return [
        builtin("uniform01"),
        builtin("exponential1"),
        builtin("stdnormal"),
        builtin("twopoint", p="0.3", x0="-1", x1="2"),
    ]


def _check(name: str, value: float, tolerance: float) -> CheckResult:
    passed = bool(math.isfinite(value) and value <= tolerance)
    logger.info("%s %s: %.3g (tol %.3g)", "PASS" if passed else "FAIL", name, value, tolerance)
    return CheckResult(name=name, value=float(value), tolerance=float(tolerance), passed=passed)


def combinatorics_checks(seed: int = 0) -> List[CheckResult]:
    """Bell, Faa di Bruno and shuffle counts, plus the lattice Mobius recursion"""
    checks = []
    bells = bell_numbers(COMBINATORICS_MAX_N)
    for n in range(1, COMBINATORICS_MAX_N + 1):
        checks.append(_check(f"partitions n={n} vs Bell", abs(len(enumerate_partitions(n)) - bells[n]), 0))
        types = partition_types(n)
        checks.append(_check(
            f"Faa di Bruno sum n={n} vs Bell", abs(sum(faa_di_bruno_count(lam) for lam in types) - bells[n]), 0,
        ))
        worst = 0
        for lam in types:
            sizes = lam.block_sizes
            count = len(enumerate_shuffles(sizes))
            weighted = math.prod(math.factorial(k) for k in lam.multiplicities) * faa_di_bruno_count(lam)
            worst = max(worst, abs(count - multinomial(sizes)), abs(count - weighted))
        checks.append(_check(f"shuffle counts n={n}", worst, 0))
    for n in range(1, LATTICE_CHECK_MAX_N + 1):
        recursion = mobius_from_lattice(n)
        worst = max(abs(recursion[pi] - mobius_to_top(pi)) for pi in enumerate_partitions(n))
        checks.append(_check(f"Mobius closed form n={n}", worst, 0))
    return checks


def shuffle_checks(seed: int = 0) -> List[CheckResult]:
    checks = []
    for d in verification_builtins():
        for total in range(1, SHUFFLE_MAX_TOTAL + 1):
            for m in range(total + 1):
                residual = verify_shuffle_relation(d, m, total - m)
                checks.append(_check(f"{d.name} shuffle m={m} n={total - m}", residual, SHUFFLE_TOL))
    return checks


def hoeffding_checks(seed: int = 0) -> List[CheckResult]:
    uniform, exponential = builtin("uniform01"), builtin("exponential1")
    pair = comonotone(uniform, 2)
    checks = [
        _check("independent pair covariance", abs(hoeffding_covariance(independent([uniform, exponential]))), 1e-10),
        _check("comonotone uniform01 covariance", abs(hoeffding_covariance(pair) - 1.0 / 12.0), 1e-5),
        _check("Block-Fang n=2 equals Hoeffding", abs(block_fang_cumulant(pair, 2) - hoeffding_covariance(pair)), 0.0),
        _check("comonotone exponential1 kappa_3", abs(block_fang_cumulant(comonotone(exponential, 3), 3) - 2.0), 2e-2 * 2.0),
    ]
    for d in (uniform, exponential):
        for n in (2, 3):
            checks.append(_check(f"{d.name} comonotone reduction n={n}", comonotone_reduction_check(d, n), 1e-3))
    return checks


def mrl_checks(seed: int = 0) -> List[CheckResult]:
    """Mean residual life route against the simplex route; deviation over max(abs tol, rel tol * |kappa|)"""
    checks = []
    for d in verification_builtins():
        integrator = SimplexIntegrator(d)
        for n in MRL_ORDERS:
            expected = theorem1_cumulant(integrator, n)
            diff = abs(cumulants_via_mrl(d, n) - expected)
            allowed = max(MRL_ABS_TOL, MRL_REL_TOL * abs(expected))
            checks.append(_check(f"{d.name} mrl kappa_{n} (scaled deviation)", diff / allowed, 1.0))
    return checks


def _lemma_tau(d: DistributionModel) -> float:
    return LEMMA_TAUS["twopoint" if d.name.startswith("twopoint") else d.name]


def lemma_checks(seed: int = 0) -> List[CheckResult]:
    """F^[n](tau) against the Monte Carlo mean of (tau - X)_+^n / n!, in standard errors"""
    rng = np.random.default_rng(seed)
    checks = []
    for d in verification_builtins():
        tau = _lemma_tau(d)
        draws = d.sample(LEMMA_DRAWS, rng)
        shortfall = np.clip(tau - draws, 0.0, None)
        for n in range(1, LEMMA_MAX_ORDER + 1):
            values = shortfall ** n / math.factorial(n)
            standard_error = values.std(ddof=1) / math.sqrt(values.size)
            diff = abs(iterated_cdf(d, n, tau) - values.mean())
            score = diff / standard_error if standard_error > 0 else (0.0 if diff < 1e-12 else math.inf)
            checks.append(_check(f"{d.name} truncated moment n={n} (std errors)", score, LEMMA_STANDARD_ERRORS))
    return checks


SUITE_RUNNERS: Dict[str, Callable[[int], List[CheckResult]]] = {
    "combinatorics": combinatorics_checks,
    "shuffle": shuffle_checks,
    "hoeffding": hoeffding_checks,
    "mrl": mrl_checks,
    "lemma": lemma_checks,
}


def cmd_verify(suite: str, seed: int = 0) -> VerifyReport:
    if suite not in SUITE_RUNNERS:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    logger.info("Running verify suite %s", suite)
    checks = SUITE_RUNNERS[suite](seed)
    return VerifyReport(suite=suite, seed=seed, checks=checks, passed=all(c.passed for c in checks))
