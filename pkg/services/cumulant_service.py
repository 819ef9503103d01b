"""
Service layer behind the command line: builds the distribution from its
spec string, runs the selected cumulant methods and compares them.
"""

import itertools
import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

from config.run_config import RunConfig
from config.settings import settings
from models.dists import (
    DistributionModel,
    builtin,
    empirical_from_file,
    grid_from_csv,
)
from models.errors import CumulantKitError, DataFormatError, UsageError
from models.momentcalc import empirical_moments, moments_to_cumulants
from models.volterra import (
    MRL_ORDERS,
    cumulants_via_factorized,
    cumulants_via_mrl,
    cumulants_via_theorem1,
    cumulants_via_truncated,
)
from services.reports import CumulantReport, CumulantRow, Deviation

logger = logging.getLogger(__name__)

Column = List[Optional[float]]

_TWOPOINT = re.compile(r"^twopoint\(\s*([^,()]+)\s*,\s*([^,()]+)\s*,\s*([^,()]+)\s*\)$")
_PLAIN_BUILTINS = ("uniform01", "exponential1", "stdnormal")


def parse_dist_spec(spec: str, grid_points: Optional[int] = None) -> DistributionModel:
    """`uniform01`, `exponential1`, `stdnormal`, `twopoint(p,x0,x1)`, `grid:<path>` or `samples:<path>`"""
    spec = spec.strip()
    if spec in _PLAIN_BUILTINS:
        return builtin(spec)
    match = _TWOPOINT.match(spec)
    if match:
        p, x0, x1 = match.groups()
        try:
            return builtin("twopoint", p=p.strip(), x0=x0.strip(), x1=x1.strip())
        except CumulantKitError:
            raise
        except ValueError as e:
            raise DataFormatError(f"twopoint parameters must be numbers: {spec}") from e
    if spec.startswith("grid:"):
        return grid_from_csv(spec[len("grid:"):])
    if spec.startswith("samples:"):
        return empirical_from_file(spec[len("samples:"):], grid_points)
    raise DataFormatError(
        f"cannot parse distribution {spec!r}; use uniform01, exponential1, stdnormal, "
        "twopoint(p,x0,x1), grid:<path> or samples:<path>"
    )


def _as_floats(values: Sequence) -> Column:
    return [float(v) for v in values]


def reference_column(d: DistributionModel, max_order: int) -> Optional[Column]:
    """Exact cumulants of a builtin, None for data-backed models"""
    if not d.has_reference_moments:
        return None
    return _as_floats(moments_to_cumulants(d.reference_moments(max_order)).values)


def run_method(method: str, d: DistributionModel, cfg: RunConfig) -> Column:
    """kappa_1..kappa_N for one method; None marks orders the method does not cover"""
    N = cfg.max_order
    logger.info("Running %s on %s up to order %d", method, d.name, N)
    if method == "moments":
        if d.has_reference_moments:
            return _as_floats(moments_to_cumulants(d.reference_moments(N)).values)
        if d.samples is not None:
            # cumulants of the empirical measure, not unbiased population estimates
            return _as_floats(moments_to_cumulants(empirical_moments(d.samples, N)).values)
        raise UsageError(f"method 'moments' needs exact or empirical moments; {d.name} has neither")
    if method == "truncated":
        return cumulants_via_truncated(d, N, eps_tail=cfg.eps_tail, points=cfg.grid_points)
    if method == "theorem1":
        return cumulants_via_theorem1(d, N, eps_tail=cfg.eps_tail, points=cfg.grid_points)
    if method == "factorized":
        return cumulants_via_factorized(d, N, eps_tail=cfg.eps_tail, points=cfg.grid_points)
    if method == "mrl":
        column: Column = [None] * N
        for n in MRL_ORDERS:
            if n <= N:
                column[n - 1] = cumulants_via_mrl(d, n, eps_tail=cfg.eps_tail, points=cfg.grid_points)
        return column
    raise UsageError(f"unknown method {method!r}")


def run_methods(d: DistributionModel, cfg: RunConfig) -> Dict[str, Column]:
    """All selected methods, possibly in parallel; results keep the configured order"""
    with ThreadPoolExecutor(max_workers=settings.worker_count()) as pool:
        futures = [pool.submit(run_method, method, d, cfg) for method in cfg.methods]
        columns = [future.result() for future in futures]
    return dict(zip(cfg.methods, columns))


def within_tolerance(x: float, y: float, rel_tol: float, abs_tol: float) -> bool:
    diff = abs(x - y)
    return diff <= abs_tol or diff <= rel_tol * max(abs(x), abs(y))


def deviation(name_a: str, a: Column, name_b: str, b: Column, rel_tol: float, abs_tol: float) -> Deviation:
    """Max absolute/relative deviation over the orders both columns cover"""
    max_abs, max_rel, worst, passed, compared = 0.0, 0.0, None, True, 0
    for order, (x, y) in enumerate(zip(a, b), start=1):
        if x is None or y is None:
            continue
        compared += 1
        if not (math.isfinite(x) and math.isfinite(y)):
            passed, worst = False, order
            continue
        diff = abs(x - y)
        scale = max(abs(x), abs(y))
        rel = diff / scale if scale > 0 else 0.0
        if diff > max_abs:
            max_abs, worst = diff, order
        max_rel = max(max_rel, rel)
        if not within_tolerance(x, y, rel_tol, abs_tol):
            passed = False
    return Deviation(
        method_a=name_a,
        method_b=name_b,
        orders_compared=compared,
        max_abs=max_abs,
        max_rel=max_rel,
        worst_order=worst,
        passed=passed,
    )


def _rows(columns: Dict[str, Column], reference: Optional[Column], N: int) -> List[CumulantRow]:
    return [
        CumulantRow(
            order=n,
            values={method: column[n - 1] for method, column in columns.items()},
            reference=None if reference is None else reference[n - 1],
        )
        for n in range(1, N + 1)
    ]


def cmd_cumulants(cfg: RunConfig) -> CumulantReport:
    d = parse_dist_spec(cfg.dist_spec, cfg.grid_points)
    columns = run_methods(d, cfg)
    reference = reference_column(d, cfg.max_order)
    deviations = []
    if reference is not None:
        deviations = [
            deviation(method, column, "reference", reference, cfg.rel_tol, cfg.abs_tol)
            for method, column in columns.items()
        ]
    return CumulantReport(
        command="cumulants",
        distribution=d.name,
        config=cfg,
        rows=_rows(columns, reference, cfg.max_order),
        deviations=deviations,
        passed=None,
    )


def cmd_compare(cfg: RunConfig) -> CumulantReport:
    if len(cfg.methods) < 2:
        raise UsageError("compare needs at least two methods")
    d = parse_dist_spec(cfg.dist_spec, cfg.grid_points)
    columns = run_methods(d, cfg)
    reference = reference_column(d, cfg.max_order)
    deviations = [
        deviation(a, columns[a], b, columns[b], cfg.rel_tol, cfg.abs_tol)
        for a, b in itertools.combinations(cfg.methods, 2)
    ]
    passed = all(dev.passed for dev in deviations)
    for dev in deviations:
        if not dev.passed:
            logger.warning("%s vs %s exceeded tolerance (max rel %.3g)", dev.method_a, dev.method_b, dev.max_rel)
    return CumulantReport(
        command="compare",
        distribution=d.name,
        config=cfg,
        rows=_rows(columns, reference, cfg.max_order),
        deviations=deviations,
        passed=passed,
    )
