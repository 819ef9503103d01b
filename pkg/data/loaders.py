"""
File ingestion for distribution inputs.

Sample files hold one finite number per line, grid CDF files are CSV with a
`t,F` header, and joint sample files are CSV with one sample vector per row
(header optional).
"""

import logging
from pathlib import Path
from typing import Tuple, Union

import numpy as np
import pandas as pd

from models.errors import DataFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read_csv(path: PathLike, **kwargs) -> pd.DataFrame:
    try:
        return pd.read_csv(path, **kwargs)
    except FileNotFoundError as e:
        raise DataFormatError(f"file not found: {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataFormatError(f"could not parse {path}: {e}") from e


def _as_finite(frame: pd.DataFrame, path: PathLike) -> np.ndarray:
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    if numeric.isna().any().any():
        raise DataFormatError(f"{path}: every entry must be a finite number")
    values = numeric.to_numpy(dtype=float)
    if not np.all(np.isfinite(values)):
        raise DataFormatError(f"{path}: every entry must be a finite number")
    return values


def load_samples(path: PathLike) -> np.ndarray:
    """One-dimensional sample file"""
    frame = _read_csv(path, header=None, skip_blank_lines=True, dtype=str)
    if frame.shape[1] != 1:
        raise DataFormatError(f"{path}: expected one number per line, found {frame.shape[1]} columns")
    values = _as_finite(frame.apply(lambda col: col.str.strip()), path).ravel()
    if values.size == 0:
        raise DataFormatError(f"{path}: no samples")
    logger.info("Loaded %d samples from %s", values.size, path)
    return values


def load_grid_cdf(path: PathLike) -> Tuple[np.ndarray, np.ndarray]:
    """Tabulated CDF with header `t,F`"""
    frame = _read_csv(path)
    frame.columns = [str(c).strip() for c in frame.columns]
    if list(frame.columns) != ["t", "F"]:
        raise DataFormatError(f"{path}: expected header 't,F', got {','.join(frame.columns)}")
    values = _as_finite(frame, path)
    t, F = values[:, 0], values[:, 1]
    if t.size < 2 or np.any(np.diff(t) <= 0):
        raise DataFormatError(f"{path}: t must be strictly increasing with at least two rows")
    logger.info("Loaded %d CDF nodes from %s", t.size, path)
    return t, F


def _looks_like_header(first_row) -> bool:
    try:
        [float(v) for v in first_row]
        return False
    except (TypeError, ValueError):
        return True


def load_joint_samples(path: PathLike) -> np.ndarray:
    """(N, n) matrix of sample vectors; a non-numeric first row is taken as a header"""
    raw = _read_csv(path, header=None, dtype=str, skipinitialspace=True)
    if raw.empty:
        raise DataFormatError(f"{path}: no rows")
    if _looks_like_header(raw.iloc[0].tolist()):
        raw = raw.iloc[1:]
    values = _as_finite(raw, path)
    if values.shape[0] == 0:
        raise DataFormatError(f"{path}: no sample rows")
    logger.info("Loaded %d joint samples of dimension %d from %s", values.shape[0], values.shape[1], path)
    return values
