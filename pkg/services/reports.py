"""
Report models and their JSON/CSV renderings.

JSON numbers carry 17 significant digits, CSV numbers 12. Rendering is
deterministic: the same report always gives the same bytes.
"""

import io
import json
import logging
import math
import re
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import pandas as pd
from pydantic import BaseModel, Field
from pydantic.json_schema import models_json_schema

from config.run_config import RunConfig

logger = logging.getLogger(__name__)

JSON_DIGITS = 17
CSV_FLOAT_FORMAT = "%.12g"


class CumulantRow(BaseModel):
    order: int
    values: Dict[str, Optional[float]]
    reference: Optional[float] = None


class Deviation(BaseModel):
    method_a: str
    method_b: str
    orders_compared: int
    max_abs: float
    max_rel: float
    worst_order: Optional[int] = None
    passed: bool


class CumulantReport(BaseModel):
    command: Literal["cumulants", "compare"]
    distribution: str
    config: RunConfig
    rows: List[CumulantRow]
    deviations: List[Deviation] = Field(default_factory=list)
    passed: Optional[bool] = None


class CheckResult(BaseModel):
    name: str
    value: float
    tolerance: float
    passed: bool


class VerifyReport(BaseModel):
    command: Literal["verify"] = "verify"
    suite: str
    seed: int
    checks: List[CheckResult]
    passed: bool


Report = Union[CumulantReport, VerifyReport]


# -- JSON ---------------------------------------------------------------------

_PLACEHOLDER = re.compile(r'"@@float(\d+)@@"')


def _with_placeholders(value: Any, floats: List[float]) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        floats.append(value)
        return f"@@float{len(floats) - 1}@@"
    if isinstance(value, dict):
        return {k: _with_placeholders(v, floats) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_with_placeholders(v, floats) for v in value]
    return value


def _format_float(value: float) -> str:
    text = format(value, f".{JSON_DIGITS}g")
    return text if any(c in text for c in ".e") else text + ".0"


def to_json(report: Report) -> str:
    floats: List[float] = []
    payload = _with_placeholders(report.model_dump(mode="python"), floats)
    text = json.dumps(payload, indent=2)
    return _PLACEHOLDER.sub(lambda m: _format_float(floats[int(m.group(1))]), text) + "\n"


# -- CSV ----------------------------------------------------------------------

def _frame(report: Report) -> pd.DataFrame:
    if isinstance(report, VerifyReport):
        return pd.DataFrame([check.model_dump() for check in report.checks],
                            columns=["name", "value", "tolerance", "passed"])
    records = []
    for row in report.rows:
        record: Dict[str, Any] = {"order": row.order}
        record.update(row.values)
        record["reference"] = row.reference
        records.append(record)
    return pd.DataFrame(records)


def to_csv(report: Report) -> str:
    """Main table only: per-order values, or per-check residuals for verify"""
    buffer = io.StringIO()
    _frame(report).to_csv(buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    if isinstance(report, CumulantReport) and report.deviations:
        buffer.write("\n")
        pd.DataFrame([dev.model_dump() for dev in report.deviations]).to_csv(
            buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"
        )
    return buffer.getvalue()


def render(report: Report, output_format: str) -> str:
    if output_format == "csv":
        return to_csv(report)
    return to_json(report)


def write_report(report: Report, output_format: str, path: Optional[Union[str, Path]] = None) -> str:
    """Render and write to `path`, or return the text for stdout when no path is given"""
    text = render(report, output_format)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.info("Report written to %s", path)
    return text


def report_schema() -> Dict[str, Any]:
    """JSON schema of both report kinds"""
    _, schema = models_json_schema(
        [(CumulantReport, "serialization"), (VerifyReport, "serialization")],
        ref_template="#/$defs/{model}",
        title="CumulantKitReport",
    )
    schema["oneOf"] = [{"$ref": "#/$defs/CumulantReport"}, {"$ref": "#/$defs/VerifyReport"}]
    return schema
