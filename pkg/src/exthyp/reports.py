"""Structured experiment reports: JSON, CSV, and plot-data tables.

Reports are byte-stable for identical inputs and library version: values are
plain Python floats serialized by ``repr``-faithful formatters, dict order is
fixed at construction, and nothing time- or host-dependent enters the
payload.  Wall-clock timing therefore belongs on stderr, not in the report;
the deterministic work measure is the evaluation count.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import ConfigError


def complex_to_pair(z) -> dict:
    """Serialize a complex number as {"re": ..., "im": ...}."""
    z = complex(z)
    return {"re": float(z.real), "im": float(z.imag)}


def _value_payload(v):
    if isinstance(v, complex):
        return complex_to_pair(v)
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    return float(v)


@dataclass(frozen=True)
class ReportRow:
    """One named result with an optional oracle comparison.

    ``passed`` is None for purely informational rows; those do not affect
    the report verdict.
    """

    name: str
    value: complex | float
    reference: complex | float | None = None
    tolerance: float | None = None
    deviation: float | None = None
    passed: bool | None = None
    detail: str = ""

    def payload(self) -> dict:
        return {
            "name": self.name,
            "value": _value_payload(self.value),
            "reference": _value_payload(self.reference),
            "tolerance": _value_payload(self.tolerance),
            "deviation": _value_payload(self.deviation),
            "passed": self.passed,
            "detail": self.detail,
        }


def checked_row(name: str, value, reference, tolerance: float,
                detail: str = "") -> ReportRow:
    dev = abs(complex(value) - complex(reference))
    return ReportRow(
        name, value, reference, float(tolerance), float(dev),
        bool(dev <= tolerance), detail,
    )


def window_row(name: str, value: float, lo: float, hi: float,
               detail: str = "") -> ReportRow:
    value = float(value)
    note = f"window [{lo:g}, {hi:g}]" + (f"; {detail}" if detail else "")
    return ReportRow(
        name, value, None, None, None, bool(lo <= value <= hi), note,
    )


def flag_row(name: str, passed: bool, detail: str = "") -> ReportRow:
    return ReportRow(name, bool(passed), None, None, None, bool(passed), detail)


def info_row(name: str, value, detail: str = "") -> ReportRow:
    return ReportRow(name, value, detail=detail)


@dataclass(frozen=True)
class Report:
    experiment: str
    version: str
    parameters: dict
    rows: tuple[ReportRow, ...]
    series: dict = field(default_factory=dict)
    evaluations: int = 0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows if r.passed is not None)

    def payload(self) -> dict:
        return {
            "experiment": self.experiment,
            "version": self.version,
            "parameters": self.parameters,
            "rows": [r.payload() for r in self.rows],
            "series": {
                name: {"columns": list(s["columns"]),
                       "rows": [[float(v) for v in row] for row in s["rows"]]}
                for name, s in self.series.items()
            },
            "evaluations": int(self.evaluations),
            "passed": self.passed,
        }


def to_json(report: Report) -> str:
    return json.dumps(report.payload(), indent=2, allow_nan=False) + "\n"


_CSV_FIELDS = (
    "name", "value_re", "value_im", "reference_re", "reference_im",
    "deviation", "tolerance", "passed", "detail",
)


def _pair(v) -> tuple[str, str]:
    if v is None:
        return "", ""
    if isinstance(v, bool):
        return repr(v), ""
    z = complex(v)
    return repr(z.real), repr(z.imag)


def to_csv(report: Report) -> str:
    """Rows only; complex values flatten to paired _re/_im columns."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_FIELDS)
    for r in report.rows:
        v_re, v_im = _pair(r.value)
        ref_re, ref_im = _pair(r.reference)
        writer.writerow([
            r.name, v_re, v_im, ref_re, ref_im,
            "" if r.deviation is None else repr(float(r.deviation)),
            "" if r.tolerance is None else repr(float(r.tolerance)),
            "" if r.passed is None else repr(r.passed),
            r.detail,
        ])
    return buf.getvalue()


def emit_plot_data(report: Report, series: str) -> str:
    """Tab-separated table for one named series, one-line header."""
    if series not in report.series:
        known = ", ".join(sorted(report.series)) or "none"
        raise ConfigError(
            f"unknown series {series!r} for experiment "
            f"{report.experiment!r}; available: {known}"
        )
    s = report.series[series]
    lines = ["\t".join(s["columns"])]
    for row in s["rows"]:
        lines.append("\t".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
