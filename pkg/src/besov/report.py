"""Structured verification outcomes and their JSON/CSV emission."""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CSV_HEADER = ("target", "mode", "point", "metric", "value", "est_error")


def _plain(obj):
    """Convert numpy scalars/arrays and non-finite floats to JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, complex):
        return {"re": _plain(obj.real), "im": _plain(obj.imag)}
    return obj


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (tuple, list)):
        return "|".join(_fmt(v) for v in x)
    return str(x)


def config_hash(config: dict) -> str:
    blob = json.dumps(_plain(config), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class VerificationReport:
    target: str
    mode: str = "sufficiency"
    metrics: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    verdict: str = "fail"
    quadrature: dict = field(default_factory=dict)
    reproducibility: dict = field(default_factory=dict)

    def add_row(self, point, metric: str, value, est_error=0.0):
        self.rows.append({"point": point, "metric": metric,
                          "value": value, "est_error": est_error})

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def max_est_error(self) -> float:
        errs = [float(r["est_error"]) for r in self.rows if r.get("est_error") is not None]
        return max(errs, default=0.0)

    def to_dict(self) -> dict:
        quad = dict(self.quadrature)
        quad.setdefault("max_est_error", self.max_est_error())
        return _plain({
            "target": self.target,
            "mode": self.mode,
            "verdict": self.verdict,
            "metrics": self.metrics,
            "rows": self.rows,
            "quadrature": quad,
            "reproducibility": self.reproducibility,
        })

    def to_json(self, timestamp: bool = True) -> str:
        d = self.to_dict()
        if timestamp:
            d["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        return json.dumps(d, sort_keys=True, indent=1) + "\n"

    def csv_rows(self):
        for r in self.rows:
            yield (self.target, self.mode, _fmt(r["point"]), r["metric"],
                   _fmt(r["value"]), _fmt(r["est_error"]))

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        if header:
            wr.writerow(CSV_HEADER)
        wr.writerows(self.csv_rows())
        return buf.getvalue()


def emit_report(report: VerificationReport, format: str = "json", path=None) -> str:
    """Serialize ``report``; write to ``path`` when given.  Returns the text."""
    if format == "json":
        text = report.to_json()
    elif format == "csv":
        text = report.to_csv()
    else:
        raise ValueError(f"unknown report format {format!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
