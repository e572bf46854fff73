"""Machine-readable JSON reports with a fixed schema.

Reports embed the config, the seed, the backend and one record per checked
claim; identical config and seed produce byte-identical files (no wall-clock
data enters a report).
"""

from __future__ import annotations

import json
from pathlib import Path

from .backend import backend_name

SCHEMA_VERSION = "1.0.0"


class ReportVersionError(ValueError):
    pass


def report_schema_version() -> str:
    return SCHEMA_VERSION


def claim(claim_id: str, passed: bool, value=None, tolerance=None, **extra) -> dict:
    rec = {"claim_id": claim_id, "passed": bool(passed)}
    if value is not None:
        rec["value"] = value
    if tolerance is not None:
        rec["tolerance"] = tolerance
    rec.update(extra)
    return rec


def build_report(experiment: str, config: dict, claims: list, seed=None, data=None) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "experiment": experiment,
        "backend": backend_name(),
        "config": config,
        "seed": seed,
        "claims": claims,
        "passed": all(c["passed"] for c in claims),
    }
    if data is not None:
        report["data"] = data
    return report


def _json_default(obj):
    import numpy as np

    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def render_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n"


def write_report(path, report: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_report(report))
    return path


def read_report(path) -> dict:
    report = json.loads(Path(path).read_text())
    version = report.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ReportVersionError(
            f"report schema {version!r} does not match reader {SCHEMA_VERSION!r}")
    return report


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path
