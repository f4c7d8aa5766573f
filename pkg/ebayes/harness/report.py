"""
CSV, JSON and plot-data writers of experiment reports.

Everything except the summary's wall-time field depends only on the configuration, so reruns with the same seed
produce byte-identical files.
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List

import numpy as np

from ebayes.harness.models import ExperimentReport


def format_value(value: Any) -> str:
    """
    Formats a CSV cell: floats with 17 significant digits, booleans as true/false, None as empty.
    """
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    text = str(value)
    if any(c in text for c in ",\"\n"):
        text = '"' + text.replace('"', '""') + '"'
    return text


def _line(cells: Iterable[Any]) -> str:
    return ",".join(format_value(c) for c in cells) + "\n"


def csv_text(report: ExperimentReport) -> str:
    header = ["replicate", *report.columns, "error"]
    out = [",".join(header) + "\n"]
    for record in report.records:
        if record.error is not None:
            out.append(_line([record.replicate, *([None] * len(report.columns)), record.error]))
            continue
        for row in record.rows:
            out.append(_line([record.replicate, *(row.get(c) for c in report.columns), None]))
    return "".join(out)


def plotdata_text(report: ExperimentReport) -> str:
    return "series,x,y\n" + "".join(_line(point) for point in report.plot_series)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


def summary_payload(report: ExperimentReport) -> Dict[str, Any]:
    config = report.config
    return _jsonable(
        {
            "experiment": config.experiment,
            "seed": config.seed,
            "replicates": config.replicates,
            "params": config.params,
            "version": report.version,
            "failures": report.failures,
            "wall_time": sum(r.wall_time for r in report.records),
            **report.summary,
        }
    )


def save_json(path: Path, payload: object) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def write_report(report: ExperimentReport, out_dir: Path) -> List[Path]:
    """
    Writes ``<experiment>.csv``, ``<experiment>.summary.json`` and ``<experiment>.plotdata.csv``.

    Returns:
        The written paths.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = report.config.experiment
    csv_path = out_dir / f"{name}.csv"
    summary_path = out_dir / f"{name}.summary.json"
    plot_path = out_dir / f"{name}.plotdata.csv"
    csv_path.write_text(csv_text(report), encoding="utf-8")
    plot_path.write_text(plotdata_text(report), encoding="utf-8")
    save_json(summary_path, summary_payload(report))
    return [csv_path, summary_path, plot_path]


def quantile_summary(values: Iterable[float], prefix: str) -> Dict[str, float]:
    """
    ``<prefix>_median``, ``<prefix>_q10`` and ``<prefix>_q90`` of the finite values (NaN when there are none).
    """
    arr = np.asarray([v for v in values if v is not None and math.isfinite(v)], dtype=float)
    if arr.size == 0:
        return {f"{prefix}_median": math.nan, f"{prefix}_q10": math.nan, f"{prefix}_q90": math.nan}
    q10, median, q90 = np.quantile(arr, [0.1, 0.5, 0.9])
    return {f"{prefix}_median": float(median), f"{prefix}_q10": float(q10), f"{prefix}_q90": float(q90)}
