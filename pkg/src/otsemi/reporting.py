"""Result documents: a hierarchical JSON report plus a flat CSV of aggregates.

Both files carry the configuration echo and a format version.  Serialization
is deterministic: floats are written with ``repr`` (shortest round-trip) and
row order is fixed, so identical experiments produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

from . import __version__
from .errors import ReportError
from .experiments import METHODS, METRICS, ExperimentReport

FORMAT_VERSION = "1.0"
FLAT_HEADER = ("dataset", "zeta", "metric", "method", "mean", "std")


def report_document(reports: list[ExperimentReport]) -> dict[str, Any]:
    """The hierarchical result document as a plain dict."""
    if not reports:
        raise ReportError("no reports to emit")
    return {
        "format_version": FORMAT_VERSION,
        "artifact_version": __version__,
        "reports": [r.to_dict() for r in reports],
    }


def flat_rows(document: dict[str, Any]) -> list[tuple[str, str, str, str, str, str]]:
    """Aggregate rows (dataset, zeta, metric, method, mean, std) as strings."""
    rows = []
    for report in document["reports"]:
        for metric in METRICS:
            for method in METHODS:
                cell = report["aggregates"][method][metric]
                rows.append(
                    (
                        report["dataset"],
                        repr(float(report["zeta"])),
                        metric,
                        method,
                        repr(float(cell["mean"])),
                        repr(float(cell["std"])),
                    )
                )
    return rows


def write_document(document: dict[str, Any], out_base: str | Path) -> tuple[Path, Path]:
    """Write ``<out_base>.json`` and ``<out_base>.csv``; returns both paths."""
    base = Path(out_base)
    json_path = base.with_suffix(".json")
    csv_path = base.with_suffix(".csv")
    try:
        base.parent.mkdir(parents=True, exist_ok=True)
        with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(document, fh, indent=2)
            fh.write("\n")
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(FLAT_HEADER)
            writer.writerows(flat_rows(document))
    except OSError as exc:
        raise ReportError(f"cannot write report to {base}: {exc}") from exc
    return json_path, csv_path


def emit_report(reports: list[ExperimentReport], out_base: str | Path) -> tuple[Path, Path]:
    """Serialize reports to ``<out_base>.json`` + ``<out_base>.csv``.

    Raises:
        ReportError: empty report list or unwritable path.
    """
    return write_document(report_document(reports), out_base)


def load_report_document(path: str | Path) -> dict[str, Any]:
    """Parse a previously written JSON report; values round-trip exactly."""
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
