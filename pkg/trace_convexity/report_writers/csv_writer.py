"""
CSV Report Writer

One row per grid point. The first line is a versioned header comment and the
column order is fixed, so files can be diffed across runs. Witness matrices
of a region scan go to a companion `<out>.witnesses.json`.
"""

import csv
import io
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..channels import DpiReport
from ..errors import DomainError
from ..probes import RegionReport
from ..serialization import format_float
from .base import BaseReportWriter

CSV_VERSION = 1
WITNESS_SUFFIX = ".witnesses.json"

SCAN_COLUMNS = [
    "index",
    "p",
    "q",
    "s",
    "status_convex",
    "status_concave",
    "outcome_convex",
    "outcome_concave",
    "margin_convex",
    "margin_concave",
    "witness_id",
    "error",
]

DPI_COLUMNS = [
    "index",
    "alpha",
    "z",
    "known_monotone",
    "trials",
    "violations",
    "worst_margin",
    "error",
]


def _number(value: Optional[float]) -> str:
    return "" if value is None else format_float(value)


def witness_path_for(path: Path) -> Path:
    return path.with_name(path.name + WITNESS_SUFFIX)


class CsvReportWriter(BaseReportWriter):
    """Writes region scans and DPI scans as CSV"""

    @property
    def format_name(self) -> str:
        return "csv"

    def render(self, report: Any) -> str:
        if isinstance(report, RegionReport):
            return self._render_rows("region-scan", SCAN_COLUMNS, self._scan_rows(report))
        if isinstance(report, DpiReport):
            return self._render_rows("dpi-scan", DPI_COLUMNS, self._dpi_rows(report))
        raise DomainError(
            f"CSV output supports scan and dpi reports, not {type(report).__name__}; use json"
        )

    def companion_files(self, report: Any, path: Path) -> Dict[Path, Any]:
        if not isinstance(report, RegionReport):
            return {}
        witnesses = {}
        for row in report.rows:
            if row.witness_id is None:
                continue
            witnesses[row.witness_id] = {
                "params": row.params.to_dict(),
                "convex": row.convex.witness.to_dict() if row.convex.violated else None,
                "concave": row.concave.witness.to_dict() if row.concave.violated else None,
            }
        return {witness_path_for(path): witnesses}

    @staticmethod
    def _render_rows(kind: str, columns: List[str], rows: List[List[str]]) -> str:
        buffer = io.StringIO()
        buffer.write(f"# trace-convexity {kind} v{CSV_VERSION}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
        return buffer.getvalue()

    @staticmethod
    def _scan_rows(report: RegionReport) -> List[List[str]]:
        rows = []
        for row in report.rows:
            params = row.params.to_dict()
            failed = row.error is not None
            rows.append(
                [
                    str(row.index),
                    params["p"],
                    params["q"],
                    params["s"],
                    "" if failed else row.regions.convexity.status.value,
                    "" if failed else row.regions.concavity.status.value,
                    row.outcome_convex.value,
                    row.outcome_concave.value,
                    "" if failed else _number(row.convex.worst_margin),
                    "" if failed else _number(row.concave.worst_margin),
                    row.witness_id or "",
                    row.error or "",
                ]
            )
        return rows

    @staticmethod
    def _dpi_rows(report: DpiReport) -> List[List[str]]:
        return [
            [
                str(row.index),
                _number(row.alpha),
                _number(row.z),
                "true" if row.known_monotone else "false",
                str(row.trials),
                str(row.violations),
                _number(row.worst_margin),
                row.error or "",
            ]
            for row in report.rows
        ]
