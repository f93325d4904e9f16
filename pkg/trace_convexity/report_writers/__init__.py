"""
Report Writers Package

Output formats for scan, probe and construction reports. Each writer
implements the abstract base class, so commands pick a format by name.
"""

from typing import Dict, Type

from ..errors import DomainError
from .base import BaseReportWriter
from .csv_writer import CsvReportWriter
from .json_writer import JsonReportWriter

WRITERS: Dict[str, Type[BaseReportWriter]] = {
    "csv": CsvReportWriter,
    "json": JsonReportWriter,
}


def get_report_writer(fmt: str, command: str) -> BaseReportWriter:
    if fmt not in WRITERS:
        raise DomainError(f"Unsupported format '{fmt}'. Choose from: {', '.join(WRITERS)}")
    return WRITERS[fmt](command)


__all__ = [
    "BaseReportWriter",
    "CsvReportWriter",
    "JsonReportWriter",
    "WRITERS",
    "get_report_writer",
]
