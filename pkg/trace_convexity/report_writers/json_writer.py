"""
JSON Report Writer
"""

import json
from typing import Any

from ..serialization import to_jsonable
from .base import BaseReportWriter


class JsonReportWriter(BaseReportWriter):
    """Any report with a to_dict(); witnesses stay inline"""

    @property
    def format_name(self) -> str:
        return "json"

    def render(self, report: Any) -> str:
        payload = {"command": self.command, "report": to_jsonable(report)}
        return json.dumps(payload, indent=2) + "\n"
