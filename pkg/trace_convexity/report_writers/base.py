"""
Abstract Base Class for Report Writers

Defines the interface every output format implements, so that commands can
write their reports without knowing the format.
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Union

from ..session import ExperimentSession


class BaseReportWriter(ABC):
    """
    Renders a report object to text and writes it through a session.

    Subclasses implement `format_name` and `render`; formats that split a
    report across several files also override `companion_files`.
    """

    def __init__(self, command: str):
        """
        Initialize the writer.

        Args:
            command: Name of the command whose report is written
        """
        self.command = command

    @property
    @abstractmethod
    def format_name(self) -> str:
        """Return the format identifier (e.g., 'csv', 'json')"""

    @abstractmethod
    def render(self, report: Any) -> str:
        """
        Render the main output file.

        Raises:
            DomainError: the format cannot represent this report
        """

    def companion_files(self, report: Any, path: Path) -> Dict[Path, Any]:
        """Extra JSON payloads written next to `path`, keyed by their paths"""
        return {}

    def write(self, session: ExperimentSession, path: Union[str, Path], report: Any) -> List[Path]:
        """Render and atomically write the report and its companions"""
        path = Path(path)
        written = [session.write_text(path, self.render(report))]
        for companion, payload in self.companion_files(report, path).items():
            written.append(session.write_json(companion, payload))
        return written
