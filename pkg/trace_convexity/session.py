"""
Experiment session

Owns what a run of the tool shares across its parts: a named logger, the
worker pool that scans fan out over, atomic output writing and the run
manifest recorded next to every output.
"""

import json
import logging
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, TypeVar, Union

T = TypeVar("T")
R = TypeVar("R")

MANIFEST_SUFFIX = ".manifest.json"


def default_workers() -> int:
    """Available parallelism"""
    return os.cpu_count() or 1


def ordered_map(
    fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None
) -> List[R]:
    """
    Apply `fn` to every item, in parallel when workers > 1.

    Results come back in input order regardless of completion order.
    """
    items = list(items)
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def manifest_path_for(output: Union[str, Path]) -> Path:
    output = Path(output)
    return output.with_name(output.name + MANIFEST_SUFFIX)


@dataclass
class RunManifest:
    """Everything needed to replay a command bit for bit"""

    command: str
    parameters: Dict[str, Any]
    seed: int
    version: str
    timestamp: str
    outputs: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.command:
            raise ValueError("Manifest must name a command")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        missing = {"command", "parameters", "seed", "version", "timestamp"} - set(data)
        if missing:
            raise ValueError(f"Manifest is missing fields: {sorted(missing)}")
        return cls(
            command=data["command"],
            parameters=dict(data["parameters"]),
            seed=int(data["seed"]),
            version=data["version"],
            timestamp=data["timestamp"],
            outputs=list(data.get("outputs", [])),
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RunManifest":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


class ExperimentSession:
    """
    Shared state of one command invocation.

    Example:
        with ExperimentSession("scan", workers=4) as session:
            rows = session.map(evaluate_point, points)
            session.write_text(Path("scan.csv"), rendered)
    """

    def __init__(self, name: str = "trace-convexity", workers: Optional[int] = None):
        self.name = name
        self.workers = default_workers() if workers is None else workers
        if self.workers < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")
        self.outputs: List[Path] = []
        self.tasks_run = 0
        self.started_at = time.time()
        self._pending_temp: List[Path] = []
        self.logger = logging.getLogger(f"{__name__}.{name}")

        if not self.logger.handlers:
            handler = logging.StreamHandler()
            formatter = logging.Formatter(
                f"%(asctime)s - {name.upper()} - %(levelname)s - %(message)s"
            )
            handler.setFormatter(formatter)
            self.logger.addHandler(handler)
            self.logger.setLevel(logging.INFO)

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """ordered_map over the session's worker pool"""
        results = ordered_map(fn, items, self.workers)
        self.tasks_run += len(results)
        self.logger.debug(f"Completed {len(results)} tasks on {self.workers} workers")
        return results

    def write_text(self, path: Union[str, Path], text: str) -> Path:
        """
        Write `text` atomically: a temporary file in the target directory is
        renamed over the destination, so readers never see partial output.

        Raises:
            OSError: the directory is missing or not writable
        """
        path = Path(path)
        tmp = tempfile.NamedTemporaryFile(
            "w", dir=str(path.parent), prefix=f".{path.name}.", delete=False, encoding="utf-8"
        )
        tmp_path = Path(tmp.name)
        self._pending_temp.append(tmp_path)
        try:
            tmp.write(text)
            tmp.flush()
            tmp.close()
            os.replace(tmp_path, path)
        finally:
            if not tmp.closed:
                tmp.close()
            if tmp_path.exists():
                tmp_path.unlink()
            self._pending_temp.remove(tmp_path)

        self.outputs.append(path)
        self.logger.info(f"Wrote {path}")
        return path

    def write_json(self, path: Union[str, Path], payload: Any) -> Path:
        return self.write_text(path, json.dumps(payload, indent=2) + "\n")

    def write_manifest(self, manifest: RunManifest, output: Union[str, Path]) -> Path:
        """Record `manifest` next to `output` as <output>.manifest.json"""
        return self.write_json(manifest_path_for(output), manifest.to_dict())

    def get_status(self) -> Dict[str, Any]:
        return {
            "session": self.name,
            "workers": self.workers,
            "tasks_run": self.tasks_run,
            "outputs": [str(p) for p in self.outputs],
            "elapsed_seconds": time.time() - self.started_at,
        }

    def cleanup(self):
        """Remove temporary files left behind by an interrupted write"""
        for tmp_path in list(self._pending_temp):
            try:
                if tmp_path.exists():
                    tmp_path.unlink()
                    self.logger.info(f"Removed temporary file: {tmp_path}")
            except OSError as e:
                self.logger.error(f"Failed to remove temporary file {tmp_path}: {e}")
            finally:
                self._pending_temp.remove(tmp_path)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.cleanup()
        summary = self.get_status()
        self.logger.debug(
            f"Session {summary['session']} finished in {summary['elapsed_seconds']:.2f}s: "
            f"{summary['tasks_run']} tasks, outputs {summary['outputs']}"
        )
