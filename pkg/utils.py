"""
Utility functions and shared objects for the relmatch command runner.
"""

import csv
import json
import logging
import os
import subprocess
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Dict, Iterable, Optional, Sequence

LOGGER_NAME = "relmatch"

# Process exit codes
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_PROPERTY = 4


def setup_logging(level: str = "INFO") -> logging.Logger:
    """Console logging as `[LEVEL] message` under the relmatch namespace."""
    logger = logging.getLogger(LOGGER_NAME)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("[%(levelname)s] %(message)s"))
        logger.addHandler(handler)
    logger.setLevel(level.upper())
    logger.propagate = False
    return logger


@dataclass(frozen=True)
class Option:
    """A command argument; the runner turns these handler defaults into CLI flags."""

    description: str
    default: Any = None
    choices: Optional[Sequence[str]] = None
    positional: bool = False


class RunUtils:
    """Output directories and run artefacts shared by the commands."""

    def __init__(self, out_dir: str = "runs", workers: int = 1):
        self.out_dir = out_dir
        self.workers = max(1, workers)
        self.logger = logging.getLogger(LOGGER_NAME)

    def run_dir(self, *parts: str) -> str:
        """Create (if needed) and return a directory under the output root."""
        path = os.path.join(self.out_dir, *parts)
        os.makedirs(path, exist_ok=True)
        return path

    def load_json(self, path: str) -> Dict[str, Any]:
        if not os.path.exists(path):
            return {}
        with open(path, "r") as f:
            return json.load(f)

    def save_json(self, path: str, data: Dict[str, Any]) -> None:
        with open(path, "w") as f:
            json.dump(data, f, indent=4)

    def write_rows(self, path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            writer.writerows(rows)

    def git_describe(self) -> str:
        """`git describe --always --dirty` of the working tree, or "unknown" outside a checkout."""
        try:
            result = subprocess.run(
                ["git", "describe", "--always", "--dirty"],
                capture_output=True,
                text=True,
                cwd=os.path.dirname(os.path.abspath(__file__)),
                timeout=10,
            )
        except (OSError, subprocess.SubprocessError):
            return "unknown"
        return result.stdout.strip() or "unknown"

    @staticmethod
    def timestamp() -> str:
        return datetime.now().isoformat(timespec="seconds")
