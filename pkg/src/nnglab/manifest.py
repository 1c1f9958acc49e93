"""Run manifests: every output file is tied to the exact inputs that made it.

A manifest records the tool version, the verbatim argv, the fully resolved
parameter set (defaults included), any seed, timestamps, the thread cap in
effect and a sha256 per output file. Re-running the recorded argv must
reproduce every output byte for byte; the digests make drift visible.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path

__all__ = ["THREADS_ENV", "thread_cap", "file_digest", "RunManifest"]

TOOL_NAME = "nng-lab"
TOOL_VERSION = "0.1.0"
THREADS_ENV = "NNG_LAB_THREADS"


def thread_cap() -> int:
    """Sweep-parallelism cap from the environment; 1 when unset or invalid."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class RunManifest:
    def __init__(self, command: str, argv: list[str], params: dict, seed: int | None = None):
        self.command = command
        self.argv = list(argv)
        self.params = dict(params)
        self.seed = seed
        self.started_utc = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        self.outputs: list[dict] = []

    def add_output(self, path) -> None:
        p = Path(path)
        self.outputs.append(
            {"path": str(p), "sha256": file_digest(p), "bytes": p.stat().st_size}
        )

    def write(self, path) -> None:
        payload = {
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
            "command": self.command,
            "argv": self.argv,
            "params": self.params,
            "seed": self.seed,
            "threads": thread_cap(),
            "started_utc": self.started_utc,
            "finished_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "outputs": self.outputs,
        }
        Path(path).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    @staticmethod
    def recorded_argv(path) -> list[str]:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return list(payload["argv"])
