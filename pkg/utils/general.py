"""
General utility helpers: run transcript tee, provenance hashing, git describe.
"""
import hashlib
import json
import subprocess
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict


class Tee:
    """Mirror everything written to stdout into a transcript file."""
    def __init__(self, file, stream=None):
        self.file = file
        self.stream = stream or sys.stdout

    def write(self, text):
        self.file.write(text)
        self.stream.write(text)
        return len(text)

    def flush(self):
        self.file.flush()
        self.stream.flush()


@contextmanager
def transcript(output_dir, name: str = "log.txt"):
    """Tee stdout into <output_dir>/log.txt for the duration of the block."""
    path = Path(output_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    original = sys.stdout
    with open(path, "a", encoding="utf-8") as f:
        sys.stdout = Tee(f, original)
        try:
            yield path
        finally:
            sys.stdout.flush()
            sys.stdout = original


def canonical_json(data: Dict[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def config_hash(data: Dict[str, Any]) -> str:
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def git_describe(cwd=None) -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=cwd or Path(__file__).resolve().parent.parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() if out.returncode == 0 and out.stdout.strip() else "unknown"
