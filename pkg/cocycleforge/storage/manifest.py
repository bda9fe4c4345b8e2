import json
import os
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List

import pytz
from pydantic import BaseModel, Field

MANIFEST_NAME = "manifest/index.json"


class RunManifest(BaseModel):
    config_hash: str
    version: str
    kind: str
    seed: int
    started_at: str
    wall_clock_seconds: float = 0.0
    exit_code: int = 0
    output_dir: str = ""
    files: List[str] = Field(default_factory=list)
    summary: List[Dict[str, Any]] = Field(default_factory=list)
    anomalies: List[str] = Field(default_factory=list)


def now_iso(timezone: str) -> str:
    """Current time in the configured timezone, ISO 8601."""
    return datetime.now(pytz.timezone(timezone)).isoformat(timespec="seconds")


def _manifest_path(root: str) -> str:
    return os.path.join(root, MANIFEST_NAME)


def load(root: str) -> List[Dict]:
    """
    Load the manifest entries under an output root.

    Returns:
        List[Dict]: List of manifest entries, or empty list if file doesn't exist.
    """
    path = _manifest_path(root)
    if os.path.exists(path):
        with open(path, 'r') as f:
            return json.load(f)
    return []


def _save(root: str, data: List[Dict]) -> None:
    path = _manifest_path(root)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(data, f, indent=2)


def append(root: str, entry: RunManifest) -> None:
    """Append a run to `<root>/manifest/index.json`."""
    data = load(root)
    data.append(entry.model_dump(mode="json"))
    _save(root, data)
