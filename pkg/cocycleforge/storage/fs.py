import csv
import json
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence

FLOAT_FORMAT = "%.17e"


def format_cell(value: Any, float_format: str = FLOAT_FORMAT) -> str:
    """Floats in full-precision scientific notation; bools and ints unchanged."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return float_format % value
    if value is None:
        return ""
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]], config_hash: str,
              seed: int, float_format: str = FLOAT_FORMAT) -> str:
    """
    Write a table whose first line is a `# config_hash=... seed=...` comment.

    Args:
        path: Destination file; parent directories are created.
        header: Column names.
        rows: Row values; floats use float_format.
        config_hash: Hash of the configuration that produced the table.
        seed: Seed recorded next to the hash.

    Returns:
        str: The path written.
    """
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        f.write(f"# config_hash={config_hash} seed={seed}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_cell(v, float_format) for v in row])
    return path


def save_report(dir_path: str, name: str, payload: Dict[str, Any]) -> str:
    """
    Save a report as `<name>.json` in the specified directory.

    Returns:
        str: Path to the saved report.
    """
    Path(dir_path).mkdir(parents=True, exist_ok=True)
    path = os.path.join(dir_path, f"{name}.json")
    with open(path, 'w') as f:
        json.dump(payload, f, indent=2, sort_keys=True)
    return path
