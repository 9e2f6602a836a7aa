"""CSV tables and JSON run manifests, written atomically."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

from .. import __version__
from .config import RunConfig


class OutputError(OSError):
    pass


def format_cell(value) -> str:
    """Shortest round-trip text for floats; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, "dtype"):
        as_float = float(value)
        if as_float.is_integer() and hasattr(value, "dtype") and value.dtype.kind in "iu":
            return str(int(value))
        return repr(as_float)
    return str(value)


def render_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(col)) for col in columns])
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, float):
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "tolist"):
        return _jsonable(value.tolist())
    return value


def build_manifest(rows: Sequence[dict], config: RunConfig, summary: dict | None = None) -> dict:
    return {
        "tool": "hypgame",
        "version": __version__,
        "config": _jsonable(config.as_dict()),
        "summary": _jsonable(summary or {}),
        "row_count": len(rows),
        "rows": _jsonable(list(rows)),
    }


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def row_dicts(rows: Sequence, record_timing: bool) -> list[dict]:
    """Plain dicts for CSV; wall time is blanked unless timing is requested."""
    out = []
    for row in rows:
        d = dataclasses.asdict(row) if dataclasses.is_dataclass(row) else dict(row)
        if not record_timing and "wall_ms" in d:
            d["wall_ms"] = None
        out.append(d)
    return out


def emit_outputs(
    rows: Sequence,
    config: RunConfig,
    columns: Sequence[str],
    csv_path: str | Path | None = None,
    json_path: str | Path | None = None,
    summary: dict | None = None,
) -> str:
    """Write the CSV table and JSON manifest; returns the CSV text.

    Wall times only reach the CSV when ``config.timing`` is set, which keeps
    repeated runs byte-identical; the manifest always carries them.
    """
    csv_text = render_csv(row_dicts(rows, config.timing), columns)
    manifest = build_manifest(row_dicts(rows, True), config, summary)
    json_text = json.dumps(manifest, indent=2, sort_keys=False) + "\n"
    written: list[Path] = []
    try:
        for target, text in ((csv_path, csv_text), (json_path, json_text)):
            if target is None:
                continue
            target = Path(target)
            _atomic_write(target, text)
            written.append(target)
    except OSError as exc:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        raise OutputError(f"failed to write outputs: {exc}") from exc
    return csv_text
