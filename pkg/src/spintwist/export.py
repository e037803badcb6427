"""CSV / JSON table writers shared by the CLI.

Floats are written with 12 significant digits so identical runs give
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(format(float(x), ".12g"))
        return x if np.isfinite(x) else None
    return x


def write_table(path: Path, columns: Sequence[str], rows, fmt_name: str = "csv", config: dict | None = None) -> Path:
    """Write a table as CSV (header + rows) or JSON {config, columns, rows}; returns the path written."""
    path = Path(path).with_suffix("." + fmt_name)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = [list(r) for r in rows]
    if fmt_name == "csv":
        lines = [",".join(columns)] + [",".join(fmt(v) for v in r) for r in rows]
        path.write_text("\n".join(lines) + "\n")
    elif fmt_name == "json":
        doc = {"config": config or {}, "columns": list(columns),
               "rows": [[_json_value(v) for v in r] for r in rows]}
        path.write_text(json.dumps(doc, indent=1, sort_keys=False) + "\n")
    else:
        raise ValueError(f"unknown format {fmt_name!r}")
    return path


def read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    """Read a numeric CSV written by ``write_table``."""
    text = Path(path).read_text().splitlines()
    header = text[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    return header, data


def write_gnuplot(path: Path, data_file: Path, columns: Sequence[str], x: int = 1, ys: Sequence[int] | None = None,
                  logscale: bool = False) -> Path:
    """Minimal gnuplot script plotting columns of a CSV file."""
    ys = ys if ys is not None else range(2, len(columns) + 1)
    # every ::1 skips the header row
    plots = ", ".join(f"'{data_file.name}' every ::1 using {x}:{y} with lines title '{columns[y - 1]}'" for y in ys)
    lines = ["set datafile separator ','", f"set xlabel '{columns[x - 1]}'"]
    if logscale:
        lines.append("set logscale xy")
    lines.append(f"plot {plots}")
    path = Path(path).with_suffix(".gp")
    path.write_text("\n".join(lines) + "\n")
    return path
