"""Deterministic CSV emission.

One format for every output: comma-separated, '\n' line endings, a header
row, floats in scientific notation with 15 significant digits, booleans as
'true'/'false'. Identical inputs produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["format_value", "render_csv", "write_csv"]

_FLOAT_FMT = "{:.14e}"


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return _FLOAT_FMT.format(float(value))


def render_csv(header: list[str], columns: list) -> str:
    if len(header) != len(columns):
        raise ValueError("header and column counts differ")
    lengths = {len(c) for c in columns}
    if len(lengths) > 1:
        raise ValueError("columns have unequal lengths")
    lines = [",".join(header)]
    n_rows = lengths.pop() if lengths else 0
    for i in range(n_rows):
        lines.append(",".join(format_value(col[i]) for col in columns))
    return "\n".join(lines) + "\n"


def write_csv(path, header: list[str], columns: list) -> None:
    Path(path).write_text(render_csv(header, columns), encoding="utf-8", newline="\n")
