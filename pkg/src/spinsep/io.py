"""Plain-text output helpers shared by the reports and the CLI."""
from __future__ import annotations

import numpy as np

from . import __version__


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


def comment_block(lines) -> str:
    out = [f"# spinsep {__version__}"]
    out += [f"# {line}" for line in lines]
    return "\n".join(out) + "\n"


def write_csv(path, names, rows, header_lines=()) -> None:
    """Write a comment header, a column-name line and formatted rows (LF endings)."""
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(comment_block(header_lines))
        fh.write(",".join(names) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")


def write_text(path, body: str, header_lines=()) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(comment_block(header_lines))
        fh.write(body)
        if not body.endswith("\n"):
            fh.write("\n")


def read_csv(path):
    """Return (column names, float array) from a file written by :func:`write_csv`."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    names = lines[0].strip().split(",")
    data = np.array([[float(x) for x in ln.strip().split(",")] for ln in lines[1:]])
    return names, data.reshape(-1, len(names))
