"""Text formats for grid functions and cell sets.

Grid function file::

    n,L
    v_0,v_1,...,v_{2^(nL)-1}

Set files share the header and carry one line of 0/1 flags.  Values are in
the package's cell order (axis 0 fastest).
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import GridError, GridParseError
from .grid import CellSet, GridFunction, GridSpec


def format_value(x: float) -> str:
    """Shortest round-trip repr, with integral values written without '.0'."""
    r = repr(float(x))
    if r.endswith(".0"):
        r = r[:-2]
    return r


def _parse_header(line: str) -> GridSpec:
    parts = [p.strip() for p in line.split(",")]
    if len(parts) != 2:
        raise GridParseError(f"header must be 'n,L', got {line.strip()!r}", line=1)
    try:
        n, L = int(parts[0]), int(parts[1])
    except ValueError:
        raise GridParseError(f"header must hold two integers, got {line.strip()!r}", line=1)
    try:
        return GridSpec(n, L)
    except GridError as exc:
        raise GridParseError(str(exc), line=1)


def _split_lines(text: str) -> list[str]:
    lines = [ln for ln in text.splitlines()]
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) < 2:
        raise GridParseError("expected a header line and a value line", line=len(lines) + 1)
    if len(lines) > 2:
        raise GridParseError("unexpected content after the value line", line=3)
    return lines


def parse_grid_function(text: str) -> GridFunction:
    header, body = _split_lines(text)
    spec = _parse_header(header)
    tokens = body.split(",")
    if len(tokens) != spec.num_cells:
        raise GridParseError(f"expected {spec.num_cells} values, got {len(tokens)}", line=2)
    vals = np.empty(spec.num_cells)
    for i, tok in enumerate(tokens):
        try:
            x = float(tok)
        except ValueError:
            raise GridParseError(f"value {i} is not a number: {tok.strip()!r}", line=2)
        if not math.isfinite(x):
            raise GridParseError(f"value {i} is not finite: {tok.strip()!r}", line=2)
        if x < 0:
            raise GridParseError(f"value {i} is negative: {tok.strip()!r}", line=2)
        vals[i] = x
    return GridFunction(spec, vals)


def parse_cell_set(text: str) -> CellSet:
    header, body = _split_lines(text)
    spec = _parse_header(header)
    tokens = [t.strip() for t in body.split(",")]
    if len(tokens) != spec.num_cells:
        raise GridParseError(f"expected {spec.num_cells} flags, got {len(tokens)}", line=2)
    bad = [t for t in tokens if t not in ("0", "1")]
    if bad:
        raise GridParseError(f"membership flags must be 0 or 1, got {bad[0]!r}", line=2)
    return CellSet(spec, np.array([t == "1" for t in tokens]))


def dump_grid_function(f: GridFunction) -> str:
    return f"{f.spec.n},{f.spec.L}\n" + ",".join(format_value(v) for v in f.values) + "\n"


def dump_cell_set(E: CellSet) -> str:
    return f"{E.spec.n},{E.spec.L}\n" + ",".join("1" if b else "0" for b in E.mask) + "\n"


def read_grid_function(path) -> GridFunction:
    return parse_grid_function(_read(path))


def read_cell_set(path) -> CellSet:
    return parse_cell_set(_read(path))


def write_grid_function(f: GridFunction, path) -> None:
    Path(path).write_text(dump_grid_function(f))


def write_cell_set(E: CellSet, path) -> None:
    Path(path).write_text(dump_cell_set(E))


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise GridParseError(f"cannot read {path}: {exc.strerror}")
