"""CSV and JSON formats.

Curve CSV: the header row holds the grid coordinates, every further row one
curve; an empty cell or ``NA`` marks a missing value.  Point CSV: an optional
header row of column names, then one point per row.  Floats are written with
``repr``, the shortest decimal string that reads back to the same double.
"""

from __future__ import annotations

import csv
import io
import json
import os
from typing import IO, Iterable, List, Optional, Sequence, Union

import numpy as np

from .model import DataError, DepthVector, FunctionalSample, Grid, MultivariateSample

PathOrFile = Union[str, os.PathLike, IO[str]]
MISSING = ("", "NA")


def fmt(x: float) -> str:
    """Shortest round-trip decimal form of a float."""
    return repr(float(x))


def _open_read(src: PathOrFile):
    if hasattr(src, "read"):
        return src, False
    try:
        return open(src, newline="", encoding="utf-8"), True
    except OSError as exc:
        raise DataError(f"cannot read {src}: {exc.strerror}") from None


def _rows(src: PathOrFile) -> List[List[str]]:
    fh, close = _open_read(src)
    try:
        return [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    finally:
        if close:
            fh.close()


def _float(cell: str, row: int, col: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataError(f"row {row}, column {col}: cannot parse {cell!r} as a number") from None
    if not np.isfinite(value):
        raise DataError(f"row {row}, column {col}: non-finite value {cell!r}")
    return value


def _is_numeric_row(row: Sequence[str]) -> bool:
    try:
        [float(c) for c in row]
    except ValueError:
        return False
    return True


def sniff_kind(src: PathOrFile) -> str:
    """``curves`` when the header row is numeric (a grid), else ``points``."""
    rows = _rows(src)
    if not rows:
        raise DataError("empty file")
    head = rows[0]
    if len(head) >= 2 and _is_numeric_row(head) and _looks_like_grid(head):
        return "curves"
    return "points"


def _looks_like_grid(row: Sequence[str]) -> bool:
    vals = np.array([float(c) for c in row])
    return bool(np.all(np.diff(vals) > 0) and vals[0] >= 0 and vals[-1] <= 1)


def read_curves(src: PathOrFile, drop_empty: bool = False) -> FunctionalSample:
    """Read a curve CSV into a :class:`FunctionalSample` with masks from missing cells.

    Curves that are missing everywhere are an error unless ``drop_empty``.
    """
    rows = _rows(src)
    if len(rows) < 2:
        raise DataError("a curve file needs a grid header and at least one curve")
    header = [c.strip() for c in rows[0]]
    grid_vals = [_float(c, 1, j + 1) for j, c in enumerate(header)]
    try:
        grid = Grid(np.array(grid_vals))
    except DataError as exc:
        raise DataError(f"header: {exc}") from None
    T = len(grid)
    curves, masks = [], []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != T:
            raise DataError(f"row {i}: expected {T} cells, found {len(row)}")
        vals = np.zeros(T)
        obs = np.ones(T, dtype=bool)
        for j, cell in enumerate(row):
            cell = cell.strip()
            if cell in MISSING:
                obs[j] = False
            else:
                vals[j] = _float(cell, i, j + 1)
        if not obs.any():
            if drop_empty:
                continue
            raise DataError(f"row {i}: curve has no observed value (use drop_empty to skip it)")
        curves.append(vals)
        masks.append(obs)
    if not curves:
        raise DataError("no curves left after dropping empty rows")
    return FunctionalSample(grid, np.array(curves), np.array(masks))


def write_curves(dst: PathOrFile, sample: FunctionalSample) -> None:
    obs = sample.observed
    lines = [",".join(fmt(t) for t in sample.grid.points)]
    for vals, o in zip(sample.curves, obs):
        lines.append(",".join(fmt(v) if ok else "NA" for v, ok in zip(vals, o)))
    _write_text(dst, "\n".join(lines) + "\n")


def read_points(src: PathOrFile) -> MultivariateSample:
    """Read one point per row; a non-numeric first row is taken as column names."""
    rows = _rows(src)
    if not rows:
        raise DataError("empty point file")
    start = 0 if _is_numeric_row(rows[0]) else 1
    data = rows[start:]
    if not data:
        raise DataError("point file has no data rows")
    d = len(data[0])
    pts = []
    for i, row in enumerate(data, start=start + 1):
        if len(row) != d:
            raise DataError(f"row {i}: expected {d} cells, found {len(row)}")
        pts.append([_float(c.strip(), i, j + 1) for j, c in enumerate(row)])
    return MultivariateSample(np.array(pts))


def write_points(dst: PathOrFile, sample: MultivariateSample,
                 names: Optional[Sequence[str]] = None) -> None:
    names = list(names) if names is not None else [f"x{j + 1}" for j in range(sample.dim)]
    lines = [",".join(names)]
    lines += [",".join(fmt(v) for v in p) for p in sample.points]
    _write_text(dst, "\n".join(lines) + "\n")


def read_sample(src: PathOrFile, kind: str = "auto", drop_empty: bool = False):
    if kind == "auto":
        if hasattr(src, "read"):
            text = src.read()
            kind = sniff_kind(io.StringIO(text))
            src = io.StringIO(text)
        else:
            kind = sniff_kind(src)
    if kind == "curves":
        return read_curves(src, drop_empty=drop_empty)
    if kind == "points":
        return read_points(src)
    raise ValueError(f"unknown sample kind {kind!r}")


def write_depth_vector(dst: PathOrFile, dv: DepthVector) -> None:
    lines = ["index,depth"] + [f"{i},{fmt(v)}" for i, v in enumerate(dv.values)]
    _write_text(dst, "\n".join(lines) + "\n")


def write_rows(dst: PathOrFile, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if isinstance(v, float) else str(v) for v in row))
    _write_text(dst, "\n".join(lines) + "\n")


def dumps(obj) -> str:
    """Deterministic JSON (floats via repr, insertion order kept)."""
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _write_text(dst: PathOrFile, text: str) -> None:
    if hasattr(dst, "write"):
        dst.write(text)
        return
    with open(dst, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)
