"""CSV files for jumps, fields and result tables.

Every file starts with ``# config_sha256=<hex>`` followed by a header row.
Floats are written with ``repr`` so that reading them back is lossless.
Files are written to a temporary name and renamed, so a failed command never
leaves a partial CSV behind.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from typing import Iterable, Sequence

import numpy as np

from .simulate import FieldRealization, Grid, JumpSet

HASH_PREFIX = "# config_sha256="


def config_hash(config: dict) -> str:
    text = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def render_csv(header: Sequence[str], rows: Iterable[Sequence], digest: str) -> str:
    buf = io.StringIO()
    buf.write(f"{HASH_PREFIX}{digest}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def jump_table(jumps: JumpSet) -> tuple[list[str], list[list]]:
    d = jumps.dimension
    header = [f"xi_{a + 1}" for a in range(d)] + ["s", "lambda", "z"]
    rows = [[*jumps.xi[k], jumps.s[k], jumps.rates[k], jumps.marks[k]] for k in range(len(jumps))]
    return header, rows


def field_table(realization: FieldRealization) -> tuple[list[str], list[list]]:
    grid = realization.grid
    header = [f"x_{a + 1}" for a in range(grid.dimension)] + ["t", "value"]
    points = grid.points()
    times = grid.times()
    flat = realization.values.reshape(points.shape[0], grid.m)
    rows = [[*points[i], times[j], flat[i, j]] for i in range(points.shape[0]) for j in range(grid.m)]
    return header, rows


def read_table(path: str) -> tuple[str, list[str], np.ndarray]:
    """Return ``(config hash, header, float data)`` of a CSV written here."""
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith(HASH_PREFIX):
            raise ValueError(f"{path}: missing '{HASH_PREFIX}' comment line")
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
    if data.size == 0:
        data = np.zeros((0, len(header)))
    return first[len(HASH_PREFIX) :].strip(), header, data


def read_jumps(path: str) -> JumpSet:
    _, header, data = read_table(path)
    d = len(header) - 3
    if d < 1 or header != [f"xi_{a + 1}" for a in range(d)] + ["s", "lambda", "z"]:
        raise ValueError(f"{path}: not a jump file (header {header})")
    return JumpSet(data[:, :d], data[:, d], data[:, d + 1], data[:, d + 2])


def read_field(path: str) -> FieldRealization:
    _, header, data = read_table(path)
    d = len(header) - 2
    if d < 1 or header != [f"x_{a + 1}" for a in range(d)] + ["t", "value"]:
        raise ValueError(f"{path}: not a field file (header {header})")
    if data.shape[0] == 0:
        raise ValueError(f"{path}: empty field")
    axes = [np.unique(data[:, a]) for a in range(d + 1)]
    steps = [np.diff(ax) for ax in axes if ax.size > 1]
    spacing = float(steps[0][0]) if steps else 1.0
    for st in steps:
        if not np.allclose(st, spacing, rtol=1e-9, atol=1e-12):
            raise ValueError(f"{path}: nodes are not on a regular grid")
    shape = tuple(ax.size for ax in axes)
    if data.shape[0] != int(np.prod(shape)):
        raise ValueError(f"{path}: expected {int(np.prod(shape))} rows, found {data.shape[0]}")
    order = np.lexsort(tuple(data[:, a] for a in reversed(range(d + 1))))
    values = data[order, d + 1].reshape(shape)
    grid = Grid(tuple(float(ax[0]) for ax in axes[:d]), float(axes[d][0]), spacing, shape[:d], shape[d])
    return FieldRealization(grid, values, JumpSet.empty(d))
