"""CSV ingestion and serialization.

Scalar files are wide: ``t,src1,...,srcN``.  Trajectory files are long:
``t,src,x,y,z`` with one row per (t, src).  Numbers are written with the
shortest repr that parses back to the same float.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .evidence import SampleSeries
from .exceptions import IngestionError
from .fusion import AXES, Trajectory3D

TRAJECTORY_HEADER = ["t", "src", "x", "y", "z"]


def fmt(value) -> str:
    return repr(float(value))


def _read_rows(path):
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IngestionError(str(exc), path) from exc
    rows = [(i, r) for i, r in enumerate(rows, start=1) if r and any(c.strip() for c in r)]
    if not rows:
        raise IngestionError("file is empty", path)
    return path, rows


def _number(cell: str, path, line: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise IngestionError(f"column {column!r}: cannot parse {cell!r} as a number", path, line) from None
    if not math.isfinite(value):
        raise IngestionError(f"column {column!r}: non-finite value {cell!r}", path, line)
    return value


def sniff_format(path) -> str:
    """``"trajectory"`` if the header is ``t,src,x,y,z`` else ``"scalar"``."""
    _, rows = _read_rows(path)
    header = [h.strip() for h in rows[0][1]]
    return "trajectory" if header == TRAJECTORY_HEADER else "scalar"


def ingest_scalar_csv(path) -> tuple[np.ndarray, list[SampleSeries]]:
    """Read a wide scalar file; returns ``(t, series)`` with rows in file order."""
    path, rows = _read_rows(path)
    header = [h.strip() for h in rows[0][1]]
    if len(header) < 2 or header[0] != "t":
        raise IngestionError("header must be 't,src1,...,srcN'", path, rows[0][0])
    names = header[1:]
    t, body = [], []
    for line, row in rows[1:]:
        if len(row) != len(header):
            raise IngestionError(f"ragged row: expected {len(header)} cells, got {len(row)}", path, line)
        t.append(_number(row[0], path, line, "t"))
        body.append([_number(c, path, line, name) for c, name in zip(row[1:], names)])
    if not body:
        raise IngestionError("no data rows", path)
    data = np.array(body)
    series = [SampleSeries(j + 1, data[:, j], names[j]) for j in range(len(names))]
    return np.array(t), series


def ingest_trajectory_csv(path) -> tuple[np.ndarray, list[Trajectory3D]]:
    """Read a long-format trajectory file; returns ``(t, trajectories)``.

    Rows may appear in any order and are stably sorted by ``t``.  Sources are
    numbered 1..n in order of their ``src`` label (numerically when every
    label is an integer).
    """
    path, rows = _read_rows(path)
    header = [h.strip() for h in rows[0][1]]
    if header != TRAJECTORY_HEADER:
        raise IngestionError("header must be 't,src,x,y,z'", path, rows[0][0])
    samples = {}
    for line, row in rows[1:]:
        if len(row) != 5:
            raise IngestionError(f"ragged row: expected 5 cells, got {len(row)}", path, line)
        t = _number(row[0], path, line, "t")
        src = row[1].strip()
        if not src:
            raise IngestionError("empty src label", path, line)
        if (t, src) in samples:
            raise IngestionError(f"duplicate sample for t={row[0]}, src={src}", path, line)
        samples[(t, src)] = [_number(c, path, line, a) for c, a in zip(row[2:], AXES)]
    if not samples:
        raise IngestionError("no data rows", path)
    times = sorted({t for t, _ in samples})
    labels = sorted({s for _, s in samples}, key=_label_key)
    out = []
    for j, label in enumerate(labels, start=1):
        xyz = []
        for t in times:
            try:
                xyz.append(samples[(t, label)])
            except KeyError:
                raise IngestionError(f"missing sample for t={fmt(t)}, src={label}", path) from None
        arr = np.array(xyz)
        out.append(Trajectory3D(j, arr[:, 0], arr[:, 1], arr[:, 2], label=label))
    return np.array(times), out


def _label_key(label: str):
    try:
        return (0, int(label), label)
    except ValueError:
        return (1, 0, label)


def write_scalar_csv(fh, t: Sequence[float], columns: dict) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t", *columns])
    cols = [np.asarray(c) for c in columns.values()]
    for i, ti in enumerate(t):
        writer.writerow([fmt(ti), *(fmt(c[i]) for c in cols)])


def write_trajectory_csv(fh, t: Sequence[float], trajectories: Iterable[Trajectory3D]) -> None:
    trajectories = list(trajectories)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRAJECTORY_HEADER)
    for i, ti in enumerate(t):
        for traj in trajectories:
            label = traj.label if traj.label is not None else str(traj.source_id)
            writer.writerow([fmt(ti), label, fmt(traj.x[i]), fmt(traj.y[i]), fmt(traj.z[i])])


def write_rows(fh, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def to_text(writer, *args) -> str:
    buf = io.StringIO()
    writer(buf, *args)
    return buf.getvalue()
