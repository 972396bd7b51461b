"""Conflict-weighted fusion.

Per-source aggregate conflict is the ``1/k``-weighted sum of the lattice
values over every size-``k`` subset containing the source.  Weights are
``SumC_j**-p`` normalised to one, so a source that disagrees with the others
loses influence.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .conflict import DEFAULT_MAX_SOURCES, ConflictLattice, build_lattice
from .evidence import EvidenceFrame, SampleSeries, WindowSpec, evidence_frames
from .exceptions import (
    DimensionMismatchError,
    IncompleteLatticeError,
    UnequalLengthsError,
)

AXES = ("x", "y", "z")


@dataclass(frozen=True)
class WeightVector:
    weights: np.ndarray
    exponent: int = 1

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.weights.size

    def __getitem__(self, j):
        return self.weights[j]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)

    @classmethod
    def uniform(cls, n: int, exponent: int = 1) -> "WeightVector":
        return cls(np.full(n, 1.0 / n), exponent)


@dataclass(frozen=True)
class FusedInterval:
    lo: float
    hi: float


@dataclass(frozen=True)
class Trajectory3D:
    """Synchronized x/y/z tracks of one source."""

    source_id: int
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        arrs = []
        for name in AXES:
            a = np.array(getattr(self, name), dtype=float)
            if a.ndim != 1 or a.size < 1:
                raise ValueError(f"axis {name} must be a nonempty 1-D sequence")
            if not np.all(np.isfinite(a)):
                raise ValueError(f"source {self.source_id}: non-finite value on axis {name}")
            a.setflags(write=False)
            arrs.append(a)
        if len({a.size for a in arrs}) != 1:
            raise UnequalLengthsError(
                f"source {self.source_id}: axes have different lengths {[a.size for a in arrs]}"
            )
        for name, a in zip(AXES, arrs):
            object.__setattr__(self, name, a)

    def __len__(self):
        return self.x.size

    def axis(self, name: str) -> np.ndarray:
        if name not in AXES:
            raise KeyError(name)
        return getattr(self, name)

    def series(self, name: str) -> SampleSeries:
        return SampleSeries(self.source_id, self.axis(name), self.label)

    def as_array(self) -> np.ndarray:
        """``(n_samples, 3)`` array of x, y, z columns."""
        return np.column_stack([self.x, self.y, self.z])

    def replace(self, **changes) -> "Trajectory3D":
        fields = dict(source_id=self.source_id, x=self.x, y=self.y, z=self.z, label=self.label)
        fields.update(changes)
        return Trajectory3D(**fields)


def sum_conflict(lattice: ConflictLattice, j: int) -> float:
    """Aggregate conflict of source ``j`` (1-based) across the lattice."""
    n = lattice.n_sources
    if not 1 <= j <= n:
        raise ValueError(f"source index {j} outside 1..{n}")
    bit = 1 << (j - 1)
    total = 0.0
    for mask in range(1, 2**n):
        if not mask & bit:
            continue
        try:
            value = lattice[mask]
        except KeyError:
            raise IncompleteLatticeError(
                f"lattice is missing subset mask {mask:#b} needed for source {j}"
            ) from None
        total += value / bin(mask).count("1")
    return total


def sum_conflicts(lattice: ConflictLattice) -> np.ndarray:
    """Aggregate conflict of every source, in one pass over the lattice."""
    n = lattice.n_sources
    values = lattice.masks()
    if len(values) != 2**n - 1:
        raise IncompleteLatticeError(f"lattice has {len(values)} of {2**n - 1} subsets")
    totals = np.zeros(n)
    for mask in range(1, 2**n):
        share = values[mask] / bin(mask).count("1")
        for j in range(n):
            if mask >> j & 1:
                totals[j] += share
    return totals


def weights(sum_conflicts: Sequence[float], p: int = 1) -> WeightVector:
    """Normalised ``SumC**-p`` weights.

    Sources with zero aggregate conflict take all the mass, split evenly,
    which is the limit of the formula as their SumC goes to zero.
    """
    s = np.asarray(sum_conflicts, dtype=float)
    if s.ndim != 1 or s.size < 1:
        raise ValueError("need at least one aggregate conflict value")
    if int(p) != p or p < 1:
        raise ValueError(f"exponent must be a positive integer, got {p}")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise ValueError("aggregate conflicts must be finite and nonnegative")
    zero = s == 0
    if zero.any():
        return WeightVector(zero / zero.sum(), int(p))
    # Scale by the minimum first so large p cannot underflow every term.
    raw = (s.min() / s) ** p
    return WeightVector(raw / raw.sum(), int(p))


def _check_dims(n: int, w: WeightVector):
    if len(w) != n:
        raise DimensionMismatchError(f"{n} sources but {len(w)} weights")


def fuse_interval(frame: EvidenceFrame, w: WeightVector) -> FusedInterval:
    _check_dims(frame.n_sources, w)
    wa = np.asarray(w)
    return FusedInterval(float(frame.los @ wa), float(frame.his @ wa))


def fuse_samples(values: Sequence[float], w: WeightVector) -> float:
    v = np.asarray(values, dtype=float)
    _check_dims(v.size, w)
    if not np.all(np.isfinite(v)):
        raise ValueError("sample values must be finite")
    out = float(v @ np.asarray(w))
    # Keep the convex-combination bound exact under rounding.
    return min(max(out, float(v.min())), float(v.max()))


def frame_weights(frame: EvidenceFrame, p: int = 1, max_sources: int = DEFAULT_MAX_SOURCES):
    lattice = build_lattice(frame, max_sources=max_sources)
    return lattice, weights(sum_conflicts(lattice), p)


@dataclass
class WindowDiagnostics:
    axis: str
    window_start: int
    weights: np.ndarray
    pairwise: dict = field(default_factory=dict)


def fuse_series(
    columns: np.ndarray,
    spec: WindowSpec,
    p: int = 1,
    mode: str = "window",
    max_sources: int = DEFAULT_MAX_SOURCES,
):
    """Fuse an ``(n_samples, n_sources)`` array column-wise.

    Returns ``(fused, per_sample_weights, frames_and_weights)``.  In
    ``"window"`` mode each sample takes the weights of the earliest window that
    covers it; samples past the last full window reuse the last window's
    weights.  ``"global"`` mode computes one set of weights from a single
    window spanning the whole record.
    """
    columns = np.asarray(columns, dtype=float)
    n_samples, n_sources = columns.shape
    series = [SampleSeries(j + 1, columns[:, j]) for j in range(n_sources)]
    if mode == "global":
        spec = WindowSpec(n_samples, n_samples, spec.sigma_multiplier)
    elif mode != "window":
        raise ValueError(f"unknown weighting mode {mode!r}")
    frames = evidence_frames(series, spec)
    per_sample = np.empty((n_samples, n_sources))
    records = []
    next_free = 0
    for frame in frames:
        lattice, w = frame_weights(frame, p, max_sources)
        records.append((frame, lattice, w))
        end = frame.window_start + spec.length
        if end > next_free:
            per_sample[next_free:end] = w.weights
            next_free = end
    if next_free < n_samples:
        per_sample[next_free:] = records[-1][2].weights
    fused = np.einsum("ij,ij->i", columns, per_sample)
    fused = np.clip(fused, columns.min(axis=1), columns.max(axis=1))
    return fused, per_sample, records


def fuse_trajectories(
    trajectories: Sequence[Trajectory3D],
    spec: WindowSpec,
    p: int = 1,
    mode: str = "window",
    max_sources: int = DEFAULT_MAX_SOURCES,
    source_id: int = 0,
):
    """Fuse each axis independently; returns ``(fused, diagnostics)``."""
    if len(trajectories) < 2:
        raise ValueError("fusion needs at least two trajectories")
    if len({len(t) for t in trajectories}) != 1:
        raise UnequalLengthsError("trajectories must share one length")
    fused_axes = {}
    diagnostics = []
    for axis in AXES:
        columns = np.column_stack([t.axis(axis) for t in trajectories])
        fused, _, records = fuse_series(columns, spec, p, mode, max_sources)
        fused_axes[axis] = fused
        diagnostics.extend(
            WindowDiagnostics(axis, frame.window_start, w.weights, lattice.pairwise())
            for frame, lattice, w in records
        )
    return Trajectory3D(source_id, label="fused", **fused_axes), diagnostics
