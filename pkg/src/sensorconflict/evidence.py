"""Windowed interval-valued evidence from raw sensor samples.

Each sensor stream is cut into length-``m`` windows and every window is
summarised as ``[mean - k*std, mean + k*std]`` using the population standard
deviation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .exceptions import (
    NonFiniteInputError,
    UnequalLengthsError,
    WindowOutOfRangeError,
)


@dataclass(frozen=True)
class SampleSeries:
    """Ordered scalar readings from one sensor."""

    source_id: int
    values: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("a series needs at least one sample")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise NonFiniteInputError(
                f"source {self.source_id}: non-finite value at index {bad}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class WindowSpec:
    length: int = 10
    stride: int = 1
    sigma_multiplier: float = 3.0

    def __post_init__(self):
        if int(self.length) != self.length or self.length < 1:
            raise ValueError(f"window length must be a positive integer, got {self.length}")
        if int(self.stride) != self.stride or self.stride < 1:
            raise ValueError(f"stride must be a positive integer, got {self.stride}")
        if not (self.sigma_multiplier > 0 and math.isfinite(self.sigma_multiplier)):
            raise ValueError(
                f"sigma multiplier must be positive, got {self.sigma_multiplier}"
            )

    def starts(self, n_samples: int) -> range:
        """Window start indices that fit entirely inside ``n_samples``."""
        return range(0, max(n_samples - self.length + 1, 0), self.stride)


@dataclass(frozen=True)
class IntervalEvidence:
    source_id: int
    window_start: int
    mean: float
    std: float
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class EvidenceFrame:
    """One interval per source, all taken from the same window."""

    window_start: int
    evidences: tuple = field(default_factory=tuple)

    def __post_init__(self):
        evs = tuple(sorted(self.evidences, key=lambda e: e.source_id))
        ids = [e.source_id for e in evs]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate source ids in frame: {ids}")
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError(f"frame source ids must be 1..n, got {ids}")
        if any(e.window_start != self.window_start for e in evs):
            raise ValueError("all evidences in a frame must share the window start")
        object.__setattr__(self, "evidences", evs)

    @classmethod
    def from_intervals(cls, intervals, window_start: int = 0) -> "EvidenceFrame":
        """Build a frame directly from ``(lo, hi)`` pairs; sources are numbered 1..n."""
        evs = []
        for j, (lo, hi) in enumerate(intervals, start=1):
            lo, hi = float(lo), float(hi)
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise NonFiniteInputError(f"interval {j} has a non-finite endpoint")
            if lo > hi:
                raise ValueError(f"interval {j}: lo {lo} > hi {hi}")
            evs.append(
                IntervalEvidence(j, window_start, (lo + hi) / 2, float("nan"), lo, hi)
            )
        return cls(window_start, tuple(evs))

    @property
    def n_sources(self) -> int:
        return len(self.evidences)

    @property
    def source_ids(self) -> tuple:
        return tuple(e.source_id for e in self.evidences)

    @property
    def los(self) -> np.ndarray:
        return np.array([e.lo for e in self.evidences])

    @property
    def his(self) -> np.ndarray:
        return np.array([e.hi for e in self.evidences])

    def evidence(self, source_id: int) -> IntervalEvidence:
        for e in self.evidences:
            if e.source_id == source_id:
                return e
        raise KeyError(source_id)


def _window(series: SampleSeries, spec: WindowSpec, start: int) -> np.ndarray:
    if start < 0 or start + spec.length > len(series):
        raise WindowOutOfRangeError(
            f"window [{start}, {start + spec.length}) exceeds series of length {len(series)}"
        )
    return series.values[start : start + spec.length]


def window_stats(series: SampleSeries, spec: WindowSpec, start: int) -> tuple[float, float]:
    """Mean and population (divisor ``m``) standard deviation of one window."""
    window = _window(series, spec, start)
    if not np.all(np.isfinite(window)):
        raise NonFiniteInputError(f"non-finite sample in window starting at {start}")
    mean = float(np.mean(window))
    std = float(np.sqrt(np.mean((window - mean) ** 2)))
    return mean, std


def make_evidence(series: SampleSeries, spec: WindowSpec, start: int) -> IntervalEvidence:
    mean, std = window_stats(series, spec, start)
    half = spec.sigma_multiplier * std
    return IntervalEvidence(series.source_id, start, mean, std, mean - half, mean + half)


def evidence_frames(all_series: Sequence[SampleSeries], spec: WindowSpec) -> list[EvidenceFrame]:
    """Slide the window over synchronized streams and emit one frame per start.

    Trailing samples that do not fill a whole window are dropped.
    """
    if not all_series:
        raise ValueError("need at least one series")
    lengths = {len(s) for s in all_series}
    if len(lengths) != 1:
        raise UnequalLengthsError(f"series lengths differ: {sorted(lengths)}")
    (n_samples,) = lengths
    if n_samples < spec.length:
        raise WindowOutOfRangeError(
            f"series length {n_samples} is shorter than window length {spec.length}"
        )
    return [
        EvidenceFrame(start, tuple(make_evidence(s, spec, start) for s in all_series))
        for start in spec.starts(n_samples)
    ]
