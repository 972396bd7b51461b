"""Benchmarks: discrepancy metric, equal-weight baseline, scenarios, window sweep."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .conflict import DEFAULT_MAX_SOURCES, as_subset, interval_conflict
from .evidence import SampleSeries, WindowSpec, evidence_frames
from .exceptions import UnequalLengthsError, WindowOutOfRangeError
from .fusion import AXES, Trajectory3D, fuse_trajectories
from .noise import NoiseSpec, derive_noisy_source


def mean_abs_diff(a, b) -> float:
    """Mean absolute elementwise difference of two equal-length sequences."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise UnequalLengthsError(f"sequences differ in shape: {a.shape} vs {b.shape}")
    if a.size < 1:
        raise ValueError("sequences must be nonempty")
    return float(np.mean(np.abs(a - b)))


def average_fusion(trajectories: Sequence[Trajectory3D], source_id: int = 0) -> Trajectory3D:
    if not trajectories:
        raise ValueError("need at least one trajectory")
    if len({len(t) for t in trajectories}) != 1:
        raise UnequalLengthsError("trajectories must share one length")
    out = {}
    for axis in AXES:
        cols = np.column_stack([t.axis(axis) for t in trajectories])
        out[axis] = np.clip(cols.mean(axis=1), cols.min(axis=1), cols.max(axis=1))
    return Trajectory3D(source_id, label="average", **out)


def synthetic_sources(n_sources: int = 3, length: int = 600, seed: int = 0, jitter: float = 0.5) -> list[Trajectory3D]:
    """Clean sources observing one smooth 3D path, each with small iid jitter."""
    rng = np.random.default_rng(seed)
    t = np.arange(length, dtype=float)
    path = {
        "x": 200.0 * np.cos(2 * np.pi * t / 400.0) + 0.05 * t,
        "y": 150.0 * np.sin(2 * np.pi * t / 300.0),
        "z": 1500.0 + 100.0 * np.sin(2 * np.pi * t / 500.0 + 0.7),
    }
    return [
        Trajectory3D(
            j,
            label=f"src{j}",
            **{a: path[a] + rng.normal(0.0, jitter, length) for a in AXES},
        )
        for j in range(1, n_sources + 1)
    ]


def assemble_sources(clean: Sequence[Trajectory3D], spec: NoiseSpec, corrupt_source: int = 2, position: int = 3) -> list[Trajectory3D]:
    """Insert a corrupted copy of ``corrupt_source`` at 1-based ``position``.

    All sources are renumbered 1..n in their final order.
    """
    if len(clean) < 3:
        raise ValueError("scenarios need at least three clean sources")
    base = next((t for t in clean if t.source_id == corrupt_source), None)
    if base is None:
        raise ValueError(f"no clean source with id {corrupt_source}")
    noisy = derive_noisy_source(base, spec)
    ordered = list(clean)
    ordered.insert(position - 1, noisy)
    return [t.replace(source_id=j) for j, t in enumerate(ordered, start=1)]


@dataclass
class EvalReport:
    scenario: str
    metrics: dict
    config: dict
    seed: Optional[int] = None
    weights_per_window: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def improvement(self, axis: str) -> float:
        """Ratio proposed/average discrepancy on ``axis`` (lower is better)."""
        avg = self.metrics["average"][axis]
        return self.metrics["proposed"][axis] / avg if avg else float("nan")


def run_scenario(
    clean: Sequence[Trajectory3D],
    spec: NoiseSpec,
    window: WindowSpec = WindowSpec(),
    p: int = 3,
    reference_source: int = 1,
    corrupt_source: int = 2,
    mode: str = "window",
    scenario: Optional[str] = None,
    max_sources: int = DEFAULT_MAX_SOURCES,
) -> EvalReport:
    sources = assemble_sources(clean, spec, corrupt_source)
    reference = next(t for t in sources if t.source_id == reference_source)
    baseline = average_fusion(sources)
    proposed, diagnostics = fuse_trajectories(sources, window, p, mode, max_sources)
    axes = AXES if spec.kind == "gaussian" else spec.axes
    metrics = {
        "average": {a: mean_abs_diff(baseline.axis(a), reference.axis(a)) for a in axes},
        "proposed": {a: mean_abs_diff(proposed.axis(a), reference.axis(a)) for a in axes},
    }
    config = {
        "window": window.length,
        "stride": window.stride,
        "sigma_mult": window.sigma_multiplier,
        "exponent": p,
        "reference_source": reference_source,
        "corrupt_source": corrupt_source,
        "mode": mode,
        "n_sources": len(sources),
        "length": len(reference),
        "noise": spec.to_dict(),
    }
    weights_per_window = [
        {"axis": d.axis, "window_start": d.window_start, "weights": d.weights.tolist()}
        for d in diagnostics
    ]
    return EvalReport(scenario or spec.kind, metrics, config, spec.seed, weights_per_window)


@dataclass
class SweepResult:
    subset: tuple
    rows: list  # (window length, mean conflict, std conflict)

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float).reshape(-1, 3)


def window_sweep(series: Sequence[SampleSeries], lengths: Sequence[int], subset=(1, 4), sigma_multiplier: float = 3.0) -> SweepResult:
    """Mean and std of one subset's conflict over all stride-1 windows, per length."""
    lengths = sorted(set(int(m) for m in lengths))
    if not lengths:
        raise ValueError("no window lengths given")
    n_samples = min(len(s) for s in series)
    if lengths[-1] > n_samples:
        raise WindowOutOfRangeError(
            f"window length {lengths[-1]} exceeds data length {n_samples}"
        )
    subset = as_subset(subset)
    if subset.members[-1] > len(series):
        raise ValueError(f"subset {subset} references a missing source")
    idx = np.asarray(subset.members) - 1
    rows = []
    for m in lengths:
        frames = evidence_frames(series, WindowSpec(m, 1, sigma_multiplier))
        values = np.array([interval_conflict(f.los[idx], f.his[idx]) for f in frames])
        rows.append((m, float(values.mean()), float(values.std())))
    return SweepResult(subset.members, rows)
