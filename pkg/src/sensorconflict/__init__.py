"""Interval-based multi-sensor conflict measurement and conflict-weighted fusion."""
from .conflict import (
    ConflictLattice,
    InducedPartition,
    SourceSubset,
    build_lattice,
    induce_partition,
    interval_conflict,
    monte_carlo_conflict,
    subset_conflict,
)
from .estimators import AverageFusion, ConflictLatticeTransformer, ConflictWeightedFusion
from .evaluation import (
    EvalReport,
    SweepResult,
    average_fusion,
    mean_abs_diff,
    run_scenario,
    synthetic_sources,
    window_sweep,
)
from .evidence import (
    EvidenceFrame,
    IntervalEvidence,
    SampleSeries,
    WindowSpec,
    evidence_frames,
    make_evidence,
    window_stats,
)
from .fusion import (
    FusedInterval,
    Trajectory3D,
    WeightVector,
    fuse_interval,
    fuse_samples,
    fuse_trajectories,
    sum_conflict,
    sum_conflicts,
    weights,
)
from .noise import NoiseSpec, add_dc, add_gaussian, add_impulse, derive_noisy_source

__version__ = "0.1.0"
