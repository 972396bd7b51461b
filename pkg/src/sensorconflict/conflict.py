"""Conflict measure over every subset of sources in an evidence frame.

For a subset of ``i`` intervals, the sorted ``2i`` endpoints split the covered
span into ``2i - 1`` cells.  Each cell contributes its length times the
fraction of subset members that do *not* cover it; the total is normalised by
the span.  Singletons have zero conflict.  The resulting set function is a
normal measure but not a monotone (fuzzy) one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union

import numpy as np

from .evidence import EvidenceFrame
from .exceptions import DegenerateSpanError, TooManySourcesError, UnknownSourceError

DEFAULT_MAX_SOURCES = 16


@dataclass(frozen=True)
class SourceSubset:
    """Nonempty set of 1-based source ids, stored sorted."""

    members: tuple

    def __post_init__(self):
        members = tuple(sorted(int(m) for m in self.members))
        if not members:
            raise ValueError("a source subset cannot be empty")
        if len(set(members)) != len(members):
            raise ValueError(f"duplicate members in subset {members}")
        if members[0] < 1:
            raise ValueError(f"source ids are 1-based, got {members}")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_mask(cls, mask: int) -> "SourceSubset":
        if mask <= 0:
            raise ValueError("mask must select at least one source")
        return cls(tuple(j + 1 for j in range(mask.bit_length()) if mask >> j & 1))

    @property
    def mask(self) -> int:
        out = 0
        for m in self.members:
            out |= 1 << (m - 1)
        return out

    @property
    def size(self) -> int:
        return len(self.members)

    def __contains__(self, source_id) -> bool:
        return source_id in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __str__(self):
        return "{" + ",".join(f"x{m}" for m in self.members) + "}"


SubsetLike = Union[SourceSubset, int, Iterable[int]]


def as_subset(subset: SubsetLike) -> SourceSubset:
    """Accept a SourceSubset, a bitmask, or an iterable of source ids."""
    if isinstance(subset, SourceSubset):
        return subset
    if isinstance(subset, (int, np.integer)):
        return SourceSubset.from_mask(int(subset))
    return SourceSubset(tuple(subset))


@dataclass(frozen=True)
class InducedPartition:
    endpoints: np.ndarray
    counts: np.ndarray
    n_members: int

    @property
    def cells(self) -> list[tuple[float, float]]:
        e = self.endpoints
        return [(float(a), float(b)) for a, b in zip(e[:-1], e[1:])]

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.endpoints)

    @property
    def span(self) -> float:
        return float(self.endpoints[-1] - self.endpoints[0])


def _subset_bounds(frame: EvidenceFrame, subset: SourceSubset):
    n = frame.n_sources
    if subset.members[-1] > n:
        raise UnknownSourceError(
            f"subset {subset} references a source absent from a frame of {n} sources"
        )
    idx = np.asarray(subset.members) - 1
    return frame.los[idx], frame.his[idx]


def _partition(los: np.ndarray, his: np.ndarray):
    endpoints = np.sort(np.concatenate([los, his]), kind="stable")
    # Midpoint test; zero-length cells collapse to the shared endpoint itself.
    probes = (endpoints[:-1] + endpoints[1:]) / 2
    covered = (los[:, None] <= probes[None, :]) & (probes[None, :] <= his[:, None])
    return endpoints, covered.sum(axis=0)


def induce_partition(frame: EvidenceFrame, subset: SubsetLike) -> InducedPartition:
    subset = as_subset(subset)
    los, his = _subset_bounds(frame, subset)
    endpoints, counts = _partition(los, his)
    return InducedPartition(endpoints, counts, subset.size)


def interval_conflict(los, his) -> float:
    """Conflict of a bare collection of intervals ``[los[k], his[k]]``."""
    los = np.asarray(los, dtype=float)
    his = np.asarray(his, dtype=float)
    i = los.size
    if i < 2:
        return 0.0
    endpoints, counts = _partition(los, his)
    span = endpoints[-1] - endpoints[0]
    if span == 0:
        return 0.0
    lengths = np.diff(endpoints)
    total = 0.0
    for length, count in zip(lengths.tolist(), counts.tolist()):
        total += length * (1.0 - count / i)
    return min(max(total / span, 0.0), 1.0)


def subset_conflict(frame: EvidenceFrame, subset: SubsetLike) -> float:
    subset = as_subset(subset)
    los, his = _subset_bounds(frame, subset)
    return interval_conflict(los, his)


class ConflictLattice(Mapping):
    """Conflict value for every nonempty subset of a frame's sources.

    Keys are bitmasks (bit ``j-1`` set for source ``j``); lookups also accept
    a :class:`SourceSubset` or an iterable of source ids.
    """

    def __init__(self, n_sources: int, values: dict, window_start: int = 0):
        self.n_sources = n_sources
        self.window_start = window_start
        self._values = dict(values)

    def _key(self, subset):
        return as_subset(subset).mask

    def __getitem__(self, subset) -> float:
        if isinstance(subset, int) and subset in self._values:
            return self._values[subset]
        return self._values[self._key(subset)]

    def masks(self) -> dict:
        """Read-only view of ``{bitmask: value}``."""
        return self._values.copy()

    def __contains__(self, subset) -> bool:
        try:
            return self._key(subset) in self._values
        except (ValueError, TypeError):
            return False

    def __iter__(self):
        return iter(sorted(self._values))

    def __len__(self):
        return len(self._values)

    def subsets(self):
        """Subsets ordered by size then lexicographically by members."""
        subs = [SourceSubset.from_mask(m) for m in self._values]
        return sorted(subs, key=lambda s: (s.size, s.members))

    @property
    def is_complete(self) -> bool:
        return len(self._values) == 2**self.n_sources - 1

    def pairwise(self) -> dict:
        return {
            s.members: self._values[s.mask] for s in self.subsets() if s.size == 2
        }

    def __repr__(self):
        return f"ConflictLattice(n_sources={self.n_sources}, window_start={self.window_start})"


def build_lattice(frame: EvidenceFrame, max_sources: int = DEFAULT_MAX_SOURCES) -> ConflictLattice:
    n = frame.n_sources
    if n < 1:
        raise ValueError("frame has no sources")
    if n > max_sources:
        raise TooManySourcesError(
            f"{n} sources exceeds the lattice limit of {max_sources} (2^n subsets)"
        )
    los, his = frame.los, frame.his
    values = {}
    for mask in range(1, 2**n):
        idx = [j for j in range(n) if mask >> j & 1]
        values[mask] = interval_conflict(los[idx], his[idx])
    return ConflictLattice(n, values, frame.window_start)


def monte_carlo_conflict(frame: EvidenceFrame, subset: SubsetLike, samples: int = 100_000, seed=None) -> float:
    """Estimate the conflict by sampling points uniformly over the subset span.

    Independent of the partition-based computation; used as a test oracle.
    """
    subset = as_subset(subset)
    if subset.size < 2:
        raise ValueError("Monte-Carlo estimate needs a subset of at least two sources")
    if samples < 1:
        raise ValueError("samples must be positive")
    los, his = _subset_bounds(frame, subset)
    e_min, e_max = float(los.min()), float(his.max())
    if e_max == e_min:
        raise DegenerateSpanError("all subset evidences are the same point")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(e_min, e_max, size=samples)
    cover = np.zeros(samples)
    for lo, hi in zip(los, his):
        cover += (xs >= lo) & (xs <= hi)
    return float(np.mean(1.0 - cover / subset.size))
