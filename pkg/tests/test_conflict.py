import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import (
    WORKED_INTERVALS,
    WORKED_LATTICE,
    brute_force_conflict,
    brute_force_lattice,
    interval_lists,
)
from sensorconflict import (
    EvidenceFrame,
    SourceSubset,
    build_lattice,
    induce_partition,
    monte_carlo_conflict,
    subset_conflict,
)
from sensorconflict.exceptions import (
    DegenerateSpanError,
    TooManySourcesError,
    UnknownSourceError,
)


def frame(intervals):
    return EvidenceFrame.from_intervals(intervals)


def test_oracle_matches_frozen_worked_lattice():
    # Guards the frozen values against accidental edits of the oracle.
    oracle = brute_force_lattice(WORKED_INTERVALS)
    for subset, value in WORKED_LATTICE.items():
        assert oracle[subset] == value


def test_partition_of_three_nested_intervals():
    part = induce_partition(frame([(0, 10), (2, 8), (3, 7)]), (1, 2, 3))
    assert part.cells == [(0, 2), (2, 3), (3, 7), (7, 8), (8, 10)]
    assert part.counts.tolist() == [1, 2, 3, 2, 1]


def test_partition_single_interval():
    part = induce_partition(frame([(2, 3)]), (1,))
    assert part.cells == [(2, 3)]
    assert part.counts.tolist() == [1]


def test_partition_identical_intervals():
    part = induce_partition(frame([(1, 4), (1, 4)]), (1, 2))
    assert part.cells == [(1, 1), (1, 4), (4, 4)]
    assert part.counts[1] == 2


@given(interval_lists(min_size=1, max_size=6))
def test_partition_invariants(intervals):
    f = frame(intervals)
    part = induce_partition(f, range(1, len(intervals) + 1))
    assert len(part.cells) == 2 * len(intervals) - 1
    assert np.all(np.diff(part.endpoints) >= 0)
    assert part.lengths.sum() == pytest.approx(part.span, abs=1e-9)
    assert np.all((part.counts >= 0) & (part.counts <= len(intervals)))
    positive = np.flatnonzero(part.lengths > 0)
    # Separated point intervals leave uncovered outer cells, e.g. [0,0],[1,1].
    if positive.size and all(hi > lo for lo, hi in intervals):
        assert part.counts[positive[0]] >= 1 and part.counts[positive[-1]] >= 1


def test_separated_points_leave_uncovered_cell():
    part = induce_partition(frame([(0, 0), (1, 1)]), (1, 2))
    assert part.counts.tolist() == [1, 0, 1]


def test_worked_triple():
    assert subset_conflict(frame(WORKED_INTERVALS), (1, 2, 3)) == pytest.approx(1 / 3, abs=1e-12)


@pytest.mark.parametrize("subset, expected", [((1, 4), 0.4), ((1, 3, 4), 7 / 15)])
def test_hand_evaluated_subsets(subset, expected):
    assert subset_conflict(frame(WORKED_INTERVALS), subset) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_singletons_zero(j):
    assert subset_conflict(frame(WORKED_INTERVALS), (j,)) == 0


def test_unknown_source():
    with pytest.raises(UnknownSourceError):
        subset_conflict(frame(WORKED_INTERVALS), (1, 5))


def test_subset_forms_are_equivalent():
    f = frame(WORKED_INTERVALS)
    assert subset_conflict(f, 0b1011) == subset_conflict(f, [4, 2, 1]) == subset_conflict(f, SourceSubset((1, 2, 4)))


def test_subset_validation():
    with pytest.raises(ValueError):
        SourceSubset(())
    with pytest.raises(ValueError):
        SourceSubset((1, 1))
    assert SourceSubset((3, 1)).members == (1, 3)
    assert SourceSubset.from_mask(0b101).members == (1, 3)


def test_all_points_equal_is_zero():
    assert subset_conflict(frame([(2, 2), (2, 2), (2, 2)]), (1, 2, 3)) == 0


def test_lattice_single_source():
    lat = build_lattice(frame([(1, 2)]))
    assert len(lat) == 1 and lat[(1,)] == 0


def test_lattice_worked_example(worked_frame):
    lat = build_lattice(worked_frame)
    assert len(lat) == 15 and lat.is_complete
    for subset, value in WORKED_LATTICE.items():
        assert lat[subset] == pytest.approx(float(value), abs=1e-12)


def test_lattice_three_sources():
    lat = build_lattice(frame(WORKED_INTERVALS[:3]))
    assert len(lat) == 7
    assert lat[(1, 2, 3)] == pytest.approx(1 / 3)


def test_lattice_cap():
    f = frame([(0, 1)] * 5)
    with pytest.raises(TooManySourcesError):
        build_lattice(f, max_sources=4)


def test_non_monotone_witness(worked_frame):
    lat = build_lattice(worked_frame)
    assert lat[(1, 3, 4)] > lat[(1, 2, 3, 4)]


@given(interval_lists(min_size=1, max_size=5, integer=True, lo=-50, hi=50))
def test_matches_exact_oracle(intervals):
    lat = build_lattice(frame(intervals))
    oracle = brute_force_lattice(intervals)
    for subset, value in oracle.items():
        assert lat[subset] == pytest.approx(float(value), abs=1e-12)


@given(interval_lists(min_size=1, max_size=5))
def test_bounded_and_singletons_zero(intervals):
    lat = build_lattice(frame(intervals))
    for s in lat.subsets():
        assert 0.0 <= lat[s] <= 1.0
        if s.size == 1:
            assert lat[s] == 0


@given(st.floats(-100, 100), st.floats(0, 50), st.integers(2, 6))
def test_identical_intervals_zero(lo, width, n):
    lat = build_lattice(frame([(lo, lo + width)] * n))
    assert all(v == 0 for v in lat.values())


@given(
    interval_lists(min_size=2, max_size=5, integer=True, lo=-100, hi=100),
    st.integers(-1000, 1000),
    st.integers(1, 50),
)
def test_translation_and_scale_invariance(intervals, c, a):
    base = build_lattice(frame(intervals))
    shifted = build_lattice(frame([(lo + c, hi + c) for lo, hi in intervals]))
    scaled = build_lattice(frame([(lo * a / 7, hi * a / 7) for lo, hi in intervals]))
    for key in base:
        assert shifted[key] == pytest.approx(base[key], abs=1e-9)
        assert scaled[key] == pytest.approx(base[key], abs=1e-9)


@given(interval_lists(min_size=2, max_size=5), st.randoms(use_true_random=False))
def test_permutation_invariance(intervals, rnd):
    perm = list(range(len(intervals)))
    rnd.shuffle(perm)
    a = subset_conflict(frame(intervals), range(1, len(intervals) + 1))
    b = subset_conflict(frame([intervals[p] for p in perm]), range(1, len(intervals) + 1))
    assert a == pytest.approx(b, abs=1e-12)


@given(st.integers(2, 6), st.floats(10, 1e6))
def test_disjoint_intervals_approach_one(i, gap):
    intervals = [(k * (1 + gap), k * (1 + gap) + 1) for k in range(i)]
    value = subset_conflict(frame(intervals), range(1, i + 1))
    # All gap cells score 1; each unit interval scores (1 - 1/i).
    span = i + (i - 1) * gap
    expected = ((i - 1) * gap + i * (1 - 1 / i)) / span
    assert value == pytest.approx(expected, rel=1e-9)
    assert value > 1 - 2 / gap


def test_lattice_is_deterministic(worked_frame):
    a = build_lattice(worked_frame)
    b = build_lattice(worked_frame)
    assert [a[k] for k in a] == [b[k] for k in b]


class TestMonteCarlo:
    def test_worked_triple(self, worked_frame):
        est = monte_carlo_conflict(worked_frame, (1, 2, 3), 100_000, seed=1)
        assert est == pytest.approx(1 / 3, abs=0.01)

    def test_identical_intervals_exact_zero(self):
        f = frame([(1, 4), (1, 4), (1, 4)])
        for n in (1, 10, 1000):
            assert monte_carlo_conflict(f, (1, 2, 3), n, seed=0) == 0.0

    def test_disjoint_unit_intervals(self):
        f = frame([(0, 1), (2, 3)])
        assert monte_carlo_conflict(f, (1, 2), 100_000, seed=2) == pytest.approx(2 / 3, abs=0.01)
        assert brute_force_conflict([(0, 1), (2, 3)], (1, 2)) == pytest.approx(2 / 3)

    def test_degenerate_span(self):
        with pytest.raises(DegenerateSpanError):
            monte_carlo_conflict(frame([(2, 2), (2, 2)]), (1, 2), 10, seed=0)

    def test_singleton_rejected(self, worked_frame):
        with pytest.raises(ValueError):
            monte_carlo_conflict(worked_frame, (1,), 10)

    @settings(max_examples=30, deadline=None)
    @given(interval_lists(min_size=2, max_size=4, lo=-10, hi=10), st.integers(0, 2**32 - 1))
    def test_agrees_within_three_standard_errors(self, intervals, seed):
        f = frame(intervals)
        members = range(1, len(intervals) + 1)
        assume(f.his.max() > f.los.min())
        exact = subset_conflict(f, members)
        n = 100_000
        est = monte_carlo_conflict(f, members, n, seed=seed)
        # Per-draw values lie in [0, 1]; 0.5 bounds their standard deviation.
        assert abs(est - exact) <= 3 * 0.5 / np.sqrt(n) + 1e-12
