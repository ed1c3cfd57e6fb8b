"""Crossing detection and the two counters."""

import time
from itertools import combinations

import numpy as np
import pytest

from treecross import (
    CrossingIndex,
    LabeledTree,
    count_crossings_fast,
    count_crossings_naive,
    enumerate_trees,
    has_crossing_at,
    list_crossings,
    make_rng,
    path_tree,
    sample_uniform_tree,
    star_tree,
)
from treecross._kernels import batch_crossing_counts


class TestCrossingIndex:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            CrossingIndex(1, 1, 3, 4)
        with pytest.raises(ValueError):
            CrossingIndex(2, 1, 3, 4)
        with pytest.raises(ValueError):
            CrossingIndex(0, 1, 3, 4)

    def test_disjoint(self):
        assert CrossingIndex(1, 2, 3, 4).disjoint_from(CrossingIndex(5, 6, 7, 8))
        assert not CrossingIndex(1, 2, 3, 4).disjoint_from(CrossingIndex(4, 5, 6, 7))


class TestHasCrossingAt:
    def test_star_never_crosses(self):
        t = star_tree(6)
        for q in combinations(range(1, 7), 4):
            assert not has_crossing_at(t, CrossingIndex(*q))

    def test_positive_example(self):
        t = LabeledTree(4, [(1, 3), (2, 4), (1, 2)])
        assert has_crossing_at(t, CrossingIndex(1, 2, 3, 4))

    def test_path_no_crossing(self):
        assert not has_crossing_at(path_tree(4), CrossingIndex(1, 2, 3, 4))

    def test_index_outside_tree(self):
        with pytest.raises(ValueError):
            has_crossing_at(path_tree(4), CrossingIndex(1, 2, 3, 5))


class TestCounters:
    def test_path_zero(self):
        assert count_crossings_naive(path_tree(12)) == 0
        assert count_crossings_fast(path_tree(12)) == 0

    def test_star_zero(self):
        assert count_crossings_naive(star_tree(12)) == 0
        assert count_crossings_fast(star_tree(12)) == 0

    def test_single_crossing(self):
        t = LabeledTree(4, [(1, 3), (2, 4), (1, 2)])
        assert count_crossings_naive(t) == 1
        assert count_crossings_fast(t) == 1

    @pytest.mark.parametrize("n", range(2, 8))
    def test_agreement_exhaustive(self, n):
        for t in enumerate_trees(n):
            assert count_crossings_naive(t) == count_crossings_fast(t)

    @pytest.mark.parametrize("n", [10, 50, 200])
    def test_agreement_random_batch(self, n):
        rng = make_rng(n)
        codes = rng.integers(1, n + 1, size=(2000, n - 2))
        naive = batch_crossing_counts(codes, n, True)
        fast = batch_crossing_counts(codes, n, False)
        assert np.array_equal(naive, fast)

    def test_pair_bound(self):
        rng = make_rng(77)
        for _ in range(50):
            t = sample_uniform_tree(40, rng)
            x = count_crossings_fast(t)
            assert 0 <= x <= 39 * 38 // 2

    def test_indicator_sum_matches_count(self):
        # the count is definitionally the sum of per-site indicators
        for n in (5, 6):
            for t in list(enumerate_trees(n))[::7]:
                total = sum(
                    has_crossing_at(t, CrossingIndex(*q)) for q in combinations(range(1, n + 1), 4)
                )
                assert total == count_crossings_naive(t)

    def test_path_million_under_budget(self):
        count_crossings_fast(path_tree(1000))  # warm the kernel
        t = path_tree(10**6)
        t0 = time.perf_counter()
        assert count_crossings_fast(t) == 0
        assert time.perf_counter() - t0 < 5.0


class TestListCrossings:
    def test_path_empty(self):
        assert list_crossings(path_tree(4)) == set()

    def test_single(self):
        t = LabeledTree(4, [(1, 3), (2, 4), (1, 2)])
        assert list_crossings(t) == {CrossingIndex(1, 2, 3, 4)}

    def test_cardinality_matches_count(self):
        rng = make_rng(30)
        for _ in range(200):
            t = sample_uniform_tree(30, rng)
            found = list_crossings(t)
            assert len(found) == count_crossings_naive(t)
            for j in found:
                assert has_crossing_at(t, j)
