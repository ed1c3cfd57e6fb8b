"""Tree construction, Prüfer bijection, sampling, and the text format."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treecross import (
    GuardError,
    InvalidTreeError,
    LabeledTree,
    PruferSequence,
    contains_forest,
    enumerate_trees,
    format_tree_text,
    make_rng,
    parse_tree_text,
    path_tree,
    prufer_to_tree,
    sample_uniform_tree,
    star_tree,
    tree_to_prufer,
    worker_rng,
)
from treecross.trees import is_acyclic, is_connected

# chi-square 0.999 quantiles: df=2 is -2 ln(0.001); df=15 from standard tables
CHI2_999 = {2: 13.8155, 15: 37.6973}


def all_codes(n):
    from itertools import product

    return product(range(1, n + 1), repeat=n - 2)


class TestLabeledTree:
    def test_valid_construction_normalizes(self):
        t = LabeledTree(4, [(3, 1), (2, 1), (4, 2)])
        assert t.edges == {(1, 3), (1, 2), (2, 4)}
        assert t.has_edge(3, 1) and t.has_edge(1, 3)
        assert not t.has_edge(1, 4)

    def test_wrong_edge_count(self):
        with pytest.raises(InvalidTreeError, match="3 edges"):
            LabeledTree(4, [(1, 2), (2, 3)])

    def test_cycle_rejected(self):
        with pytest.raises(InvalidTreeError, match="cycle|disconnected"):
            LabeledTree(4, [(1, 2), (2, 3), (1, 3)])

    def test_self_loop_rejected(self):
        with pytest.raises(InvalidTreeError, match="self-loop"):
            LabeledTree(3, [(1, 1), (2, 3)])

    def test_duplicate_edge_rejected(self):
        with pytest.raises(InvalidTreeError, match="duplicate"):
            LabeledTree(3, [(1, 2), (2, 1)])

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidTreeError, match="1..3"):
            LabeledTree(3, [(1, 2), (2, 4)])

    def test_equality_and_hash(self):
        t1 = LabeledTree(3, [(1, 2), (2, 3)])
        t2 = LabeledTree(3, [(2, 3), (1, 2)])
        assert t1 == t2 and hash(t1) == hash(t2)
        assert t1 != path_tree(4)

    def test_path_query(self):
        t = LabeledTree(5, [(1, 2), (2, 3), (3, 4), (3, 5)])
        assert t.path(1, 4) == [1, 2, 3, 4]
        assert t.path(5, 1) == [5, 3, 2, 1]
        assert t.path(2, 2) == [2]

    def test_adjacency(self):
        t = star_tree(5, center=2)
        assert t.adjacency[2] == [1, 3, 4, 5]
        assert t.adjacency[4] == [2]


class TestPrufer:
    def test_n2_forced_tree(self):
        assert prufer_to_tree(PruferSequence(2, ())).edges == {(1, 2)}
        assert tree_to_prufer(LabeledTree(2, [(1, 2)])) == PruferSequence(2, ())

    def test_n3_hand_decoded(self):
        # removing leaf 1 pairs it with 3, leaving the edge {2,3}
        t = prufer_to_tree(PruferSequence(3, (3,)))
        assert t.edges == {(1, 3), (2, 3)}
        assert tree_to_prufer(t) == PruferSequence(3, (3,))

    def test_n4_all_16_codes_distinct_valid(self):
        trees = [prufer_to_tree(PruferSequence(4, c)) for c in all_codes(4)]
        assert len(set(trees)) == 16
        for t in trees:
            assert len(t.edges) == 3
            assert is_connected(4, t.edges) and is_acyclic(4, t.edges)

    @pytest.mark.parametrize("n", range(2, 8))
    def test_round_trip_exhaustive(self, n):
        for code in all_codes(n):
            ps = PruferSequence(n, code)
            assert tree_to_prufer(prufer_to_tree(ps)) == ps

    def test_round_trip_random_large(self):
        rng = make_rng(2024)
        for _ in range(10_000):
            t = sample_uniform_tree(100, rng)
            assert prufer_to_tree(tree_to_prufer(t)) == t

    def test_code_validation(self):
        with pytest.raises(ValueError, match="length"):
            PruferSequence(4, (1,))
        with pytest.raises(ValueError, match="outside"):
            PruferSequence(4, (0, 2))
        with pytest.raises(ValueError, match="outside"):
            PruferSequence(4, (1, 5))
        with pytest.raises(GuardError):
            PruferSequence(1, ())

    def test_encode_guard(self):
        with pytest.raises(GuardError):
            tree_to_prufer(LabeledTree(1, []))

    @pytest.mark.parametrize("n", range(2, 7))
    def test_kernel_decoder_matches_python(self, n):
        # the batch kernels rely on the compiled decoder; pin it to the
        # pure-Python one over every code
        from treecross._kernels import decode_prufer

        for code in all_codes(n):
            t = prufer_to_tree(PruferSequence(n, code))
            us, vs = decode_prufer(np.array(code, dtype=np.int64), n)
            assert frozenset((int(a), int(b)) for a, b in zip(us, vs)) == t.edges

    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_round_trip_property(self, data):
        n = data.draw(st.integers(min_value=2, max_value=64))
        code = tuple(data.draw(st.lists(st.integers(1, n), min_size=n - 2, max_size=n - 2)))
        ps = PruferSequence(n, code)
        t = prufer_to_tree(ps)
        assert len(t.edges) == n - 1
        assert is_connected(n, t.edges) and is_acyclic(n, t.edges)
        assert tree_to_prufer(t) == ps


class TestEnumeration:
    @pytest.mark.parametrize("n,count", [(3, 3), (4, 16), (5, 125), (7, 16807)])
    def test_cayley_counts(self, n, count):
        trees = list(enumerate_trees(n))
        assert len(trees) == count
        assert len(set(trees)) == count

    def test_enumerated_trees_valid(self):
        for t in enumerate_trees(5):
            assert len(t.edges) == 4
            assert is_connected(5, t.edges) and is_acyclic(5, t.edges)

    def test_guards(self):
        with pytest.raises(GuardError):
            list(enumerate_trees(1))
        with pytest.raises(GuardError):
            list(enumerate_trees(9))


class TestSampler:
    def test_determinism(self):
        a = [sample_uniform_tree(30, make_rng(5)) for _ in range(20)]
        b = [sample_uniform_tree(30, make_rng(5)) for _ in range(20)]
        assert a == b

    def test_worker_streams_differ(self):
        assert sample_uniform_tree(30, worker_rng(5, 0)) != sample_uniform_tree(30, worker_rng(5, 1))

    def test_worker_index_validated(self):
        with pytest.raises(ValueError):
            worker_rng(5, -1)

    def test_guard(self):
        with pytest.raises(GuardError):
            sample_uniform_tree(1, make_rng(0))

    def test_uniformity_chi_square_n3(self):
        rng = make_rng(101)
        trees = list(enumerate_trees(3))
        counts = {t: 0 for t in trees}
        n_samples = 30_000
        for _ in range(n_samples):
            counts[sample_uniform_tree(3, rng)] += 1
        expected = n_samples / 3
        chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
        assert chi2 < CHI2_999[2]
        for c in counts.values():
            assert abs(c / n_samples - 1 / 3) < 0.02

    def test_uniformity_chi_square_n4(self):
        rng = make_rng(202)
        trees = list(enumerate_trees(4))
        counts = {t: 0 for t in trees}
        n_samples = 160_000
        for _ in range(n_samples):
            counts[sample_uniform_tree(4, rng)] += 1
        expected = n_samples / 16
        chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
        assert chi2 < CHI2_999[15]
        for c in counts.values():
            assert abs(c / n_samples - 1 / 16) < 0.005


class TestForestContainment:
    def test_empty_forest(self):
        assert contains_forest(path_tree(4), [])

    def test_absent_edge(self):
        assert not contains_forest(path_tree(4), [(1, 3)])

    def test_present_pair(self):
        t = LabeledTree(4, [(1, 3), (2, 4), (1, 2)])
        assert contains_forest(t, [(1, 3), (2, 4)])
        assert contains_forest(t, [(3, 1)])

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            contains_forest(path_tree(4), [(1, 9)])


class TestTextFormat:
    def test_round_trip(self):
        t = LabeledTree(5, [(1, 4), (2, 4), (3, 5), (4, 5)])
        assert parse_tree_text(format_tree_text(t)) == t

    def test_format_shape(self):
        text = format_tree_text(path_tree(3))
        assert text == "3\n1 2\n2 3\n"

    def test_parse_rejects_bad_edge_count(self):
        with pytest.raises(InvalidTreeError):
            parse_tree_text("3\n1 2\n")

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_tree_text("3\n1 2 3\n2 3\n")
        with pytest.raises(ValueError):
            parse_tree_text("")
