import unittest
from unittest.mock import patch

import numpy as np

from app.involutions import (
    PartialInvolution,
    enumerate_pf,
    involution_number,
    length_pf,
    length_via_arcs,
    length_via_rho_leq,
)
from app.labeling import label_poset
from app.poset import (
    all_rank_subsets,
    build_poset,
    check_size,
    cocovers,
    compare,
    covers,
    descent_set_counts,
    dual,
    interval,
    leq,
    memory_estimate,
    mobius,
    mobius_bounds,
    order_matrix,
    rank_selected_check,
    rank_selected_mobius,
    structural_rank,
)
from app.utils.exceptions import InvalidElementError, InvalidParameterError, NotComparableError, SizeGuardError


def pf(*w):
    return PartialInvolution(n=len(w), w=tuple(w))


PF4_HASSE = [
    (1, 0), (2, 3), (3, 1), (4, 6), (5, 4), (5, 7), (6, 2),
    (6, 8), (7, 6), (7, 9), (8, 3), (9, 2), (9, 8),
]


class TestComparison(unittest.TestCase):
    def test_bounds(self):
        self.assertTrue(leq(pf(2, 1, 4, 3), pf(0, 0, 0, 0)))
        self.assertFalse(leq(pf(0, 0, 0, 0), pf(2, 1, 4, 3)))

    def test_compare(self):
        self.assertEqual(compare(pf(2, 1, 4, 3), pf(0, 0, 0, 0)), "<")
        self.assertEqual(compare(pf(0, 0, 0, 0), pf(2, 1, 4, 3)), ">")
        self.assertEqual(compare(pf(3, 4, 1, 2), pf(3, 4, 1, 2)), "=")
        self.assertEqual(compare(pf(2, 1, 0, 0), pf(3, 4, 1, 2)), "incomparable")

    def test_mismatched_sizes(self):
        with self.assertRaises(InvalidParameterError):
            leq(pf(2, 1), pf(2, 1, 0))

    def test_order_matrix_is_partial_order(self):
        order = order_matrix(enumerate_pf(5))
        size = len(order)
        self.assertTrue(order.diagonal().all())
        self.assertFalse(np.any(order & order.T & ~np.eye(size, dtype=bool)))
        composed = (order.astype(np.int64) @ order.astype(np.int64)) > 0
        self.assertFalse(np.any(composed & ~order))


class TestConstruction(unittest.TestCase):
    def test_pf4_hasse(self):
        poset = build_poset(4)
        self.assertEqual(len(poset), 10)
        self.assertEqual(poset.hasse, PF4_HASSE)
        self.assertEqual((poset.bottom, poset.top), (5, 0))
        self.assertEqual(poset.rank.tolist(), [6, 5, 3, 4, 1, 0, 2, 1, 3, 2])

    def test_pf3_is_a_chain(self):
        poset = build_poset(3)
        self.assertEqual(poset.hasse, [(1, 0), (2, 3), (3, 1)])
        self.assertEqual(poset.max_rank, 3)

    def test_small_posets(self):
        self.assertEqual(len(build_poset(0)), 1)
        self.assertEqual(len(build_poset(1)), 1)
        self.assertEqual(build_poset(2).hasse, [(1, 0)])

    def test_sizes_and_top_rank(self):
        for n in range(1, 7):
            poset = build_poset(n)
            self.assertEqual(len(poset), involution_number(n))
            self.assertEqual(poset.max_rank, n * (n - 1) // 2)
            self.assertEqual(poset.elements[poset.top].w, (0,) * n)

    def test_rank_is_length(self):
        poset = build_poset(5)
        self.assertEqual(poset.rank.tolist(), [length_pf(x) for x in poset.elements])
        self.assertTrue(np.array_equal(structural_rank(poset), poset.rank))

    def test_structural_rank_matches_length_formulas(self):
        for n in range(1, 9):
            poset = build_poset(n, force=True)
            structural = structural_rank(poset).tolist()
            self.assertEqual(structural, [length_via_arcs(x) for x in poset.elements], n)
            self.assertEqual(structural, [length_via_rho_leq(x) for x in poset.elements], n)

    def test_covers_raise_length_by_one(self):
        poset = build_poset(6)
        for child, parent in poset.hasse:
            self.assertEqual(poset.rank[parent] - poset.rank[child], 1)

    def test_build_is_cached(self):
        self.assertIs(build_poset(4), build_poset(4))

    def test_size_guard(self):
        with self.assertRaises(SizeGuardError):
            check_size(8)
        check_size(8, force=True)
        with self.assertRaises(InvalidParameterError):
            check_size(-1)

    @patch.dict('app.poset.CONFIG', {'MAX_POSET_N': 3})
    def test_size_guard_reads_config(self):
        with self.assertRaises(SizeGuardError):
            build_poset(4)

    def test_memory_estimate_grows(self):
        self.assertLess(memory_estimate(5), memory_estimate(6))
        self.assertEqual(memory_estimate(4), 100 * 17)


class TestNeighbourhoods(unittest.TestCase):
    def setUp(self):
        self.poset = build_poset(4)

    def test_covers(self):
        self.assertEqual({x.w for x in covers(self.poset, pf(2, 1, 4, 3))}, {(2, 1, 0, 0), (3, 4, 1, 2)})
        self.assertEqual(covers(self.poset, pf(0, 0, 0, 0)), [])

    def test_cocovers(self):
        self.assertEqual({x.w for x in cocovers(self.poset, pf(0, 4, 0, 2))}, {(0, 3, 2, 0), (4, 0, 0, 1)})
        self.assertEqual(cocovers(self.poset, pf(2, 1, 4, 3)), [])

    def test_unknown_element(self):
        with self.assertRaises(InvalidElementError):
            covers(self.poset, pf(2, 1, 0))


class TestIntervals(unittest.TestCase):
    def setUp(self):
        self.poset = build_poset(4)

    def test_full_interval(self):
        span = interval(self.poset, pf(2, 1, 4, 3), pf(0, 0, 0, 0))
        self.assertEqual(len(span), 10)
        self.assertEqual(span.length, 6)

    def test_chain_interval(self):
        span = interval(self.poset, pf(2, 1, 0, 0), pf(0, 3, 2, 0))
        self.assertEqual(span.members, (2, 4, 6))
        self.assertEqual(mobius(self.poset, pf(2, 1, 0, 0), pf(0, 3, 2, 0)), 0)

    def test_diamond_interval(self):
        span = interval(self.poset, pf(2, 1, 4, 3), pf(3, 0, 1, 0))
        self.assertEqual(span.members, (4, 5, 6, 7))
        self.assertEqual(mobius(self.poset, pf(2, 1, 4, 3), pf(3, 0, 1, 0)), 1)

    def test_singleton_interval(self):
        span = interval(self.poset, pf(3, 4, 1, 2), pf(3, 4, 1, 2))
        self.assertEqual((len(span), span.length), (1, 0))
        self.assertEqual(mobius(self.poset, pf(3, 4, 1, 2), pf(3, 4, 1, 2)), 1)

    def test_not_comparable(self):
        with self.assertRaises(NotComparableError):
            interval(self.poset, pf(0, 0, 0, 0), pf(2, 1, 4, 3))
        with self.assertRaises(NotComparableError):
            mobius(self.poset, pf(2, 1, 0, 0), pf(3, 4, 1, 2))


class TestMobius(unittest.TestCase):
    def test_bounds(self):
        self.assertEqual(mobius_bounds(build_poset(1)), 1)
        self.assertEqual(mobius_bounds(build_poset(2)), -1)
        for n in range(3, 7):
            self.assertEqual(mobius_bounds(build_poset(n)), 0, n)

    def test_dual(self):
        poset = build_poset(5)
        flipped = dual(poset)
        self.assertEqual((flipped.bottom, flipped.top), (poset.top, poset.bottom))
        self.assertEqual(mobius_bounds(flipped), mobius_bounds(poset))
        self.assertEqual(len(flipped.hasse), len(poset.hasse))


class TestRankSelection(unittest.TestCase):
    def setUp(self):
        self.poset = build_poset(4)
        labels = label_poset(self.poset)
        self.key = lambda edge: labels[edge].key

    def test_descent_sets(self):
        # bit r: descent at the element of rank r
        self.assertEqual(descent_set_counts(self.poset, self.key), {0: 1, 2: 1, 4: 1, 8: 1, 10: 1, 12: 1})

    def test_consecutive_labels_never_tie(self):
        for n in range(2, 6):
            poset = build_poset(n)
            labels = label_poset(poset)
            for child, middle in poset.hasse:
                for parent in poset.parents[middle]:
                    self.assertNotEqual(labels[(child, middle)].key, labels[(middle, parent)].key,
                                        (n, child, middle, parent))

    def test_rank_selected_mobius(self):
        self.assertEqual(rank_selected_mobius(self.poset, [1]), 1)
        self.assertEqual(rank_selected_mobius(self.poset, [4]), 0)
        self.assertEqual(rank_selected_mobius(self.poset, [1, 3]), -1)
        self.assertEqual(rank_selected_mobius(self.poset, [1, 2]), 0)
        self.assertEqual(rank_selected_mobius(self.poset, range(1, 6)), mobius_bounds(self.poset))

    def test_every_subset(self):
        subsets = list(all_rank_subsets(self.poset))
        self.assertEqual(len(subsets), 2 ** 5)
        for subset in subsets:
            self.assertTrue(rank_selected_check(self.poset, self.key, subset), subset)

    def test_rank_out_of_range(self):
        with self.assertRaises(InvalidParameterError):
            rank_selected_check(self.poset, self.key, [0])
        with self.assertRaises(InvalidParameterError):
            rank_selected_check(self.poset, self.key, [6])



class TestRankSelectionPF5(unittest.TestCase):
    def setUp(self):
        self.poset = build_poset(5)
        labels = label_poset(self.poset)
        self.key = lambda edge: labels[edge].key

    def test_every_subset(self):
        histogram = descent_set_counts(self.poset, self.key)
        subsets = list(all_rank_subsets(self.poset))
        self.assertEqual(len(subsets), 2 ** 9)
        for subset in subsets:
            self.assertTrue(rank_selected_check(self.poset, self.key, subset, histogram), subset)

    def test_full_selection_is_mobius(self):
        self.assertEqual(rank_selected_mobius(self.poset, range(1, 10)), mobius_bounds(self.poset))
        self.assertEqual(mobius_bounds(self.poset), 0)

if __name__ == '__main__':
    unittest.main()
