"""Property-based checks on random elements and q-identities."""
import unittest
from math import comb

from hypothesis import given, settings, strategies as st

from app.involutions import (
    PartialInvolution,
    complete,
    length_pf,
    length_via_arcs,
    length_via_rho_leq,
    maximum_element,
    minimum_element,
    rank_control,
    recurrence_split,
    reduce_support,
    uncomplete,
)
from app.poset import compare, leq
from app.qseries import ONE, formula_counts, q_binomial, q_power

settings.register_profile("pfposet", deadline=None)
settings.load_profile("pfposet")

MIRROR = {"<": ">", ">": "<", "=": "=", "incomparable": "incomparable"}


@st.composite
def partial_involutions(draw, min_n=1, max_n=9):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    order = draw(st.permutations(range(1, n + 1)))
    k = draw(st.integers(min_value=0, max_value=n // 2))
    w = [0] * n
    for a, b in zip(order[0:2 * k:2], order[1:2 * k:2]):
        w[a - 1], w[b - 1] = b, a
    return PartialInvolution(n=n, w=tuple(w))


@st.composite
def element_pairs(draw):
    x = draw(partial_involutions(max_n=7))
    y = draw(partial_involutions(min_n=x.n, max_n=x.n))
    return x, y


class TestElementProperties(unittest.TestCase):
    @settings(max_examples=200)
    @given(partial_involutions())
    def test_completion_round_trip(self, x):
        self.assertEqual(uncomplete(complete(x)), x)
        self.assertEqual(complete(x).fixed_points(), x.empty_rows)

    @settings(max_examples=200)
    @given(partial_involutions())
    def test_length_formulas_agree(self, x):
        ell = length_pf(x)
        self.assertEqual(length_via_arcs(x), ell)
        self.assertEqual(length_via_rho_leq(x), ell)
        self.assertTrue(0 <= ell <= comb(x.n, 2))

    @settings(max_examples=200)
    @given(partial_involutions())
    def test_rank_control_well_formed(self, x):
        matrix = rank_control(x)
        self.assertTrue(matrix.is_well_formed())
        self.assertEqual(matrix.rows[-1][-1], x.rank)

    @settings(max_examples=200)
    @given(partial_involutions())
    def test_decompositions_split_length(self, x):
        reduction = reduce_support(x)
        self.assertEqual(length_pf(x), sum(x.n - a for a in reduction.empty) + length_pf(reduction.reduced))
        split = recurrence_split(x)
        self.assertEqual(length_pf(x), length_pf(split.rest) + split.shift)

    @settings(max_examples=200)
    @given(partial_involutions())
    def test_bounded(self, x):
        self.assertTrue(leq(minimum_element(x.n), x))
        self.assertTrue(leq(x, maximum_element(x.n)))


class TestOrderProperties(unittest.TestCase):
    @settings(max_examples=300)
    @given(element_pairs())
    def test_compare_is_antisymmetric(self, pair):
        x, y = pair
        relation = compare(x, y)
        self.assertEqual(compare(y, x), MIRROR[relation])
        self.assertEqual(relation == "=", x == y)

    @settings(max_examples=300)
    @given(element_pairs())
    def test_order_is_graded_by_length(self, pair):
        x, y = pair
        if compare(x, y) == "<":
            self.assertLess(length_pf(x), length_pf(y))


class TestQIdentityProperties(unittest.TestCase):
    @given(st.integers(min_value=1, max_value=12), st.data())
    def test_q_pascal(self, n, data):
        k = data.draw(st.integers(min_value=1, max_value=n))
        self.assertEqual(q_binomial(n, k), q_binomial(n - 1, k - 1) + q_power(k) * q_binomial(n - 1, k))
        self.assertEqual(q_binomial(n, k), q_binomial(n, n - k))

    @given(st.integers(min_value=0, max_value=8), st.integers(min_value=2, max_value=9))
    def test_counts_cover_all_alternating_matrices(self, n, q_value):
        self.assertEqual(sum(formula_counts(n, q_value).values()), q_value ** comb(n, 2))

    @given(st.integers(min_value=0, max_value=12))
    def test_binomial_ends(self, n):
        self.assertEqual(q_binomial(n, 0), ONE)
        self.assertEqual(q_binomial(n, n), ONE)


if __name__ == '__main__':
    unittest.main()
