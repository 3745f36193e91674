#!/usr/bin/env python3
"""
Tests for degree helpers, signs, Betti tables and monomial ideals.
"""

import os
import sys
import unittest

# Add the parent directory to sys.path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from scripts.grading import (NEG_INF, POS_INF, BettiTable, MonomialIdeal, all_subsets, alpha,
                             alpha_sign, box, bump, degrees_with_total, format_subset, indicator,
                             support)


class TestDegreeHelpers(unittest.TestCase):
    """Multidegree arithmetic and the alpha sign."""

    def test_alpha_counts_smaller_indices(self):
        self.assertEqual(alpha(2, {0, 1, 3}), 2)
        self.assertEqual(alpha(0, {1, 2}), 0)
        self.assertEqual(alpha_sign(2, {0, 1, 3}), 1)
        self.assertEqual(alpha_sign(1, {0}), -1)

    def test_subsets_in_size_order(self):
        subsets = all_subsets(3)
        self.assertEqual(len(subsets), 8)
        self.assertEqual(subsets[0], frozenset())
        self.assertEqual(subsets[-1], frozenset({0, 1, 2}))

    def test_indicator_and_support(self):
        self.assertEqual(indicator({0, 2}, 3), (1, 0, 1))
        self.assertEqual(support((2, 0, 1)), frozenset({0, 2}))
        self.assertEqual(bump((0, 0), 1, 2), (0, 2))

    def test_box_and_totals(self):
        self.assertEqual(len(box((0, 0), (1, 1))), 4)
        self.assertEqual(degrees_with_total((0, 0), 1, 1), [(0, 1), (1, 0)])
        self.assertEqual(degrees_with_total((0, 0), 0, 2, hi=(1, 1)),
                         [(0, 0), (0, 1), (1, 0), (1, 1)])

    def test_format_subset(self):
        self.assertEqual(format_subset(frozenset({0, 2})), "13")
        self.assertEqual(format_subset(frozenset()), "1")


class TestBettiTable(unittest.TestCase):
    """Betti table bookkeeping for S/(x1x2) in two variables."""

    def setUp(self):
        self.table = BettiTable(2)
        self.table.add(0, (0, 0))
        self.table.add(-1, (1, 1))

    def test_reg_and_iota(self):
        self.assertEqual(self.table.reg(), 1)
        self.assertEqual(self.table.iota(), 0)
        self.assertEqual(BettiTable(2).reg(), NEG_INF)
        self.assertEqual(BettiTable(2).iota(), POS_INF)

    def test_linearity(self):
        self.assertFalse(self.table.is_linear(0))
        strand = BettiTable(2)
        strand.add(-1, (1, 0))
        strand.add(-2, (1, 1))
        self.assertTrue(strand.is_linear(0))

    def test_shift_and_reflect(self):
        shifted = self.table.shift(1)
        self.assertEqual(shifted.get(-1, (0, 0)), 1)
        self.assertEqual(shifted.get(-2, (1, 1)), 1)
        reflected = self.table.reflect()
        self.assertEqual(reflected.get(-2, (1, 1)), 1)
        self.assertEqual(reflected.get(-1, (0, 0)), 1)
        self.assertEqual(reflected.reflect(), self.table)

    def test_negative_multiplicity_rejected(self):
        with self.assertRaises(ValueError):
            self.table.add(0, (0, 0), -1)

    def test_json_round_trip(self):
        self.assertEqual(BettiTable.from_json(2, self.table.to_json()), self.table)

    def test_grid(self):
        frame = self.table.to_frame()
        self.assertEqual(frame.loc[0, 0], "1")
        self.assertEqual(frame.loc[1, 1], "1")
        self.assertEqual(frame.loc[0, 1], "-")
        self.assertEqual(list(frame.loc["total:"]), ["1", "1"])
        self.assertEqual(BettiTable(2).format_grid(), "(zero table)")

    def test_dominates(self):
        bigger = self.table.merged(self.table)
        self.assertTrue(bigger.dominates(self.table))
        self.assertFalse(self.table.dominates(bigger))


class TestMonomialIdeal(unittest.TestCase):
    """Squarefree monomial ideals on either side."""

    def test_generators_are_minimalized(self):
        J = MonomialIdeal(3, [{0}, {0, 1}, {1, 2}])
        self.assertEqual(J.generators, [frozenset({0}), frozenset({1, 2})])
        self.assertEqual(J.generator_degrees(), [1, 2])

    def test_membership_and_faces(self):
        I = MonomialIdeal(2, [{0}], "S")
        self.assertTrue(I.contains({0, 1}))
        self.assertFalse(I.contains({1}))
        self.assertEqual(I.quotient_faces(), [frozenset(), frozenset({1})])
        self.assertEqual(I.describe(), "(x1)")

    def test_validation(self):
        with self.assertRaises(ValueError):
            MonomialIdeal(2, [{2}])
        with self.assertRaises(ValueError):
            MonomialIdeal(2, [{0}], side="T")


if __name__ == "__main__":
    unittest.main()
