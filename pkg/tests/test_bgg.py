#!/usr/bin/env python3
"""
Tests for the BGG functors, minimization, linear strands and Bass numbers.
"""

import os
import sys
import unittest

# Add the parent directory to sys.path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from scripts.bgg import (bass_numbers, betti_of_complex_via_G, cohomology_F, functor_F,
                         functor_G, is_squarefree_image, linear_strand, minimize, reg_of_complex,
                         reg_of_dual, reg_of_dual_via_resolution, strand_identity_check)
from scripts.emod import EComplex, e_module_from_ideal, free_module, residue_field
from scripts.exactla import FieldConfig, NotMinimal
from scripts.grading import MonomialIdeal
from scripts.smod import (FreeComplexS, SComplex, betti_via_koszul, koszul_total_complex,
                          min_free_resolution, sq_module_from_ideal)


class TestFunctorF(unittest.TestCase):
    """F on small E-modules."""

    def setUp(self):
        self.K = FieldConfig(0)

    def test_free_module_gives_koszul_complex(self):
        T = functor_F(free_module(2, self.K, [(0, 0)]))
        self.assertEqual({p: len(T.generators(p)) for p in T.spots()}, {0: 1, 1: 2, 2: 1})
        self.assertTrue(T.is_minimal())
        self.assertTrue(is_squarefree_image(T))
        cohomology = cohomology_F(T)
        self.assertEqual(list(cohomology), [2])
        self.assertEqual(cohomology[2].dims, {frozenset(): 1})

    def test_provenance_records_sources(self):
        T = functor_F(residue_field(2, self.K, degree=(1, 0)))
        self.assertEqual(T.terms, {1: [(-1, 0)]})
        self.assertEqual(T.provenance[1], [(0, (1, 0), 0)])

    def test_truncation_above_lowest_cohomology(self):
        """Cutting below the only cohomology keeps the hyper-Betti numbers; cutting at it kills them."""
        T = functor_F(free_module(2, self.K, [(0, 0)]))
        lo, hi = (-1, -1), (0, 0)
        whole = betti_via_koszul(T.as_s_complex(), lo, hi)
        self.assertEqual(whole, T.betti())
        for n in (0, 1):
            self.assertEqual(betti_via_koszul(T.truncation_above(n), lo, hi), whole)
        self.assertTrue(betti_via_koszul(T.truncation_above(2), lo, hi).is_empty())


class TestFunctorG(unittest.TestCase):
    """Betti numbers and regularity read off G."""

    def setUp(self):
        self.K = FieldConfig(0)
        self.M = sq_module_from_ideal(MonomialIdeal(3, [{0, 1}, {0, 2}, {1, 2}], "S"), self.K)

    def test_betti_via_G_matches_resolution(self):
        self.assertEqual(betti_of_complex_via_G(self.M), min_free_resolution(self.M).betti)

    def test_regularity(self):
        self.assertEqual(reg_of_complex(self.M), 1)

    def test_reg_of_dual_routes_agree(self):
        self.assertEqual(reg_of_dual(self.M), reg_of_dual_via_resolution(self.M))

    def test_component_is_the_shifted_koszul_complex(self):
        image = functor_G(self.M)
        cpx = SComplex.from_module(self.M)
        for b in [(0, 0, 0), (1, 1, 0), (1, 1, 1)]:
            sizes, diffs, _ = image.component(b)
            k_sizes, k_diffs = koszul_total_complex(cpx, b)
            shift = sum(b)
            self.assertEqual({p - shift: n for p, n in sizes.items()}, k_sizes)
            self.assertEqual({p - shift: m for p, m in diffs.items()}, k_diffs)


class TestMinimizeAndStrands(unittest.TestCase):
    """Unit cancellation and linear strands."""

    def setUp(self):
        self.K = FieldConfig(0)

    def test_minimize_cancels_unit_entry(self):
        T = FreeComplexS(2, self.K, {-1: [(1, 0)], 0: [(1, 0), (0, 0)]},
                         {-1: self.K.from_rows([[1], [0]])})
        self.assertFalse(T.is_minimal())
        reduced = minimize(T)
        self.assertTrue(reduced.is_minimal())
        self.assertEqual(reduced.terms, {0: [(0, 0)]})

    def test_linear_strand_needs_minimal_complex(self):
        T = FreeComplexS(1, self.K, {0: [(0,)], 1: [(0,)]}, {0: self.K.from_rows([[1]])})
        with self.assertRaises(NotMinimal):
            linear_strand(T, 0)

    def test_linear_strand_of_resolution(self):
        M = sq_module_from_ideal(MonomialIdeal(2, [{0, 1}], "S"), self.K)
        P = min_free_resolution(M).complex
        self.assertEqual(linear_strand(P, 0).terms, {0: [(0, 0)]})
        self.assertEqual(linear_strand(P, 1).terms, {-1: [(1, 1)]})

    def test_strand_identity(self):
        N = e_module_from_ideal(MonomialIdeal(2, [{0, 1}]), self.K)
        self.assertTrue(strand_identity_check(EComplex.from_module(N)))


class TestBassNumbers(unittest.TestCase):
    """Bass numbers of the residue field."""

    def test_residue_field(self):
        table = bass_numbers(residue_field(2, FieldConfig(0)), 2)
        for i in range(3):
            entries = {a: m for (j, a), m in table.entries.items() if j == i}
            self.assertEqual(len(entries), i + 1)
            self.assertTrue(all(m == 1 and sum(a) == -i for a, m in entries.items()))


if __name__ == "__main__":
    unittest.main()
