#!/usr/bin/env python3
"""
Tests for graded modules over the exterior algebra.
"""

import os
import sys
import unittest

# Add the parent directory to sys.path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from scripts.emod import (EComplex, EModule, betti_E_closed_form, direct_sum, dual_E,
                          e_module_from_ideal, free_module, generator_degrees, map_from_free,
                          quotient, residue_field, resolution_prefix, strip_free_summands, syzygy)
from scripts.exactla import ERelationsViolated, FieldConfig, ZeroModule
from scripts.grading import MonomialIdeal, degrees_with_total


class TestEModuleConstruction(unittest.TestCase):
    """Modules built from ideals, free modules and sums."""

    def setUp(self):
        self.K = FieldConfig(0)

    def test_quotient_by_monomial_ideal(self):
        N = e_module_from_ideal(MonomialIdeal(2, [{0, 1}]), self.K)
        self.assertEqual(N.total_dim(), 3)
        self.assertEqual(N.sigma(), 1)
        self.assertTrue(N.is_squarefree())

    def test_ideal_itself(self):
        J = e_module_from_ideal(MonomialIdeal(2, [{0}]), self.K, as_quotient=False)
        self.assertEqual(J.hilbert(), {(1, 0): 1, (1, 1): 1})
        self.assertEqual(generator_degrees(J), [(1, 0)])

    def test_free_module_satisfies_relations(self):
        E = free_module(3, self.K, [(0, 0, 0)])
        self.assertEqual(E.total_dim(), 8)
        self.assertTrue(E.check_relations())

    def test_relations_are_enforced(self):
        K = self.K
        dims = {(0,): 1, (1,): 1, (2,): 1}
        action = {(0, (0,)): K.from_rows([[1]]), (0, (1,)): K.from_rows([[1]])}
        with self.assertRaises(ERelationsViolated):
            EModule(1, K, dims, action)

    def test_double_dual(self):
        N = e_module_from_ideal(MonomialIdeal(3, [{0, 1}, {2}]), self.K)
        self.assertEqual(dual_E(dual_E(N)).dims, N.dims)
        self.assertEqual(dual_E(residue_field(2, self.K)).dims, {(1, 1): 1})

    def test_direct_sum_and_shift(self):
        S = direct_sum(free_module(2, self.K, [(0, 0)]), residue_field(2, self.K))
        self.assertEqual(S.dim((0, 0)), 2)
        self.assertEqual(S.total_dim(), 5)
        self.assertEqual(S.shifted((1, 0)).dim((1, 0)), 2)

    def test_quotient_by_everything(self):
        E = free_module(2, self.K, [(0, 0)])
        Q, _ = quotient(E, {(0, 0): self.K.identity(1)})
        self.assertTrue(Q.is_zero())


class TestSyzygiesAndResolutions(unittest.TestCase):
    """Syzygies, free summands and resolution prefixes."""

    def setUp(self):
        self.K = FieldConfig(0)
        self.residue = residue_field(2, self.K)

    def test_syzygy_of_residue_field(self):
        syz = syzygy(self.residue)
        self.assertEqual(syz.cover.total_dim(), 4)
        self.assertEqual(syz.kernel.total_dim(), 3)
        self.assertEqual(generator_degrees(syz.kernel), [(0, 1), (1, 0)])

    def test_zero_module_has_no_syzygy(self):
        with self.assertRaises(ZeroModule):
            syzygy(EModule(2, self.K, {}))

    def test_residue_field_resolution_is_linear(self):
        prefix = resolution_prefix(self.residue, 2)
        for t in range(3):
            expected = {(-t, a): 1 for a in degrees_with_total((0, 0), t, t)}
            got = {k: m for k, m in prefix.betti.items() if k[0] == -t}
            self.assertEqual(got, expected)
        self.assertTrue(prefix.is_linear(0))
        self.assertTrue(prefix.is_minimal())

    def test_closed_form_matches_resolution(self):
        N = e_module_from_ideal(MonomialIdeal(2, [{0, 1}]), self.K)
        self.assertEqual(betti_E_closed_form(N, 2), resolution_prefix(N, 2).betti)

    def test_closed_form_on_a_step_and_degree_window(self):
        N = e_module_from_ideal(MonomialIdeal(2, [{0, 1}]), self.K)
        full = resolution_prefix(N, 3).betti
        window = betti_E_closed_form(N, (1, 3), totals=(2, 3))
        expected = {k: m for k, m in full.items() if 1 <= -k[0] <= 3 and 2 <= sum(k[1]) <= 3}
        self.assertTrue(expected)
        self.assertEqual(dict(window.items()), expected)
        with self.assertRaises(ValueError):
            betti_E_closed_form(N, (2, 1))

    def test_strip_free_summands(self):
        mixed = direct_sum(free_module(2, self.K, [(0, 0)]), self.residue)
        rest, rank = strip_free_summands(mixed)
        self.assertEqual(rank, 1)
        self.assertEqual(rest.total_dim(), 1)
        _, none = strip_free_summands(self.residue)
        self.assertEqual(none, 0)


class TestEComplex(unittest.TestCase):
    """Cohomology of a two-term complex E -> K."""

    def test_augmentation_complex(self):
        K = FieldConfig(0)
        residue = residue_field(2, K)
        augmentation = map_from_free([(0, 0)], residue, [K.identity(1)])
        cpx = EComplex(2, K, {0: augmentation.source, 1: residue}, {0: augmentation})
        self.assertEqual(cpx.spots(), [0, 1])
        self.assertEqual(cpx.cohomology(0).total_dim(), 3)
        self.assertTrue(cpx.cohomology(1).is_zero())
        self.assertEqual(list(cpx.cohomology_modules()), [0])
        self.assertEqual(cpx.shifted(1).spots(), [-1, 0])


if __name__ == "__main__":
    unittest.main()
