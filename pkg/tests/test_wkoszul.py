#!/usr/bin/env python3
"""
Tests for weak Koszulness, the lpd routes and the linear quotient filtration.
"""

import os
import sys
import unittest

# Add the parent directory to sys.path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from scripts.emod import EModule, e_module_from_ideal, free_module, residue_field
from scripts.exactla import FieldConfig, NotWeaklyKoszul, ZeroModule
from scripts.grading import MonomialIdeal
from scripts.smod import functor_S, min_free_resolution, weakly_koszul_S
from scripts.wkoszul import (LpdReport, is_weakly_koszul_E, is_weakly_koszul_direct, lpd,
                             lpd_formula, lpd_sqf, sharpness_module, truncation_submodule,
                             wk_filtration)

# the direct syzygy route needs minutes once d >= 4
slow = unittest.skipUnless(os.getenv("KOSZULLAB_SLOW"), "set KOSZULLAB_SLOW=1 to run")


class TestWeaklyKoszul(unittest.TestCase):
    """The BGG criterion and the truncated direct oracle."""

    def setUp(self):
        self.K = FieldConfig(0)
        self.quotient = e_module_from_ideal(MonomialIdeal(2, [{0, 1}]), self.K)

    def test_linear_modules_are_weakly_koszul(self):
        self.assertTrue(is_weakly_koszul_E(residue_field(2, self.K)))
        self.assertTrue(is_weakly_koszul_E(free_module(2, self.K, [(0, 0)])))

    def test_quadratic_relation_breaks_linearity(self):
        verdict = is_weakly_koszul_E(self.quotient)
        self.assertFalse(verdict)
        self.assertIn("reg_plus_p", verdict.certificate)

    def test_direct_oracle(self):
        self.assertTrue(is_weakly_koszul_direct(residue_field(2, self.K), 2))
        self.assertFalse(is_weakly_koszul_direct(self.quotient, 2))
        with self.assertRaises(ValueError):
            is_weakly_koszul_direct(self.quotient, 0)

    def test_zero_module_rejected(self):
        with self.assertRaises(ZeroModule):
            is_weakly_koszul_E(EModule(2, self.K, {}))

    def test_agrees_with_componentwise_linearity(self):
        for gens in ([{0, 1}], [{0}], [{0}, {1, 2}]):
            N = e_module_from_ideal(MonomialIdeal(3, gens), self.K)
            self.assertEqual(bool(is_weakly_koszul_E(N)), weakly_koszul_S(functor_S(N))[0])

    def test_ideals_in_three_variables(self):
        for gens in ([{0, 1}], [{0}, {1, 2}], [{0, 1}, {1, 2}, {0, 2}]):
            J = e_module_from_ideal(MonomialIdeal(3, gens), self.K, as_quotient=False)
            self.assertTrue(is_weakly_koszul_E(J))


class TestLpd(unittest.TestCase):
    """lpd by the formula, depth and syzygy routes."""

    def setUp(self):
        self.K = FieldConfig(0)

    def test_residue_field(self):
        report = lpd(residue_field(2, self.K))
        self.assertEqual(report.value_formula, 0)
        self.assertTrue(report.agree())

    def test_quotient_by_quadric(self):
        N = e_module_from_ideal(MonomialIdeal(2, [{0, 1}]), self.K)
        report = lpd(N)
        self.assertEqual(report.value_formula, 1)
        self.assertEqual(report.value_sqf, 1)
        self.assertEqual(report.lower_bound_direct, 1)
        self.assertTrue(report.agree())
        self.assertTrue(report.omega_monotone())
        self.assertEqual(report.syzygy_trace[:2], [(0, False), (1, True)])

    def test_three_variable_bound(self):
        N = e_module_from_ideal(MonomialIdeal(3, [{0, 1}, {2}]), self.K)
        value, _ = lpd_formula(N)
        self.assertEqual(value, 1)
        self.assertEqual(lpd_sqf(N)[0], 1)

    def test_report_serializes(self):
        payload = lpd(residue_field(2, self.K)).to_json()
        self.assertEqual(payload["value_formula"], 0)
        self.assertIn("syzygy_trace", payload)

    def test_truncated_direct_route_is_reported(self):
        """Two syzygies are needed for lpd 2; stopping after one leaves the direct route open."""
        report = lpd(sharpness_module(3, 2, self.K), max_steps=1)
        self.assertIsNone(report.lower_bound_direct)
        self.assertTrue(report.direct_truncated)
        self.assertEqual(report.agreement(), "direct-truncated")
        self.assertFalse(report.agree())
        self.assertEqual(report.to_json()["agreement"], "direct-truncated")

    def test_missing_direct_value_without_truncation_disagrees(self):
        self.assertEqual(LpdReport(1, 1, None, {}, []).agreement(), "disagree")
        self.assertEqual(LpdReport(1, 2, 1, {}, []).agreement(), "disagree")
        self.assertEqual(LpdReport(1, None, 1, {}, []).agreement(), "agree")


class TestSharpness(unittest.TestCase):
    """Modules built from syzygies of the residue field reach lpd = i."""

    def setUp(self):
        self.K = FieldConfig(0)

    def test_three_variables(self):
        for i in (1, 2):
            N = sharpness_module(3, i, self.K)
            report = lpd(N)
            self.assertEqual(report.value_formula, i)
            self.assertTrue(report.agree())
            self.assertEqual(min_free_resolution(functor_S(N)).projective_dimension, i)

    def test_four_variables_formula_and_depth(self):
        for i in (1, 2, 3):
            with self.subTest(i=i):
                N = sharpness_module(4, i, self.K)
                self.assertEqual(lpd_formula(N)[0], i)
                self.assertEqual(lpd_sqf(N)[0], i)
                self.assertEqual(min_free_resolution(functor_S(N)).projective_dimension, i)

    def _all_routes(self, d):
        for i in range(1, d):
            with self.subTest(d=d, i=i):
                report = lpd(sharpness_module(d, i, self.K))
                self.assertEqual(report.value_formula, i)
                self.assertEqual(report.value_sqf, i)
                self.assertEqual(report.lower_bound_direct, i)
                self.assertEqual(report.agreement(), "agree")

    @slow
    def test_four_variables_all_routes(self):
        self._all_routes(4)

    @slow
    def test_five_variables_all_routes(self):
        self._all_routes(5)

    def test_range(self):
        with self.assertRaises(ValueError):
            sharpness_module(3, 0, self.K)
        with self.assertRaises(ValueError):
            sharpness_module(3, 3, self.K)


class TestFiltration(unittest.TestCase):
    """Linear quotient filtration of weakly Koszul modules."""

    def setUp(self):
        self.K = FieldConfig(0)

    def test_two_generator_degrees(self):
        J = e_module_from_ideal(MonomialIdeal(3, [{0}, {1, 2}]), self.K, as_quotient=False)
        filtration = wk_filtration(J)
        self.assertEqual(filtration.length, 2)
        self.assertEqual([step.degree for step in filtration.steps], [1, 2])
        self.assertTrue(filtration.quotients_linear())
        self.assertTrue(filtration.exhausts())
        self.assertTrue(filtration.certified())
        certificate = filtration.steps[-1].certificate
        self.assertEqual(certificate.spot, 1)
        self.assertEqual(certificate.expected_spot, 1)
        self.assertTrue(certificate.matches_elementary)
        self.assertTrue(certificate.cohomology_matches)
        self.assertEqual(certificate.submodule_dims, filtration.steps[0].module.dims)

    def test_truncation_submodule_of_residue_field(self):
        """H(F(D_E K)) sits at spot d alone: cutting below it keeps K, cutting at it leaves 0."""
        residue = residue_field(2, self.K)
        U, _ = truncation_submodule(residue, 1)
        self.assertEqual(U.dims, residue.dims)
        U, _ = truncation_submodule(residue, 2)
        self.assertTrue(U.is_zero())

    def test_single_degree(self):
        filtration = wk_filtration(residue_field(2, self.K))
        self.assertEqual(filtration.length, 1)
        self.assertTrue(filtration.exhausts())

    def test_requires_weakly_koszul(self):
        N = e_module_from_ideal(MonomialIdeal(2, [{0, 1}]), self.K)
        with self.assertRaises(NotWeaklyKoszul):
            wk_filtration(N)


if __name__ == "__main__":
    unittest.main()
