#!/usr/bin/env python3
"""
Tests for the cross-route oracles and the verify suites.
"""

import os
import sys
import unittest

# Add the parent directory to sys.path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from scripts.emod import e_module_from_ideal
from scripts.exactla import FieldConfig
from scripts.grading import MonomialIdeal
from scripts.harness import (G_ROUTE, SUITES, SuiteContext, compare_betti_routes,
                             compare_lpd_routes, run_instance, run_suite_sync)
from scripts.instances import exhaustive_antichains, load_instance, parse_instance, random_ideal
from scripts.smod import min_free_resolution, sq_module_from_ideal
from scripts.wkoszul import sharpness_module

INSTANCE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'instances')


class TestOracles(unittest.TestCase):
    """Test cases for route comparisons."""

    def setUp(self):
        self.K = FieldConfig(0)

    def test_betti_routes_agree(self):
        """Resolution, Koszul homology and G agree on three points."""
        M = sq_module_from_ideal(MonomialIdeal(3, [{0, 1}, {0, 2}, {1, 2}], "S"), self.K)
        comparison = compare_betti_routes(M, "three points")
        self.assertTrue(comparison.ok)
        self.assertEqual(comparison.routes, ["resolution", "koszul", G_ROUTE])
        self.assertIn("koszul-blocks", G_ROUTE)
        self.assertEqual(comparison.to_json()["instance"], "three points")

    def test_lpd_routes_agree(self):
        """Formula, depth and syzygy routes give lpd 1 for E/(y1y2)."""
        N = e_module_from_ideal(MonomialIdeal(2, [{0, 1}]), self.K)
        comparison = compare_lpd_routes(N)
        self.assertTrue(comparison.ok)
        self.assertEqual(comparison.values, {"formula": 1, "sqf": 1, "direct": 1})
        self.assertTrue(comparison.complete)

    def test_truncated_lpd_route_is_recorded(self):
        comparison = compare_lpd_routes(sharpness_module(3, 2, self.K), max_steps=1)
        self.assertTrue(comparison.ok)
        self.assertFalse(comparison.complete)
        self.assertEqual(comparison.truncated, ["direct"])
        self.assertEqual(comparison.to_json()["truncated"], ["direct"])

    def test_rp2_depends_on_the_characteristic(self):
        """The six-vertex RP^2 has an extra syzygy in characteristic 2."""
        inst = load_instance(os.path.join(INSTANCE_DIR, "rp2_six_vertex.ideal"))
        totals = {}
        for char in (0, 2):
            M = sq_module_from_ideal(MonomialIdeal(inst.d, inst.generators, "S"), FieldConfig(char))
            table = min_free_resolution(M).betti.z_graded()
            by_spot = {}
            for (i, _), m in table.items():
                by_spot[abs(i)] = by_spot.get(abs(i), 0) + m
            totals[char] = [by_spot[i] for i in sorted(by_spot)]
        self.assertEqual(totals[0], [1, 10, 15, 6])
        self.assertEqual(totals[2], [1, 10, 15, 7, 1])


class TestSuites(unittest.TestCase):
    """Test cases for running suites over small instance lists."""

    def test_suite_names(self):
        for name in ("d2", "three-route", "complin", "strand", "truncation",
                     "regdual", "alexreg", "degenerate", "sharpness"):
            self.assertIn(name, SUITES)

    def test_d2_exhaustive_in_three_variables(self):
        """Every antichain in three variables satisfies the lpd bound."""
        result = run_suite_sync("d2", exhaustive_antichains(3), progress=False)
        self.assertEqual(result.instances_run, 19)
        self.assertTrue(result.passed, result.to_json()["failures"])

    def test_betti_suite_on_random_instances(self):
        result = run_suite_sync("betti", random_ideal(3, 4, seed=1, side="S"), progress=False)
        self.assertTrue(result.passed, result.to_json()["failures"])
        frame = result.to_frame()
        self.assertEqual(list(frame.columns), ["index", "seed", "instance", "pass", "detail"])
        self.assertEqual(list(frame["index"]), [0, 1, 2, 3])

    def test_small_suites_pass(self):
        instances = [parse_instance("d 3\ngen 1 2\ngen 3\n", default_char=0)]
        instances[0].seed = "fixed"
        for suite in ("tim", "three-route", "complin", "alexreg", "regdual", "lc", "filtration"):
            with self.subTest(suite=suite):
                result = run_suite_sync(suite, instances, SuiteContext(max_steps=5), progress=False)
                self.assertTrue(result.passed, result.to_json()["failures"])

    def test_seeded_suites_pass(self):
        """Every remaining suite on a small seeded corpus in three variables."""
        instances = random_ideal(3, 3, seed=5, side="S")
        for suite in ("truncation", "degenerate", "strand", "artinian", "omega", "flushpoint",
                      "bass", "charsens"):
            with self.subTest(suite=suite):
                result = run_suite_sync(suite, instances, SuiteContext(max_steps=4), progress=False)
                self.assertEqual(result.instances_run, 3)
                self.assertTrue(result.passed, result.to_json()["failures"])

    def test_strand_suite_uses_two_term_complexes(self):
        inst = random_ideal(3, 1, seed=5)[0]
        record = run_instance("strand", 0, inst, SuiteContext())
        self.assertTrue(record.passed, record.error)
        self.assertEqual([c["name"] for c in record.checks], ["strand-identity"])

    def test_sharpness_suite(self):
        inst = parse_instance("d 3\ngen 1\n", default_char=0)
        record = run_instance("sharpness", 0, inst, SuiteContext())
        self.assertTrue(record.passed, record.error)
        names = [c["name"] for c in record.checks]
        self.assertEqual(names, ["lpd-routes-1", "lpd==1", "pd==1", "lpd-routes-2", "lpd==2", "pd==2"])

    def test_errors_become_failures(self):
        """A bad characteristic is reported, not raised."""
        inst = parse_instance("d 2\ngen 1 2\n")
        record = run_instance("d2", 0, inst, SuiteContext(field_char=4))
        self.assertFalse(record.passed)
        self.assertIn("BadCharacteristic", record.error)

    def test_unknown_suite(self):
        with self.assertRaises(KeyError):
            run_suite_sync("no-such-suite", [], progress=False)


if __name__ == "__main__":
    unittest.main()
