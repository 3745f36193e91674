#!/usr/bin/env python3
"""
Test runner for KoszulLab.

Usage:
    python tests/run_tests.py                  # everything
    python tests/run_tests.py "test_smod*.py"  # files matching a pattern
    python tests/run_tests.py --quick          # skip the CLI and suite tests
    python tests/run_tests.py --slow           # also run the d = 4, 5 all-route sharpness tests
"""

import argparse
import os
import sys
import unittest

TEST_DIR = os.path.dirname(os.path.abspath(__file__))

# subprocess and verify-suite tests dominate the run time
SLOW_MODULES = {"test_toolkit_cli", "test_harness"}


def _modules(suite):
    if isinstance(suite, unittest.TestCase):
        return {type(suite).__module__}
    return set().union(*(_modules(s) for s in suite))


def collect(pattern, quick):
    discovered = unittest.TestLoader().discover(TEST_DIR, pattern=pattern)
    if not quick:
        return discovered
    kept = unittest.TestSuite()
    for module_suite in discovered:
        if not _modules(module_suite) & SLOW_MODULES:
            kept.addTest(module_suite)
    return kept


def main(argv=None):
    """Discover and run the tests; exit code 1 on any failure"""
    parser = argparse.ArgumentParser(description="Run the KoszulLab test suite")
    parser.add_argument('pattern', nargs='?', default="test_*.py", help="File pattern to discover")
    parser.add_argument('--quick', action='store_true', help="Skip the CLI and verify-suite tests")
    parser.add_argument('--failfast', action='store_true', help="Stop at the first failure")
    parser.add_argument('--slow', action='store_true', help="Run the tests gated by KOSZULLAB_SLOW")
    args = parser.parse_args(argv)
    if args.slow:
        os.environ["KOSZULLAB_SLOW"] = "1"

    sys.path.insert(0, os.path.dirname(TEST_DIR))

    runner = unittest.TextTestRunner(verbosity=2, failfast=args.failfast)
    result = runner.run(collect(args.pattern, args.quick))
    return 0 if result.wasSuccessful() else 1


if __name__ == "__main__":
    sys.exit(main())
