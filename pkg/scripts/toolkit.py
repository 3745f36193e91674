#!/usr/bin/env python3
"""
KoszulLab - All-in-one script

One entry point for the toolkit:
- Betti tables over E and S, regularity, local cohomology and Ext data
- weak Koszulness, lpd and the linear quotient filtration
- Alexander duality and truncations
- verify suites and random instance generation

Every subcommand that reads an instance file prints a report and a list of
checks. Exit code 0 means every check passed, 1 a check failed or a
computation broke down, 2 a usage or instance file error.
"""

import os
import sys
import argparse
import json
import logging
import math
import subprocess
from datetime import datetime

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from dotenv import load_dotenv

from scripts.bgg import reg_of_complex
from scripts.emod import betti_E_closed_form, e_module_from_ideal, resolution_prefix
from scripts.exactla import BadCharacteristic, FieldConfig, KoszulLabError
from scripts.grading import BettiTable, MonomialIdeal, format_subset
from scripts.harness import SUITES, SuiteContext, compare_betti_routes, run_suite_sync
from scripts.instances import (InstanceError, exhaustive_antichains, format_instance,
                               load_instance, random_ideal)
from scripts.smod import (SComplex, alexander_dual, betti_via_koszul, depth_dim_cm,
                          ext_against_dualizing, face_counts, functor_S, local_cohomology_hilbert,
                          min_free_resolution, sq_module_from_ideal, truncate, truncation_box,
                          weakly_koszul_S)
from scripts.wkoszul import is_weakly_koszul_E, is_weakly_koszul_direct, lpd, wk_filtration

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

logger = logging.getLogger(__name__)

# ANSI color codes for terminal output
GREEN = "\033[0;32m"
RED = "\033[0;31m"
YELLOW = "\033[0;33m"
BLUE = "\033[0;34m"
NC = "\033[0m"  # No color

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


def setup_logging():
    """File + stream logging under LOG_DIR; the stream goes to stderr"""
    log_dir = os.getenv("LOG_DIR", "logs")
    if not os.path.isabs(log_dir):
        log_dir = os.path.join(ROOT, log_dir)
    ensure_directory(log_dir)
    logging.basicConfig(
        level=getattr(logging, os.getenv("LOG_LEVEL", "INFO").upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(os.path.join(log_dir, f'toolkit_{datetime.now().strftime("%Y%m%d_%H%M%S")}.log')),
            logging.StreamHandler()
        ]
    )


def print_header(text):
    """Print a section header"""
    print(f"\n{BLUE}{'=' * 70}{NC}")
    print(f"{BLUE}# {text}{NC}")
    print(f"{BLUE}{'=' * 70}{NC}")


def ensure_directory(directory):
    """Ensure a directory exists"""
    if not os.path.exists(directory):
        os.makedirs(directory)
        logger.info(f"Created directory: {directory}")


def plain(value):
    """JSON-safe copy: infinities as strings, sets as sorted 1-based lists"""
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, BettiTable):
        return value.to_json()
    if isinstance(value, frozenset):
        return sorted(k + 1 for k in value)
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return value


def check(name, passed, **detail):
    return {"name": name, "pass": bool(passed), **detail}


class Report:
    """What a subcommand computed, rendered as text or as one JSON object"""

    def __init__(self, command, instance=None):
        self.command = command
        self.instance = instance
        self.result = {}
        self.checks = []
        self.sections = []

    def add_section(self, title, body):
        self.sections.append((title, body))

    @property
    def passed(self):
        return all(c["pass"] for c in self.checks)

    def emit(self, as_json):
        if as_json:
            payload = {
                "command": self.command,
                "instance": self.instance.to_json() if self.instance else None,
                "result": plain(self.result),
                "checks": plain(self.checks),
            }
            print(json.dumps(payload, indent=2))
            return
        for title, body in self.sections:
            print_header(title)
            print(body)
        for key, value in self.result.items():
            if not isinstance(value, (dict, list)):
                print(f"{key}: {plain(value)}")
        if self.checks:
            print()
        for c in self.checks:
            mark = f"{GREEN}PASS{NC}" if c["pass"] else f"{RED}FAIL{NC}"
            extra = {k: v for k, v in c.items() if k not in ("name", "pass")}
            print(f"  [{mark}] {c['name']}" + (f"  {plain(extra)}" if extra else ""))


# -- building the objects a command works on -----------------------------------------

def resolve_char(args, inst):
    """--field-char > --fast > instance file (which already fell back to FIELD_CHAR)"""
    if args.field_char is not None:
        return args.field_char
    if args.fast:
        return int(os.getenv("SPEED_CHAR", "32003"))
    return inst.char


def resolve_max_steps(args, d):
    if args.max_steps is not None:
        return args.max_steps
    env = os.getenv("MAX_STEPS")
    return int(env) if env else d + 2


def e_module(inst, field, args):
    return e_module_from_ideal(MonomialIdeal(inst.d, inst.generators, "E"), field,
                               as_quotient=not args.ideal)


def s_module(inst, field, args):
    return sq_module_from_ideal(MonomialIdeal(inst.d, inst.generators, "S"), field,
                                as_quotient=not args.ideal)


def describe(inst, args):
    ideal = MonomialIdeal(inst.d, inst.generators, inst.side)
    return f"{'ideal' if args.ideal else 'quotient by'} {ideal.describe()} (d={inst.d})"


# -- subcommands ----------------------------------------------------------------------

def cmd_betti_e(inst, field, args, report):
    N = e_module(inst, field, args)
    k = resolve_max_steps(args, inst.d)
    prefix = resolution_prefix(N, k)
    closed = betti_E_closed_form(N, k)
    report.result.update({"betti": prefix.betti, "steps": k})
    report.add_section(f"Betti table over E, {k} step(s): {describe(inst, args)}", prefix.betti.format_grid())
    report.checks.append(check("resolution==closed-form", prefix.betti == closed))
    report.checks.append(check("minimal", prefix.is_minimal()))


def cmd_betti_s(inst, field, args, report):
    M = s_module(inst, field, args)
    comparison = compare_betti_routes(M, format_instance(inst))
    table = comparison.values["resolution"]
    report.result.update({"betti": table, "reg": table.reg(),
                          "projective_dimension": min_free_resolution(M).projective_dimension})
    report.add_section(f"Betti table over S: {describe(inst, args)}", table.format_grid())
    report.checks.append(check("betti-routes", comparison.ok, divergence=comparison.divergence))


def cmd_reg(inst, field, args, report):
    M = s_module(inst, field, args)
    via_betti = min_free_resolution(M).reg()
    via_g = reg_of_complex(SComplex.from_module(M))
    via_lc = local_cohomology_hilbert(M).reg
    report.result.update({"reg": via_betti, "via_G": via_g, "via_local_cohomology": via_lc})
    report.checks.append(check("reg-routes", via_betti == via_g == via_lc))


def cmd_localcoh(inst, field, args, report):
    M = s_module(inst, field, args)
    lc = local_cohomology_hilbert(M)
    lines = [f"H^{i}_m(M)_{a}: {n}" for (i, a), n in sorted(lc.table.items())]
    report.add_section(f"Local cohomology: {describe(inst, args)}", "\n".join(lines) or "(all zero)")
    report.result.update({"table": {f"{i}:{list(a)}": n for (i, a), n in sorted(lc.table.items())},
                          "reg": lc.reg})
    via_betti = min_free_resolution(M).reg()
    report.checks.append(check("reg-lc==reg-betti", lc.reg == via_betti, via_betti=via_betti))


def cmd_lpd(inst, field, args, report):
    N = e_module(inst, field, args)
    lpd_report = lpd(N, resolve_max_steps(args, inst.d))
    report.result.update(lpd_report.to_json())
    report.result["lpd"] = lpd_report.value_formula
    agreement = lpd_report.agreement()
    # a truncated direct route is reported, not counted as a disagreement
    report.checks.append(check("routes-agree", agreement != "disagree", agreement=agreement))
    report.checks.append(check("omega-monotone", lpd_report.omega_monotone()))
    report.checks.append(check("lpd>=0", lpd_report.value_formula >= 0))
    if N.is_squarefree():
        report.checks.append(check("lpd<=d-1", lpd_report.value_formula <= inst.d - 1))


def cmd_wkoszul(inst, field, args, report):
    N = e_module(inst, field, args)
    verdict = is_weakly_koszul_E(N)
    direct = is_weakly_koszul_direct(N, resolve_max_steps(args, inst.d))
    report.result.update({"weakly_koszul": verdict.verdict, "certificate": verdict.certificate,
                          "direct_prefix_linear": direct.verdict})
    # a linear prefix is necessary, so the direct oracle may only refute what the formula refutes
    report.checks.append(check("direct-oracle", direct.verdict or not verdict.verdict))
    if N.is_squarefree():
        s_side, _ = weakly_koszul_S(functor_S(N))
        report.checks.append(check("componentwise-linear-S", s_side == verdict.verdict))


def cmd_filtration(inst, field, args, report):
    N = e_module(inst, field, args)
    filtration = wk_filtration(N)
    lines = [f"U_{n + 1}: dim {step.module.total_dim()}, quotient generated in degree {step.degree}, "
             f"linear={step.linear}" for n, step in enumerate(filtration.steps)]
    report.add_section(f"Linear quotient filtration: {describe(inst, args)}", "\n".join(lines))
    report.result.update({"length": filtration.length,
                          "steps": [{"dim": s.module.total_dim(), "degree": s.degree,
                                     "quotient_dim": s.quotient.total_dim(),
                                     "split": s.certificate.to_json() if s.certificate else None}
                                    for s in filtration.steps]})
    report.checks.append(check("quotients-linear", filtration.quotients_linear()))
    report.checks.append(check("exhausts", filtration.exhausts()))
    report.checks.append(check("bgg-certified", filtration.certified()))


def cmd_alexander(inst, field, args, report):
    M = s_module(inst, field, args)
    A = alexander_dual(M)
    res = min_free_resolution(M)
    reg_a = min_free_resolution(A).reg() if not A.is_zero() else float("-inf")
    report.result.update({"dual_face_counts": face_counts(A), "reg_dual": reg_a,
                          "projective_dimension": res.projective_dimension,
                          "dual_faces": [format_subset(F) for F in A.faces()]})
    report.checks.append(check("reg(A(M))==pd(M)", reg_a == res.projective_dimension))
    report.checks.append(check("A(A(M))~M", alexander_dual(A).dims == M.dims))


def cmd_ext_table(inst, field, args, report):
    M = s_module(inst, field, args)
    exts = ext_against_dualizing(M)
    depth = depth_dim_cm(M)
    rows = []
    for i, E in exts.items():
        rows.append(f"Ext^{-i}(M, D): {E.total_dim()} in {len(E.dims)} squarefree degree(s)")
    report.add_section(f"Ext against the dualizing complex: {describe(inst, args)}", "\n".join(rows))
    report.result.update({"ext_dims": {str(i): E.total_dim() for i, E in exts.items()},
                          "depth": depth.depth, "dim": depth.dim,
                          "projective_dimension": depth.projective_dimension,
                          "cohen_macaulay": depth.is_cm, "sequentially_cm": depth.is_sequentially_cm})
    report.checks.append(check("depth+pd==d", depth.depth + depth.projective_dimension == inst.d))


def cmd_truncate_betti(inst, field, args, report):
    M = s_module(inst, field, args)
    r = args.r
    table = betti_via_koszul(truncate(M, r), *truncation_box(M, r))
    reg = min_free_resolution(M).reg()
    report.add_section(f"Betti table of the truncation at {r}: {describe(inst, args)}", table.format_grid())
    report.result.update({"betti": table, "r": r, "reg": reg, "linear": table.is_linear(r)})
    report.checks.append(check("linear-iff-r>=reg", table.is_linear(r) == (r >= reg)))


INSTANCE_COMMANDS = {
    "betti-e": cmd_betti_e,
    "betti-s": cmd_betti_s,
    "reg": cmd_reg,
    "localcoh": cmd_localcoh,
    "lpd": cmd_lpd,
    "wkoszul": cmd_wkoszul,
    "filtration": cmd_filtration,
    "alexander": cmd_alexander,
    "ext-table": cmd_ext_table,
    "truncate-betti": cmd_truncate_betti,
}


def run_instance_command(args):
    try:
        inst = load_instance(args.file)
    except (InstanceError, OSError) as e:
        logger.error(f"Cannot read instance {args.file}: {e}")
        emit_error(args, "instance", e)
        return EXIT_USAGE
    try:
        field = FieldConfig(resolve_char(args, inst))
    except BadCharacteristic as e:
        emit_error(args, "field", e)
        return EXIT_USAGE
    report = Report(args.command, inst)
    try:
        INSTANCE_COMMANDS[args.command](inst, field, args, report)
    except KoszulLabError as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}\n{format_instance(inst)}")
        report.checks.append(check("computation", False, error=f"{type(e).__name__}: {e}"))
    report.emit(args.json)
    if not report.passed:
        logger.warning(f"{args.command}: {sum(not c['pass'] for c in report.checks)} check(s) failed")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def emit_error(args, kind, error):
    if args.json:
        print(json.dumps({"command": args.command, "instance": None, "result": None,
                          "checks": [check(kind, False, error=f"{type(error).__name__}: {error}")]}))
    else:
        print(f"{RED}{type(error).__name__}: {error}{NC}")


def generate_instances(args, side):
    char = args.field_char if args.field_char is not None else int(os.getenv("FIELD_CHAR", "0"))
    if args.fast:
        char = int(os.getenv("SPEED_CHAR", "32003"))
    FieldConfig(char)
    if args.exhaustive:
        return exhaustive_antichains(args.d, char, side)
    return random_ideal(args.d, args.count, args.seed, args.density, char, side)


def output_path(path):
    if os.path.isabs(path) or os.path.dirname(path):
        ensure_directory(os.path.dirname(os.path.abspath(path)))
        return path
    out_dir = os.getenv("OUTPUT_DIR", "outputs")
    if not os.path.isabs(out_dir):
        out_dir = os.path.join(ROOT, out_dir)
    ensure_directory(out_dir)
    return os.path.join(out_dir, path)


def run_verify(args):
    try:
        instances = generate_instances(args, "S")
    except (ValueError, BadCharacteristic) as e:
        emit_error(args, "arguments", e)
        return EXIT_USAGE
    ctx = SuiteContext(args.field_char, args.max_steps)
    if not args.json:
        print_header(f"verify {args.suite}: {len(instances)} instance(s), d={args.d}")
    result = run_suite_sync(args.suite, instances, ctx, args.workers, progress=not args.json)
    if args.output:
        path = output_path(args.output)
        result.to_frame().to_csv(path, index=False)
        logger.info(f"Wrote {path}")
    if args.json:
        print(json.dumps({"command": "verify", "instance": None, "result": plain(result.to_json()),
                          "checks": [check(args.suite, result.passed, failures=len(result.failures))]},
                         indent=2))
    else:
        colour = GREEN if result.passed else RED
        print(f"{colour}{result.instances_run - len(result.failures)}/{result.instances_run} passed "
              f"in {result.wall_time:.1f}s{NC}")
        for failure in result.failures[:10]:
            print(f"{YELLOW}--- instance {failure.index} (seed {failure.seed}): {failure.detail()}{NC}")
            print(failure.instance)
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


def run_random(args):
    try:
        instances = generate_instances(args, args.side)
    except (ValueError, BadCharacteristic) as e:
        emit_error(args, "arguments", e)
        return EXIT_USAGE
    if args.output:
        import pandas as pd

        path = output_path(args.output)
        rows = [{**inst.to_json(), "generators": " ".join(format_subset(g) for g in inst.generators)}
                for inst in instances]
        pd.DataFrame(rows).to_csv(path, index=False)
        logger.info(f"Wrote {len(instances)} instance(s) to {path}")
    if args.json:
        print(json.dumps({"command": "random", "instance": None,
                          "result": {"instances": [inst.to_json() for inst in instances]},
                          "checks": []}, indent=2))
    else:
        for inst in instances:
            print(f"# seed {inst.seed}")
            print(format_instance(inst))
    return EXIT_OK


def check_setup():
    """Run the environment check script"""
    print_header("Checking environment setup")
    setup_script = os.path.join(ROOT, "scripts", "setup.py")
    try:
        subprocess.run([sys.executable, setup_script], check=True)
        return EXIT_OK
    except subprocess.CalledProcessError as e:
        logger.error(f"Setup failed: {e}")
        return EXIT_CHECK_FAILED


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help="Print a single JSON report on stdout")
    common.add_argument('--max-steps', type=int, help="Steps for E-side resolutions (default d + 2 or MAX_STEPS)")
    common.add_argument('--field-char', type=int, help="Characteristic of the coefficient field (0 or a prime)")
    common.add_argument('--fast', action='store_true', help="Work over GF(SPEED_CHAR) instead")
    common.add_argument('--ideal', action='store_true', help="Use the ideal itself instead of the quotient")
    common.add_argument('--output', type=str, help="CSV report for verify/random")

    parser = argparse.ArgumentParser(
        description="KoszulLab - BGG and Koszul duality computations for squarefree modules",
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    subparsers.add_parser("setup", help="Check the environment", parents=[common])

    helps = {
        "betti-e": "Betti table of E/J over the exterior algebra",
        "betti-s": "Betti table of S/I, checked along three routes",
        "reg": "Castelnuovo-Mumford regularity along three routes",
        "localcoh": "Hilbert data of the local cohomology modules",
        "lpd": "Linearity defect by the formula, depth and syzygy routes",
        "wkoszul": "Is the E-module weakly Koszul",
        "filtration": "Filtration with linear quotients of a weakly Koszul module",
        "alexander": "Alexander dual and reg(A(M)) = pd(M)",
        "ext-table": "Ext modules against the dualizing complex, depth and dimension",
        "truncate-betti": "Betti table of the truncation M_{>=r}",
    }
    for name, text in helps.items():
        sub = subparsers.add_parser(name, help=text, parents=[common])
        sub.add_argument('file', type=str, help="Instance file")
        if name == "truncate-betti":
            sub.add_argument('--r', type=int, required=True, help="Truncation degree")

    def add_generator_args(sub):
        sub.add_argument('--d', type=int, required=True, help="Number of variables")
        sub.add_argument('--count', type=int, default=20, help="Number of random instances")
        sub.add_argument('--seed', type=int, default=1, help="Random seed")
        sub.add_argument('--density', type=float, default=0.5, help="Probability of each generator")
        sub.add_argument('--exhaustive', action='store_true', help="Enumerate every antichain (d <= 4)")

    verify_parser = subparsers.add_parser("verify", help="Run a verification suite", parents=[common])
    verify_parser.add_argument('suite', choices=sorted(SUITES), help="Suite to run")
    verify_parser.add_argument('--workers', type=int, help="Parallel workers (default VERIFY_WORKERS)")
    add_generator_args(verify_parser)

    random_parser = subparsers.add_parser("random", help="Generate random instances", parents=[common])
    random_parser.add_argument('--side', choices=["E", "S"], default="E", help="Ring the ideal lives in")
    add_generator_args(random_parser)
    return parser


def main(argv=None):
    """Main entry point for the toolkit"""
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_OK

    setup_logging()

    if args.command == "setup":
        return check_setup()
    if args.command == "verify":
        return run_verify(args)
    if args.command == "random":
        return run_random(args)
    if args.command in INSTANCE_COMMANDS:
        return run_instance_command(args)
    print(f"Unknown command: {args.command}")
    parser.print_help()
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
