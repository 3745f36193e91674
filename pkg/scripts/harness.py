#!/usr/bin/env python3
"""
Cross-route oracles and the verify suites

Every quantity the toolkit computes has at least two independent routes.
The suites below run one check function per instance and collect every
disagreement instead of stopping at the first one; a failure record keeps
the instance text so it can be replayed with `toolkit.py`.

Instances run through `loop.run_in_executor`, on the default thread
executor or on a process pool when VERIFY_WORKERS > 1.
"""

import asyncio
import logging
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import pandas as pd
from tqdm import tqdm

from scripts.bgg import (bass_numbers, betti_of_complex_via_G, reg_of_dual,
                         reg_of_dual_via_resolution, strand_identity_check)
from scripts.emod import EComplex, EMap, e_module_from_ideal, dual_E, resolution_prefix
from scripts.exactla import FieldConfig, KoszulLabError, NotWeaklyKoszul
from scripts.grading import BettiTable, MonomialIdeal, all_subsets, ones, sub
from scripts.instances import format_instance, random_ideal
from scripts.smod import (SComplex, SqMap, alexander_dual, artinian_box, artinian_window,
                          betti_via_koszul, ext_against_dualizing, flush_point_check, functor_S,
                          local_cohomology_hilbert, min_free_resolution, sq_module_from_ideal,
                          truncate, truncation_box, weakly_koszul_S, window_sigma)
from scripts.wkoszul import is_weakly_koszul_E, lpd, lpd_formula, sharpness_module, wk_filtration

logger = logging.getLogger(__name__)

# G evaluated degreewise is the Koszul total complex shifted by |b| spots
G_ROUTE = "bgg:koszul-blocks"


@dataclass
class OracleComparison:
    """Values of one quantity along several routes and the first disagreement"""

    routes: list
    values: dict
    divergence: object = None
    instance: object = None
    truncated: list = field(default_factory=list)   # routes that stopped before giving a value

    @property
    def ok(self):
        return self.divergence is None

    @property
    def complete(self):
        return self.ok and not self.truncated

    def to_json(self):
        def plain(v):
            return v.to_json() if isinstance(v, BettiTable) else v
        return {
            "routes": self.routes,
            "values": {k: plain(v) for k, v in self.values.items()},
            "divergence": self.divergence,
            "truncated": self.truncated,
            "instance": self.instance,
        }


def _first_divergence(routes, values):
    reference = values[routes[0]]
    for name in routes[1:]:
        if values[name] is not None and values[name] != reference:
            return {"reference": routes[0], "route": name}
    return None


def compare_betti_routes(M, instance=None, lo=None, hi=None):
    """Minimal resolution, Koszul homology and G; complexes skip the resolution route

    The G route reindexes the Koszul total complex (smod.koszul_blocks), so it
    checks the spot bookkeeping of G rather than the Koszul arithmetic.
    """
    if isinstance(M, SComplex):
        routes = ["koszul", G_ROUTE]
        values = {"koszul": betti_via_koszul(M, lo, hi), G_ROUTE: betti_of_complex_via_G(M, lo, hi)}
    else:
        routes = ["resolution", "koszul", G_ROUTE]
        values = {
            "resolution": min_free_resolution(M).betti,
            "koszul": betti_via_koszul(M, lo, hi),
            G_ROUTE: betti_of_complex_via_G(SComplex.from_module(M), lo, hi),
        }
    comparison = OracleComparison(routes, values, _first_divergence(routes, values), instance)
    if not comparison.ok:
        logger.warning(f"Betti routes diverge: {comparison.divergence}")
    return comparison


def compare_lpd_routes(N, instance=None, max_steps=None):
    """Formula, squarefree depth formula and the explicit syzygy route"""
    report = lpd(N, max_steps)
    routes = ["formula", "sqf", "direct"]
    values = {"formula": report.value_formula, "sqf": report.value_sqf,
              "direct": report.lower_bound_direct}
    divergence = _first_divergence(routes, values)
    if divergence is None and report.agreement() == "disagree":
        divergence = {"reference": "formula", "route": "direct"}
    comparison = OracleComparison(routes, values, divergence, instance,
                                  ["direct"] if report.direct_truncated else [])
    if not comparison.ok:
        logger.warning(f"lpd routes diverge: {values}")
    return comparison


# -- per-instance checks ---------------------------------------------------------------

@dataclass
class SuiteContext:
    field_char: object = None     # overrides the instance characteristic when set
    max_steps: object = None

    def field(self, inst):
        return FieldConfig(inst.char if self.field_char is None else self.field_char)


def _check(name, passed, **detail):
    return {"name": name, "pass": bool(passed), **detail}


def _e_quotient(inst, field):
    return e_module_from_ideal(MonomialIdeal(inst.d, inst.generators, "E"), field)


def _s_quotient(inst, field, as_ideal=False):
    return sq_module_from_ideal(MonomialIdeal(inst.d, inst.generators, "S"), field,
                                as_quotient=not as_ideal)


def _enlarged(inst):
    """Generators of a slightly larger ideal, derived from the instance seed"""
    rng = random.Random(f"{inst.seed}:enlarge:{format_instance(inst)}")
    extra = rng.choice([F for F in all_subsets(inst.d) if F])
    return list(inst.generators) + [extra]


def _e_surjection_complex(inst, field):
    """[E/J -> E/J'] at spots 0, 1 for J inside J'"""
    J = MonomialIdeal(inst.d, inst.generators, "E")
    J2 = MonomialIdeal(inst.d, _enlarged(inst), "E")
    A, B = e_module_from_ideal(J, field), e_module_from_ideal(J2, field)
    blocks = {a: field.identity(1) for a in A.dims if B.dim(a)}
    return EComplex(inst.d, field, {0: A, 1: B}, {0: EMap(A, B, blocks)})


def _s_surjection_complex(inst, field):
    """[S/I -> S/I'] at spots 0, 1 for I inside I'"""
    I = MonomialIdeal(inst.d, inst.generators, "S")
    I2 = MonomialIdeal(inst.d, _enlarged(inst), "S")
    A, B = sq_module_from_ideal(I, field), sq_module_from_ideal(I2, field)
    blocks = {F: field.identity(1) for F in A.dims if B.dim(F)}
    return SComplex(inst.d, field, {0: A, 1: B}, {0: SqMap(A, B, blocks)})


def check_d2(inst, ctx):
    N = _e_quotient(inst, ctx.field(inst))
    if N.is_zero():
        return [_check("nonzero", True, skipped=True)]
    value, _ = lpd_formula(N)
    bound = inst.d - 2 if inst.d >= 3 else inst.d - 1
    checks = [_check("lpd<=d-2", value <= bound, lpd=value, bound=bound)]
    if inst.d == 3 and inst.generators:
        # in three variables the ideal itself is already weakly Koszul
        J = e_module_from_ideal(MonomialIdeal(3, inst.generators, "E"), N.field, as_quotient=False)
        checks.append(_check("ideal-weakly-koszul", bool(is_weakly_koszul_E(J))))
    return checks


def check_tim(inst, ctx):
    N = _e_quotient(inst, ctx.field(inst))
    value, _ = lpd_formula(N)
    pd = min_free_resolution(functor_S(N)).projective_dimension
    return [
        _check("lpd>=0", value >= 0, lpd=value),
        _check("lpd<=d-1", value <= inst.d - 1, lpd=value),
        _check("lpd<=pd", value <= pd, lpd=value, pd=pd),
    ]


def check_three_route(inst, ctx):
    N = _e_quotient(inst, ctx.field(inst))
    comparison = compare_lpd_routes(N, format_instance(inst), ctx.max_steps)
    return [_check("lpd-routes", comparison.ok, values=comparison.values,
                   truncated=comparison.truncated)]


def check_complin(inst, ctx):
    N = _e_quotient(inst, ctx.field(inst))
    e_side = bool(is_weakly_koszul_E(N))
    s_side, _ = weakly_koszul_S(functor_S(N))
    return [_check("wk-E==cl-S", e_side == s_side, e_side=e_side, s_side=s_side)]


def check_strand(inst, ctx):
    cpx = _e_surjection_complex(inst, ctx.field(inst))
    return [_check("strand-identity", strand_identity_check(cpx))]


def check_betti(inst, ctx):
    field = ctx.field(inst)
    checks = []
    for label, M in (("quotient", _s_quotient(inst, field)), ("ideal", _s_quotient(inst, field, True))):
        if M.is_zero():
            continue
        comparison = compare_betti_routes(M, format_instance(inst))
        checks.append(_check(f"betti-routes-{label}", comparison.ok, divergence=comparison.divergence))
    return checks


def check_truncation(inst, ctx):
    M = _s_quotient(inst, ctx.field(inst))
    betti = min_free_resolution(M).betti
    reg, iota = betti.reg(), betti.iota()
    checks = []
    for r in range(iota - 1, reg + 3):
        table = betti_via_koszul(truncate(M, r), *truncation_box(M, r))
        linear = table.is_linear(r)
        checks.append(_check(f"truncate-{r}", linear == (r >= reg), linear=linear, reg=reg))
    return checks


def check_regdual(inst, ctx):
    M = _s_quotient(inst, ctx.field(inst))
    via_g = reg_of_dual(SComplex.from_module(M))
    via_res = reg_of_dual_via_resolution(M)
    reflected = min_free_resolution(M).betti.reflect().reg()
    return [_check("reg-of-dual", via_g == via_res == reflected,
                   via_g=via_g, via_resolution=via_res, reflected=reflected)]


def check_alexreg(inst, ctx):
    M = _s_quotient(inst, ctx.field(inst))
    A = alexander_dual(M)
    pd = min_free_resolution(M).projective_dimension
    reg_a = min_free_resolution(A).reg()
    twice = alexander_dual(A)
    return [
        _check("reg(A(M))==pd(M)", reg_a == pd, reg=reg_a, pd=pd),
        _check("A(A(M))~M", twice.dims == M.dims),
    ]


def check_degenerate(inst, ctx):
    cpx = _s_surjection_complex(inst, ctx.field(inst))
    of_complex = betti_of_complex_via_G(cpx)
    of_cohomology = BettiTable(inst.d)
    for q in cpx.spots():
        H = cpx.cohomology(q)
        if not H.is_zero():
            of_cohomology = of_cohomology.merged(min_free_resolution(H).betti.shift(-q))
    routes = compare_betti_routes(cpx, format_instance(inst))
    return [
        _check("beta(H)>=beta", of_cohomology.dominates(of_complex)),
        _check("betti-routes-complex", routes.ok, divergence=routes.divergence),
    ]


def check_artinian(inst, ctx):
    M = _s_quotient(inst, ctx.field(inst))
    checks = []
    for r in (1, 2):
        W = artinian_window(M, r)
        lo, hi = artinian_box(M, r)
        reg = betti_via_koszul(W, lo, hi).reg()
        sigma = window_sigma(W, lo, hi)
        checks.append(_check(f"reg==sigma-{r}", reg == sigma, reg=reg, sigma=sigma))
    return checks


def check_omega(inst, ctx):
    report = lpd(_e_quotient(inst, ctx.field(inst)), ctx.max_steps)
    return [_check("omega-monotone", report.omega_monotone(), trace=report.syzygy_trace)]


def check_filtration(inst, ctx):
    J = e_module_from_ideal(MonomialIdeal(inst.d, inst.generators, "E"), ctx.field(inst),
                            as_quotient=False)
    if J.is_zero():
        return [_check("filtration", True, skipped=True)]
    try:
        filtration = wk_filtration(J)
    except NotWeaklyKoszul:
        return [_check("filtration", not is_weakly_koszul_E(J), weakly_koszul=False)]
    degrees = MonomialIdeal(inst.d, inst.generators).generator_degrees()
    return [
        _check("quotients-linear", filtration.quotients_linear()),
        _check("exhausts", filtration.exhausts()),
        _check("bgg-certified", filtration.certified()),
        _check("length", filtration.length == len(degrees), length=filtration.length),
    ]


def check_flushpoint(inst, ctx):
    M = _s_quotient(inst, ctx.field(inst))
    exts = ext_against_dualizing(M)
    betti = min_free_resolution(M).betti
    bad = []
    for r in range(betti.iota() - 1, betti.reg() + 2):
        for t in range(inst.d + 1):
            hypothesis, above = flush_point_check(M, r, t, exts)
            if hypothesis and not above:
                bad.append((r, t))
    return [_check("flush-point", not bad, counterexamples=bad)]


def check_lc(inst, ctx):
    M = _s_quotient(inst, ctx.field(inst))
    via_lc = local_cohomology_hilbert(M).reg
    via_betti = min_free_resolution(M).reg()
    return [_check("reg-lc==reg-betti", via_lc == via_betti, via_lc=via_lc, via_betti=via_betti)]


def check_bass(inst, ctx):
    N = _e_quotient(inst, ctx.field(inst))
    k = min(inst.d, ctx.max_steps if ctx.max_steps is not None else inst.d)
    mu = bass_numbers(N, k)
    expected = BettiTable(inst.d)
    for (t, b), m in resolution_prefix(dual_E(N), k).betti.entries.items():
        expected.add(-t, sub(ones(inst.d), b), m)
    return [_check("bass==reflected-betti", mu == expected)]


def check_charsens(inst, ctx):
    tables = {}
    checks = []
    for char in (0, 2):
        M = _s_quotient(inst, FieldConfig(char))
        comparison = compare_betti_routes(M, format_instance(inst))
        tables[char] = comparison.values["resolution"]
        checks.append(_check(f"betti-routes-char{char}", comparison.ok))
    differs = tables[0].z_graded() != tables[2].z_graded()
    checks.append(_check("char-sensitivity-recorded", True, differs=differs))
    return checks


@lru_cache(maxsize=None)
def _sharpness_checks(d, char, max_steps):
    checks = []
    for i in range(1, d):
        N = sharpness_module(d, i, FieldConfig(char))
        comparison = compare_lpd_routes(N, max_steps=max_steps)
        value = comparison.values["formula"]
        pd = min_free_resolution(functor_S(N)).projective_dimension
        checks.append(_check(f"lpd-routes-{i}", comparison.ok, values=comparison.values,
                             truncated=comparison.truncated))
        checks.append(_check(f"lpd=={i}", value == i, lpd=value))
        checks.append(_check(f"pd=={i}", pd == i, pd=pd))
    return tuple(checks)


def check_sharpness(inst, ctx):
    """The modules D_E(E(Omega_i(K))) for 1 <= i < d; only the instance's d and characteristic matter"""
    char = ctx.field(inst).characteristic
    return [dict(c) for c in _sharpness_checks(inst.d, char, ctx.max_steps)]


SUITES = {
    "d2": check_d2,
    "tim": check_tim,
    "three-route": check_three_route,
    "complin": check_complin,
    "strand": check_strand,
    "betti": check_betti,
    "truncation": check_truncation,
    "regdual": check_regdual,
    "alexreg": check_alexreg,
    "degenerate": check_degenerate,
    "artinian": check_artinian,
    "omega": check_omega,
    "filtration": check_filtration,
    "flushpoint": check_flushpoint,
    "lc": check_lc,
    "bass": check_bass,
    "charsens": check_charsens,
    "sharpness": check_sharpness,
}


# -- running suites ------------------------------------------------------------------

@dataclass
class InstanceResult:
    index: int
    instance: str
    seed: object
    passed: bool
    checks: list = field(default_factory=list)
    error: object = None

    def detail(self):
        if self.error:
            return self.error
        return "; ".join(c["name"] for c in self.checks if not c["pass"])


@dataclass
class VerifySuiteResult:
    suite: str
    instances_run: int
    failures: list
    wall_time: float
    results: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def to_json(self):
        return {
            "suite": self.suite,
            "instances_run": self.instances_run,
            "wall_time": round(self.wall_time, 3),
            "failures": [
                {"index": r.index, "seed": r.seed, "instance": r.instance,
                 "checks": [c for c in r.checks if not c["pass"]], "error": r.error}
                for r in self.failures
            ],
        }

    def to_frame(self):
        rows = []
        for r in self.results:
            rows.append({"index": r.index, "seed": r.seed, "instance": r.instance.replace("\n", "; ").strip("; "),
                         "pass": r.passed, "detail": r.detail()})
        return pd.DataFrame(rows, columns=["index", "seed", "instance", "pass", "detail"])


def run_instance(suite, index, inst, ctx):
    """Run one suite check; errors become a failed result"""
    text = format_instance(inst)
    try:
        checks = SUITES[suite](inst, ctx)
    except KoszulLabError as e:
        logger.error(f"{suite}[{index}] raised {type(e).__name__}: {e}\n{text}")
        return InstanceResult(index, text, inst.seed, False, error=f"{type(e).__name__}: {e}")
    except Exception as e:
        logger.error(f"{suite}[{index}] unexpected error: {e}\n{text}")
        return InstanceResult(index, text, inst.seed, False, error=f"{type(e).__name__}: {e}")
    passed = all(c["pass"] for c in checks)
    if not passed:
        logger.warning(f"{suite}[{index}] failed: {[c for c in checks if not c['pass']]}")
    return InstanceResult(index, text, inst.seed, passed, checks)


async def run_suite(suite, instances, ctx=None, workers=None, progress=True):
    """Run a suite over instances concurrently; results come back in instance order"""
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    ctx = ctx or SuiteContext()
    workers = workers or int(os.getenv("VERIFY_WORKERS", "1"))
    loop = asyncio.get_running_loop()
    start = time.time()
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        tasks = [loop.run_in_executor(executor, run_instance, suite, n, inst, ctx)
                 for n, inst in enumerate(instances)]
        with tqdm(total=len(tasks), desc=f"verify {suite}", disable=not progress) as bar:
            for task in tasks:
                task.add_done_callback(lambda _: bar.update(1))
            outcomes = await asyncio.gather(*tasks, return_exceptions=True)
    finally:
        if executor is not None:
            executor.shutdown()

    results = []
    for n, (inst, outcome) in enumerate(zip(instances, outcomes)):
        if isinstance(outcome, BaseException):
            logger.error(f"{suite}[{n}] worker failure: {outcome}")
            outcome = InstanceResult(n, format_instance(inst), inst.seed, False,
                                     error=f"{type(outcome).__name__}: {outcome}")
        results.append(outcome)
    failures = [r for r in results if not r.passed]
    elapsed = time.time() - start
    logger.info(f"Suite {suite}: {len(results)} instance(s), {len(failures)} failure(s), {elapsed:.1f}s")
    return VerifySuiteResult(suite, len(results), failures, elapsed, results)


def run_suite_sync(suite, instances, ctx=None, workers=None, progress=True):
    return asyncio.run(run_suite(suite, instances, ctx, workers, progress))


def characteristic_search(d, count, seed, chars=(0, 2), density=0.5):
    """First seeded random S-side instance whose Betti tables differ across characteristics"""
    for inst in random_ideal(d, count, seed, density, side="S"):
        tables = [min_free_resolution(_s_quotient(inst, FieldConfig(c))).betti.z_graded() for c in chars]
        if any(t != tables[0] for t in tables[1:]):
            logger.info(f"Characteristic-sensitive instance found: {inst.to_json()}")
            return inst
    return None
