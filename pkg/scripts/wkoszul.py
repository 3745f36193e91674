#!/usr/bin/env python3
"""
Weakly Koszul E-modules and the lpd invariant

lpd(N) is the least i such that the i-th syzygy of N is weakly Koszul. It
is computed three ways:

    formula  max over p of reg(H^p(F(D_E N))) + p
    sqf      max over 0 <= i <= d of i - depth Ext^{d-i}(S(D_E N), S)
    direct   iterate syzygies and test each one with the formula route

The formula route is the reference; the other two must agree with it.
"""

import logging
from dataclasses import dataclass, field

from scripts.bgg import cohomology_dims, cohomology_regs, functor_F, functor_G
from scripts.emod import (EMap, EModule, compose, degree_part_submodule, dual_E,
                          generated_submodule, minimal_generators, quotient, resolution_prefix,
                          strip_free_summands, submodule_from_bases, syzygy)
from scripts.exactla import (NotSquarefree, NotWeaklyKoszul, Subquotient, ZeroModule, hstack,
                             induced_map, kernel_matrix, matmul, rank)
from scripts.grading import NEG_INF, box, indicator, ones, sub, total, zero
from scripts.smod import (ext_against_dualizing, functor_E, functor_S, min_free_resolution,
                          residue_field_S, syzygy_module)

logger = logging.getLogger(__name__)


@dataclass
class Verdict:
    """A yes/no answer with the data that justifies it"""

    verdict: bool
    certificate: dict = field(default_factory=dict)

    def __bool__(self):
        return self.verdict


def _formula_table(N):
    """p -> reg(H^p(F(D_E N))) + p over the nonzero cohomology"""
    regs = cohomology_regs(functor_F(dual_E(N)))
    return {p: reg + p for p, reg in sorted(regs.items())}


def is_weakly_koszul_E(N):
    """N is weakly Koszul iff reg(H^p(F(D_E N))) + p <= 0 for every p"""
    if N.is_zero():
        raise ZeroModule("weak Koszulness of the zero module")
    table = _formula_table(N)
    return Verdict(all(v <= 0 for v in table.values()), {"reg_plus_p": table})


def is_weakly_koszul_direct(N, k):
    """Truncated oracle: each N_<i> (free summands split off) must have a linear prefix of length k

    A False is conclusive; a True only means linear through step k.
    """
    if N.is_zero():
        raise ZeroModule("weak Koszulness of the zero module")
    if k < 1:
        raise ValueError("need at least one resolution step")
    checked = []
    for i in sorted({total(a) for a, _ in minimal_generators(N)}):
        U, _ = degree_part_submodule(N, i)
        U, free_rank = strip_free_summands(U)
        if U.is_zero():
            checked.append({"degree": i, "free_rank": free_rank})
            continue
        prefix = resolution_prefix(U, k)
        if not prefix.betti.is_linear(i):
            return Verdict(False, {"degree": i, "betti": prefix.betti.to_json(), "checked": checked})
        checked.append({"degree": i, "free_rank": free_rank})
    return Verdict(True, {"checked": checked, "steps": k})


def lpd_formula(N):
    table = _formula_table(N)
    return max(table.values(), default=NEG_INF), table


def lpd_sqf(N):
    """lpd through depths of Ext modules of S(D_E N); returns (value, per-i table)"""
    if N.is_zero():
        raise ZeroModule("lpd of the zero module")
    if not N.is_squarefree():
        raise NotSquarefree("lpd_sqf needs a squarefree module")
    M = functor_S(dual_E(N))
    exts = ext_against_dualizing(M)
    table = {}
    for i, E in exts.items():
        if E.is_zero():
            table[i] = {"depth": None, "value": NEG_INF}
            continue
        depth = N.d - min_free_resolution(E).projective_dimension
        table[i] = {"depth": depth, "value": i - depth}
    return max(row["value"] for row in table.values()), table


@dataclass
class LpdReport:
    value_formula: int
    value_sqf: object
    lower_bound_direct: object
    per_i_table: dict
    syzygy_trace: list
    direct_truncated: bool = False   # max_steps ran out before a weakly Koszul syzygy showed up

    def agreement(self):
        """'agree', 'disagree', or 'direct-truncated' when the direct route has no value to compare"""
        computed = [v for v in (self.value_sqf, self.lower_bound_direct) if v is not None]
        if any(v != self.value_formula for v in computed):
            return "disagree"
        if self.lower_bound_direct is None:
            return "direct-truncated" if self.direct_truncated else "disagree"
        return "agree"

    def agree(self):
        return self.agreement() == "agree"

    def omega_monotone(self):
        """Once a syzygy is weakly Koszul every later one is too"""
        seen = False
        for _, verdict in self.syzygy_trace:
            if seen and not verdict:
                return False
            seen = seen or verdict
        return True

    def to_json(self):
        return {
            "value_formula": self.value_formula,
            "value_sqf": self.value_sqf,
            "lower_bound_direct": self.lower_bound_direct,
            "direct_truncated": self.direct_truncated,
            "agreement": self.agreement(),
            "per_i_table": {str(p): v for p, v in self.per_i_table.items()},
            "syzygy_trace": [[i, v] for i, v in self.syzygy_trace],
        }


def lpd(N, max_steps=None):
    """lpd(N) by the formula, the squarefree depth formula and explicit syzygies"""
    if N.is_zero():
        raise ZeroModule("lpd of the zero module")
    value, table = lpd_formula(N)
    value_sqf = lpd_sqf(N)[0] if N.is_squarefree() else None
    limit = value + 1
    truncated = max_steps is not None and max_steps < limit
    if truncated:
        limit = max_steps
    trace, lower = [], None
    current = N
    for i in range(max(limit, 0) + 1):
        verdict = True if current.is_zero() else bool(is_weakly_koszul_E(current))
        trace.append((i, verdict))
        if verdict and lower is None:
            lower = i
        if i < limit and not current.is_zero():
            current = syzygy(current).kernel
    report = LpdReport(value, value_sqf, lower, table, trace, truncated and lower is None)
    if report.direct_truncated:
        logger.warning(f"lpd: direct route stopped after {max_steps} syzygies without a verdict")
    logger.info(f"lpd: formula={value} sqf={value_sqf} direct={lower}")
    return report


# -- the linear quotient filtration --------------------------------------------------

@dataclass
class FiltrationStep:
    module: EModule          # U_k
    inclusion: EMap          # U_k -> N
    quotient: EModule        # U_k / U_{k-1}
    degree: int              # generator degree of the quotient
    linear: bool
    certified: bool          # the split agrees with the one read off F and G
    certificate: object = None


@dataclass
class Filtration:
    target: EModule
    steps: list

    @property
    def length(self):
        return len(self.steps)

    def quotients_linear(self):
        return all(step.linear for step in self.steps)

    def exhausts(self):
        """U_p = N and the quotient dimensions add up to dim N"""
        if not self.steps or self.steps[-1].module.dims != self.target.dims:
            return False
        return sum(step.quotient.total_dim() for step in self.steps) == self.target.total_dim()

    def certified(self):
        return all(step.certified for step in self.steps)


def _identity(N):
    return EMap(N, N, {a: N.field.identity(n) for a, n in N.dims.items()})


@dataclass
class SplitCertificate:
    """The top piece of N split off through F and G, checked against the elementary split"""

    spot: object             # least p with H^p(F(D_E N)) != 0
    expected_spot: int       # d - top
    submodule_dims: dict     # U read off H^0(G(sigma_{>spot} F(D_E N))), embedded in N
    matches_elementary: bool
    cohomology_matches: bool

    @property
    def ok(self):
        return self.spot == self.expected_spot and self.matches_elementary and self.cohomology_matches

    def to_json(self):
        return {
            "spot": self.spot,
            "expected_spot": self.expected_spot,
            "submodule_dims": {"".join(map(str, a)): n for a, n in sorted(self.submodule_dims.items())},
            "matches_elementary": self.matches_elementary,
            "cohomology_matches": self.cohomology_matches,
        }


def _cohomology_box(*complexes):
    boxes = [T.generator_box() for T in complexes if T.terms]
    lo = tuple(min(v) for v in zip(*(b[0] for b in boxes)))
    hi = tuple(max(v) for v in zip(*(b[1] for b in boxes)))
    return box(lo, hi)


def _spot_zero(image, b):
    """H^0 of G at internal degree -b, with the (G, i) block offsets of spot 0"""
    sizes, diffs, layout = image.component(b)
    K, n = image.field, sizes.get(0, 0)
    if not n:
        return None, {}
    d_out = diffs.get(0, K.zeros(sizes.get(1, 0), n))
    d_in = diffs.get(-1, K.zeros(n, sizes.get(-1, 0)))
    offsets, pos = {}, 0
    for G, i, size in layout.get(0, []):
        offsets[(G, i)] = pos
        pos += size
    return Subquotient(d_in, d_out), offsets


def _place(entries, block, r0, c0):
    for r, row in block.to_dod().items():
        for c, v in row.items():
            entries[(r0 + r, c0 + c)] = v


def _truncation_map(T, n, b, src, tgt, rows, cols):
    """G(T) -> G(sigma_{>n} T) at spot 0: identity above n, T^n onto im d^n, zero below"""
    entries = {}
    for (G, i), c0 in src.items():
        if i < n or (G, i) not in tgt:
            continue
        c = sub(b, indicator(G, T.d))
        block = T.image_projection(n, c) if i == n else T.field.identity(T.rank_at(i, c))
        _place(entries, block, tgt[(G, i)], c0)
    return T.field.matrix(entries, rows, cols)


def _generator_functionals(T, rows_n, b, offsets, cols):
    """Spot 0 of G(T) at -b onto the generators of degree b, i.e. onto (D_E N)_{1-a} = N_a^*"""
    q = -total(b)
    rows = T.provenance.get(q, [])
    entries = {}
    c0 = offsets.get((frozenset(), q))
    if c0 is not None:
        for pos, k in enumerate(T.indices_at(q, b)):
            if T.generators(q)[k] == b:
                entries[(rows[k][2], c0 + pos)] = 1
    return T.field.matrix(entries, rows_n, cols)


def truncation_submodule(N, n, T=None):
    """U = D_E H^0(G(sigma_{>n} T)) inside N, for T = F(D_E N)

    Degree by degree, H^0(G(T))_{1-a} is N_a^* and T -> sigma_{>n} T induces a
    surjection onto H^0(G(sigma_{>n} T))_{1-a}; U_a is the annihilator of its kernel.
    """
    T = functor_F(dual_E(N)) if T is None else T
    d = N.d
    lo, hi = (-1,) * d, zero(d)
    whole = functor_G(T.as_s_complex(), lo, hi)
    upper = functor_G(T.truncation_above(n), lo, hi)
    bases = {}
    for a in N.degrees():
        b = sub(a, ones(d))
        H, src = _spot_zero(whole, b)
        H_upper, tgt = _spot_zero(upper, b)
        if H is None:
            continue
        if H_upper is not None and H.dim and H_upper.dim:
            phi = induced_map(H, H_upper, _truncation_map(T, n, b, src, tgt, H_upper.ambient, H.ambient))
        else:
            phi = N.field.zeros(H_upper.dim if H_upper is not None else 0, H.dim)
        functionals = matmul(_generator_functionals(T, N.dim(a), b, src, H.ambient), H.reps)
        killed = matmul(functionals, kernel_matrix(phi).matrix)
        bases[a] = kernel_matrix(killed.transpose())
    return submodule_from_bases(N, bases)


def _same_submodule(N, first, second):
    for a in N.degrees():
        A, B = first.at(a), second.at(a)
        if rank(A) != rank(B) or rank(hstack(N.field, N.dim(a), [A, B])) != rank(A):
            return False
    return True


def split_certificate(N, U, inclusion, top):
    """Recompute U from the truncation of F(D_E N) above its lowest cohomology"""
    T_N = functor_F(dual_E(N))
    T_U = functor_F(dual_E(U))
    degrees = _cohomology_box(T_N, T_U)
    dims_N = cohomology_dims(T_N, degrees)
    spot = min((p for p, _ in dims_N), default=None)
    expected = N.d - top
    if spot is None:
        return SplitCertificate(None, expected, {}, False, False)
    U_trunc, inclusion_trunc = truncation_submodule(N, spot, T_N)
    upper = {k: v for k, v in dims_N.items() if k[0] > spot}
    certificate = SplitCertificate(spot, expected, dict(U_trunc.dims),
                                   _same_submodule(N, inclusion, inclusion_trunc),
                                   cohomology_dims(T_U, degrees) == upper)
    if not certificate.ok:
        logger.warning(f"filtration split at degree {top} not certified: {certificate.to_json()}")
    return certificate


def _peel(N):
    degrees = sorted({total(a) for a, _ in minimal_generators(N)})
    top = degrees[-1]
    if len(degrees) == 1:
        return [FiltrationStep(N, _identity(N), N, top, bool(is_weakly_koszul_E(N)), True)]
    lower = {a: N.field.identity(n) for a, n in N.dims.items() if total(a) < top}
    U, inclusion = generated_submodule(N, lower)
    V, _ = quotient(N, lower)
    logger.debug(f"filtration: top degree {top}, dim U = {U.total_dim()}, dim V = {V.total_dim()}")
    steps = []
    for step in _peel(U):
        steps.append(FiltrationStep(step.module, compose(inclusion, step.inclusion), step.quotient,
                                    step.degree, step.linear, step.certified, step.certificate))
    certificate = split_certificate(N, U, inclusion, top)
    steps.append(FiltrationStep(N, _identity(N), V, top, bool(is_weakly_koszul_E(V)),
                                certificate.ok, certificate))
    return steps


def wk_filtration(N):
    """0 = U_0 in U_1 in ... in U_p = N with every U_k / U_{k-1} linear"""
    if N.is_zero():
        raise ZeroModule("filtration of the zero module")
    if not is_weakly_koszul_E(N):
        raise NotWeaklyKoszul("the linear quotient filtration needs a weakly Koszul module")
    return Filtration(N, _peel(N))


def sharpness_module(d, i, field):
    """D_E(E(Omega_i(K))) over S: a squarefree module with lpd = pd S(N) = i"""
    if not 1 <= i <= d - 1:
        raise ValueError(f"need 1 <= i <= d - 1, got i={i}, d={d}")
    omega = syzygy_module(residue_field_S(d, field), i)
    return dual_E(functor_E(omega))
