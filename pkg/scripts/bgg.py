#!/usr/bin/env python3
"""
The BGG functors F and G

F turns a complex of E-modules into a linear complex of free S-modules:
a basis vector n of N^i_a becomes a free generator of degree -a at spot
i + |a|, and

    d(1 (x) n) = sum_k x_k (x) y_k n + (-1)^|a| (1 (x) dn).

G goes the other way. It is only ever evaluated one internal degree at a
time: at degree -b the block (G, i) holds M^i_{b - G} at spot i + |b| - |G|,
so the Betti numbers of M can be read off as
beta^{i,b} = dim H^{i + |b|}(G(M))_{-b}. That layout is the Koszul total
complex at degree b moved by |b| spots, and both are built by
smod.koszul_blocks.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass

from scripts.emod import EComplex
from scripts.exactla import (CompositionNotZero, DifferentialCheckFailed, NotMinimal,
                             WindowTooSmall, is_zero, matmul, rank)
from scripts.grading import (NEG_INF, BettiTable, box, bump, degrees_with_total, leq, neg, ones,
                             sub, total, zero)
from scripts.smod import (FreeComplexS, WindowSModule, as_complex, betti_via_koszul,
                          default_betti_box, koszul_blocks, min_free_resolution)

logger = logging.getLogger(__name__)


class BGGImageF(FreeComplexS):
    """F(N) with the source (i, a, basis index) of every generator"""

    def __init__(self, d, field, terms, differentials, provenance):
        self.provenance = provenance
        try:
            super().__init__(d, field, terms, differentials, check=True)
        except (DifferentialCheckFailed, CompositionNotZero) as e:
            raise DifferentialCheckFailed(f"F-image is not a complex: {e}") from e


def functor_F(Ncpx):
    """F(N) for a bounded complex of E-modules"""
    if not isinstance(Ncpx, EComplex):
        Ncpx = EComplex.from_module(Ncpx)
    d, K = Ncpx.d, Ncpx.field
    provenance = defaultdict(list)
    for i in Ncpx.spots():
        N = Ncpx.terms[i]
        for a in N.degrees():
            for j in range(N.dims[a]):
                provenance[i + total(a)].append((i, a, j))
    position = {s: {src: n for n, src in enumerate(srcs)} for s, srcs in provenance.items()}
    diffs = {}
    for s, srcs in provenance.items():
        if s + 1 not in provenance:
            continue
        entries = {}
        pos_next = position[s + 1]
        blocks = {}
        for n, (i, a, j) in enumerate(srcs):
            blocks.setdefault((i, a), []).append((n, j))
        for (i, a), cols in blocks.items():
            N = Ncpx.terms[i]
            for k in range(d):
                target = bump(a, k)
                if not N.dim(target):
                    continue
                yk = N.y(k, a).to_dod()
                for n, j in cols:
                    for r, row in yk.items():
                        v = row.get(j)
                        if v:
                            entries[(pos_next[(i, target, r)], n)] = v
            if i + 1 in Ncpx.terms and Ncpx.terms[i + 1].dim(a):
                dn = Ncpx.differential(i, a).to_dod()
                sign = -1 if total(a) % 2 else 1
                for n, j in cols:
                    for r, row in dn.items():
                        v = row.get(j)
                        if v:
                            entries[(pos_next[(i + 1, a, r)], n)] = sign * v
        diffs[s] = K.matrix(entries, len(provenance[s + 1]), len(srcs))
    terms = {s: [neg(a) for _, a, _ in srcs] for s, srcs in provenance.items()}
    T = BGGImageF(d, K, terms, diffs, dict(provenance))
    logger.debug(f"F-image: {T}")
    return T


def is_squarefree_image(T):
    """Generators all in degrees -F, so H(-1) is a squarefree module"""
    lo, hi = T.generator_box()
    return leq(neg(ones(T.d)), lo) and leq(hi, zero(T.d))


def cohomology_F(Ncpx):
    """Squarefree realizations W^p = H^p(F(N))(-1); reg(H^p) = reg(W^p) - d"""
    T = Ncpx if isinstance(Ncpx, FreeComplexS) else functor_F(Ncpx)
    if not is_squarefree_image(T):
        raise WindowTooSmall([T.generator_box()[0]])
    shift = neg(ones(T.d))
    out = {}
    for p in T.spots():
        W = T.cohomology_sq(p, shift)
        if not W.is_zero():
            out[p] = W
    return out


def cohomology_table(T):
    """Betti tables of the cohomology modules H^p(T), keyed by p

    Squarefree route when the generators sit in [-1, 0]; otherwise each H^p is
    evaluated lazily and resolved over the generator box of T.
    """
    d = T.d
    tables = {}
    if is_squarefree_image(T):
        for p, W in cohomology_F(T).items():
            betti = min_free_resolution(W).betti
            table = BettiTable(d)
            for (i, a), m in betti.entries.items():
                table.add(i, sub(a, ones(d)), m)
            tables[p] = table
        return tables
    lo, hi = T.generator_box()
    for p in T.spots():
        W = T.cohomology_window(p)
        table = betti_via_koszul(W, lo, hi)
        if not table.is_empty():
            tables[p] = table
    return tables


def cohomology_regs(T):
    """p -> reg(H^p(T)) for the nonzero cohomology modules"""
    return {p: table.reg() for p, table in cohomology_table(T).items()}


def cohomology_dims(T, degrees):
    """{(p, c): dim H^p(T)_c} over the given degrees, nonzero entries only"""
    out = {}
    for c in degrees:
        for p in T.spots():
            n = T.cohomology_dim(p, c)
            if n:
                out[(p, tuple(c))] = n
    return out


# -- G --------------------------------------------------------------------------------

class BGGImageG:
    """G(M) for a complex of S-modules, one internal degree -b at a time"""

    def __init__(self, Mcpx, lo=None, hi=None):
        self.cpx = as_complex(Mcpx)
        self.d = self.cpx.d
        self.field = self.cpx.field
        if lo is None or hi is None:
            lo, hi = default_betti_box(self.cpx)
        self.lo, self.hi = tuple(lo), tuple(hi)
        need = tuple(v - 1 for v in self.lo)
        missing = []
        for M in self.cpx.terms.values():
            if isinstance(M, WindowSModule):
                missing.extend(M.missing(need, self.hi))
        if missing:
            raise WindowTooSmall(missing)
        self._memo = {}

    def degrees(self):
        return box(self.lo, self.hi)

    def component(self, b):
        """(sizes, differentials, layout) of G(M) at internal degree -b

        Block (G, i) holds M^i_{b - G} at spot i + |b| - |G|: the Koszul total
        complex at degree b moved by |b| spots, built by smod.koszul_blocks.
        """
        b = tuple(b)
        if b not in self._memo:
            self._memo[b] = koszul_blocks(self.cpx, b, total(b))
        return self._memo[b]

    def check_differential(self):
        for b in self.degrees():
            sizes, diffs, _ = self.component(b)
            for p in diffs:
                if p + 1 in diffs and not is_zero(matmul(diffs[p + 1], diffs[p])):
                    raise DifferentialCheckFailed(f"G-image d^2 != 0 at internal degree -{b}")
        return True

    def cohomology(self, b):
        """p -> dim H^p(G(M))_{-b}"""
        sizes, diffs, _ = self.component(b)
        out = {}
        for p, n in sizes.items():
            d_out = diffs.get(p, self.field.zeros(sizes.get(p + 1, 0), n))
            d_in = diffs.get(p - 1, self.field.zeros(n, sizes.get(p - 1, 0)))
            if not is_zero(matmul(d_out, d_in)):
                raise DifferentialCheckFailed(f"G-image d^2 != 0 at internal degree -{b}")
            h = n - rank(d_out) - rank(d_in)
            if h:
                out[p] = h
        return out

    def nonzero_spots(self):
        spots = set()
        for b in self.degrees():
            spots.update(self.cohomology(b))
        return sorted(spots)


def functor_G(Mcpx, lo=None, hi=None):
    return BGGImageG(Mcpx, lo, hi)


def betti_of_complex_via_G(Mcpx, lo=None, hi=None):
    """beta^{i,b}(M) = dim H^{i+|b|}(G(M))_{-b} over the box [lo, hi]"""
    G = Mcpx if isinstance(Mcpx, BGGImageG) else functor_G(Mcpx, lo, hi)
    table = BettiTable(G.d)
    for b in G.degrees():
        for p, h in G.cohomology(b).items():
            table.add(p - total(b), b, h)
    return table


def reg_of_complex(Mcpx, lo=None, hi=None):
    """max{p : H^p(G(M)) != 0}"""
    G = Mcpx if isinstance(Mcpx, BGGImageG) else functor_G(Mcpx, lo, hi)
    return max(G.nonzero_spots(), default=NEG_INF)


def reg_of_dual(Mcpx, lo=None, hi=None):
    """reg of the dual against S(-1)[d]: -min{p : H^p(G(M)) != 0}"""
    G = Mcpx if isinstance(Mcpx, BGGImageG) else functor_G(Mcpx, lo, hi)
    spots = G.nonzero_spots()
    return -min(spots) if spots else NEG_INF


def reg_of_dual_via_resolution(M):
    """reg of Hom(P, S(-1))[d] for the minimal resolution P of a squarefree module"""
    res = min_free_resolution(M)
    Q = res.complex.dual(ones(M.d)).shifted(M.d)
    return Q.betti().reg()


# -- minimization and linear strands ------------------------------------------------

def minimize(T):
    """Cancel unit entries one at a time (first by spot, then row, then column)"""
    terms = {p: list(gens) for p, gens in T.terms.items()}
    dods = {p: {r: dict(row) for r, row in m.to_dod().items()} for p, m in T.differentials.items()}
    cancelled = 0
    while True:
        found = None
        for p in sorted(dods):
            src, tgt = terms[p], terms[p + 1]
            for r in sorted(dods[p]):
                hits = [c for c in sorted(dods[p][r]) if src[c] == tgt[r]]
                if hits:
                    found = (p, r, hits[0])
                    break
            if found:
                break
        if not found:
            break
        _cancel(T.field.domain, terms, dods, *found)
        cancelled += 1
    diffs = {}
    for p, dod in dods.items():
        if p in terms and p + 1 in terms:
            diffs[p] = T.field.matrix({(r, c): v for r, row in dod.items() for c, v in row.items()},
                                      len(terms[p + 1]), len(terms[p]))
    logger.debug(f"minimize: cancelled {cancelled} unit entries")
    return FreeComplexS(T.d, T.field, terms, diffs, check=True)


def _cancel(K, terms, dods, p, r, c):
    D = dods[p]
    u_inv = K.quo(K.one, D[r][c])
    gamma = {rr: row[c] for rr, row in D.items() if rr != r and c in row}
    delta = {cc: v for cc, v in D[r].items() if cc != c}
    new = {}
    for rr, row in D.items():
        if rr == r:
            continue
        kept = {cc: v for cc, v in row.items() if cc != c}
        if rr in gamma:
            factor = gamma[rr] * u_inv
            for cc, v in delta.items():
                value = kept.get(cc, 0) - factor * v
                if value:
                    kept[cc] = value
                else:
                    kept.pop(cc, None)
        if kept:
            new[rr] = kept
    dods[p] = {(rr - 1 if rr > r else rr): {(cc - 1 if cc > c else cc): v for cc, v in row.items()}
               for rr, row in new.items()}
    if p - 1 in dods:
        dods[p - 1] = {(rr - 1 if rr > c else rr): row for rr, row in dods[p - 1].items() if rr != c}
    if p + 1 in dods:
        shifted = {}
        for rr, row in dods[p + 1].items():
            kept = {(cc - 1 if cc > r else cc): v for cc, v in row.items() if cc != r}
            if kept:
                shifted[rr] = kept
        dods[p + 1] = shifted
    terms[p].pop(c)
    terms[p + 1].pop(r)


def linear_strand(P, l):
    """Generators with spot + |degree| = l and the (linear) entries between them"""
    if not P.is_minimal():
        raise NotMinimal(f"unit entries at {P.unit_entries()[:3]}")
    keep = {p: [k for k, g in enumerate(gens) if p + total(g) == l] for p, gens in P.terms.items()}
    terms = {p: [P.terms[p][k] for k in idx] for p, idx in keep.items() if idx}
    diffs = {}
    for p in terms:
        if p + 1 in terms and p in P.differentials:
            diffs[p] = P.differentials[p].extract(keep[p + 1], keep[p]).to_sparse()
    return FreeComplexS(P.d, P.field, terms, diffs, check=True)


@dataclass
class StrandComparison:
    strand: int
    generators_match: bool
    betti_match: bool
    cohomology_match: bool

    @property
    def ok(self):
        return self.generators_match and self.betti_match and self.cohomology_match


def strand_identity_report(Ncpx):
    """Compare each linear strand of min F(N) with F(H^l(N))[-l]"""
    T = minimize(functor_F(Ncpx))
    strands = {p + total(g) for p, gens in T.terms.items() for g in gens}
    strands.update(Ncpx.spots())
    report = []
    for l in sorted(strands):
        left = linear_strand(T, l)
        H = Ncpx.cohomology(l)
        right = functor_F(EComplex.from_module(H)).shifted(-l) if not H.is_zero() else \
            FreeComplexS(Ncpx.d, Ncpx.field, {})
        gens_left = {p: sorted(g) for p, g in left.terms.items()}
        gens_right = {p: sorted(g) for p, g in right.terms.items()}
        generators_match = gens_left == gens_right
        betti_match = left.betti() == right.betti()
        cohomology_match = True
        if generators_match and left.terms:
            lo, hi = left.generator_box()
            degrees = box(lo, hi)
            cohomology_match = cohomology_dims(left, degrees) == cohomology_dims(right, degrees)
        entry = StrandComparison(l, generators_match, betti_match, cohomology_match)
        if not entry.ok:
            logger.warning(f"strand {l} differs: {entry}")
        report.append(entry)
    return report


def strand_identity_check(Ncpx):
    return all(entry.ok for entry in strand_identity_report(Ncpx))


# -- Bass numbers ------------------------------------------------------------------

def bass_numbers(N, max_spot):
    """mu^{i,a}(N) = dim H^{i+|a|}(F(N))_{-a} for 0 <= i <= max_spot"""
    T = functor_F(N)
    d = N.d
    degs = list(N.dims)
    hi = tuple(max(a[k] for a in degs) for k in range(d))
    spots = [total(a) for a in degs]
    table = BettiTable(d)
    for i in range(max_spot + 1):
        for c in degrees_with_total(neg(hi), i - max(spots), i - min(spots)):
            a = neg(c)
            table.add(i, a, T.cohomology_dim(i + total(a), c))
    return table
