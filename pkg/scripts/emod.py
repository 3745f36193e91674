#!/usr/bin/env python3
"""
Graded modules over the exterior algebra E = K<y1..yd>

An EModule stores one vector space per multidegree and the matrices of
y_i between neighbouring degrees. The monomial y_G (G increasing) acts as
y_{j1}(y_{j2}(...y_{jm} v)), and on the standard basis of a free module
y_i * y_G = (-1)^alpha(i, G) y_{G + i}.

Everything here is finite: syzygies, generated submodules, quotients,
duals and truncated minimal resolutions are computed degree by degree.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field

from scripts.exactla import (ERelationsViolated, DifferentialCheckFailed, KoszulLabError,
                             Subquotient, ZeroModule, hstack, image_basis, induced_map,
                             is_zero, kernel_matrix, matmul)
from scripts.grading import (BettiTable, add, all_subsets, alpha_sign, bump, degrees_with_total,
                             indicator, is_squarefree_degree, ones, sub, subset_key, total,
                             zero)

logger = logging.getLogger(__name__)


def _degree_key(a):
    return (sum(a), a)


class EModule:
    """Finite-dimensional Z^d-graded E-module"""

    def __init__(self, d, field, dims, action=None, labels=None, check=True):
        self.d = d
        self.field = field
        self.dims = {tuple(a): n for a, n in dims.items() if n > 0}
        self.labels = labels or {}
        self.action = {}
        for (i, a), m in (action or {}).items():
            a = tuple(a)
            target = bump(a, i)
            if a not in self.dims or target not in self.dims or is_zero(m):
                continue
            if m.shape != (self.dims[target], self.dims[a]):
                raise ValueError(f"y_{i + 1} at {a} has shape {m.shape}, "
                                 f"expected {(self.dims[target], self.dims[a])}")
            self.action[(i, a)] = m
        if check:
            self.check_relations()

    def dim(self, a):
        return self.dims.get(tuple(a), 0)

    def degrees(self):
        return sorted(self.dims, key=_degree_key)

    def total_dim(self):
        return sum(self.dims.values())

    def is_zero(self):
        return not self.dims

    def is_squarefree(self):
        return all(is_squarefree_degree(a) for a in self.dims)

    def sigma(self):
        """Top total degree carrying a nonzero component"""
        if self.is_zero():
            raise ZeroModule("sigma of the zero module")
        return max(total(a) for a in self.dims)

    def hilbert(self):
        return dict(sorted(self.dims.items(), key=lambda kv: _degree_key(kv[0])))

    def y(self, i, a):
        """Matrix of y_i: N_a -> N_{a + e_i}"""
        a = tuple(a)
        m = self.action.get((i, a))
        if m is not None:
            return m
        return self.field.zeros(self.dim(bump(a, i)), self.dim(a))

    def y_word(self, G, a):
        """Matrix of y_G: N_a -> N_{a + G}, largest index applied first"""
        a = tuple(a)
        result = self.field.identity(self.dim(a))
        current = a
        for j in sorted(G, reverse=True):
            result = matmul(self.y(j, current), result)
            current = bump(current, j)
        return result

    def check_relations(self):
        """y_i y_i = 0 and y_i y_j + y_j y_i = 0 on every component"""
        for a in self.dims:
            for i in range(self.d):
                if not is_zero(matmul(self.y(i, bump(a, i)), self.y(i, a))):
                    raise ERelationsViolated(f"y_{i + 1}^2 != 0 on degree {a}")
                for j in range(i + 1, self.d):
                    ij = matmul(self.y(i, bump(a, j)), self.y(j, a))
                    ji = matmul(self.y(j, bump(a, i)), self.y(i, a))
                    if not is_zero(ij + ji):
                        raise ERelationsViolated(f"y_{i + 1} y_{j + 1} + y_{j + 1} y_{i + 1} != 0 on degree {a}")
        return True

    def shifted(self, g):
        """N(-g): the component of degree a moves to a + g"""
        dims = {add(a, g): n for a, n in self.dims.items()}
        action = {(i, add(a, g)): m for (i, a), m in self.action.items()}
        return EModule(self.d, self.field, dims, action, check=False)

    def __repr__(self):
        return f"EModule(d={self.d}, dim={self.total_dim()}, degrees={len(self.dims)})"


@dataclass
class EMap:
    """Degree-preserving E-linear map; blocks[a] has shape (target.dim(a), source.dim(a))"""

    source: EModule
    target: EModule
    blocks: dict = field(default_factory=dict)

    def at(self, a):
        a = tuple(a)
        m = self.blocks.get(a)
        if m is not None:
            return m
        return self.source.field.zeros(self.target.dim(a), self.source.dim(a))

    def is_zero(self):
        return all(is_zero(m) for m in self.blocks.values())

    def check_linear(self):
        for a in self.source.dims:
            for i in range(self.source.d):
                left = matmul(self.target.y(i, a), self.at(a))
                right = matmul(self.at(bump(a, i)), self.source.y(i, a))
                if not is_zero(left - right):
                    raise KoszulLabError(f"map does not commute with y_{i + 1} at degree {a}")
        return True


def compose(g, f):
    """g o f"""
    blocks = {a: matmul(g.at(a), f.at(a)) for a in f.source.dims}
    return EMap(f.source, g.target, blocks)


def residue_field(d, field, degree=None):
    """K concentrated in one degree (default 0)"""
    degree = zero(d) if degree is None else tuple(degree)
    return EModule(d, field, {degree: 1})


def e_module_from_ideal(J, field, as_quotient=True):
    """E/J (default) or J itself for a squarefree monomial ideal J of E"""
    d = J.d
    keep = set(J.quotient_faces() if as_quotient else J.members())
    dims, action, labels = {}, {}, {}
    for F in keep:
        a = indicator(F, d)
        dims[a] = 1
        labels[a] = [F]
        for i in range(d):
            if i not in F and (F | {i}) in keep:
                action[(i, a)] = field.from_rows([[alpha_sign(i, F)]])
    logger.debug(f"E-module from {J.describe()}: {len(dims)} monomials, quotient={as_quotient}")
    return EModule(d, field, dims, action, labels)


def free_module(d, field, degrees):
    """Free E-module with generators e_k in the given degrees; basis (k, G) sits at g_k + G"""
    labels = defaultdict(list)
    for k, g in enumerate(degrees):
        for G in all_subsets(d):
            labels[add(tuple(g), indicator(G, d))].append((k, G))
    for a in labels:
        labels[a].sort(key=lambda kg: (kg[0], subset_key(kg[1])))
    position = {a: {lab: n for n, lab in enumerate(labs)} for a, labs in labels.items()}
    action = {}
    for a, labs in labels.items():
        for i in range(d):
            target = bump(a, i)
            entries = {}
            for n, (k, G) in enumerate(labs):
                if i not in G:
                    entries[(position[target][(k, G | {i})], n)] = alpha_sign(i, G)
            if entries:
                action[(i, a)] = field.matrix(entries, len(labels[target]), len(labs))
    dims = {a: len(labs) for a, labs in labels.items()}
    return EModule(d, field, dims, action, dict(labels), check=False)


def direct_sum(*modules):
    """Block direct sum; bases are concatenated in argument order"""
    first = modules[0]
    dims = defaultdict(int)
    for N in modules:
        for a, n in N.dims.items():
            dims[a] += n
    action = {}
    for a in dims:
        for i in range(first.d):
            target = bump(a, i)
            if target not in dims:
                continue
            entries = {}
            r0 = c0 = 0
            for N in modules:
                block = N.y(i, a).to_dod()
                for r, row in block.items():
                    for c, v in row.items():
                        entries[(r0 + r, c0 + c)] = v
                r0 += N.dim(target)
                c0 += N.dim(a)
            if entries:
                action[(i, a)] = first.field.matrix(entries, dims[target], dims[a])
    return EModule(first.d, first.field, dict(dims), action, check=False)


def dual_E(N):
    """D_E(N): component (N_{1 - b})^* at degree b, y_i acting by transposes"""
    one = ones(N.d)
    dims = {sub(one, a): n for a, n in N.dims.items()}
    action = {}
    for b in dims:
        for i in range(N.d):
            source_deg = sub(sub(one, b), indicator({i}, N.d))
            if N.dim(source_deg):
                action[(i, b)] = N.y(i, source_deg).transpose()
    return EModule(N.d, N.field, dims, action, check=False)


def map_from_free(degrees, N, vectors):
    """The E-linear map from the free module on `degrees` sending e_k to vectors[k]"""
    cover = free_module(N.d, N.field, degrees)
    blocks = {}
    for a, labs in cover.labels.items():
        if not N.dim(a):
            continue
        cols = [matmul(N.y_word(G, degrees[k]), vectors[k]) for k, G in labs]
        blocks[a] = hstack(N.field, N.dim(a), cols)
    return EMap(cover, N, blocks)


def submodule_from_bases(N, bases):
    """Submodule spanned degreewise by the given Basis objects, with its inclusion"""
    dims = {a: B.dim for a, B in bases.items() if B.dim}
    action = {}
    for a in dims:
        for i in range(N.d):
            target = bump(a, i)
            if target in dims:
                image = matmul(N.y(i, a), bases[a].matrix)
                action[(i, a)] = bases[target].coords(image)
    U = EModule(N.d, N.field, dims, action, check=False)
    inclusion = EMap(U, N, {a: bases[a].matrix for a in dims})
    return U, inclusion


def generated_submodule(N, generators):
    """E-span of the given vectors; generators maps a degree to a matrix of column vectors"""
    pending = defaultdict(list)
    for a, cols in generators.items():
        if cols.shape[1]:
            pending[tuple(a)].append(cols)
    if not pending:
        return EModule(N.d, N.field, {}), EMap(EModule(N.d, N.field, {}), N, {})
    top = max(total(a) for a in N.dims) if N.dims else 0
    bases = {}
    level = min(total(a) for a in pending)
    while level <= top:
        for a in sorted((a for a in pending if total(a) == level)):
            basis = image_basis(hstack(N.field, N.dim(a), pending.pop(a)))
            if not basis.dim:
                continue
            bases[a] = basis
            for i in range(N.d):
                if N.dim(bump(a, i)):
                    pending[bump(a, i)].append(matmul(N.y(i, a), basis.matrix))
        level += 1
    return submodule_from_bases(N, bases)


def degree_part_submodule(N, i):
    """N_<i>: the submodule generated by all components of total degree i"""
    gens = {a: N.field.identity(n) for a, n in N.dims.items() if total(a) == i}
    return generated_submodule(N, gens)


def kernel(phi):
    """Degreewise kernel of an E-linear map, with its inclusion into the source"""
    bases = {a: kernel_matrix(phi.at(a)) for a in phi.source.dims}
    return submodule_from_bases(phi.source, bases)


def quotient(N, generators):
    """N / (E-span of generators), with the projection N -> quotient"""
    U, inclusion = generated_submodule(N, generators)
    pieces = {}
    for a, n in N.dims.items():
        span = inclusion.at(a) if U.dim(a) else N.field.zeros(n, 0)
        pieces[a] = Subquotient(span, N.field.zeros(0, n))
    dims = {a: sq.dim for a, sq in pieces.items() if sq.dim}
    action = {}
    for a in dims:
        for i in range(N.d):
            target = bump(a, i)
            if target in dims:
                action[(i, a)] = induced_map(pieces[a], pieces[target], N.y(i, a))
    Q = EModule(N.d, N.field, dims, action, check=False)
    projection = EMap(N, Q, {a: pieces[a].project(N.field.identity(N.dims[a])) for a in dims})
    return Q, projection


def minimal_generators(N):
    """(degree, column vector) pairs spanning complements of m N, in degree order"""
    out = []
    for a in N.degrees():
        n = N.dims[a]
        images = [N.y(k, bump(a, k, -1)) for k in range(N.d) if N.dim(bump(a, k, -1))]
        sq = Subquotient(hstack(N.field, n, images), N.field.zeros(0, n))
        for j in range(sq.dim):
            out.append((a, sq.reps.extract(list(range(n)), [j])))
    return out


def generator_degrees(N):
    return [a for a, _ in minimal_generators(N)]


@dataclass
class Syzygy:
    degrees: list
    vectors: list
    cover_map: EMap
    kernel: EModule
    inclusion: EMap

    @property
    def cover(self):
        return self.cover_map.source


def syzygy(N):
    """Minimal cover of N and its kernel Omega_1(N)"""
    if N.is_zero():
        raise ZeroModule("syzygy of the zero module")
    gens = minimal_generators(N)
    degrees = [a for a, _ in gens]
    phi = map_from_free(degrees, N, [v for _, v in gens])
    K, inclusion = kernel(phi)
    logger.debug(f"syzygy: {len(degrees)} generators, kernel dim {K.total_dim()}")
    return Syzygy(degrees, [v for _, v in gens], phi, K, inclusion)


def strip_free_summands(N):
    """Split off the free summands of N (vectors with y_[d] v != 0); returns (rest, rank)"""
    everything = frozenset(range(N.d))
    gens = {}
    for a in N.degrees():
        top = N.y_word(everything, a)
        if is_zero(top):
            continue
        # standard vectors at the pivot columns of top span a complement of its kernel
        pivots = list(image_basis(top.transpose()).index)
        n = N.dims[a]
        gens[a] = N.field.identity(n).extract(list(range(n)), pivots)
    if not gens:
        return N, 0
    rank = sum(m.shape[1] for m in gens.values())
    rest, _ = quotient(N, gens)
    return rest, rank


@dataclass
class EStep:
    """One step of a minimal resolution: generator degrees and the E-matrix to the previous step"""

    degrees: list
    differential: dict = field(default_factory=dict)   # (row, col) -> {G: coefficient}


@dataclass
class EResolutionPrefix:
    steps: list
    betti: BettiTable
    syzygies: list

    def is_minimal(self):
        """No differential entry carries a unit (G = empty) coefficient"""
        return all(frozenset() not in entry for step in self.steps
                   for entry in step.differential.values())

    def is_linear(self, l):
        return self.betti.is_linear(l)


def resolution_prefix(N, k):
    """Minimal free resolution of N over E through homological step k"""
    if N.is_zero():
        raise ZeroModule("resolution of the zero module")
    betti = BettiTable(N.d)
    steps, syzygies = [], [N]
    current, previous = N, None
    for t in range(k + 1):
        if current.is_zero():
            break
        syz = syzygy(current)
        for g in syz.degrees:
            betti.add(-t, g)
        step = EStep(syz.degrees)
        if previous is not None:
            # write each new generator in the basis (l, G) of the previous cover
            labels = previous.cover.labels
            for col, (g, vec) in enumerate(zip(syz.degrees, syz.vectors)):
                image = matmul(previous.inclusion.at(g), vec).to_dod()
                for r, row in image.items():
                    l, G = labels[g][r]
                    step.differential.setdefault((l, col), {})[G] = row[0]
        steps.append(step)
        previous = syz
        current = syz.kernel
        syzygies.append(current)
    return EResolutionPrefix(steps, betti, syzygies)


def betti_E_closed_form(N, steps, totals=None):
    """beta^{-t,a}_E(N) read off H(F(D_E N)) instead of a resolution

    beta^{-t,a}(N) = dim H^{d + t - |a|}(F(D_E N))_{a - 1}

    Args:
        N: a nonzero EModule
        steps: the last homological step t (counting from 0), or a pair (first, last)
        totals: optional pair (j_min, j_max) bounding the internal total degree |a|
    """
    from scripts.bgg import functor_F

    if N.is_zero():
        raise ZeroModule("Betti numbers of the zero module")
    first, last = (0, steps) if isinstance(steps, int) else steps
    if first < 0 or last < first:
        raise ValueError(f"need 0 <= first <= last, got steps={steps!r}")
    d = N.d
    dual = dual_E(N)
    T = functor_F(EComplex.from_module(dual))
    degs = list(dual.dims)
    lo = tuple(min(-b[k] for b in degs) + 1 for k in range(d))
    spots = [total(b) for b in degs]
    betti = BettiTable(d)
    for t in range(first, last + 1):
        j_min, j_max = d + t - max(spots), d + t - min(spots)
        if totals is not None:
            j_min, j_max = max(j_min, totals[0]), min(j_max, totals[1])
        if j_min > j_max:
            continue
        for a in degrees_with_total(lo, j_min, j_max):
            mult = T.cohomology_dim(d + t - total(a), sub(a, ones(d)))
            betti.add(-t, a, mult)
    return betti


class EComplex:
    """Bounded complex of EModules; maps[p] goes from terms[p] to terms[p + 1]"""

    def __init__(self, d, field, terms, maps=None, check=True):
        self.d = d
        self.field = field
        self.terms = {p: N for p, N in terms.items() if not N.is_zero()}
        self.maps = {}
        for p, f in (maps or {}).items():
            if p in self.terms and p + 1 in self.terms and not f.is_zero():
                self.maps[p] = f
        if check:
            self.check_differential()

    @classmethod
    def from_module(cls, N, spot=0):
        return cls(N.d, N.field, {spot: N}, check=False)

    def term(self, p):
        return self.terms.get(p) or EModule(self.d, self.field, {})

    def spots(self):
        return sorted(self.terms)

    def differential(self, p, a):
        """Matrix of d^p at degree a"""
        f = self.maps.get(p)
        if f is not None:
            return f.at(a)
        return self.field.zeros(self.term(p + 1).dim(a), self.term(p).dim(a))

    def check_differential(self):
        for p in self.maps:
            if p + 1 not in self.maps:
                continue
            for a in self.terms[p].dims:
                if not is_zero(matmul(self.differential(p + 1, a), self.differential(p, a))):
                    raise DifferentialCheckFailed(f"d^{p + 1} d^{p} != 0 at degree {a}")
        return True

    def shifted(self, p):
        """N[p]: term q of the result is term q + p; signs of maps are kept"""
        terms = {q - p: N for q, N in self.terms.items()}
        maps = {q - p: f for q, f in self.maps.items()}
        return EComplex(self.d, self.field, terms, maps, check=False)

    def cohomology(self, p):
        """H^p as an EModule"""
        N = self.term(p)
        pieces = {}
        for a, n in N.dims.items():
            pieces[a] = Subquotient(self.differential(p - 1, a), self.differential(p, a))
        dims = {a: sq.dim for a, sq in pieces.items() if sq.dim}
        action = {}
        for a in dims:
            for i in range(self.d):
                target = bump(a, i)
                if target in dims:
                    action[(i, a)] = induced_map(pieces[a], pieces[target], N.y(i, a))
        return EModule(self.d, self.field, dims, action, check=False)

    def cohomology_modules(self):
        out = {}
        for p in self.spots():
            H = self.cohomology(p)
            if not H.is_zero():
                out[p] = H
        return out

    def __repr__(self):
        return f"EComplex(d={self.d}, spots={self.spots()})"
