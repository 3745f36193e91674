#!/usr/bin/env python3
"""
Squarefree S-modules and their homological calculus

S = K[x1..xd]. A squarefree module is stored by its 2^d components M_F and
the transitions x_i: M_F -> M_{F+i}; at any a in N^d it is evaluated as
M_a = M_{supp(a)}, with x_i the identity when a_i > 0.

WindowSModule is the lazily evaluated counterpart used for truncations,
finite-length quotients and cohomology modules of free complexes. Both
kinds expose the same two methods, dim_at(a) and x(i, a), so the Koszul
Tor oracle runs on either.

FreeComplexS is a bounded complex of free S-modules. Entry (r, c) of the
coefficient matrix differentials[p] multiplies the forced monomial
x^(deg c - deg r) going from generator c at spot p to generator r at p + 1.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field

from scripts.exactla import (CompositionNotZero, DifferentialCheckFailed, KoszulLabError,
                             NotSquarefree, ResolutionTooLong, Subquotient, WindowTooSmall,
                             ZeroModule, hstack, image_basis, induced_map, is_zero, kernel_matrix,
                             matmul, rank, sparse)
from scripts.grading import (NEG_INF, POS_INF, BettiTable, all_subsets, alpha, alpha_sign, box,
                             bump, indicator, is_squarefree_degree, leq, neg, ones, sub, support,
                             total, zero)

logger = logging.getLogger(__name__)


def _signed(m, s):
    return m if s == 1 else -m


class SqSModule:
    """Squarefree S-module: components on F in [d] plus x_i transitions"""

    def __init__(self, d, field, dims, maps=None, labels=None, check=True):
        self.d = d
        self.field = field
        self.dims = {frozenset(F): n for F, n in dims.items() if n > 0}
        self.labels = labels or {}
        self.maps = {}
        for (i, F), m in (maps or {}).items():
            F = frozenset(F)
            if i in F or F not in self.dims or (F | {i}) not in self.dims or is_zero(m):
                continue
            if m.shape != (self.dims[F | {i}], self.dims[F]):
                raise ValueError(f"x_{i + 1} at {sorted(F)} has shape {m.shape}")
            self.maps[(i, F)] = m
        if check:
            self.check_commuting()

    def dim(self, F):
        return self.dims.get(frozenset(F), 0)

    def dim_at(self, a):
        if any(x < 0 for x in a):
            return 0
        return self.dims.get(support(a), 0)

    def xF(self, i, F):
        """x_i: M_F -> M_{F + i} for i not in F"""
        F = frozenset(F)
        m = self.maps.get((i, F))
        if m is not None:
            return m
        return self.field.zeros(self.dim(F | {i}), self.dim(F))

    def x(self, i, a):
        """x_i: M_a -> M_{a + e_i} at an arbitrary degree"""
        target = bump(tuple(a), i)
        if any(v < 0 for v in a):
            return self.field.zeros(self.dim_at(target), 0)
        if a[i] > 0:
            return self.field.identity(self.dim_at(a))
        return self.xF(i, support(a))

    def x_word(self, G, F):
        """x^G: M_F -> M_{F + G}"""
        result = self.field.identity(self.dim(F))
        current = frozenset(F)
        for i in sorted(G):
            if i in current:
                continue
            result = matmul(self.xF(i, current), result)
            current = current | {i}
        return result

    def faces(self):
        return sorted(self.dims, key=lambda F: (len(F), sorted(F)))

    def is_zero(self):
        return not self.dims

    def total_dim(self):
        return sum(self.dims.values())

    def indeg(self):
        """Lowest total degree of a nonzero component"""
        return min((len(F) for F in self.dims), default=POS_INF)

    def krull_dim(self):
        """max |F| with M_F != 0 (the dimension of a squarefree module)"""
        return max((len(F) for F in self.dims), default=-1)

    def check_commuting(self):
        for F in self.dims:
            for i in range(self.d):
                for j in range(i + 1, self.d):
                    if i in F or j in F:
                        continue
                    left = matmul(self.xF(j, F | {i}), self.xF(i, F))
                    right = matmul(self.xF(i, F | {j}), self.xF(j, F))
                    if not is_zero(left - right):
                        raise KoszulLabError(f"x_{i + 1} and x_{j + 1} do not commute at {sorted(F)}")
        return True

    def same_data(self, other):
        """Identical components and transition matrices"""
        if self.dims != other.dims:
            return False
        keys = set(self.maps) | set(other.maps)
        return all(is_zero(self.xF(i, F) - other.xF(i, F)) for i, F in keys)

    def __repr__(self):
        return f"SqSModule(d={self.d}, dim={self.total_dim()}, faces={len(self.dims)})"


class WindowSModule:
    """S-module evaluated on demand inside a box window (unbounded sides are None)"""

    def __init__(self, d, field, dim_fn, x_fn, lo=None, hi=None, name="window"):
        self.d = d
        self.field = field
        self._dim_fn = dim_fn
        self._x_fn = x_fn
        self.lo = lo
        self.hi = hi
        self.name = name
        self._dims = {}

    def covers(self, a):
        return (self.lo is None or leq(self.lo, a)) and (self.hi is None or leq(a, self.hi))

    def missing(self, lo, hi):
        """Corners of the box [lo, hi] that fall outside the window"""
        return [c for c in (tuple(lo), tuple(hi)) if not self.covers(c)]

    def dim_at(self, a):
        a = tuple(a)
        if not self.covers(a):
            raise WindowTooSmall([a])
        if a not in self._dims:
            self._dims[a] = self._dim_fn(a)
        return self._dims[a]

    def x(self, i, a):
        a = tuple(a)
        for c in (a, bump(a, i)):
            if not self.covers(c):
                raise WindowTooSmall([c])
        return self._x_fn(i, a)

    def __repr__(self):
        return f"WindowSModule({self.name}, lo={self.lo}, hi={self.hi})"


@dataclass
class SqMap:
    """Degree-preserving map of squarefree modules, blocks[F]: M_F -> N_F"""

    source: SqSModule
    target: SqSModule
    blocks: dict = field(default_factory=dict)

    def at(self, F):
        F = frozenset(F)
        m = self.blocks.get(F)
        if m is not None:
            return m
        return self.source.field.zeros(self.target.dim(F), self.source.dim(F))

    def at_degree(self, a):
        if any(v < 0 for v in a):
            return self.source.field.zeros(0, 0)
        return self.at(support(a))

    def check_linear(self):
        for F in self.source.dims:
            for i in range(self.source.d):
                if i in F:
                    continue
                left = matmul(self.target.xF(i, F), self.at(F))
                right = matmul(self.at(F | {i}), self.source.xF(i, F))
                if not is_zero(left - right):
                    raise KoszulLabError(f"map does not commute with x_{i + 1} at {sorted(F)}")
        return True


@dataclass
class WindowMap:
    """Map between window modules given degreewise by a function"""

    fn: object

    def at_degree(self, a):
        return self.fn(tuple(a))


def sq_module_from_ideal(I, field, as_quotient=True):
    """S/I (default) or I itself, with every transition equal to 1 on monomials"""
    d = I.d
    keep = set(I.quotient_faces() if as_quotient else I.members())
    dims = {F: 1 for F in keep}
    maps = {}
    for F in keep:
        for i in range(d):
            if i not in F and (F | {i}) in keep:
                maps[(i, F)] = field.identity(1)
    return SqSModule(d, field, dims, maps, labels={F: [F] for F in keep}, check=False)


def sq_free_module(d, field, degrees):
    """Free module with generators S(-g_k); its F-component has basis {k : g_k in F}"""
    degrees = [frozenset(g) for g in degrees]
    labels = {}
    for F in all_subsets(d):
        labs = [k for k, g in enumerate(degrees) if g <= F]
        if labs:
            labels[F] = labs
    maps = {}
    for F, labs in labels.items():
        for i in range(d):
            if i in F:
                continue
            target = labels[F | {i}]
            pos = {k: n for n, k in enumerate(target)}
            maps[(i, F)] = field.matrix({(pos[k], n): 1 for n, k in enumerate(labs)}, len(target), len(labs))
    dims = {F: len(labs) for F, labs in labels.items()}
    return SqSModule(d, field, dims, maps, labels, check=False)


def residue_field_S(d, field):
    """K = S/m"""
    return SqSModule(d, field, {frozenset(): 1}, check=False)


def free_rank_one(d, field, F=frozenset()):
    """S(-F)"""
    return sq_free_module(d, field, [F])


def sq_map_from_free(degrees, M, vectors):
    """Map from the free module on `degrees` sending generator k to vectors[k] in M_{g_k}"""
    cover = sq_free_module(M.d, M.field, degrees)
    degrees = [frozenset(g) for g in degrees]
    blocks = {}
    for F, labs in cover.labels.items():
        if not M.dim(F):
            continue
        cols = [matmul(M.x_word(F - degrees[k], degrees[k]), vectors[k]) for k in labs]
        blocks[F] = hstack(M.field, M.dim(F), cols)
    return SqMap(cover, M, blocks)


def _sq_submodule_from_bases(M, bases):
    dims = {F: B.dim for F, B in bases.items() if B.dim}
    maps = {}
    for F in dims:
        for i in range(M.d):
            if i not in F and (F | {i}) in dims:
                maps[(i, F)] = bases[F | {i}].coords(matmul(M.xF(i, F), bases[F].matrix))
    U = SqSModule(M.d, M.field, dims, maps, check=False)
    return U, SqMap(U, M, {F: bases[F].matrix for F in dims})


def sq_kernel(phi):
    bases = {F: kernel_matrix(phi.at(F)) for F in phi.source.dims}
    return _sq_submodule_from_bases(phi.source, bases)


def sq_generated_submodule(M, generators):
    """Submodule generated by column vectors; generators maps F to a matrix"""
    pending = defaultdict(list)
    for F, cols in generators.items():
        if cols.shape[1]:
            pending[frozenset(F)].append(cols)
    bases = {}
    for F in all_subsets(M.d):
        if F not in pending or not M.dim(F):
            continue
        basis = image_basis(hstack(M.field, M.dim(F), pending.pop(F)))
        if not basis.dim:
            continue
        bases[F] = basis
        for i in range(M.d):
            if i not in F and M.dim(F | {i}):
                pending[F | {i}].append(matmul(M.xF(i, F), basis.matrix))
    return _sq_submodule_from_bases(M, bases)


def sq_cokernel(phi):
    """Cokernel of a squarefree map, with the projection from the target"""
    N = phi.target
    pieces = {F: Subquotient(phi.at(F), N.field.zeros(0, n)) for F, n in N.dims.items()}
    dims = {F: sq.dim for F, sq in pieces.items() if sq.dim}
    maps = {}
    for F in dims:
        for i in range(N.d):
            if i not in F and (F | {i}) in dims:
                maps[(i, F)] = induced_map(pieces[F], pieces[F | {i}], N.xF(i, F))
    Q = SqSModule(N.d, N.field, dims, maps, check=False)
    return Q, SqMap(N, Q, {F: pieces[F].project(N.field.identity(N.dims[F])) for F in dims})


def sq_minimal_generators(M):
    """(F, vector) pairs spanning complements of sum_i x_i M_{F - i}"""
    out = []
    for F in M.faces():
        n = M.dims[F]
        images = [M.xF(i, F - {i}) for i in sorted(F) if M.dim(F - {i})]
        sq = Subquotient(hstack(M.field, n, images), M.field.zeros(0, n))
        for j in range(sq.dim):
            out.append((F, sq.reps.extract(list(range(n)), [j])))
    return out


def face_counts(M):
    """Total dimension of M in each squarefree total degree"""
    counts = defaultdict(int)
    for F, n in M.dims.items():
        counts[len(F)] += n
    return dict(sorted(counts.items()))


# -- the S/E equivalence and Alexander duality ---------------------------------------

def functor_S(N):
    """Squarefree E-module -> squarefree S-module, x_i = (-1)^alpha(i,F) y_i"""
    bad = [a for a in N.dims if not is_squarefree_degree(a)]
    if bad:
        raise NotSquarefree(f"E-module has components off the cube, e.g. {bad[0]}")
    dims = {support(a): n for a, n in N.dims.items()}
    maps = {}
    for (i, a), m in N.action.items():
        F = support(a)
        maps[(i, F)] = _signed(m, alpha_sign(i, F))
    return SqSModule(N.d, N.field, dims, maps, check=False)


def functor_E(M):
    """Squarefree S-module -> squarefree E-module, y_i = (-1)^alpha(i,F) x_i"""
    from scripts.emod import EModule

    dims = {indicator(F, M.d): n for F, n in M.dims.items()}
    action = {}
    for (i, F), m in M.maps.items():
        action[(i, indicator(F, M.d))] = _signed(m, alpha_sign(i, F))
    return EModule(M.d, M.field, dims, action, check=False)


def alexander_dual(M):
    """S o D_E o E"""
    from scripts.emod import dual_E

    return functor_S(dual_E(functor_E(M)))


# -- free complexes ------------------------------------------------------------------

class FreeComplexS:
    """Bounded complex of Z^d-graded free S-modules"""

    def __init__(self, d, field, terms, differentials=None, check=True):
        self.d = d
        self.field = field
        self.terms = {p: [tuple(g) for g in gens] for p, gens in terms.items() if gens}
        self._images = {}
        self.differentials = {}
        for p, m in (differentials or {}).items():
            if p in self.terms and p + 1 in self.terms and not is_zero(m):
                self.differentials[p] = sparse(m)
        if check:
            self.check()

    def spots(self):
        return sorted(self.terms)

    def generators(self, p):
        return self.terms.get(p, [])

    def matrix(self, p):
        m = self.differentials.get(p)
        if m is not None:
            return m
        return self.field.zeros(len(self.generators(p + 1)), len(self.generators(p)))

    def check(self):
        """Entries respect the forced monomial degrees and d o d = 0"""
        for p, m in self.differentials.items():
            src, tgt = self.terms[p], self.terms[p + 1]
            for r, row in m.to_dod().items():
                for c in row:
                    if not leq(tgt[r], src[c]):
                        raise DifferentialCheckFailed(
                            f"entry ({r}, {c}) of d^{p} would need a negative exponent "
                            f"x^{sub(src[c], tgt[r])}")
            if p + 1 in self.differentials and not is_zero(matmul(self.differentials[p + 1], m)):
                raise DifferentialCheckFailed(f"d^{p + 1} d^{p} != 0")
        return True

    def is_minimal(self):
        return not self.unit_entries()

    def unit_entries(self):
        """Nonzero entries between generators of equal degree, ordered by spot, row, column"""
        out = []
        for p in sorted(self.differentials):
            src, tgt = self.terms[p], self.terms[p + 1]
            dod = self.differentials[p].to_dod()
            for r in sorted(dod):
                for c in sorted(dod[r]):
                    if src[c] == tgt[r]:
                        out.append((p, r, c))
        return out

    def betti(self):
        """Generator count per (spot, degree); the Betti table when the complex is minimal"""
        table = BettiTable(self.d)
        for p, gens in self.terms.items():
            for g in gens:
                table.add(p, g)
        return table

    def length(self):
        spots = self.spots()
        return spots[-1] - spots[0] if spots else -1

    def shifted(self, p):
        """T[p]: spot q of the result is spot q + p of T"""
        terms = {q - p: gens for q, gens in self.terms.items()}
        diffs = {q - p: m for q, m in self.differentials.items()}
        return FreeComplexS(self.d, self.field, terms, diffs, check=False)

    def dual(self, twist):
        """Hom(T, S(-twist)): generator g at spot p becomes twist - g at spot -p"""
        terms = {-p: [sub(twist, g) for g in gens] for p, gens in self.terms.items()}
        diffs = {-p - 1: m.transpose() for p, m in self.differentials.items()}
        return FreeComplexS(self.d, self.field, terms, diffs, check=False)

    def generator_box(self):
        gens = [g for gens in self.terms.values() for g in gens]
        if not gens:
            return zero(self.d), zero(self.d)
        lo = tuple(min(g[k] for g in gens) for k in range(self.d))
        hi = tuple(max(g[k] for g in gens) for k in range(self.d))
        return lo, hi

    # evaluation at a single multidegree

    def indices_at(self, p, c):
        return [k for k, g in enumerate(self.generators(p)) if leq(g, c)]

    def rank_at(self, p, c):
        return len(self.indices_at(p, c))

    def matrix_at(self, p, c):
        """d^p restricted to the degree-c components (generators <= c)"""
        rows, cols = self.indices_at(p + 1, c), self.indices_at(p, c)
        if not rows or not cols or p not in self.differentials:
            return self.field.zeros(len(rows), len(cols))
        return sparse(self.differentials[p].extract(rows, cols))

    def subquotient_at(self, p, c):
        return Subquotient(self.matrix_at(p - 1, c), self.matrix_at(p, c))

    def cohomology_dim(self, p, c):
        n = self.rank_at(p, c)
        if not n:
            return 0
        d_in, d_out = self.matrix_at(p - 1, c), self.matrix_at(p, c)
        if not is_zero(matmul(d_out, d_in)):
            raise CompositionNotZero(f"d^{p} d^{p - 1} != 0 at degree {c}")
        return n - rank(d_out) - rank(d_in)

    def euler_at(self, c):
        return sum((-1) ** (p % 2) * self.rank_at(p, c) for p in self.terms)

    def inclusion_at(self, p, c, i):
        """Map of degree-c components to degree c + e_i (multiplication by x_i)"""
        src = self.indices_at(p, c)
        tgt = self.indices_at(p, bump(c, i))
        pos = {k: n for n, k in enumerate(tgt)}
        return self.field.matrix({(pos[k], n): 1 for n, k in enumerate(src)}, len(tgt), len(src))

    def cohomology_sq(self, p, shift=None):
        """H^p evaluated at the degrees F + shift, packaged as a squarefree module"""
        shift = zero(self.d) if shift is None else tuple(shift)
        pieces = {}
        for F in all_subsets(self.d):
            c = tuple(x + y for x, y in zip(indicator(F, self.d), shift))
            if self.rank_at(p, c):
                pieces[F] = (c, self.subquotient_at(p, c))
        dims = {F: sq.dim for F, (_, sq) in pieces.items() if sq.dim}
        maps = {}
        for F in dims:
            c, sq = pieces[F]
            for i in range(self.d):
                if i not in F and (F | {i}) in dims:
                    maps[(i, F)] = induced_map(sq, pieces[F | {i}][1], self.inclusion_at(p, c, i))
        return SqSModule(self.d, self.field, dims, maps, check=False)

    def cohomology_window(self, p, lo=None, hi=None):
        """H^p as a lazily evaluated window module"""
        memo = {}

        def piece(c):
            if c not in memo:
                memo[c] = self.subquotient_at(p, c) if self.rank_at(p, c) else None
            return memo[c]

        def dim_fn(c):
            sq = piece(c)
            return sq.dim if sq else 0

        def x_fn(i, c):
            src, tgt = piece(c), piece(bump(c, i))
            if not src or not tgt or not src.dim or not tgt.dim:
                return self.field.zeros(dim_fn(bump(c, i)), dim_fn(c))
            return induced_map(src, tgt, self.inclusion_at(p, c, i))

        return WindowSModule(self.d, self.field, dim_fn, x_fn, lo, hi, name=f"H^{p}")

    # the same complex as window modules, for G and the Koszul oracle

    def term_window(self, p):
        return WindowSModule(self.d, self.field, lambda c: self.rank_at(p, c),
                             lambda i, c: self.inclusion_at(p, c, i), name=f"T^{p}")

    def as_s_complex(self):
        terms = {p: self.term_window(p) for p in self.terms}
        maps = {p: WindowMap(lambda c, p=p: self.matrix_at(p, c)) for p in self.differentials}
        return SComplex(self.d, self.field, terms, maps)

    def image_at(self, p, c):
        """Basis of im d^p inside the degree-c component of spot p + 1"""
        key = (p, tuple(c))
        if key not in self._images:
            self._images[key] = image_basis(self.matrix_at(p, c))
        return self._images[key]

    def image_projection(self, p, c):
        """T^p_c -> (im d^p)_c in the basis of image_at"""
        return self.image_at(p, c).coords(self.matrix_at(p, c))

    def truncation_above(self, n):
        """0 -> im d^n -> T^{n+1} -> ... with im d^n sitting at spot n"""

        def image_x(i, c):
            src, tgt = self.image_at(n, c), self.image_at(n, bump(c, i))
            if not src.dim or not tgt.dim:
                return self.field.zeros(tgt.dim, src.dim)
            return tgt.coords(matmul(self.inclusion_at(n + 1, c, i), src.matrix))

        image = WindowSModule(self.d, self.field, lambda c: self.image_at(n, c).dim, image_x,
                              name=f"im d^{n}")
        terms = {p: self.term_window(p) for p in self.terms if p > n}
        terms[n] = image
        maps = {p: WindowMap(lambda c, p=p: self.matrix_at(p, c))
                for p in self.differentials if p > n}
        maps[n] = WindowMap(lambda c: self.image_at(n, c).matrix)
        return SComplex(self.d, self.field, terms, maps)

    def __repr__(self):
        sizes = {p: len(g) for p, g in sorted(self.terms.items())}
        return f"FreeComplexS(d={self.d}, ranks={sizes})"


# -- minimal free resolutions --------------------------------------------------------

@dataclass
class SqResolution:
    complex: FreeComplexS
    betti: BettiTable
    kernels: list          # kernels[t] is Omega_t(M); kernels[0] = M

    @property
    def projective_dimension(self):
        spots = self.complex.spots()
        return -spots[0] if spots else -1

    def reg(self):
        return self.betti.reg()


def min_free_resolution(M):
    """Minimal free resolution of a squarefree module; spot -t holds the t-th free module"""
    d, field = M.d, M.field
    terms, diffs = {}, {}
    kernels = [M]
    current, previous = M, None
    t = 0
    while not current.is_zero():
        if t > d:
            raise ResolutionTooLong(f"resolution reached step {t} > d = {d}")
        gens = sq_minimal_generators(current)
        degrees = [F for F, _ in gens]
        vectors = [v for _, v in gens]
        phi = sq_map_from_free(degrees, current, vectors)
        terms[-t] = [indicator(F, d) for F in degrees]
        if previous is not None:
            cover, inclusion = previous
            entries = {}
            for col, (F, vec) in enumerate(gens):
                image = matmul(inclusion.at(F), vec).to_dod()
                for r, row in image.items():
                    entries[(cover.labels[F][r], col)] = row[0]
            diffs[-t] = field.matrix(entries, len(terms[-t + 1]), len(degrees))
        K, inclusion = sq_kernel(phi)
        previous = (phi.source, inclusion)
        kernels.append(K)
        current = K
        t += 1
    T = FreeComplexS(d, field, terms, diffs, check=False)
    logger.debug(f"resolution: {T}")
    return SqResolution(T, T.betti(), kernels)


def syzygy_module(M, i):
    """Omega_i(M) over S (Omega_0 = M)"""
    res = min_free_resolution(M)
    if i < len(res.kernels):
        return res.kernels[i]
    return SqSModule(M.d, M.field, {})


# -- complexes of S-modules and the Koszul Tor oracle --------------------------------

class SComplex:
    """Bounded complex of S-modules; maps[q] has at_degree(a) giving d^q at degree a"""

    def __init__(self, d, field, terms, maps=None):
        self.d = d
        self.field = field
        self.terms = dict(terms)
        self.maps = dict(maps or {})

    @classmethod
    def from_module(cls, M, spot=0):
        return cls(M.d, M.field, {spot: M})

    def spots(self):
        return sorted(self.terms)

    def dim_at(self, q, a):
        M = self.terms.get(q)
        return M.dim_at(a) if M is not None else 0

    def differential(self, q, a):
        f = self.maps.get(q)
        rows, cols = self.dim_at(q + 1, a), self.dim_at(q, a)
        if f is None or not rows or not cols:
            return self.field.zeros(rows, cols)
        return f.at_degree(a)

    def x(self, q, i, a):
        return self.terms[q].x(i, a)

    def is_squarefree(self):
        return all(isinstance(M, SqSModule) for M in self.terms.values())

    def shifted(self, p):
        """M[p]: term q of the result is term q + p (differentials keep their sign)"""
        return SComplex(self.d, self.field,
                        {q - p: M for q, M in self.terms.items()},
                        {q - p: f for q, f in self.maps.items()})

    def check_differential(self, degrees):
        for a in degrees:
            for q in self.maps:
                if q + 1 in self.maps:
                    if not is_zero(matmul(self.differential(q + 1, a), self.differential(q, a))):
                        raise DifferentialCheckFailed(f"d^{q + 1} d^{q} != 0 at degree {a}")
        return True

    def cohomology(self, q):
        """H^q of a complex of squarefree modules as a squarefree module"""
        M = self.terms.get(q)
        if M is None:
            return SqSModule(self.d, self.field, {})
        pieces = {}
        for F, n in M.dims.items():
            a = indicator(F, self.d)
            pieces[F] = Subquotient(self.differential(q - 1, a), self.differential(q, a))
        dims = {F: sq.dim for F, sq in pieces.items() if sq.dim}
        maps = {}
        for F in dims:
            for i in range(self.d):
                if i not in F and (F | {i}) in dims:
                    maps[(i, F)] = induced_map(pieces[F], pieces[F | {i}], M.xF(i, F))
        return SqSModule(self.d, self.field, dims, maps, check=False)


def as_complex(obj):
    return obj if isinstance(obj, SComplex) else SComplex.from_module(obj)


def default_betti_box(obj):
    """The cube [0, 1] for squarefree data; window modules must say where to look"""
    cpx = as_complex(obj)
    if not cpx.is_squarefree():
        raise KoszulLabError("window modules need an explicit Betti box")
    return zero(cpx.d), ones(cpx.d)


def _check_window(cpx, lo, hi):
    need_lo = tuple(v - 1 for v in lo)
    missing = []
    for M in cpx.terms.values():
        if isinstance(M, WindowSModule):
            missing.extend(M.missing(need_lo, hi))
    if missing:
        raise WindowTooSmall(missing)


def koszul_blocks(cpx, a, shift=0):
    """Blocks and differentials of (Koszul complex of S) tensor cpx at degree a

    Block (G, q) sits at index q - |G| + shift and holds M^q_{a - G}; returns
    (sizes, differentials, layout). G(M) at internal degree -a is this complex
    with shift |a|, so the Koszul and the G routes share it.
    """
    d = cpx.d
    layout = defaultdict(list)
    for q in cpx.spots():
        for G in all_subsets(d):
            n = cpx.dim_at(q, sub(a, indicator(G, d)))
            if n:
                layout[q - len(G) + shift].append((G, q, n))
    offsets = {}
    for idx, blocks in layout.items():
        pos = 0
        for G, q, n in blocks:
            offsets[(G, q)] = pos
            pos += n
    sizes = {idx: sum(n for _, _, n in blocks) for idx, blocks in layout.items()}
    diffs = {}
    for idx, blocks in layout.items():
        if idx + 1 not in layout:
            continue
        entries = {}
        for G, q, n in blocks:
            src_deg = sub(a, indicator(G, d))
            col0 = offsets[(G, q)]
            targets = []
            for k in sorted(G):
                H = G - {k}
                if (H, q) in offsets:
                    sign = -1 if alpha(k, G) % 2 else 1
                    targets.append(((H, q), sign, cpx.x(q, k, src_deg)))
            if (G, q + 1) in offsets:
                sign = -1 if len(G) % 2 else 1
                targets.append(((G, q + 1), sign, cpx.differential(q, src_deg)))
            for key, sign, m in targets:
                row0 = offsets[key]
                for r, row in m.to_dod().items():
                    for c, v in row.items():
                        entries[(row0 + r, col0 + c)] = entries.get((row0 + r, col0 + c), 0) + sign * v
        diffs[idx] = cpx.field.matrix(entries, sizes[idx + 1], sizes[idx])
    return sizes, diffs, dict(layout)


def koszul_total_complex(cpx, a):
    """(sizes, differentials) of the Koszul total complex at degree a, block (G, q) at q - |G|"""
    sizes, diffs, _ = koszul_blocks(cpx, a)
    return sizes, diffs


def _total_cohomology(field, sizes, diffs):
    out = {}
    for idx, n in sizes.items():
        d_out = diffs.get(idx, field.zeros(sizes.get(idx + 1, 0), n))
        d_in = diffs.get(idx - 1, field.zeros(n, sizes.get(idx - 1, 0)))
        if not is_zero(matmul(d_out, d_in)):
            raise CompositionNotZero(f"total complex differential squares to nonzero at index {idx}")
        h = n - rank(d_out) - rank(d_in)
        if h:
            out[idx] = h
    return out


def betti_via_koszul(obj, lo=None, hi=None):
    """beta^{i,a} = dim H^i(K(x) tensor M)_a for a in the box [lo, hi]

    obj is a module (squarefree or window) or an SComplex. The modules must be
    known on [lo - 1, hi].
    """
    cpx = as_complex(obj)
    if lo is None or hi is None:
        lo, hi = default_betti_box(cpx)
    _check_window(cpx, lo, hi)
    table = BettiTable(cpx.d)
    for a in box(lo, hi):
        sizes, diffs = koszul_total_complex(cpx, a)
        for idx, h in _total_cohomology(cpx.field, sizes, diffs).items():
            table.add(idx, a, h)
    return table


# -- Ext, depth, local cohomology ----------------------------------------------------

def ext_against_dualizing(M, resolution=None):
    """Ext^{-i}(M, S(-1)[d]) for 0 <= i <= d, each as a squarefree module

    Computed as H^{d-i} of Hom(P, S(-1)) for the minimal resolution P.
    """
    res = resolution or min_free_resolution(M)
    Q = res.complex.dual(ones(M.d))
    return {i: Q.cohomology_sq(M.d - i) for i in range(M.d + 1)}


@dataclass
class DepthReport:
    depth: int
    dim: int
    projective_dimension: int
    is_cm: bool
    is_sequentially_cm: bool


def _depth_and_dim(M):
    res = min_free_resolution(M)
    exts = ext_against_dualizing(M, res)
    pd = res.projective_dimension
    nonzero_t = [M.d - i for i, E in exts.items() if not E.is_zero()]
    return M.d - pd, M.d - min(nonzero_t), pd, exts


def depth_dim_cm(M):
    """depth by Auslander-Buchsbaum, dim by grade, and the (sequential) CM verdicts"""
    if M.is_zero():
        raise ZeroModule("depth of the zero module")
    depth, dim, pd, exts = _depth_and_dim(M)
    sequential = True
    for i, E in exts.items():
        if E.is_zero():
            continue
        t = M.d - i
        e_depth, e_dim, _, _ = _depth_and_dim(E)
        if not (e_depth == e_dim == M.d - t):
            sequential = False
            break
    return DepthReport(depth, dim, pd, depth == dim, sequential)


@dataclass
class LocalCohomology:
    table: dict            # (i, a) -> dim H^i_m(M)_a
    reg: object            # max over i of i + top degree, -inf when all vanish
    ext_modules: dict


def local_cohomology_hilbert(M, window=None):
    """dim H^i_m(M)_a = dim Ext^{-i}(M, D_S)_{-a}; window defaults to the degrees -F"""
    exts = ext_against_dualizing(M)
    if window is None:
        window = [neg(indicator(F, M.d)) for F in all_subsets(M.d)]
    table = {}
    for i, E in exts.items():
        for a in window:
            n = E.dim_at(neg(a))
            if n:
                table[(i, tuple(a))] = n
    reg = max((i - E.indeg() for i, E in exts.items() if not E.is_zero()), default=NEG_INF)
    return LocalCohomology(table, reg, exts)


def _z_degrees_present(E, k):
    """Does the squarefree module E have a nonzero component of total degree k"""
    if k == 0 and E.dim(frozenset()):
        return True
    return k > 0 and any(len(F) <= k for F in E.dims if F)


def flush_point_check(M, r, t, exts=None):
    """Evaluate the local cohomology vanishing pattern at level r with split t

    Hypothesis: H^i_m(M)_j = 0 for j >= r + 1 - i when i <= t, and
    H^i_m(M)_{r+1-i} = 0 when i > t. Returns (hypothesis, r >= reg(M)).
    """
    exts = exts or ext_against_dualizing(M)
    hypothesis = True
    for i, E in exts.items():
        if E.is_zero():
            continue
        if i <= t:
            # H^i_j != 0 for some j >= r + 1 - i  <=>  E nonzero in a degree k <= i - r - 1
            if any(_z_degrees_present(E, k) for k in range(0, i - r)):
                hypothesis = False
        elif _z_degrees_present(E, i - r - 1):
            hypothesis = False
    reg = min_free_resolution(M).reg()
    return hypothesis, r >= reg


# -- truncations and finite-length quotients -----------------------------------------

def truncate(M, r):
    """M_{>= r} as a window module (no bounds: evaluable wherever M is)"""

    def dim_fn(a):
        return M.dim_at(a) if total(a) >= r else 0

    def x_fn(i, a):
        if total(a) < r:
            return M.field.zeros(dim_fn(bump(a, i)), 0)
        return M.x(i, a)

    return WindowSModule(M.d, M.field, dim_fn, x_fn, name=f"truncation>={r}")


def truncation_box(M, r):
    """Box holding every Betti degree of the truncation of a squarefree module"""
    return zero(M.d), (max(r, 1),) * M.d


def truncate_complex(cpx, r):
    """(M^q)_{>= r - q} for each term, with the restricted differentials"""
    terms = {q: truncate(M, r - q) for q, M in cpx.terms.items()}

    def make(q):
        def fn(a):
            rows, cols = terms[q + 1].dim_at(a), terms[q].dim_at(a)
            if not rows or not cols:
                return cpx.field.zeros(rows, cols)
            return cpx.differential(q, a)
        return WindowMap(fn)

    maps = {q: make(q) for q in cpx.maps if q + 1 in terms}
    return SComplex(cpx.d, cpx.field, terms, maps)


def artinian_window(M, r):
    """The finite-length module M / M_{>= r}"""

    def dim_fn(a):
        return M.dim_at(a) if total(a) < r else 0

    def x_fn(i, a):
        rows, cols = dim_fn(bump(a, i)), dim_fn(a)
        if not rows or not cols:
            return M.field.zeros(rows, cols)
        return M.x(i, a)

    return WindowSModule(M.d, M.field, dim_fn, x_fn, name=f"quotient<{r}")


def artinian_box(M, r):
    return zero(M.d), (max(r, 1),) * M.d


def window_sigma(W, lo, hi):
    """Top total degree with a nonzero component inside the box"""
    present = [total(a) for a in box(lo, hi) if W.dim_at(a)]
    return max(present, default=NEG_INF)


# -- componentwise linearity ---------------------------------------------------------

def squarefree_part(M, i):
    """Submodule generated by the squarefree components of total degree i"""
    gens = {F: M.field.identity(n) for F, n in M.dims.items() if len(F) == i}
    return sq_generated_submodule(M, gens)


def weakly_koszul_S(M):
    """Componentwise linearity through the squarefree parts M_[i]; returns (verdict, certificate)"""
    if M.is_zero():
        return True, {"verified": []}
    verified = []
    for i in range(M.indeg(), M.d + 1):
        U, _ = squarefree_part(M, i)
        if U.is_zero():
            continue
        table = min_free_resolution(U).betti
        if not table.is_linear(i):
            bad = next((i_, a) for (i_, a) in table.entries if i_ + total(a) != i)
            return False, {"degree": i, "entry": {"i": bad[0], "deg": list(bad[1])},
                           "verified": verified}
        verified.append(i)
    return True, {"verified": verified}
