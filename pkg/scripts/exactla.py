#!/usr/bin/env python3
"""
Exact linear algebra over Q and GF(p)

Every rank, kernel and cohomology computation in KoszulLab goes through this
module. Matrices are sympy DomainMatrix objects in sparse format over QQ
(characteristic 0) or GF(p). Bases are read off reduced row echelon forms, so
two runs on the same input always print the same presentations.

Convention: a linear map V -> W is a matrix of shape (dim W, dim V), vectors
are columns.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

from sympy import GF, QQ, isprime
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)


class KoszulLabError(Exception):
    """Base class for every error raised by the toolkit"""


class CompositionNotZero(KoszulLabError):
    """Two differentials that should compose to zero do not"""


class BadCharacteristic(KoszulLabError):
    """Field characteristic is neither 0 nor a prime"""


class ZeroModule(KoszulLabError):
    """Operation needs a nonzero module"""


class NotSquarefree(KoszulLabError):
    """Module has components outside the squarefree degrees"""


class WindowTooSmall(KoszulLabError):
    """A window module was asked for degrees it does not cover"""

    def __init__(self, missing):
        self.missing = sorted(set(tuple(a) for a in missing))
        shown = ", ".join(str(a) for a in self.missing[:6])
        more = "" if len(self.missing) <= 6 else f" (+{len(self.missing) - 6} more)"
        super().__init__(f"window does not cover degrees {shown}{more}")


class DifferentialCheckFailed(KoszulLabError):
    """A constructed complex has d o d != 0"""


class NotMinimal(KoszulLabError):
    """A free complex has a unit entry where a minimal one is required"""


class NotWeaklyKoszul(KoszulLabError):
    """Module is not weakly Koszul"""


class ERelationsViolated(KoszulLabError):
    """Action matrices do not satisfy the exterior algebra relations"""


class ResolutionTooLong(KoszulLabError):
    """A resolution over S ran past the polynomial ring's global dimension"""


@dataclass(frozen=True)
class FieldConfig:
    """The coefficient field K: rationals for characteristic 0, else GF(p)"""

    characteristic: int = 0

    def __post_init__(self):
        c = self.characteristic
        if isinstance(c, bool) or not isinstance(c, int) or c < 0 or (c != 0 and not isprime(c)):
            raise BadCharacteristic(f"characteristic must be 0 or a prime, got {c!r}")

    @cached_property
    def domain(self):
        return QQ if self.characteristic == 0 else GF(self.characteristic)

    @property
    def one(self):
        return self.domain.one

    def scalar(self, value):
        """Convert an int (or domain element) into the field"""
        return self.domain.convert(value)

    def zeros(self, rows, cols):
        return DomainMatrix.zeros((rows, cols), self.domain)

    def identity(self, n):
        return DomainMatrix.eye(n, self.domain)

    def matrix(self, entries, rows, cols):
        """Sparse matrix from a {(row, col): value} mapping"""
        dod = {}
        for (r, c), value in entries.items():
            x = self.scalar(value)
            if x:
                dod.setdefault(r, {})[c] = x
        return DomainMatrix.from_dod(dod, (rows, cols), self.domain)

    def from_rows(self, rows, cols=None):
        """Sparse matrix from a list of row lists"""
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return self.matrix(
            {(r, c): v for r, row in enumerate(rows) for c, v in enumerate(row)},
            len(rows), cols)

    def to_text(self, value):
        return str(self.domain.to_sympy(value))


def sparse(m):
    """Force sparse format; hstack/vstack may hand back dense matrices"""
    return m if m.rep.fmt == "sparse" else m.to_sparse()


def hstack(field, rows, blocks):
    """Horizontal concatenation that tolerates an empty block list"""
    blocks = [b for b in blocks if b.shape[1] > 0]
    if not blocks:
        return field.zeros(rows, 0)
    if len(blocks) == 1:
        return sparse(blocks[0])
    return sparse(blocks[0].hstack(*blocks[1:]))


def matmul(a, b):
    """Product a*b with the shape bookkeeping DomainMatrix skips for empty factors"""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} x {b.shape}")
    if 0 in a.shape or 0 in b.shape:
        return DomainMatrix.zeros((a.shape[0], b.shape[1]), a.domain)
    return sparse(a).matmul(sparse(b))


def is_zero(m):
    return 0 in m.shape or m.nnz() == 0


def _rref(m):
    rows, cols = m.shape
    if rows == 0 or cols == 0 or m.nnz() == 0:
        return {}, ()
    reduced, pivots = sparse(m).rref()
    return reduced.to_dod(), tuple(pivots)


def rank(m):
    """Rank over the configured field"""
    return len(_rref(m)[1])


@dataclass
class Basis:
    """Columns of `matrix` form a basis; restricted to rows `index` they are the identity"""

    matrix: DomainMatrix
    index: tuple

    @property
    def dim(self):
        return self.matrix.shape[1]

    @property
    def ambient(self):
        return self.matrix.shape[0]

    def coords(self, vectors):
        """Coordinates of column vectors lying in the span"""
        return sparse(vectors).extract(list(self.index), list(range(vectors.shape[1])))

    def columns(self):
        """The basis vectors as lists of field elements"""
        dod = self.matrix.to_dod()
        K = self.matrix.domain
        out = [[K.zero] * self.ambient for _ in range(self.dim)]
        for r, row in dod.items():
            for c, v in row.items():
                out[c][r] = v
        return out


def kernel_matrix(m):
    """Canonical kernel basis: one vector per free column of the RREF"""
    rows, cols = m.shape
    K = m.domain
    dod, pivots = _rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    out = {}
    for j, f in enumerate(free):
        out.setdefault(f, {})[j] = K.one
        for k, p in enumerate(pivots):
            v = dod.get(k, {}).get(f)
            if v:
                out.setdefault(p, {})[j] = -v
    return Basis(DomainMatrix.from_dod(out, (cols, len(free)), K), tuple(free))


def kernel_basis(m):
    """Basis of the right null space as a list of vectors (size = cols - rank)"""
    return kernel_matrix(m).columns()


def image_basis(m):
    """Canonical basis of the column space: reduced rows of the transpose"""
    n = m.shape[0]
    dod, pivots = _rref(m.transpose())
    out = {}
    for k in range(len(pivots)):
        for c, v in dod.get(k, {}).items():
            out.setdefault(c, {})[k] = v
    return Basis(DomainMatrix.from_dod(out, (n, len(pivots)), m.domain), pivots)


class Subquotient:
    """ker(d_out) / im(d_in) with representatives and a projection onto them"""

    def __init__(self, d_in, d_out):
        n = d_in.shape[0]
        if d_out.shape[1] != n:
            raise ValueError(f"differentials do not compose: {d_out.shape} after {d_in.shape}")
        if not is_zero(matmul(d_out, d_in)):
            raise CompositionNotZero(f"d_out o d_in != 0 on a space of dimension {n}")
        self.ambient = n
        self.domain = d_in.domain
        self.cycles = kernel_matrix(d_out)
        # image of d_in written in cycle coordinates, then reduced
        image_coords = self.cycles.coords(d_in)
        self._reduced, self._pivots = _rref(image_coords.transpose())
        taken = set(self._pivots)
        self._free = [j for j in range(self.cycles.dim) if j not in taken]
        self.reps = sparse(self.cycles.matrix.extract(list(range(n)), self._free)) \
            if self._free and n else DomainMatrix.zeros((n, len(self._free)), self.domain)

    @property
    def dim(self):
        return len(self._free)

    def project(self, vectors):
        """Coordinates, in the representative basis, of the classes of cycle vectors"""
        c = self.cycles.coords(vectors)
        if self._pivots:
            dod = c.to_dod()
            for k, p in enumerate(self._pivots):
                row_p = dod.get(p)
                if not row_p:
                    continue
                for j, v in self._reduced.get(k, {}).items():
                    if j == p:
                        continue
                    target = dod.setdefault(j, {})
                    for col, x in row_p.items():
                        y = target.get(col, self.domain.zero) - v * x
                        if y:
                            target[col] = y
                        else:
                            target.pop(col, None)
            c = DomainMatrix.from_dod(dod, c.shape, self.domain)
        return sparse(c).extract(self._free, list(range(vectors.shape[1])))


def cohomology_dim(d_in, d_out):
    """dim ker(d_out) - rank(d_in), plus representatives of a complement of the image"""
    sq = Subquotient(d_in, d_out)
    return sq.dim, sq.reps


def induced_map(src, tgt, ambient_map):
    """Matrix of the map between subquotients induced by a map of ambient spaces"""
    return tgt.project(matmul(ambient_map, src.reps))
