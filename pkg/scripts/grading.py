#!/usr/bin/env python3
"""
Degrees, signs and Betti bookkeeping

Multidegrees are tuples of length d. Squarefree degrees are frozensets of
0-based variable indices; `indicator` and `support` convert between the two.
Indices are 0-based inside the toolkit and 1-based in instance files and
printed output.

BettiTable uses cohomological indexing: a minimal resolution lives in spots
i <= 0 and beta^{i,a} counts generators of degree a at spot i.
"""

import itertools
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field

import pandas as pd

logger = logging.getLogger(__name__)

NEG_INF = float("-inf")
POS_INF = float("inf")


def ones(d):
    return (1,) * d


def zero(d):
    return (0,) * d


def unit(d, i):
    return tuple(1 if k == i else 0 for k in range(d))


def total(a):
    return sum(a)


def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def neg(a):
    return tuple(-x for x in a)


def leq(a, b):
    return all(x <= y for x, y in zip(a, b))


def bump(a, i, step=1):
    """a + step * e_i"""
    return a[:i] + (a[i] + step,) + a[i + 1:]


def indicator(F, d):
    return tuple(1 if k in F else 0 for k in range(d))


def support(a):
    return frozenset(k for k, x in enumerate(a) if x > 0)


def is_squarefree_degree(a):
    return all(x in (0, 1) for x in a)


def subset_key(F):
    return (len(F), sorted(F))


def all_subsets(d):
    """Every F in [d], by size then lexicographically"""
    return [frozenset(c) for k in range(d + 1) for c in itertools.combinations(range(d), k)]


def box(lo, hi):
    """All multidegrees a with lo <= a <= hi, sorted by total degree"""
    ranges = [range(l, h + 1) for l, h in zip(lo, hi)]
    return sorted(itertools.product(*ranges), key=lambda a: (sum(a), a))


def degrees_with_total(lo, t_min, t_max, hi=None):
    """Multidegrees a >= lo (and <= hi when given) with t_min <= |a| <= t_max"""
    d = len(lo)
    out = []
    slack = t_max - sum(lo)
    if slack < 0:
        return out
    caps = [slack if hi is None else min(slack, hi[k] - lo[k]) for k in range(d)]

    def rec(k, prefix, used):
        if k == d:
            if sum(lo) + used >= t_min:
                out.append(tuple(l + x for l, x in zip(lo, prefix)))
            return
        for x in range(0, min(caps[k], slack - used) + 1):
            rec(k + 1, prefix + [x], used + x)

    rec(0, [], 0)
    return sorted(out, key=lambda a: (sum(a), a))


def alpha(i, F):
    """Number of j in F with j < i"""
    return sum(1 for j in F if j < i)


def alpha_sign(i, F):
    """(-1)^alpha(i, F) as an int"""
    return -1 if alpha(i, F) % 2 else 1


def format_subset(F):
    """1-based human form of a squarefree degree, e.g. {0, 2} -> '13'"""
    if not F:
        return "1"
    return "".join(str(k + 1) for k in sorted(F))


def format_degree(a):
    return "(" + ",".join(str(x) for x in a) + ")"


@dataclass
class BettiTable:
    """Multigraded Betti numbers keyed by (spot, multidegree)"""

    d: int
    entries: dict = field(default_factory=dict)

    def add(self, i, a, mult=1):
        if mult < 0:
            raise ValueError(f"negative multiplicity {mult} at {(i, a)}")
        if mult == 0:
            return
        key = (i, tuple(a))
        self.entries[key] = self.entries.get(key, 0) + mult

    def get(self, i, a):
        return self.entries.get((i, tuple(a)), 0)

    def items(self):
        return sorted(self.entries.items(), key=lambda kv: (-kv[0][0], sum(kv[0][1]), kv[0][1]))

    def is_empty(self):
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, BettiTable):
            return NotImplemented
        return self.d == other.d and self.entries == other.entries

    def spots(self):
        return sorted({i for i, _ in self.entries})

    def z_graded(self):
        """beta^{i,j} = sum of beta^{i,a} over |a| = j"""
        out = defaultdict(int)
        for (i, a), m in self.entries.items():
            out[(i, sum(a))] += m
        return dict(out)

    def reg(self):
        return max((i + sum(a) for i, a in self.entries), default=NEG_INF)

    def iota(self):
        return min((i + sum(a) for i, a in self.entries), default=POS_INF)

    def is_linear(self, l):
        """True when every nonzero entry sits on the diagonal i + j = l"""
        return all(i + sum(a) == l for i, a in self.entries)

    def restrict(self, i_min=None, i_max=None):
        out = BettiTable(self.d)
        for (i, a), m in self.entries.items():
            if (i_min is None or i >= i_min) and (i_max is None or i <= i_max):
                out.add(i, a, m)
        return out

    def shift(self, p):
        """Table of the complex M[p] (spot i of M[p] is spot i + p of M)"""
        out = BettiTable(self.d)
        for (i, a), m in self.entries.items():
            out.add(i - p, a, m)
        return out

    def reflect(self):
        """(i, a) -> (-i - d, 1 - a): the table of the dual against S(-1)[d]"""
        out = BettiTable(self.d)
        one = ones(self.d)
        for (i, a), m in self.entries.items():
            out.add(-i - self.d, sub(one, a), m)
        return out

    def merged(self, other):
        out = BettiTable(self.d, dict(self.entries))
        for (i, a), m in other.entries.items():
            out.add(i, a, m)
        return out

    def dominates(self, other):
        """Z-graded entrywise comparison self >= other"""
        mine = self.z_graded()
        return all(mine.get(k, 0) >= m for k, m in other.z_graded().items())

    def to_json(self):
        return {"entries": [{"i": i, "deg": list(a), "mult": m} for (i, a), m in self.items()]}

    @classmethod
    def from_json(cls, d, payload):
        if isinstance(payload, str):
            payload = json.loads(payload)
        table = cls(d)
        for entry in payload.get("entries", []):
            table.add(int(entry["i"]), tuple(entry["deg"]), int(entry["mult"]))
        return table

    def to_frame(self):
        """Macaulay-style grid: rows i + j, columns -i, '-' for zero"""
        z = self.z_graded()
        if not z:
            return pd.DataFrame()
        cols = sorted({-i for i, _ in z})
        rows = sorted({i + j for i, j in z})
        cols = list(range(cols[0], cols[-1] + 1))
        rows = list(range(rows[0], rows[-1] + 1))
        frame = pd.DataFrame("-", index=rows, columns=cols)
        for (i, j), m in z.items():
            frame.loc[i + j, -i] = str(m)
        totals = {c: sum(m for (i, _), m in z.items() if -i == c) for c in cols}
        frame.loc["total:"] = [str(totals[c]) for c in cols]
        return frame

    def format_grid(self):
        if self.is_empty():
            return "(zero table)"
        return self.to_frame().to_string()


def reg_from_betti(table):
    """max of i + |a| over nonzero entries, -inf for the empty table"""
    return table.reg()


@dataclass
class MonomialIdeal:
    """Squarefree monomial ideal on the E side (y's) or the S side (x's)"""

    d: int
    generators: list
    side: str = "E"

    def __post_init__(self):
        if self.side not in ("E", "S"):
            raise ValueError(f"side must be E or S, got {self.side!r}")
        gens = {frozenset(g) for g in self.generators}
        for g in gens:
            if any(k < 0 or k >= self.d for k in g):
                raise ValueError(f"generator {sorted(g)} out of range for d={self.d}")
        minimal = [g for g in gens if not any(h < g for h in gens)]
        self.generators = sorted(minimal, key=subset_key)

    def contains(self, F):
        """Is the monomial with support F in the ideal"""
        F = frozenset(F)
        return any(g <= F for g in self.generators)

    def members(self):
        return [F for F in all_subsets(self.d) if self.contains(F)]

    def quotient_faces(self):
        """Faces of the Stanley-Reisner complex: the F outside the ideal"""
        return [F for F in all_subsets(self.d) if not self.contains(F)]

    def generator_degrees(self):
        return sorted({len(g) for g in self.generators})

    def describe(self):
        var = "y" if self.side == "E" else "x"
        if not self.generators:
            return "(0)"
        parts = ["".join(f"{var}{k + 1}" for k in sorted(g)) if g else "1" for g in self.generators]
        return "(" + ", ".join(parts) + ")"
