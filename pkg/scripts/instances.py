#!/usr/bin/env python3
"""
Instance files and instance generators

An instance file describes a squarefree monomial ideal:

    # comment
    d 4
    char 32003
    side S
    gen 1 2
    gen 3 4

`d` is required; `char` defaults to 0 (or FIELD_CHAR) and `side` to E.
Indices are 1-based in the file and 0-based everywhere else. A bare `gen`
line is the unit monomial. `format_instance` writes back exactly the text
`parse_instance` accepts; comments and blank lines are not kept.
"""

import logging
import os
import random
from dataclasses import dataclass, field

from scripts.emod import e_module_from_ideal
from scripts.exactla import BadCharacteristic, FieldConfig, KoszulLabError
from scripts.grading import MonomialIdeal, all_subsets, subset_key
from scripts.smod import sq_module_from_ideal

logger = logging.getLogger(__name__)


class InstanceError(KoszulLabError):
    """Base class for instance file problems; carries the offending line number"""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ParseError(InstanceError):
    pass


class BadIndex(InstanceError):
    pass


class BadChar(InstanceError):
    pass


@dataclass
class InstanceFile:
    d: int
    char: int = 0
    side: str = "E"
    generators: list = field(default_factory=list)
    char_given: bool = True
    seed: object = None

    def ideal(self):
        return MonomialIdeal(self.d, self.generators, self.side)

    def field(self, override=None):
        return FieldConfig(self.char if override is None else override)

    def module(self, field=None, as_ideal=False):
        """E/J or S/I (J or I itself with as_ideal) over the instance's field"""
        field = field or self.field()
        if self.side == "E":
            return e_module_from_ideal(self.ideal(), field, as_quotient=not as_ideal)
        return sq_module_from_ideal(self.ideal(), field, as_quotient=not as_ideal)

    def to_text(self):
        return format_instance(self)

    def to_json(self):
        return {
            "d": self.d,
            "char": self.char,
            "side": self.side,
            "generators": [sorted(k + 1 for k in g) for g in self.generators],
            "seed": self.seed,
        }


def _int(token, lineno, what):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {token!r}", lineno)


def parse_instance(text, default_char=0):
    """Parse instance text into an InstanceFile"""
    d = None
    char = None
    side = "E"
    gens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        if key == "d":
            if len(rest) != 1:
                raise ParseError("expected 'd <int>'", lineno)
            d = _int(rest[0], lineno, "d")
            if d < 1:
                raise ParseError(f"d must be at least 1, got {d}", lineno)
        elif key == "char":
            if len(rest) != 1:
                raise ParseError("expected 'char <int>'", lineno)
            char = _int(rest[0], lineno, "char")
            try:
                FieldConfig(char)
            except BadCharacteristic as e:
                raise BadChar(str(e), lineno)
        elif key == "side":
            if len(rest) != 1 or rest[0] not in ("E", "S"):
                raise ParseError("expected 'side E' or 'side S'", lineno)
            side = rest[0]
        elif key == "gen":
            gens.append((lineno, [_int(tok, lineno, "index") for tok in rest]))
        else:
            raise ParseError(f"unknown keyword {key!r}", lineno)

    if d is None:
        raise ParseError("missing 'd' line")
    generators = []
    for lineno, indices in gens:
        if len(set(indices)) != len(indices):
            raise BadIndex(f"repeated index in generator {indices}", lineno)
        bad = [k for k in indices if k < 1 or k > d]
        if bad:
            raise BadIndex(f"index {bad[0]} outside 1..{d}", lineno)
        generators.append(frozenset(k - 1 for k in indices))

    return InstanceFile(d, default_char if char is None else char, side, generators,
                        char_given=char is not None)


def format_instance(inst):
    lines = [f"d {inst.d}", f"char {inst.char}", f"side {inst.side}"]
    for g in inst.generators:
        lines.append(" ".join(["gen"] + [str(k + 1) for k in sorted(g)]))
    return "\n".join(lines) + "\n"


def load_instance(path, default_char=None):
    """Read an instance file; FIELD_CHAR supplies the characteristic when the file has none"""
    if default_char is None:
        default_char = int(os.getenv("FIELD_CHAR", "0"))
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    inst = parse_instance(text, default_char=default_char)
    logger.info(f"Loaded {path}: d={inst.d}, char={inst.char}, side={inst.side}, "
                f"{len(inst.generators)} generator(s)")
    return inst


def _minimalize(family):
    return sorted((g for g in family if not any(h < g for h in family)), key=subset_key)


def random_ideal(d, count, seed, density=0.5, char=0, side="E"):
    """Seeded random squarefree monomial ideals

    Each nonempty subset of [d] joins the generating family with probability
    `density`; the family is then cut down to its minimal members. Density 0
    gives the zero ideal, density 1 the maximal ideal.
    """
    if d < 1:
        raise ValueError(f"d must be at least 1, got {d}")
    rng = random.Random(seed)
    candidates = [F for F in all_subsets(d) if F]
    out = []
    for n in range(count):
        family = [F for F in candidates if rng.random() < density]
        out.append(InstanceFile(d, char, side, _minimalize(family), seed=f"{seed}:{n}"))
    return out


def exhaustive_antichains(d, char=0, side="E"):
    """Every antichain of nonempty subsets of [d], the empty one first"""
    if d > 4:
        raise ValueError("exhaustive enumeration is limited to d <= 4")
    candidates = [F for F in all_subsets(d) if F]
    out = []

    def rec(idx, chosen):
        if idx == len(candidates):
            out.append(sorted(chosen, key=subset_key))
            return
        rec(idx + 1, chosen)
        F = candidates[idx]
        if not any(F <= G or G <= F for G in chosen):
            rec(idx + 1, chosen + [F])

    rec(0, [])
    out.sort(key=lambda fam: (len(fam), [subset_key(F) for F in fam]))
    return [InstanceFile(d, char, side, fam, seed=f"exhaustive:{n}") for n, fam in enumerate(out)]

