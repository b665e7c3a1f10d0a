"""Pointed finite sets <n> = {0, 1, ..., n} with basepoint 0.

The inert/active factorization pattern on pointed sets: a pointed map is
inert when every nonzero target element has exactly one preimage, active
when only the basepoint hits the basepoint, semi-inert when every
nonzero target element has at most one preimage.

The basepoint is literally element 0, so <n> is the skeleton and the
standard maps rho_i (project onto the i-th entry) and lam_i (include as
the i-th entry) use matching indices.  The pattern is the category of
pointed finite sets itself, composed covariantly; no direction-reversal
bookkeeping is performed anywhere in this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fincat import FinSetMap

DEFAULT_ENUM_BOUND = 8


class BoundExceeded(ValueError):
    pass


@dataclass(frozen=True)
class PointedMap:
    """A map of pointed sets <src> -> <tgt>; table has src+1 entries and
    table[0] must be 0."""

    src: int
    tgt: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        if len(self.table) != self.src + 1:
            raise ValueError(f"table must have {self.src + 1} entries")
        if self.table[0] != 0:
            raise ValueError("basepoint must map to basepoint")
        for x, y in enumerate(self.table):
            if not 0 <= y <= self.tgt:
                raise ValueError(f"table[{x}] = {y} out of range for <{self.tgt}>")

    def __call__(self, x: int) -> int:
        return self.table[x]

    @staticmethod
    def identity(n: int) -> "PointedMap":
        return PointedMap(n, n, tuple(range(n + 1)))

    def then(self, other: "PointedMap") -> "PointedMap":
        if self.tgt != other.src:
            raise ValueError("maps not composable")
        return PointedMap(self.src, other.tgt, tuple(other.table[y] for y in self.table))

    def fibers(self) -> tuple[tuple[int, ...], ...]:
        """Preimages of the nonzero target elements 1..tgt."""
        out = [[] for _ in range(self.tgt)]
        for x in range(1, self.src + 1):
            y = self.table[x]
            if y != 0:
                out[y - 1].append(x)
        return tuple(tuple(f) for f in out)

    def kernel(self) -> tuple[int, ...]:
        """Nonzero source elements mapped to the basepoint."""
        return tuple(x for x in range(1, self.src + 1) if self.table[x] == 0)

    def to_json(self) -> dict:
        return {"src": self.src, "tgt": self.tgt, "table": list(self.table)}

    @staticmethod
    def from_json(data: dict) -> "PointedMap":
        return PointedMap(data["src"], data["tgt"], tuple(data["table"]))


def compose(g: PointedMap, f: PointedMap) -> PointedMap:
    """g after f."""
    return f.then(g)


@dataclass(frozen=True)
class GammaClass:
    inert: bool
    active: bool
    semi_inert: bool


def classify_gamma(f: PointedMap) -> GammaClass:
    fibers = f.fibers()
    inert = all(len(fib) == 1 for fib in fibers)
    active = len(f.kernel()) == 0
    semi_inert = all(len(fib) <= 1 for fib in fibers)
    return GammaClass(inert, active, semi_inert)


def is_inert(f: PointedMap) -> bool:
    return classify_gamma(f).inert


def is_active(f: PointedMap) -> bool:
    return len(f.kernel()) == 0


def is_semi_inert(f: PointedMap) -> bool:
    return classify_gamma(f).semi_inert


def factorize_gamma(f: PointedMap) -> tuple[PointedMap, PointedMap]:
    """Split f = a . i with i inert and a active.

    i collapses the kernel to the basepoint; the middle object is
    canonically relabeled so surviving elements keep their order, which
    makes the output deterministic (uniqueness is only up to iso).
    """
    survivors = [x for x in range(1, f.src + 1) if f.table[x] != 0]
    k = len(survivors)
    position = {x: j + 1 for j, x in enumerate(survivors)}
    i_table = [0] * (f.src + 1)
    for x in survivors:
        i_table[x] = position[x]
    a_table = [0] + [f.table[x] for x in survivors]
    i = PointedMap(f.src, k, tuple(i_table))
    a = PointedMap(k, f.tgt, tuple(a_table))
    assert i.then(a).table == f.table
    return i, a


def rho(n: int, i: int) -> PointedMap:
    """The inert projection <n> -> <1> keeping only entry i."""
    if not 1 <= i <= n:
        raise ValueError(f"rho index {i} out of range 1..{n}")
    return PointedMap(n, 1, tuple(1 if x == i else 0 for x in range(n + 1)))


def lam(n: int, i: int) -> PointedMap:
    """The active inclusion <1> -> <n> sending 1 to i (semi-inert)."""
    if not 1 <= i <= n:
        raise ValueError(f"lam index {i} out of range 1..{n}")
    return PointedMap(1, n, (0, i))


def enumerate_gamma_maps(n: int, m: int, pred=None, bound: int = DEFAULT_ENUM_BOUND):
    """All pointed maps <n> -> <m> matching pred, lexicographic by table."""
    if n > bound or m > bound:
        raise BoundExceeded(f"enumeration bound {bound} exceeded by <{n}> -> <{m}>")
    out = []
    for tail in itertools.product(range(m + 1), repeat=n):
        f = PointedMap(n, m, (0,) + tail)
        if pred is None or pred(f):
            out.append(f)
    return out


def active_to_function(f: PointedMap) -> FinSetMap:
    """An active map <n> -> <m> is a function on the nonbasepoint parts."""
    if not is_active(f):
        raise ValueError("only active maps restrict to functions")
    return FinSetMap(f.src, f.tgt, tuple(f.table[x] - 1 for x in range(1, f.src + 1)))


def function_to_active(m: FinSetMap) -> PointedMap:
    return PointedMap(m.src_size, m.tgt_size, (0,) + tuple(y + 1 for y in m.table))


def unique_diagonal_filler(i: PointedMap, a: PointedMap, t: PointedMap, b: PointedMap):
    """For a commuting square

        <p> --t--> <q>
         |i         |a      (i inert, a active, b.i == a.t)
         v          v
        <r> --b--> <s>

    return the unique d: <r> -> <q> with d.i == t and a.d == b, or None
    if no filler exists.  Because i is inert, every nonzero element of
    <r> has exactly one i-preimage, so a candidate filler is pinned
    pointwise; any second filler would have to agree with it.
    """
    if i.then(b).table != t.then(a).table:
        raise ValueError("square does not commute")
    d_table = [0] * (i.tgt + 1)
    for x in range(1, i.src + 1):
        y = i.table[x]
        if y == 0:
            if t.table[x] != 0:
                return None
        else:
            d_table[y] = t.table[x]
    d = PointedMap(i.tgt, t.tgt, tuple(d_table))
    if i.then(d).table != t.table or d.then(a).table != b.table:
        return None
    return d


def diagonal_fillers_bruteforce(i: PointedMap, a: PointedMap, t: PointedMap, b: PointedMap):
    """All fillers, by enumerating every pointed map <r> -> <q>."""
    fillers = []
    for d in enumerate_gamma_maps(i.tgt, t.tgt):
        if i.then(d).table == t.table and d.then(a).table == b.table:
            fillers.append(d)
    return fillers
