"""Finite linear orders [n] = {0 < 1 < ... < n} and monotone maps.

A monotone map is active when it preserves the endpoints and inert when
it is an interval inclusion.  Arrows of the opposite pattern are stored
as their underlying monotone map plus a direction tag in the JSON
encoding; every condition here is stated on the monotone side.

``underlying_gamma`` is the pointed-set shadow of a monotone map read
against the direction of the order: phi: [n] -> [m] induces
<m> -> <n>, i |-> j when phi(j-1) < i <= phi(j).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .gamma import PointedMap


@dataclass(frozen=True)
class SimplexMap:
    """A weakly monotone map {0..src} -> {0..tgt}."""

    src: int
    tgt: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        if len(self.table) != self.src + 1:
            raise ValueError(f"table must have {self.src + 1} entries")
        for x, y in enumerate(self.table):
            if not 0 <= y <= self.tgt:
                raise ValueError(f"table[{x}] = {y} out of range for [{self.tgt}]")
        for x in range(self.src):
            if self.table[x] > self.table[x + 1]:
                raise ValueError("table is not monotone")

    def __call__(self, x: int) -> int:
        return self.table[x]

    @staticmethod
    def identity(n: int) -> "SimplexMap":
        return SimplexMap(n, n, tuple(range(n + 1)))

    def then(self, other: "SimplexMap") -> "SimplexMap":
        if self.tgt != other.src:
            raise ValueError("maps not composable")
        return SimplexMap(self.src, other.tgt, tuple(other.table[y] for y in self.table))

    def to_json(self, op: bool = False) -> dict:
        return {"src": self.src, "tgt": self.tgt, "table": list(self.table), "op": op}

    @staticmethod
    def from_json(data: dict) -> "SimplexMap":
        return SimplexMap(data["src"], data["tgt"], tuple(data["table"]))


def compose(g: SimplexMap, f: SimplexMap) -> SimplexMap:
    """g after f."""
    return f.then(g)


def is_active_delta(phi: SimplexMap) -> bool:
    """Endpoint-preserving."""
    return phi.table[0] == 0 and phi.table[phi.src] == phi.tgt


def is_inert_delta(phi: SimplexMap) -> bool:
    """Interval inclusion: each step goes up by exactly one."""
    return all(phi.table[x + 1] == phi.table[x] + 1 for x in range(phi.src))


def is_cellular(phi: SimplexMap) -> bool:
    """Successor condition phi(x+1) <= phi(x) + 1."""
    return all(phi.table[x + 1] <= phi.table[x] + 1 for x in range(phi.src))


def classify_delta(phi: SimplexMap) -> dict:
    return {"inert": is_inert_delta(phi), "active": is_active_delta(phi)}


def factorize_delta(phi: SimplexMap) -> tuple[SimplexMap, SimplexMap]:
    """Split phi = iota . alpha with alpha active and iota inert.

    alpha renormalizes the range onto [0, phi(n) - phi(0)], iota is the
    inclusion of the interval [phi(0), phi(n)].
    """
    lo, hi = phi.table[0], phi.table[phi.src]
    k = hi - lo
    alpha = SimplexMap(phi.src, k, tuple(y - lo for y in phi.table))
    iota = SimplexMap(k, phi.tgt, tuple(lo + j for j in range(k + 1)))
    assert alpha.then(iota).table == phi.table
    return alpha, iota


def interval_inclusion(lo: int, length: int, tgt: int) -> SimplexMap:
    """The inert map [length] -> [tgt] starting at lo."""
    return SimplexMap(length, tgt, tuple(lo + j for j in range(length + 1)))


def enumerate_monotone(n: int, m: int):
    """All monotone maps [n] -> [m], lexicographic by table."""
    out = []
    for comb in itertools.combinations_with_replacement(range(m + 1), n + 1):
        out.append(SimplexMap(n, m, comb))
    return out


def underlying_gamma(phi: SimplexMap) -> PointedMap:
    """The pointed map <m> -> <n> underlying phi: [n] -> [m] read as an
    arrow of the opposite order category: i |-> j when
    phi(j-1) < i <= phi(j), otherwise i |-> basepoint."""
    table = [0] * (phi.tgt + 1)
    for i in range(1, phi.tgt + 1):
        for j in range(1, phi.src + 1):
            if phi.table[j - 1] < i <= phi.table[j]:
                table[i] = j
                break
    return PointedMap(phi.tgt, phi.src, tuple(table))


def flat_elementary_coslice_matches(n: int) -> bool:
    """Enrichability at [n]: the interval inclusions [1] -> [n] number
    exactly n and their underlying pointed maps are the projections
    rho_1 .. rho_n of <n>."""
    from .gamma import rho

    inclusions = [interval_inclusion(i - 1, 1, n) for i in range(1, n + 1)]
    all_inert = [phi for phi in enumerate_monotone(1, n) if is_inert_delta(phi)]
    if sorted(phi.table for phi in inclusions) != sorted(phi.table for phi in all_inert):
        return False
    return all(underlying_gamma(phi).table == rho(n, i).table for i, phi in enumerate(inclusions, start=1))
