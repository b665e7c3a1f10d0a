"""Finite sets, finite categories, and set-valued diagrams.

Everything is addressed by dense integer indices: a finite set of size n
is {0, ..., n-1}, objects and arrows of a category are positions in a
list.  Payloads are opaque to this module.  All structures are immutable
after construction and every operation is a pure function.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

# Shapes with more composable pairs than this are validated lazily.
EAGER_VALIDATION_LIMIT = 10_000


class DiagramError(ValueError):
    """Validation failure; ``witness`` holds the offending data."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NonCommutingSquare(DiagramError):
    pass


@dataclass(frozen=True)
class FinSetMap:
    """A function {0..src_size-1} -> {0..tgt_size-1} given by its table."""

    src_size: int
    tgt_size: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        if len(self.table) != self.src_size:
            raise ValueError(f"table length {len(self.table)} != src_size {self.src_size}")
        for x, y in enumerate(self.table):
            if not 0 <= y < self.tgt_size:
                raise ValueError(f"table[{x}] = {y} not a valid target index (tgt_size {self.tgt_size})")

    def __call__(self, x: int) -> int:
        return self.table[x]

    @staticmethod
    def identity(n: int) -> "FinSetMap":
        return FinSetMap(n, n, tuple(range(n)))

    def then(self, other: "FinSetMap") -> "FinSetMap":
        """Diagrammatic composite: first self, then other."""
        if self.tgt_size != other.src_size:
            raise ValueError("maps not composable")
        return FinSetMap(self.src_size, other.tgt_size, tuple(other.table[y] for y in self.table))

    def fibers(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(self.tgt_size)]
        for x, y in enumerate(self.table):
            out[y].append(x)
        return tuple(tuple(f) for f in out)

    def is_injective(self) -> bool:
        return len(set(self.table)) == self.src_size

    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.tgt_size

    def is_bijective(self) -> bool:
        return self.src_size == self.tgt_size and self.is_injective()

    def to_json(self) -> dict:
        return {"src_size": self.src_size, "tgt_size": self.tgt_size, "table": list(self.table)}

    @staticmethod
    def from_json(data: dict) -> "FinSetMap":
        return FinSetMap(data["src_size"], data["tgt_size"], tuple(data["table"]))


def compose(g: FinSetMap, f: FinSetMap) -> FinSetMap:
    """g after f."""
    return f.then(g)


def all_maps(n: int, m: int):
    """All functions {0..n-1} -> {0..m-1}, lexicographic."""
    for table in itertools.product(range(m), repeat=n):
        yield FinSetMap(n, m, table)


class FinCategory:
    """A finite category: indexed objects and arrows with a composition table.

    ``arrows[k] = (src, tgt, payload)``.  ``composition[(f, g)]`` is the
    index of "f then g" and is defined exactly when ``tgt(f) == src(g)``.
    """

    def __init__(self, objects, arrows, composition, identities, validate=True):
        self.objects = list(objects)
        self.arrows = list(arrows)
        self.composition = dict(composition)
        self.identities = list(identities)
        self._validated = False
        n_pairs = sum(
            1
            for (f, g) in itertools.product(range(len(self.arrows)), repeat=2)
            if self.arrows[f][1] == self.arrows[g][0]
        ) if len(self.arrows) ** 2 <= 4 * EAGER_VALIDATION_LIMIT else EAGER_VALIDATION_LIMIT + 1
        if validate and n_pairs <= EAGER_VALIDATION_LIMIT:
            self.validate()

    def src(self, f: int) -> int:
        return self.arrows[f][0]

    def tgt(self, f: int) -> int:
        return self.arrows[f][1]

    def then(self, f: int, g: int) -> int:
        """Index of the composite "f then g"."""
        self._ensure_validated()
        return self.composition[(f, g)]

    def _ensure_validated(self):
        if not self._validated:
            self.validate()

    def validate(self):
        if self._validated:
            return
        if len(self.identities) != len(self.objects):
            raise DiagramError("one identity arrow per object required")
        for obj, e in enumerate(self.identities):
            if self.arrows[e][0] != obj or self.arrows[e][1] != obj:
                raise DiagramError(f"identity of object {obj} is not an endo-arrow", witness=e)
        for f in range(len(self.arrows)):
            for g in range(len(self.arrows)):
                defined = (f, g) in self.composition
                composable = self.tgt(f) == self.src(g)
                if defined != composable:
                    raise DiagramError("composition defined iff composable fails", witness=(f, g))
                if defined:
                    h = self.composition[(f, g)]
                    if self.src(h) != self.src(f) or self.tgt(h) != self.tgt(g):
                        raise DiagramError("composite has wrong endpoints", witness=(f, g))
        for obj, e in enumerate(self.identities):
            for f in range(len(self.arrows)):
                if self.src(f) == obj and self.composition[(e, f)] != f:
                    raise DiagramError("left unit law fails", witness=(e, f))
                if self.tgt(f) == obj and self.composition[(f, e)] != f:
                    raise DiagramError("right unit law fails", witness=(f, e))
        for f in range(len(self.arrows)):
            for g in range(len(self.arrows)):
                if self.tgt(f) != self.src(g):
                    continue
                fg = self.composition[(f, g)]
                for h in range(len(self.arrows)):
                    if self.tgt(g) != self.src(h):
                        continue
                    if self.composition[(fg, h)] != self.composition[(f, self.composition[(g, h)])]:
                        raise DiagramError("associativity fails", witness=(f, g, h))
        self._validated = True

    def to_dot(self, name="shape") -> str:
        lines = [f"digraph {name} {{"]
        for i, payload in enumerate(self.objects):
            lines.append(f'  o{i} [label="{payload}"];')
        for k, (s, t, payload) in enumerate(self.arrows):
            if k in self.identities:
                continue
            lines.append(f'  o{s} -> o{t} [label="{payload}"];')
        lines.append("}")
        return "\n".join(lines)


def discrete_category(n: int) -> FinCategory:
    arrows = [(i, i, f"id_{i}") for i in range(n)]
    comp = {(i, i): i for i in range(n)}
    return FinCategory(list(range(n)), arrows, comp, list(range(n)))


def free_category_on_arrows(n_objects: int, edges: list[tuple[int, int]]) -> FinCategory:
    """Category with the given objects, identities, and one arrow per edge.

    Only valid when no two edges are composable (the shapes used by the
    small diagram examples: discrete, single arrows, cospans, spans).
    """
    arrows = [(i, i, f"id_{i}") for i in range(n_objects)]
    identities = list(range(n_objects))
    for (s, t) in edges:
        if s == t:
            raise ValueError("loops would need explicit composites")
        arrows.append((s, t, f"e{len(arrows) - n_objects}"))
    comp = {}
    for f, (fs, ft, _) in enumerate(arrows):
        for g, (gs, gt, _) in enumerate(arrows):
            if ft != gs:
                continue
            if f < n_objects:
                comp[(f, g)] = g
            elif g < n_objects:
                comp[(f, g)] = f
            else:
                raise ValueError("edges compose; use an explicit FinCategory")
    return FinCategory(list(range(n_objects)), arrows, comp, identities)


class SetDiagram:
    """A functor shape -> FinSet: a size per object, a FinSetMap per arrow.

    Transport for identity arrows may be omitted.  Functoriality is
    checked eagerly on construction for small shapes, lazily above
    ``EAGER_VALIDATION_LIMIT`` composable pairs.
    """

    def __init__(self, shape: FinCategory, sizes, transport, validate=True):
        self.shape = shape
        self.sizes = list(sizes)
        self.transport = {}
        for k, (s, t, _) in enumerate(shape.arrows):
            if k in transport:
                m = transport[k]
            elif k in shape.identities:
                m = FinSetMap.identity(self.sizes[s])
            else:
                raise DiagramError(f"missing transport for arrow {k}")
            if m.src_size != self.sizes[s] or m.tgt_size != self.sizes[t]:
                raise DiagramError(f"transport for arrow {k} has wrong sizes", witness=k)
            self.transport[k] = m
        self._validated = False
        n_arrows = len(shape.arrows)
        if validate and n_arrows * n_arrows <= EAGER_VALIDATION_LIMIT:
            self.validate()

    def validate(self):
        if self._validated:
            return
        self.shape.validate()
        for obj, e in enumerate(self.shape.identities):
            if self.transport[e].table != tuple(range(self.sizes[obj])):
                raise DiagramError("transport of identity is not the identity", witness=e)
        for (f, g), h in self.shape.composition.items():
            if self.transport[f].then(self.transport[g]).table != self.transport[h].table:
                raise DiagramError(
                    "transport not functorial", witness=(f, g)
                )
        self._validated = True

    def elements(self):
        for obj, size in enumerate(self.sizes):
            for x in range(size):
                yield (obj, x)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class Colimit:
    classes: tuple[tuple[tuple[int, int], ...], ...]
    assign: dict

    @property
    def size(self) -> int:
        return len(self.classes)


def colimit_set(d: SetDiagram) -> Colimit:
    """Disjoint union of the values, quotiented by x ~ transport(f)(x).

    This is the set-level colimit: pi_0 of the category of elements.
    """
    d.validate()
    offsets = []
    total = 0
    for size in d.sizes:
        offsets.append(total)
        total += size
    uf = _UnionFind(total)
    for k, (s, t, _) in enumerate(d.shape.arrows):
        m = d.transport[k]
        for x in range(m.src_size):
            uf.union(offsets[s] + x, offsets[t] + m(x))
    reps = {}
    classes = []
    assign = {}
    for obj, size in enumerate(d.sizes):
        for x in range(size):
            r = uf.find(offsets[obj] + x)
            if r not in reps:
                reps[r] = len(classes)
                classes.append([])
            c = reps[r]
            classes[c].append((obj, x))
            assign[(obj, x)] = c
    return Colimit(tuple(tuple(c) for c in classes), assign)


def limit_over_cone(d: SetDiagram) -> list[tuple[int, ...]]:
    """Matching families: one element per object, compatible with every
    transport.  Returned in lexicographic order."""
    d.validate()
    n = len(d.sizes)
    arrows = [(k, s, t) for k, (s, t, _) in enumerate(d.shape.arrows) if k not in d.shape.identities]
    families = []

    def extend(partial):
        obj = len(partial)
        if obj == n:
            families.append(tuple(partial))
            return
        for x in range(d.sizes[obj]):
            partial.append(x)
            ok = True
            for k, s, t in arrows:
                if s < len(partial) and t < len(partial):
                    if d.transport[k](partial[s]) != partial[t]:
                        ok = False
                        break
            if ok:
                extend(partial)
            partial.pop()

    extend([])
    return families


@dataclass(frozen=True)
class Pullback:
    apex_size: int
    pairs: tuple[tuple[int, int], ...]
    proj1: FinSetMap
    proj2: FinSetMap


def pullback_finset(f: FinSetMap, g: FinSetMap) -> Pullback:
    """Apex {(a, b) : f(a) = g(b)} with its two projections, pairs in
    lexicographic order."""
    if f.tgt_size != g.tgt_size:
        raise DiagramError("pullback legs must share a target")
    pairs = tuple(
        (a, b) for a in range(f.src_size) for b in range(g.src_size) if f(a) == g(b)
    )
    proj1 = FinSetMap(len(pairs), f.src_size, tuple(a for a, _ in pairs))
    proj2 = FinSetMap(len(pairs), g.src_size, tuple(b for _, b in pairs))
    return Pullback(len(pairs), pairs, proj1, proj2)


def is_cartesian_square(top: FinSetMap, bottom: FinSetMap, left: FinSetMap, right: FinSetMap) -> bool:
    """Whether the commuting square

        A --top--> B
        |          |
      left       right
        v          v
        C -bottom-> D

    is a pullback: the comparison A -> C x_D B, a |-> (left(a), top(a)),
    is a bijection.  Raises NonCommutingSquare with a witness element if
    the square does not commute.
    """
    if top.src_size != left.src_size:
        raise DiagramError("top and left must share their source")
    for a in range(top.src_size):
        if bottom(left(a)) != right(top(a)):
            raise NonCommutingSquare("square does not commute", witness=a)
    pb = pullback_finset(bottom, right)
    index = {pair: i for i, pair in enumerate(pb.pairs)}
    seen = set()
    for a in range(top.src_size):
        i = index[(left(a), top(a))]
        if i in seen:
            return False
        seen.add(i)
    return len(seen) == pb.apex_size
