"""Level forests: chains of active maps of pointed sets, and their maps.

A forest of length n is a chain O_0 -> O_1 -> ... -> O_n of active maps
of pointed sets, stored as plain functions between the nonbasepoint
parts (an active map of pointed sets is exactly such a function).  The
last level O_n is the set of roots; O_i is the set of edges at depth
n - i, and every element of O_i with i >= 1 is a vertex whose input
edges are its preimages one level down.  A forest whose last level is a
single root is a level tree.

A map of forests (phi, f_*) consists of a monotone reindexing of levels
and componentwise active maps.  It lies in the forest category proper
when every component is additionally semi-inert (injective on nonzero
elements) and every naturality square is cartesian (equifibred).  Maps
are composed covariantly; the inert/active classification refers to the
opposite category, where these forests form a pattern, but no arrows
are ever reversed in code.

Conventions used throughout:
  * classification: a map is inert-class when phi is an interval
    inclusion, active-class when phi preserves endpoints and every
    component is bijective;
  * factorization: every map m factors as m = i . a (covariantly) with
    a active-class and i inert-class, which reads "inert followed by
    active" in the pattern's own composition order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fincat import FinSetMap, is_cartesian_square, pullback_finset
from .gamma import PointedMap, is_active as gamma_is_active
from .simplex import (
    SimplexMap,
    enumerate_monotone,
    factorize_delta,
    is_active_delta,
    is_inert_delta,
)

DEFAULT_MAX_HEIGHT = 3
DEFAULT_MAX_WIDTH = 4


class InvalidForest(ValueError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InvalidForestMap(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class Forest:
    """widths[i] = |O_i|; chain[i] : O_i -> O_{i+1} on nonbasepoint parts."""

    widths: tuple[int, ...]
    chain: tuple[FinSetMap, ...]

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(self.widths))
        object.__setattr__(self, "chain", tuple(self.chain))
        if len(self.widths) == 0:
            raise InvalidForest("a forest has at least one level")
        if len(self.chain) != len(self.widths) - 1:
            raise InvalidForest("chain length must be number of levels minus one")
        for i, step in enumerate(self.chain):
            if step.src_size != self.widths[i] or step.tgt_size != self.widths[i + 1]:
                raise InvalidForest(f"chain step {i} has wrong sizes", index=i)

    @property
    def length(self) -> int:
        return len(self.widths) - 1

    @property
    def single_rooted(self) -> bool:
        return self.widths[-1] == 1

    def chain_map(self, i: int, j: int) -> FinSetMap:
        """Composite O_i -> O_j for i <= j."""
        m = FinSetMap.identity(self.widths[i])
        for k in range(i, j):
            m = m.then(self.chain[k])
        return m

    def key(self):
        return (self.widths, tuple(step.table for step in self.chain))

    def total_size(self) -> int:
        return sum(self.widths)

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "widths": list(self.widths),
            "chain": [step.to_json() for step in self.chain],
        }

    @staticmethod
    def from_json(data: dict) -> "Forest":
        chain = tuple(FinSetMap.from_json(c) for c in data["chain"])
        if "widths" in data:
            widths = tuple(data["widths"])
        elif chain:
            widths = tuple(c.src_size for c in chain) + (chain[-1].tgt_size,)
        else:
            raise InvalidForest("length-0 forest needs explicit widths")
        return Forest(widths, chain)


def eta() -> Forest:
    """The edge: the length-0 forest on a single element."""
    return Forest((1,), ())


def edge_forest(k: int) -> Forest:
    """The length-0 forest on <k>: k disjoint edges."""
    return Forest((k,), ())


def corolla(n: int) -> Forest:
    """The tree with one vertex and n leaves."""
    return Forest((n, 1), (FinSetMap(n, 1, (0,) * n),))


def make_forest(chain_of_pointed: list[PointedMap], at: int | None = None) -> Forest:
    """Build a forest from a composable chain of pointed maps, which must
    all be active; rejects non-active entries with their index.  A
    length-0 chain needs its object size via ``at`` (so
    ``make_forest([], at=1)`` is the edge)."""
    if not chain_of_pointed:
        if at is None:
            raise InvalidForest("a length-0 chain needs its object size (at=...)")
        return Forest((at,), ())
    fin_chain = []
    for i, f in enumerate(chain_of_pointed):
        if not gamma_is_active(f):
            raise InvalidForest(f"chain arrow {i} is not active", index=i)
        fin_chain.append(FinSetMap(f.src, f.tgt, tuple(f.table[x] - 1 for x in range(1, f.src + 1))))
        if i > 0 and chain_of_pointed[i - 1].tgt != f.src:
            raise InvalidForest(f"chain arrows {i - 1}, {i} not composable", index=i)
    widths = tuple(f.src for f in chain_of_pointed) + (chain_of_pointed[-1].tgt,)
    return Forest(widths, tuple(fin_chain))


@dataclass(frozen=True)
class ForestClass:
    inert: bool
    active: bool


@dataclass(frozen=True)
class ForestMap:
    """(phi, f_*): src -> tgt with components f_i : O_i -> P_phi(i).

    ``in_pre`` means the naturality squares commute; ``in_plus`` adds
    componentwise semi-inertness and cartesianness of every square.
    ``witness`` explains the first failed condition, if any.
    """

    src: Forest
    tgt: Forest
    phi: SimplexMap
    components: tuple[FinSetMap, ...]
    in_pre: bool
    in_plus: bool
    witness: object

    def component(self, i: int) -> FinSetMap:
        return self.components[i]

    def key(self):
        return (self.src.key(), self.tgt.key(), self.phi.table, tuple(c.table for c in self.components))

    def __repr__(self):
        return f"ForestMap(phi={self.phi.table}, components={[c.table for c in self.components]})"


def _check_shapes(src: Forest, tgt: Forest, phi: SimplexMap, components):
    if phi.src != src.length or phi.tgt != tgt.length:
        raise InvalidForestMap(
            f"phi must be [{src.length}] -> [{tgt.length}], got [{phi.src}] -> [{phi.tgt}]"
        )
    if len(components) != src.length + 1:
        raise InvalidForestMap("one component per source level required")
    for i, f in enumerate(components):
        if f.src_size != src.widths[i] or f.tgt_size != tgt.widths[phi(i)]:
            raise InvalidForestMap(f"component {i} has wrong sizes", witness=("shape", i))


def forest_map_conditions(src: Forest, tgt: Forest, phi: SimplexMap, components):
    """Return (in_pre, in_plus, witness).  Naturality and cartesianness
    are checked on consecutive squares; the rest follows by pasting."""
    for i in range(src.length):
        f_i, f_j = components[i], components[i + 1]
        oc = src.chain[i]
        pc = tgt.chain_map(phi(i), phi(i + 1))
        if f_i.then(pc).table != oc.then(f_j).table:
            return False, False, ("naturality", i)
    for i, f in enumerate(components):
        if not f.is_injective():
            return True, False, ("semi_inert", i)
    for i in range(src.length):
        f_i, f_j = components[i], components[i + 1]
        oc = src.chain[i]
        pc = tgt.chain_map(phi(i), phi(i + 1))
        if not is_cartesian_square(top=f_i, bottom=f_j, left=oc, right=pc):
            return True, False, ("cartesian", i)
    return True, True, None


def validate_forest_map(src: Forest, tgt: Forest, phi: SimplexMap, components) -> ForestMap:
    """Build a ForestMap, computing its flags; raises only on shape
    mismatch, so rejected conditions are reported in the witness."""
    components = tuple(components)
    _check_shapes(src, tgt, phi, components)
    in_pre, in_plus, witness = forest_map_conditions(src, tgt, phi, components)
    return ForestMap(src, tgt, phi, components, in_pre, in_plus, witness)


def plus_map(src: Forest, tgt: Forest, phi: SimplexMap, components) -> ForestMap:
    """Like validate_forest_map but insists on in_plus."""
    m = validate_forest_map(src, tgt, phi, components)
    if not m.in_plus:
        raise InvalidForestMap("map is not in the forest category", witness=m.witness)
    return m


def identity_forest_map(F: Forest) -> ForestMap:
    return plus_map(
        F, F, SimplexMap.identity(F.length), tuple(FinSetMap.identity(w) for w in F.widths)
    )


def compose_forest_maps(second: ForestMap, first: ForestMap) -> ForestMap:
    """second after first (covariant composition)."""
    if first.tgt.key() != second.src.key():
        raise InvalidForestMap("maps not composable")
    phi = first.phi.then(second.phi)
    components = tuple(
        first.components[i].then(second.components[first.phi(i)]) for i in range(first.src.length + 1)
    )
    return validate_forest_map(first.src, second.tgt, phi, components)


def classify_forest_map(m: ForestMap) -> ForestClass:
    if not m.in_plus:
        raise InvalidForestMap("only maps in the forest category are classified", witness=m.witness)
    inert = is_inert_delta(m.phi)
    active = is_active_delta(m.phi) and all(f.is_bijective() for f in m.components)
    return ForestClass(inert, active)


def restrict_forest(G: Forest, phi: SimplexMap) -> tuple[Forest, ForestMap]:
    """The chain G o phi together with (phi, identities) into G.

    This is the universal lift of phi into G: every map over phi factors
    through it by a map over the identity.
    """
    if phi.tgt != G.length:
        raise InvalidForestMap("phi must land in the target's levels")
    widths = tuple(G.widths[phi(i)] for i in range(phi.src + 1))
    chain = tuple(G.chain_map(phi(i), phi(i + 1)) for i in range(phi.src))
    F = Forest(widths, chain)
    lift = plus_map(F, G, phi, tuple(FinSetMap.identity(w) for w in widths))
    return F, lift


def _injections(n: int, m: int):
    for image in itertools.permutations(range(m), n):
        yield FinSetMap(n, m, image)


def _fiber_bijection_choices(oc_fibers, pc_fibers, f_up: FinSetMap):
    """For each element y upstairs, ways to biject the source fiber over
    y onto the target fiber over f_up(y); yields full component tables."""
    per_y = []
    for y in range(len(oc_fibers)):
        src_fiber = oc_fibers[y]
        tgt_fiber = pc_fibers[f_up(y)]
        if len(src_fiber) != len(tgt_fiber):
            return
        per_y.append([list(zip(src_fiber, perm)) for perm in itertools.permutations(tgt_fiber)])
    n_src = sum(len(f) for f in oc_fibers)
    for combo in itertools.product(*per_y):
        table = [0] * n_src
        for assignment in combo:
            for x, p in assignment:
                table[x] = p
        yield tuple(table)


def forest_maps(F: Forest, G: Forest, plus_only: bool = True):
    """All maps F -> G; with plus_only the maps of the forest category.

    Enumerated per monotone phi: the top component ranges over
    injections (or all maps), lower components are then forced fiberwise
    by the cartesian condition (or freely chosen under naturality when
    plus_only is False).
    """
    out = []
    for phi in enumerate_monotone(F.length, G.length):
        if plus_only:
            out.extend(_plus_maps_over(F, G, phi))
        else:
            out.extend(_pre_maps_over(F, G, phi))
    return out


def _plus_maps_over(F: Forest, G: Forest, phi: SimplexMap):
    m = F.length
    tops = [t for t in _injections(F.widths[m], G.widths[phi(m)])]
    stack = [[t] for t in tops]
    for i in range(m - 1, -1, -1):
        oc_fibers = [F.chain[i].fibers()[y] for y in range(F.widths[i + 1])]
        pc = G.chain_map(phi(i), phi(i + 1))
        pc_fibers = pc.fibers()
        new_stack = []
        for partial in stack:
            f_up = partial[0]
            for table in _fiber_bijection_choices(oc_fibers, pc_fibers, f_up):
                new_stack.append([FinSetMap(F.widths[i], G.widths[phi(i)], table)] + partial)
        stack = new_stack
    maps = []
    for components in stack:
        fm = ForestMap(F, G, phi, tuple(components), True, True, None)
        maps.append(fm)
    return maps


def _pre_maps_over(F: Forest, G: Forest, phi: SimplexMap):
    m = F.length
    level_choices = []
    for i in range(m + 1):
        level_choices.append(list(range(G.widths[phi(i)])))
    maps = []

    def build(i, components):
        if i < 0:
            fm = validate_forest_map(F, G, phi, tuple(reversed(components)))
            if fm.in_pre:
                maps.append(fm)
            return
        pc = G.chain_map(phi(i), phi(i + 1)) if i < m else None
        for table in itertools.product(level_choices[i], repeat=F.widths[i]):
            f_i = FinSetMap(F.widths[i], G.widths[phi(i)], table)
            if i < m:
                f_up = components[-1]
                oc = F.chain[i]
                if f_i.then(pc).table != oc.then(f_up).table:
                    continue
            build(i - 1, components + [f_i])

    # build from the top level down so naturality prunes early
    def build_top():
        for table in itertools.product(level_choices[m], repeat=F.widths[m]):
            build(m - 1, [FinSetMap(F.widths[m], G.widths[phi(m)], table)])

    build_top()
    return maps


def factorize_forest_map(m: ForestMap) -> tuple[ForestMap, ForestMap]:
    """Split m = i . a (covariantly) with a active-class and i
    inert-class; returns (inert_part, active_part).

    The underlying monotone map factors uniquely as an endpoint-
    preserving map followed by an interval inclusion; the middle forest
    is the target chain pulled back along the top component, relabeled
    canonically so the factorization is deterministic.
    """
    if not m.in_plus:
        raise InvalidForestMap("only maps in the forest category factor", witness=m.witness)
    cls = classify_forest_map(m)
    if cls.inert:
        return m, identity_forest_map(m.src)
    if cls.active:
        return identity_forest_map(m.tgt), m
    F, G, phi = m.src, m.tgt, m.phi
    alpha, iota = factorize_delta(phi)
    lo = phi(0)
    top = m.components[F.length]
    hi = phi(F.length)
    # middle level j (0 <= j <= k) sits over target level lo + j
    mid_widths = []
    mid_level_pairs = []
    for j in range(alpha.tgt + 1):
        pb = pullback_finset(top, G.chain_map(lo + j, hi))
        pairs = sorted(pb.pairs, key=lambda xp: (xp[1], xp[0]))
        mid_level_pairs.append(pairs)
        mid_widths.append(len(pairs))
    mid_chain = []
    for j in range(alpha.tgt):
        index_up = {pair: t for t, pair in enumerate(mid_level_pairs[j + 1])}
        step = G.chain[lo + j]
        table = tuple(index_up[(x, step(p))] for (x, p) in mid_level_pairs[j])
        mid_chain.append(FinSetMap(mid_widths[j], mid_widths[j + 1], table))
    M = Forest(tuple(mid_widths), tuple(mid_chain))
    g_components = tuple(
        FinSetMap(mid_widths[j], G.widths[lo + j], tuple(p for (_, p) in mid_level_pairs[j]))
        for j in range(alpha.tgt + 1)
    )
    inert_part = plus_map(M, G, iota, g_components)
    h_components = []
    for i in range(F.length + 1):
        j = alpha(i)
        index = {pair: t for t, pair in enumerate(mid_level_pairs[j])}
        up = F.chain_map(i, F.length)
        f_i = m.components[i]
        table = tuple(index[(up(x), f_i(x))] for x in range(F.widths[i]))
        h_components.append(FinSetMap(F.widths[i], mid_widths[j], table))
    active_part = plus_map(F, M, alpha, tuple(h_components))
    composite = compose_forest_maps(inert_part, active_part)
    if composite.key() != m.key():
        raise InvalidForestMap("internal error: factorization does not recompose")
    if not classify_forest_map(active_part).active or not classify_forest_map(inert_part).inert:
        raise InvalidForestMap("internal error: factor parts are misclassified")
    return inert_part, active_part


def forest_diagonal_fillers(arr_i: ForestMap, arr_a: ForestMap, arr_t: ForestMap, arr_b: ForestMap):
    """Fillers for a lifting square, phrased covariantly.

    Given arr_i : B -> A inert-class, arr_a : D -> C active-class, and
    arr_t : C -> A, arr_b : D -> B with t . a == i . b, enumerate all
    s : C -> B with i . s == t and s . a == b.
    """
    assert compose_forest_maps(arr_t, arr_a).key() == compose_forest_maps(arr_i, arr_b).key()
    fillers = []
    for s in forest_maps(arr_a.tgt, arr_i.src):
        if (
            compose_forest_maps(arr_i, s).key() == arr_t.key()
            and compose_forest_maps(s, arr_a).key() == arr_b.key()
        ):
            fillers.append(s)
    return fillers


# ---------------------------------------------------------------------------
# isomorphism, canonical forms, enumeration


def forest_encoding(F: Forest):
    """Nested-multiset encoding: isomorphic forests (levelwise bijections
    commuting with the chain) get equal encodings."""
    enc = [[() for _ in range(F.widths[0])]]
    for i in range(1, F.length + 1):
        kids = [[] for _ in range(F.widths[i])]
        for x, parent in enumerate(F.chain[i - 1].table):
            kids[parent].append(enc[i - 1][x])
        enc.append([tuple(sorted(k)) for k in kids])
    return (F.length, tuple(sorted(enc[F.length])))


def forest_from_encoding(encoding) -> Forest:
    """Canonical concrete forest realizing an encoding: elements at each
    level are laid out in depth-first order of the sorted encoding."""
    length, roots = encoding
    widths = [0] * (length + 1)
    parents = [dict() for _ in range(length)]

    def place(node, level):
        idx = widths[level]
        widths[level] += 1
        for child in node:
            cidx = place(child, level - 1)
            parents[level - 1][cidx] = idx
        return idx

    for r in sorted(roots):
        place(r, length)
    chain = tuple(
        FinSetMap(widths[i], widths[i + 1], tuple(parents[i][x] for x in range(widths[i])))
        for i in range(length)
    )
    return Forest(tuple(widths), chain)


def canonical_forest(F: Forest) -> Forest:
    return forest_from_encoding(forest_encoding(F))


def are_isomorphic(F: Forest, G: Forest) -> bool:
    return forest_encoding(F) == forest_encoding(G)


def automorphisms(F: Forest):
    """All tuples (sigma_0..sigma_n) of levelwise bijections commuting
    with the chain, built top-down fiber by fiber."""
    top_perms = [FinSetMap(F.widths[-1], F.widths[-1], perm) for perm in itertools.permutations(range(F.widths[-1]))]
    stack = [[p] for p in top_perms]
    for i in range(F.length - 1, -1, -1):
        fibers = F.chain[i].fibers()
        new_stack = []
        for partial in stack:
            sigma_up = partial[0]
            for table in _fiber_bijection_choices(fibers, fibers, sigma_up):
                new_stack.append([FinSetMap(F.widths[i], F.widths[i], table)] + partial)
        stack = new_stack
    return [tuple(levels) for levels in stack]


def automorphism_count(F: Forest) -> int:
    return len(automorphisms(F))


def enumerate_concrete_forests(max_length: int, max_width: int, single_rooted: bool = False,
                               exact_length: int | None = None, total_cap: int | None = None):
    """All concrete forests within the bounds (not deduplicated)."""
    lengths = [exact_length] if exact_length is not None else list(range(max_length + 1))
    for n in lengths:
        for widths in itertools.product(range(max_width + 1), repeat=n + 1):
            if single_rooted and widths[-1] != 1:
                continue
            if total_cap is not None and sum(widths) > total_cap:
                continue
            chain_options = [
                [FinSetMap(widths[i], widths[i + 1], t)
                 for t in itertools.product(range(widths[i + 1]), repeat=widths[i])]
                if widths[i + 1] > 0 or widths[i] == 0 else []
                for i in range(n)
            ]
            if any(len(opt) == 0 for opt in chain_options):
                continue
            for chain in itertools.product(*chain_options):
                yield Forest(widths, chain)


def enumerate_trees(pattern: str, max_height: int, max_width: int,
                    exact_height: int | None = None):
    """Isomorphism classes of level trees within the bounds, as canonical
    concrete forests in a deterministic order.

    pattern "gamma" enumerates all level trees; pattern "terminal"
    enumerates the linear chains (every level a single element).
    """
    if pattern not in ("gamma", "terminal"):
        raise ValueError(f"unknown pattern {pattern!r}")
    if max_height > 6 or max_width > 6:
        raise ValueError("bounds exceed the supported enumeration window")
    seen = {}
    for F in enumerate_concrete_forests(max_height, max_width, single_rooted=True,
                                        exact_length=exact_height):
        if pattern == "terminal" and any(w != 1 for w in F.widths):
            continue
        enc = forest_encoding(F)
        if enc not in seen:
            seen[enc] = forest_from_encoding(enc)
    return [seen[enc] for enc in sorted(seen)]


def level_tree_oracle(max_height: int, max_width: int):
    """Independent count of level-tree isomorphism classes: a tree of
    height h is a multiset of trees of height h - 1 hanging under a
    single root, subject to every level's total size staying within
    max_width.  Bypasses the Forest machinery entirely.

    Returns (count, sorted list of forest encodings).
    """
    by_height = {0: [((), (1,))]}
    for h in range(1, max_height + 1):
        found = {}
        for k in range(max_width + 1):
            for combo in itertools.combinations_with_replacement(by_height[h - 1], k):
                vec = [0] * h
                ok = True
                for _, v in combo:
                    for lvl, c in enumerate(v):
                        vec[lvl] += c
                        if vec[lvl] > max_width:
                            ok = False
                if not ok:
                    continue
                enc = tuple(sorted(e for e, _ in combo))
                found[enc] = tuple(vec) + (1,)
        by_height[h] = sorted(found.items())
    encodings = []
    for h in range(max_height + 1):
        for enc, _ in by_height[h]:
            encodings.append((h, (enc,)))
    encodings.sort()
    return len(encodings), encodings


# ---------------------------------------------------------------------------
# corollas and the pointed-set shadow


def corolla_count(F: Forest) -> int:
    """Number of vertices: everything above level 0."""
    return sum(F.widths[1:])


def vertex_index(F: Forest, level: int, element: int) -> int:
    """1-based index of a vertex in the pointed set of vertices of F,
    counting level by level from level 1 upward."""
    if level < 1:
        raise ValueError("vertices live at level >= 1")
    return sum(F.widths[1:level]) + element + 1


def underlying_gamma_forest(m: ForestMap) -> PointedMap:
    """The pointed map of vertex sets <corollas(tgt)> -> <corollas(src)>:
    each target vertex goes to the source vertex whose image subtree
    contains it, or to the basepoint if there is none."""
    if not m.in_plus:
        raise InvalidForestMap("the vertex-set shadow needs a forest-category map", witness=m.witness)
    F, G, phi = m.src, m.tgt, m.phi
    table = [0] * (corolla_count(G) + 1)
    for j in range(1, G.length + 1):
        covering = None
        for i in range(1, F.length + 1):
            if phi(i - 1) < j <= phi(i):
                covering = i
                break
        if covering is None:
            continue
        up = G.chain_map(j, phi(covering))
        f_i = m.components[covering]
        preimage = {f_i(v): v for v in range(F.widths[covering])}
        for u in range(G.widths[j]):
            z = up(u)
            if z in preimage:
                table[vertex_index(G, j, u)] = vertex_index(F, covering, preimage[z])
    return PointedMap(corolla_count(G), corolla_count(F), tuple(table))


# ---------------------------------------------------------------------------
# linearisability


def active_class_maps_from_corollas(T: Forest):
    """Covariant active-class maps from a length-1 chain into T; these
    incarnate the pattern's active arrows from T to an elementary.  The
    endpoint-preserving [1] -> [length] is unique, so a map amounts to a
    pair of bijections onto T's two end levels, which pins the source
    chain."""
    out = []
    alpha = SimplexMap(1, T.length, (0, T.length))
    comp = T.chain_map(0, T.length)
    for b0 in itertools.permutations(range(T.widths[0])):
        f0 = FinSetMap(T.widths[0], T.widths[0], b0)
        for b1 in itertools.permutations(range(T.widths[-1])):
            f1 = FinSetMap(T.widths[-1], T.widths[-1], b1)
            src_chain = f0.then(comp).then(_invert(FinSetMap(T.widths[-1], T.widths[-1], b1)))
            C = Forest((T.widths[0], T.widths[-1]), (src_chain,))
            fm = validate_forest_map(C, T, alpha, (f0, f1))
            if fm.in_plus and classify_forest_map(fm).active:
                out.append(fm)
    return out


def _inverse_table(perm: tuple[int, ...]):
    inv = [0] * len(perm)
    for x, y in enumerate(perm):
        inv[y] = x
    return inv


def _invert(m: FinSetMap) -> FinSetMap:
    if not m.is_bijective():
        raise ValueError("only bijections invert")
    return FinSetMap(m.tgt_size, m.src_size, tuple(_inverse_table(m.table)))


def maps_equivalent_over_target(e1: ForestMap, e2: ForestMap) -> bool:
    """Whether two maps into the same object agree up to precomposition
    with an isomorphism of their sources."""
    if e1.tgt.key() != e2.tgt.key():
        return False
    for s in forest_maps(e1.src, e2.src):
        if not classify_forest_map(s).active or not all(c.is_bijective() for c in s.components):
            continue
        if s.phi.table != tuple(range(e1.src.length + 1)):
            continue
        if compose_forest_maps(e2, s).key() == e1.key():
            return True
    return False


class GammaLinearisabilityWindow:
    """The pointed-set pattern on objects <0>..<max_n>: active maps to
    the elementary <1>."""

    def __init__(self, max_n: int):
        self.max_n = max_n

    def window_objects(self):
        return list(range(self.max_n + 1))

    def elementary_active_maps(self, n: int):
        from .gamma import enumerate_gamma_maps, is_active

        return [("<1>", f) for f in enumerate_gamma_maps(n, 1, is_active)]

    def maps_equivalent(self, obj, a, b):
        return a.table == b.table


class PlusLinearisabilityWindow:
    """The single-rooted tree pattern on a window."""

    def __init__(self, max_height: int, max_width: int):
        self.trees = enumerate_trees("gamma", max_height, max_width)

    def window_objects(self):
        return self.trees

    def elementary_active_maps(self, T: Forest):
        return [("corolla", e) for e in active_class_maps_from_corollas(T)]

    def maps_equivalent(self, obj, a, b):
        return maps_equivalent_over_target(a, b)


def check_linearisable(window) -> tuple[bool, object]:
    """Every window object must admit an essentially unique active map to
    an elementary (or none).  Returns (ok, witness)."""
    for obj in window.window_objects():
        maps = window.elementary_active_maps(obj)
        for (_, a), (_, b) in itertools.combinations(maps, 2):
            if not window.maps_equivalent(obj, a, b):
                return False, (obj, a, b)
    return True, None


# ---------------------------------------------------------------------------
# export


def forest_to_dot(F: Forest, name: str = "tree") -> str:
    """DOT rendering: circles for vertices, points for leaf and root
    tips, one graph edge per forest edge."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for x in range(F.widths[0]):
        lines.append(f'  tip_0_{x} [shape=point, label=""];')
    for i in range(1, F.length + 1):
        for v in range(F.widths[i]):
            lines.append(f'  v_{i}_{v} [shape=circle, label="{vertex_index(F, i, v)}"];')
    for r in range(F.widths[F.length]):
        lines.append(f'  root_{r} [shape=point, label=""];')
    for i in range(F.length):
        for x in range(F.widths[i]):
            src = f"tip_0_{x}" if i == 0 else f"v_{i}_{x}"
            lines.append(f"  {src} -> v_{i + 1}_{F.chain[i](x)};")
    for r in range(F.widths[F.length]):
        src = f"tip_0_{r}" if F.length == 0 else f"v_{F.length}_{r}"
        lines.append(f"  {src} -> root_{r};")
    lines.append("}")
    return "\n".join(lines)
