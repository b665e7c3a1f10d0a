"""Monoidal envelopes at set level: slice categories of partitioned
refinements, union-find colimits, corolla coproducts, cocartesian
regrouping lifts and the unit/counit triangle checks.

The envelope of a presheaf X at a forest T is the set-level colimit of
X over the category of refinements of T: forests B of the same length
with componentwise active legs B_i -> T_i commuting with the chains.
Two dials control the slice (both exposed, both reported):

  * ``strict`` selects which slice morphisms exist: maps of the forest
    category over the identity reindexing (default), or arbitrary
    componentwise-active naturals (the wider pre-category; transports
    along these only exist for special presheaves).
  * ``exclude_empty`` (default true) keeps only refinements whose legs
    are surjective, i.e. with no unused slot anywhere.  With empties
    included, degenerate refinements map into everything and the
    colimit collapses; both modes are computed.

Gluing granularity is the genuinely truncation-sensitive choice, so it
is explicit:

  * ``"profile"`` (default) glues only along slice morphisms that are
    bijective on every leg fiber (plus everything reachable from a
    totally empty refinement, which is what produces the documented
    collapse in the inclusive mode).  Classes then remember the
    partition profile, reproducing the classical envelope's object
    count: sizes 1..cap at the edge.
  * ``"plain"`` glues along every slice morphism, which is the literal
    one-categorical colimit; it identifies refinements across profiles
    and is the mode the corolla coproduct comparison surjects onto.

Sizes are capped per root of T (for trees this is the plain total-size
cap), which is the convention under which forest envelopes decompose
as products of tree envelopes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fincat import FinCategory, FinSetMap
from .forests import (
    Forest,
    ForestMap,
    corolla,
    forest_map_conditions,
    plus_map,
    validate_forest_map,
)
from .gamma import PointedMap
from .segal import MISSING, Presheaf, check_segal, SegalReport
from .simplex import SimplexMap

GLUING_MODES = ("profile", "plain", "none")


class EnvelopeError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class SliceObject:
    """A refinement of T: a forest B of the same length with active legs
    B_i -> T_i commuting with the chains."""

    forest: Forest
    legs: tuple[FinSetMap, ...]

    def key(self):
        return (self.forest.key(), tuple(l.table for l in self.legs))


def _commuting_legs(B: Forest, T: Forest, legs) -> bool:
    for i in range(B.length):
        if B.chain[i].then(legs[i + 1]).table != legs[i].then(T.chain[i]).table:
            return False
    return True


def slot_fibers(obj: SliceObject):
    """Per level, the refinement fiber over each slot (edge) of T."""
    return tuple(l.fibers() for l in obj.legs)


def _legs_surjective(obj: SliceObject) -> bool:
    return all(l.is_surjective() for l in obj.legs)


def enumerate_slice_objects(T: Forest, cap: int, exclude_empty: bool = True):
    """All refinements of T in which every slot of T is refined into at
    most cap pieces (and, with exclude_empty, at least one).

    Enumerated level by level with the leg data first, so elements sit
    grouped by slot (legs are monotone); every refinement is isomorphic
    to one of this shape, and the slot-permuted variants add nothing to
    any colimit.  Chains are enumerated under the commuting constraint
    directly.
    """
    n = T.length
    lo = 1 if exclude_empty else 0
    level_choices = []
    for i in range(n + 1):
        choices = []
        for sizes in itertools.product(range(lo, cap + 1), repeat=T.widths[i]):
            width = sum(sizes)
            table = tuple(t for t, s in enumerate(sizes) for _ in range(s))
            choices.append((sizes, FinSetMap(width, T.widths[i], table)))
        level_choices.append(choices)
    out = []

    def extend(i, widths, legs, chain):
        if i > n:
            out.append(SliceObject(Forest(tuple(widths), tuple(chain)), tuple(legs)))
            return
        for sizes, leg in level_choices[i]:
            width = sum(sizes)
            if i == 0:
                extend(1, [width], [leg], [])
                continue
            # chain step from the previous level: element e over slot t
            # must land in this level's fiber over T.chain(t)
            prev_leg = legs[-1]
            fibers = leg.fibers()
            pools = []
            ok = True
            for e in range(widths[-1]):
                target_slot = T.chain[i - 1](prev_leg(e))
                pool = fibers[target_slot]
                if not pool:
                    ok = False
                    break
                pools.append(pool)
            if not ok and widths[-1] > 0:
                continue
            for combo in itertools.product(*pools):
                step = FinSetMap(widths[-1], width, combo)
                extend(i + 1, widths + [width], legs + [leg], chain + [step])

    extend(0, [], [], [])
    out.sort(key=lambda o: o.key())
    return out


def slice_morphisms(a: SliceObject, b: SliceObject, T: Forest, strict: bool = True):
    """Component tuples g_i : A_i -> B_i commuting with chains and legs;
    with ``strict`` only those that are maps of the forest category."""
    A, B = a.forest, b.forest
    pools = []
    for i in range(A.length + 1):
        cands = []
        for t in itertools.product(range(B.widths[i]), repeat=A.widths[i]):
            g = FinSetMap(A.widths[i], B.widths[i], t)
            if g.then(b.legs[i]).table != a.legs[i].table:
                continue
            cands.append(g)
        pools.append(cands)
    out = []
    for combo in itertools.product(*pools):
        in_pre, in_plus, _ = forest_map_conditions(A, B, SimplexMap.identity(A.length), combo)
        if not in_pre:
            continue
        if strict and not in_plus:
            continue
        out.append(combo)
    return out


def _leg_fiber_bijective(a: SliceObject, b: SliceObject, combo) -> bool:
    for i, g in enumerate(combo):
        src_fibers = a.legs[i].fibers()
        tgt_fibers = b.legs[i].fibers()
        for t in range(len(src_fibers)):
            image = {g(e) for e in src_fibers[t]}
            if len(image) != len(src_fibers[t]) or image != set(tgt_fibers[t]):
                return False
    return True


def _totally_empty(obj: SliceObject) -> bool:
    return all(w == 0 for w in obj.forest.widths)


class EnvelopeSlice:
    """The slice category of refinements of T, with its morphisms and
    the subset of morphisms used for gluing under each granularity."""

    def __init__(self, T: Forest, cap: int, strict: bool = True, exclude_empty: bool = True):
        self.T = T
        self.cap = cap
        self.strict = strict
        self.exclude_empty = exclude_empty
        if cap < 1:
            raise EnvelopeError("cap too small to contain the object's own identity refinement")
        self.objects = enumerate_slice_objects(T, cap, exclude_empty)
        self.index = {o.key(): k for k, o in enumerate(self.objects)}
        self._morphisms = None

    def morphisms(self):
        """List of (source index, target index, component tuple)."""
        if self._morphisms is None:
            out = []
            for sa, a in enumerate(self.objects):
                for sb, b in enumerate(self.objects):
                    for combo in slice_morphisms(a, b, self.T, self.strict):
                        out.append((sa, sb, combo))
            self._morphisms = out
        return self._morphisms

    def gluing_morphisms(self, gluing: str):
        if gluing not in ("profile", "plain"):
            raise EnvelopeError(f"no gluing morphisms for mode {gluing!r}")
        if gluing == "plain":
            return self.morphisms()
        out = []
        for sa, sb, combo in self.morphisms():
            a, b = self.objects[sa], self.objects[sb]
            if _totally_empty(a) or _leg_fiber_bijective(a, b, combo):
                out.append((sa, sb, combo))
        return out

    def to_fincategory(self) -> FinCategory:
        """The slice as an explicit finite category (identities and all
        composites of the listed morphisms are present by saturation)."""
        arrows = []
        arrow_index = {}
        for sa, sb, combo in self.morphisms():
            key = (sa, sb, tuple(c.table for c in combo))
            arrow_index[key] = len(arrows)
            arrows.append((sa, sb, key))
        identities = []
        for k, o in enumerate(self.objects):
            key = (k, k, tuple(FinSetMap.identity(w).table for w in o.forest.widths))
            identities.append(arrow_index[key])
        comp = {}
        for f, (sa, sb, fkey) in enumerate(arrows):
            for g, (sc, sd, gkey) in enumerate(arrows):
                if sb != sc:
                    continue
                combo = tuple(
                    FinSetMap(self.objects[sa].forest.widths[i], self.objects[sb].forest.widths[i], fkey[2][i])
                    .then(FinSetMap(self.objects[sc].forest.widths[i], self.objects[sd].forest.widths[i], gkey[2][i]))
                    for i in range(len(fkey[2]))
                )
                comp[(f, g)] = arrow_index[(sa, sd, tuple(c.table for c in combo))]
        return FinCategory(list(range(len(self.objects))), arrows, comp, identities, validate=False)


def envelope_slice(T: Forest, cap: int, strict: bool = True, exclude_empty: bool = True) -> FinCategory:
    return EnvelopeSlice(T, cap, strict, exclude_empty).to_fincategory()


class _UF:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def canonical_slice_pair(X: Presheaf, obj: SliceObject, x):
    """Relabel a refinement so its elements sit grouped by slot (legs
    monotone), transporting the element along the relabeling."""
    B, legs = obj.forest, obj.legs
    if all(legs[i].table == tuple(sorted(legs[i].table)) for i in range(B.length + 1)):
        return obj, x
    perms = []
    for i in range(B.length + 1):
        perms.append(sorted(range(B.widths[i]), key=lambda e: (legs[i](e), e)))
    inverse = [{old: new for new, old in enumerate(p)} for p in perms]
    new_legs = tuple(
        FinSetMap(B.widths[i], legs[i].tgt_size, tuple(legs[i](perms[i][e]) for e in range(B.widths[i])))
        for i in range(B.length + 1)
    )
    new_chain = tuple(
        FinSetMap(B.widths[i], B.widths[i + 1],
                  tuple(inverse[i + 1][B.chain[i](perms[i][e])] for e in range(B.widths[i])))
        for i in range(B.length)
    )
    newB = Forest(B.widths, new_chain)
    iso = plus_map(newB, B, SimplexMap.identity(B.length),
                   tuple(FinSetMap(B.widths[i], B.widths[i], tuple(perms[i])) for i in range(B.length + 1)))
    x_new = X.transport(iso).get(x, MISSING)
    if x_new is MISSING:
        raise EnvelopeError("presheaf lacks a transport along a relabeling")
    return SliceObject(newB, new_legs), x_new


@dataclass
class EnvelopeValue:
    """Envelope classes: one concrete representative per class, and a
    lookup from canonical pair encodings to class ids."""

    T: Forest
    cap: int
    strict: bool
    exclude_empty: bool
    gluing: str
    classes: list            # class id -> (SliceObject, element) representative
    assign: dict             # canonical pair encoding -> class id
    presheaf: Presheaf
    stabilized: bool = None
    inner_limit_ok: bool = None
    plain_class_count: int = None

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def class_of(self, obj: SliceObject, element) -> int:
        if self.gluing == "none":
            obj, element = canonical_slice_pair(self.presheaf, obj, element)
            enc = (obj.key(), element)
        else:
            enc = canonical_pair_encoding(self.presheaf, obj, element)
        if enc not in self.assign:
            raise EnvelopeError("refinement outside the computed window", witness=obj.key())
        return self.assign[enc]

    def to_json(self) -> dict:
        return {
            "object": self.T.to_json(),
            "cap": self.cap,
            "strict": self.strict,
            "exclude_empty": self.exclude_empty,
            "gluing": self.gluing,
            "classes": [
                {
                    "representative": {
                        "refinement": obj.forest.to_json(),
                        "legs": [list(l.table) for l in obj.legs],
                        "element": repr(elem),
                    },
                    "size_of_orbit": orbit_size(self.presheaf, obj, elem),
                }
                for obj, elem in self.classes
            ],
            "stabilized": self.stabilized,
            "inner_limit_ok": self.inner_limit_ok,
            "plain_class_count": self.plain_class_count,
        }


def _slice_transport(X: Presheaf, sl: EnvelopeSlice, sa: int, sb: int, combo):
    """Transport of X along a slice morphism, as a forest-category map
    when possible."""
    a, b = sl.objects[sa], sl.objects[sb]
    m = validate_forest_map(a.forest, b.forest, SimplexMap.identity(a.forest.length), combo)
    return X.transport(m)


# ---------------------------------------------------------------------------
# canonical forms: the granular ("profile") gluing identifies exactly the
# isomorphic labeled refinements, so its classes are canonical encodings


def _tie_min_label(X: Presheaf, label, base_perm, sorted_encs):
    """Canonical vertex label: minimize over reorderings of equal-
    encoding children composed with the base sorting permutation."""
    runs = []
    start = 0
    for t in range(1, len(sorted_encs) + 1):
        if t == len(sorted_encs) or sorted_encs[t] != sorted_encs[start]:
            runs.append(range(start, t))
            start = t
    best = None
    for sigma_parts in itertools.product(*[itertools.permutations(run) for run in runs]):
        sigma = [None] * len(sorted_encs)
        for run, part in zip(runs, sigma_parts):
            for t, s in zip(run, part):
                sigma[t] = s
        perm = tuple(base_perm[s] for s in sigma)
        cand = X.act_vertex(label, perm)
        if best is None or repr(cand) < repr(best):
            best = cand
    return best


def canonical_pair_encoding(X: Presheaf, obj: SliceObject, x):
    """Encoding of (refinement, element) invariant under leg-preserving
    isomorphism.  Requires the presheaf to expose element structure;
    falls back to explicit orbit minimisation otherwise (small objects
    only)."""
    struct = X.element_structure(obj.forest, x)
    if struct is None:
        return _orbit_min_encoding(X, obj, x)
    colors, vlabels = struct
    B, legs = obj.forest, obj.legs
    enc = [[None] * w for w in B.widths]
    for e in range(B.widths[0]):
        enc[0][e] = (legs[0](e), colors[0][e])
    for i in range(1, B.length + 1):
        fibers = B.chain[i - 1].fibers()
        for v in range(B.widths[i]):
            fiber = fibers[v]
            child_encs = [enc[i - 1][e] for e in fiber]
            order = sorted(range(len(fiber)), key=lambda t: child_encs[t])
            sorted_encs = tuple(child_encs[t] for t in order)
            label = _tie_min_label(X, vlabels[i - 1][v], tuple(order), sorted_encs)
            enc[i][v] = (legs[i](v), colors[i][v], repr(label), sorted_encs)
    return (B.length, tuple(sorted(enc[B.length])), tuple(B.widths))


def _leg_preserving_relabelings(obj: SliceObject):
    """All level tuples of slot-fiber-preserving permutations."""
    B, legs = obj.forest, obj.legs
    per_level = []
    for i in range(B.length + 1):
        fibers = legs[i].fibers()
        perms = []
        for fiber_perms in itertools.product(*[itertools.permutations(f) for f in fibers]):
            table = [0] * B.widths[i]
            for fiber, perm in zip(fibers, fiber_perms):
                for e, target in zip(fiber, perm):
                    table[e] = target
            perms.append(tuple(table))
        per_level.append(perms)
    return itertools.product(*per_level)


def orbit_size(X: Presheaf, obj: SliceObject, x) -> int:
    """Number of concrete relabelings of the representative: the size of
    its isomorphism orbit among refinements on the same element sets."""
    B = obj.forest
    total = 0
    stab = 0
    for tables in _leg_preserving_relabelings(obj):
        total += 1
        fixed = all(
            tuple(tables[i + 1][B.chain[i](e)] for e in range(B.widths[i]))
            == tuple(B.chain[i](tables[i][e]) for e in range(B.widths[i]))
            for i in range(B.length)
        )
        if fixed:
            sigma = [FinSetMap(B.widths[i], B.widths[i], tables[i]) for i in range(B.length + 1)]
            m = validate_forest_map(B, B, SimplexMap.identity(B.length), tuple(sigma))
            if m.in_plus and X.transport_element(m, x) == x:
                stab += 1
    return total // max(stab, 1)


def _orbit_min_encoding(X: Presheaf, obj: SliceObject, x):
    """Minimum over all leg-preserving relabelings of the chain tables
    and the transported element."""
    B, legs = obj.forest, obj.legs
    best = None
    for tables in _leg_preserving_relabelings(obj):
        sigma = [FinSetMap(B.widths[i], B.widths[i], tables[i]) for i in range(B.length + 1)]
        inv = [None] * (B.length + 1)
        for i, s in enumerate(sigma):
            inv_table = [0] * B.widths[i]
            for e, t in enumerate(s.table):
                inv_table[t] = e
            inv[i] = FinSetMap(B.widths[i], B.widths[i], tuple(inv_table))
        new_chain = tuple(
            inv[i].then(B.chain[i]).then(sigma[i + 1]) for i in range(B.length)
        )
        newB = Forest(B.widths, new_chain)
        iso = plus_map(newB, B, SimplexMap.identity(B.length), tuple(inv))
        x_new = X.transport_element(iso, x)
        cand = (B.length, tuple(c.table for c in new_chain),
                tuple(legs[i].table for i in range(B.length + 1)), repr(x_new))
        if best is None or cand < best:
            best = cand
    return best


def _classes_at_cap(X: Presheaf, T: Forest, cap: int, strict: bool,
                    exclude_empty: bool, gluing: str):
    """Union-find over every concrete refinement: the reference path,
    viable only on small slices."""
    sl = EnvelopeSlice(T, cap, strict, exclude_empty)
    uf = _UF()
    elements = {}
    for k, obj in enumerate(sl.objects):
        vals = X.value(obj.forest)
        elements[k] = vals
        for x in vals:
            uf.add((k, x))
    for sa, sb, combo in sl.gluing_morphisms(gluing):
        t = _slice_transport(X, sl, sa, sb, combo)
        for x in elements[sb]:
            y = t.get(x, MISSING)
            if y is MISSING:
                raise EnvelopeError("presheaf lacks a transport inside the slice",
                                    witness=(sa, sb))
            uf.union((sb, x), (sa, y))
    classes = []
    members = {}
    assign = {}
    reps = {}
    for k, obj in enumerate(sl.objects):
        for x in elements[k]:
            r = uf.find((k, x))
            if r not in reps:
                reps[r] = len(classes)
                classes.append((k, x))
                members[reps[r]] = []
            c = reps[r]
            members[c].append((k, x))
            assign[(obj.key(), x)] = c
    return sl, classes, members, assign


# ---------------------------------------------------------------------------
# fast profile classes: generate one canonical representative per
# isomorphism class of labeled refinements, without materializing the slice


def _vec_add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _vec_ok(vec, cap):
    return all(x <= cap for row in vec for x in row)


def _zero_vec(T: Forest):
    return tuple((0,) * w for w in T.widths)


def _unit_vec(T: Forest, level: int, slot: int):
    return tuple(
        tuple(1 if (i == level and s == slot) else 0 for s in range(w))
        for i, w in enumerate(T.widths)
    )


class _BlockGenerator:
    """Iso-classes of labeled refinement blocks over each slot of T.

    A block over a slot at level i is one refinement element there with
    its full labeled subtree; a class of the envelope is a choice of
    block multisets over the root slots within the per-slot budgets.
    Blocks are (encoding, slot-count vector, template) triples; the
    template rebuilds a concrete representative.
    """

    def __init__(self, X: Presheaf, T: Forest, cap: int):
        self.X = X
        self.T = T
        self.cap = cap
        self._blocks = {}

    def blocks(self, level: int, slot: int):
        key = (level, slot)
        if key in self._blocks:
            return self._blocks[key]
        X, T, cap = self.X, self.T, self.cap
        out = []
        if level == 0:
            for c in X.colors():
                enc = (slot, c)
                out.append((enc, _unit_vec(T, 0, slot), (slot, c, None, ())))
        else:
            child_slots = [s for s in range(T.widths[level - 1])
                           if T.chain[level - 1](s) == slot]
            per_slot_opts = []
            for s in child_slots:
                sub = self.blocks(level - 1, s)
                opts = []
                for k in range(cap + 1):
                    for combo in itertools.combinations_with_replacement(range(len(sub)), k):
                        vec = _zero_vec(T)
                        for b in combo:
                            vec = _vec_add(vec, sub[b][1])
                        if _vec_ok(vec, cap):
                            opts.append((tuple(sub[b] for b in combo), vec))
                per_slot_opts.append(opts)
            self_vec = _unit_vec(T, level, slot)
            for assignment in itertools.product(*per_slot_opts):
                vec = self_vec
                children = []
                ok = True
                for blocks_here, v in assignment:
                    vec = _vec_add(vec, v)
                    children.extend(blocks_here)
                if not _vec_ok(vec, cap):
                    continue
                children.sort(key=lambda b: b[0])
                child_encs = tuple(b[0] for b in children)
                sig = tuple(e[1] for e in child_encs)
                for c in X.colors():
                    seen = set()
                    for label in X.vertex_label_choices(sig, c):
                        canon = _tie_min_label(X, label, tuple(range(len(children))), child_encs)
                        r = repr(canon)
                        if r in seen:
                            continue
                        seen.add(r)
                        enc = (slot, c, r, child_encs)
                        template = (slot, c, canon, tuple(b[2] for b in children))
                        out.append((enc, vec, template))
        out.sort(key=lambda b: b[0])
        self._blocks[key] = out
        return out


def _instantiate_templates(T: Forest, root_blocks):
    """Concrete representative from root block templates: elements are
    numbered in depth-first order of the canonical encodings."""
    n = T.length
    widths = [0] * (n + 1)
    legs_tables = [[] for _ in range(n + 1)]
    colors = [[] for _ in range(n + 1)]
    vlabels = [[] for _ in range(n)]
    parents = [[] for _ in range(n)]

    def place(template, level):
        slot, c, label, children = template
        child_idx = [place(child, level - 1) for child in children]
        idx = widths[level]
        widths[level] += 1
        legs_tables[level].append(slot)
        colors[level].append(c)
        if level >= 1:
            vlabels[level - 1].append(label)
        for ci in child_idx:
            parents[level - 1][ci] = idx
        return idx

    # reserve parent arrays lazily: fill with placeholders as we go
    def place_with_parents(template, level):
        slot, c, label, children = template
        child_ids = []
        for child in children:
            child_ids.append(place_with_parents(child, level - 1))
        idx = widths[level]
        widths[level] += 1
        legs_tables[level].append(slot)
        colors[level].append(c)
        if level >= 1:
            vlabels[level - 1].append(label)
        for ci in child_ids:
            parents[level - 1][ci] = idx
        return idx

    def count(template):
        _, _, _, children = template
        return 1 + sum(count(c) for c in children)

    # pre-size parent arrays per level by walking once
    sizes = [0] * (n + 1)

    def presize(template, level):
        sizes[level] += 1
        for child in template[3]:
            presize(child, level - 1)

    for rb in root_blocks:
        presize(rb[2], n)
    for i in range(n):
        parents[i] = [0] * sizes[i]
    for rb in root_blocks:
        place_with_parents(rb[2], n)
    chain = tuple(FinSetMap(widths[i], widths[i + 1], tuple(parents[i])) for i in range(n))
    legs = tuple(FinSetMap(widths[i], T.widths[i], tuple(legs_tables[i])) for i in range(n + 1))
    B = Forest(tuple(widths), chain)
    x = (tuple(tuple(l) for l in colors), tuple(tuple(l) for l in vlabels))
    return SliceObject(B, legs), x


def _profile_classes_fast(X: Presheaf, T: Forest, cap: int, exclude_empty: bool):
    """(encodings -> class id, representatives): one canonical labeled
    representative per isomorphism class."""
    gen = _BlockGenerator(X, T, cap)
    n = T.length
    lo = 1 if exclude_empty else 0
    root_opts = []
    for r in range(T.widths[n]):
        sub = gen.blocks(n, r)
        opts = []
        for k in range(lo, cap + 1):
            for combo in itertools.combinations_with_replacement(range(len(sub)), k):
                vec = _zero_vec(T)
                for b in combo:
                    vec = _vec_add(vec, sub[b][1])
                if _vec_ok(vec, cap):
                    opts.append((tuple(sub[b] for b in combo), vec))
        root_opts.append(opts)
    classes = []
    assign = {}
    for assignment in itertools.product(*root_opts):
        vec = _zero_vec(T)
        roots = []
        for blocks_here, v in assignment:
            vec = _vec_add(vec, v)
            roots.extend(blocks_here)
        if not _vec_ok(vec, cap):
            continue
        if exclude_empty and any(x < 1 for row in vec for x in row):
            continue
        roots.sort(key=lambda b: b[0])
        obj, x = _instantiate_templates(T, roots)
        enc = canonical_pair_encoding(X, obj, x)
        if enc in assign:
            continue
        assign[enc] = len(classes)
        classes.append((obj, x))
    return classes, assign


def inner_limit_matches(X: Presheaf, T: Forest, obj: SliceObject) -> bool:
    """The forest decomposition in fibres: the product of X over the
    refinement's root-fiber trees must biject with X on the refinement
    (true whenever X is Segal; computed directly)."""
    B = obj.forest
    n_roots = B.widths[-1]
    transports = []
    sizes = []
    for r in range(n_roots):
        fiber_elems = []
        widths = []
        for i in range(B.length + 1):
            to_root = B.chain_map(i, B.length)
            sel = tuple(e for e in range(B.widths[i]) if to_root(e) == r)
            fiber_elems.append(sel)
            widths.append(len(sel))
        chain = []
        for i in range(B.length):
            pos = {e: j for j, e in enumerate(fiber_elems[i + 1])}
            chain.append(FinSetMap(widths[i], widths[i + 1],
                                   tuple(pos[B.chain[i](e)] for e in fiber_elems[i])))
        piece = Forest(tuple(widths), tuple(chain))
        incl = plus_map(
            piece, B, SimplexMap.identity(B.length),
            tuple(FinSetMap(widths[i], B.widths[i], fiber_elems[i]) for i in range(B.length + 1)),
        )
        transports.append(X.transport(incl))
        sizes.append(len(X.value(piece)))
    product_size = 1
    for s in sizes:
        product_size *= s
    images = set()
    for x in X.value(B):
        img = tuple(transports[r].get(x, MISSING) for r in range(n_roots))
        if MISSING in img:
            return False
        images.add(img)
    return len(images) == len(X.value(B)) == product_size


def _profile_value(X: Presheaf, T: Forest, cap: int, exclude_empty: bool):
    """Profile classes via canonical representatives (no slice
    materialisation).  Inclusive mode collapses through the empty
    refinement, which maps into everything."""
    if not exclude_empty:
        empty = SliceObject(
            Forest((0,) * (T.length + 1), tuple(FinSetMap(0, 0, ()) for _ in range(T.length))),
            tuple(FinSetMap(0, w, ()) for w in T.widths),
        )
        xs = X.value(empty.forest)
        if len(xs) != 1:
            raise EnvelopeError(
                "inclusive mode collapses through the empty refinement, "
                "which needs a singleton value there"
            )
        return [(empty, xs[0])], _CollapsedAssign(0)
    classes, assign = _profile_classes_fast(X, T, cap, exclude_empty)
    return classes, assign


def _concrete_value(X: Presheaf, T: Forest, cap: int, exclude_empty: bool):
    """Every slot-sorted refinement with every element, unquotiented:
    the finest granularity, under which all three decompositions are
    exact but class sets grow multiplicatively (small caps only)."""
    classes = []
    assign = {}
    for obj in enumerate_slice_objects(T, cap, exclude_empty):
        for x in X.value(obj.forest):
            assign[(obj.key(), x)] = len(classes)
            classes.append((obj, x))
    return classes, assign


class _CollapsedAssign(dict):
    """Every encoding belongs to the single collapsed class."""

    def __init__(self, cls):
        super().__init__()
        self._cls = cls

    def __contains__(self, key):
        return True

    def __getitem__(self, key):
        return self._cls

    def get(self, key, default=None):
        return self._cls


def _slice_morphisms_between(a: SliceObject, b: SliceObject, T: Forest, strict: bool):
    return slice_morphisms(a, b, T, strict)


def _plain_via_profile(X: Presheaf, T: Forest, cap: int, strict: bool,
                       exclude_empty: bool):
    """Plain classes as a quotient of the profile classes: glue whenever
    a slice morphism between class representatives transports one
    element to the other.  Complete because every morphism conjugates
    onto representatives through isomorphisms."""
    reps, assign = _profile_value(X, T, cap, exclude_empty)
    if isinstance(assign, _CollapsedAssign):
        return reps, assign
    uf = _UF()
    for c in range(len(reps)):
        uf.add(c)
    seen_objs = {}
    for obj, _ in reps:
        seen_objs.setdefault(obj.key(), obj)
    objs = list(seen_objs.values())
    for a in objs:
        for b in objs:
            # components are injective, so fibers can only grow
            if strict and any(
                len(fa) > len(fb)
                for la, lb in zip(a.legs, b.legs)
                for fa, fb in zip(la.fibers(), lb.fibers())
            ):
                continue
            for combo in _slice_morphisms_between(a, b, T, strict):
                m = validate_forest_map(a.forest, b.forest,
                                        SimplexMap.identity(a.forest.length), combo)
                for x in X.value(b.forest):
                    enc_b = canonical_pair_encoding(X, b, x)
                    if enc_b not in assign:
                        continue
                    y = X.transport_element(m, x)
                    enc_a = canonical_pair_encoding(X, a, y)
                    if enc_a not in assign:
                        continue
                    uf.union(assign[enc_b], assign[enc_a])
    remap = {}
    classes = []
    new_assign = {}
    for enc, c in assign.items():
        r = uf.find(c)
        if r not in remap:
            remap[r] = len(classes)
            classes.append(reps[c])
        new_assign[enc] = remap[r]
    return classes, new_assign


def envelope_value(X: Presheaf, T: Forest, cap: int, strict: bool = True,
                   exclude_empty: bool = True, gluing: str = "profile",
                   check_stability: bool = True, check_inner: bool = True,
                   compute_plain: bool = False) -> EnvelopeValue:
    """The set-level envelope with one representative per class.

    The profile gluing identifies exactly the isomorphic labeled
    refinements; the plain gluing further collapses along every slice
    morphism.  Stability compares the classes against cap - 1 (a merge
    would mean the window had not stabilized); the inner flag verifies
    the fibre decomposition of each representative against the presheaf.
    """
    if cap < 1:
        raise EnvelopeError("cap too small to contain the object's own identity refinement")
    if gluing == "profile":
        classes, assign = _profile_value(X, T, cap, exclude_empty)
    elif gluing == "plain":
        classes, assign = _plain_via_profile(X, T, cap, strict, exclude_empty)
    elif gluing == "none":
        classes, assign = _concrete_value(X, T, cap, exclude_empty)
    else:
        raise EnvelopeError(f"unknown gluing mode {gluing!r}")
    ev = EnvelopeValue(T, cap, strict, exclude_empty, gluing, classes, assign, X)
    if check_stability:
        if cap > 1:
            if gluing == "profile":
                prev_classes, prev_assign = _profile_value(X, T, cap - 1, exclude_empty)
            elif gluing == "none":
                prev_classes, prev_assign = _concrete_value(X, T, cap - 1, exclude_empty)
            else:
                prev_classes, prev_assign = _plain_via_profile(X, T, cap - 1, strict, exclude_empty)
            merged = {}
            stable = True
            if not isinstance(prev_assign, _CollapsedAssign):
                for enc, c_prev in prev_assign.items():
                    c_now = assign.get(enc) if not isinstance(assign, _CollapsedAssign) else 0
                    if c_now is None:
                        stable = False
                        break
                    if c_now in merged and merged[c_now] != c_prev:
                        stable = False
                        break
                    merged[c_now] = c_prev
            ev.stabilized = stable
        else:
            ev.stabilized = True
    if check_inner:
        ev.inner_limit_ok = all(inner_limit_matches(X, T, obj) for obj, _ in classes)
    if compute_plain:
        if gluing == "plain":
            ev.plain_class_count = len(classes)
        else:
            plain_classes, _ = _plain_via_profile(X, T, cap, strict, exclude_empty)
            ev.plain_class_count = len(plain_classes)
    return ev


# ---------------------------------------------------------------------------
# the corolla coproduct of partitioned families


@dataclass
class CorollaCoproduct:
    """The literal partitioned-families coproduct and its canonical maps
    into the envelope classes of the corolla.

    ``image`` targets the default-mode classes (None when the entry's
    skeleton refinement is not an object of that slice, e.g. a
    partition with an unused part under the surjective-legs convention,
    or a skeleton exceeding the cap).  ``image_plain`` targets the
    fully-glued inclusive colimit, where every entry has a class.
    """

    entries: list  # (r, lambda table, tuple of factor elements)
    target: EnvelopeValue
    target_plain: EnvelopeValue
    image: list
    image_plain: list

    def surjective_onto_plain(self) -> bool:
        hit = {c for c in self.image_plain if c is not None}
        return hit == set(range(self.target_plain.class_count))

    def default_coverage(self) -> tuple[int, int]:
        hit = {c for c in self.image if c is not None}
        return len(hit), self.target.class_count


def skeleton_object(r: int, lam_table: tuple[int, ...], n: int) -> SliceObject:
    """The refinement of the n-corolla carrying a partitioned family:
    chain and level-0 leg both the partition, roots folded."""
    lam = FinSetMap(r, n, lam_table)
    B = Forest((r, n), (lam,))
    legs = (lam, FinSetMap(n, 1, (0,) * n))
    return SliceObject(B, legs)


def _glue_family_into_value(X: Presheaf, obj: SliceObject, factors):
    """Find the unique element of X(B) restricting to the given factor
    elements on the fiber pieces of the refinement's roots."""
    B = obj.forest
    transports = []
    for i in range(B.widths[-1]):
        fiber = B.chain[0].fibers()[i]
        piece = Forest((len(fiber), 1), (FinSetMap(len(fiber), 1, (0,) * len(fiber)),))
        m = plus_map(piece, B, SimplexMap.identity(1),
                     (FinSetMap(len(fiber), B.widths[0], fiber), FinSetMap(1, B.widths[1], (i,))))
        transports.append(X.transport(m))
    matches = [
        x for x in X.value(B)
        if tuple(transports[i].get(x, MISSING) for i in range(B.widths[1])) == tuple(factors)
    ]
    if len(matches) != 1:
        raise EnvelopeError("family does not glue uniquely; presheaf not Segal here",
                            witness=(obj.key(), factors))
    return matches[0]


def env_corolla(X: Presheaf, n: int, cap: int, strict: bool = True,
                exclude_empty: bool = True, gluing: str = "profile") -> CorollaCoproduct:
    """The literal coproduct over (r, lambda: r -> n) of products of
    corolla values, with its canonical map to the envelope classes of
    the n-corolla.  The comparison with the fully-glued (plain) classes
    is the faithful one: the coproduct's partition data is exactly what
    finer gluings refuse to forget.  Entries with unused parts have no
    representative among surjective-leg refinements, so their images in
    the exclusive mode are None; the plain comparison is computed with
    empties included."""
    T = corolla(n)
    target = envelope_value(X, T, cap, strict, exclude_empty, gluing)
    target_plain = envelope_value(X, T, cap, strict, False, "plain")
    entries = []
    image = []
    image_plain = []
    for r in range(cap + 1):
        for lam_table in itertools.product(range(n), repeat=r):
            lam = FinSetMap(r, n, lam_table)
            factor_pools = [X.value(corolla(len(f))) for f in lam.fibers()]
            for factors in itertools.product(*factor_pools):
                entries.append((r, lam_table, factors))
                obj = skeleton_object(r, lam_table, n)
                if n > 0:
                    x = _glue_family_into_value(X, obj, factors)
                else:
                    x = _only(X.value(obj.forest))
                for env, out in ((target_plain, image_plain), (target, image)):
                    try:
                        out.append(env.class_of(obj, x))
                    except EnvelopeError:
                        out.append(None)
    return CorollaCoproduct(entries, target, target_plain, image, image_plain)


def _only(values):
    if len(values) != 1:
        raise EnvelopeError("expected a singleton value")
    return values[0]


def check_envelope_segal(X: Presheaf, window, cap: int, strict: bool = True,
                         exclude_empty: bool = True, gluing: str = "profile",
                         stop_early: bool = True) -> SegalReport:
    """Tabulate T -> envelope classes over the window and run the Segal
    checks on the resulting presheaf.  Transports are induced by pulling
    refinements back along window maps."""
    env = EnvelopePresheaf(X, window, cap, strict, exclude_empty, gluing)
    return check_segal(env, stop_early=stop_early)


class EnvelopePresheaf(Presheaf):
    """T |-> envelope classes, with transports by pulling refinements
    back along window maps.  Class-well-definedness of the transports is
    automatic for the profile gluing (pulling back respects isomorphism)
    and holds for plain because plain is a further quotient."""

    def __init__(self, X: Presheaf, window, cap: int, strict: bool,
                 exclude_empty: bool, gluing: str):
        super().__init__(window)
        self.X = X
        self.cap = cap
        self.strict = strict
        self.exclude_empty = exclude_empty
        self.gluing = gluing
        self._env = {}

    def envelope(self, T: Forest) -> EnvelopeValue:
        key = T.key()
        if key not in self._env:
            self._env[key] = envelope_value(self.X, T, self.cap, self.strict,
                                            self.exclude_empty, self.gluing,
                                            check_stability=False, check_inner=False)
        return self._env[key]

    def value(self, F: Forest) -> tuple:
        return tuple(range(self.envelope(F).class_count))

    def transport(self, m: ForestMap) -> dict:
        envB = self.envelope(m.tgt)
        envA = self.envelope(m.src)
        out = {}
        for c, (obj, x) in enumerate(envB.classes):
            pulled, x_new = self._pull_back(obj, x, m)
            out[c] = envA.class_of(pulled, x_new)
        return out


    def _pull_back(self, obj: SliceObject, x, m: ForestMap):
        """Pull a refinement of m.tgt back along m to a refinement of
        m.src, transporting the element."""
        A, phi = m.src, m.phi
        C, legs = obj.forest, obj.legs
        pairs_per_level = []
        widths = []
        for i in range(A.length + 1):
            j = phi(i)
            pairs = sorted(
                ((c, a) for c in range(C.widths[j]) for a in range(A.widths[i])
                 if legs[j](c) == m.components[i](a)),
            )
            pairs_per_level.append(pairs)
            widths.append(len(pairs))
        chain = []
        for i in range(A.length):
            up = {p: t for t, p in enumerate(pairs_per_level[i + 1])}
            c_step = C.chain_map(phi(i), phi(i + 1))
            a_step = A.chain[i]
            chain.append(FinSetMap(
                widths[i], widths[i + 1],
                tuple(up[(c_step(c), a_step(a))] for (c, a) in pairs_per_level[i]),
            ))
        D = Forest(tuple(widths), tuple(chain))
        new_legs = tuple(
            FinSetMap(widths[i], A.widths[i], tuple(a for (_, a) in pairs_per_level[i]))
            for i in range(A.length + 1)
        )
        proj = validate_forest_map(
            D, C, phi,
            tuple(FinSetMap(widths[i], C.widths[phi(i)], tuple(c for (c, _) in pairs_per_level[i]))
                  for i in range(A.length + 1)),
        )
        if not proj.in_plus:
            raise EnvelopeError("pulled-back projection left the forest category",
                                witness=proj.witness)
        x_new = self.X.transport_element(proj, x)
        if x_new is MISSING:
            raise EnvelopeError("presheaf transport missing along the pulled-back projection")
        return SliceObject(D, new_legs), x_new


# ---------------------------------------------------------------------------
# colour words, cocartesian lifts, adjunction triangles


@dataclass(frozen=True)
class GroupedWord:
    """A word of colours with an outer grouping: a tuple of groups."""

    groups: tuple[tuple[str, ...], ...]

    def flatten(self) -> tuple[str, ...]:
        return tuple(c for g in self.groups for c in g)

    def arity(self) -> int:
        return len(self.groups)


@dataclass(frozen=True)
class CocartLift:
    source: GroupedWord
    target: GroupedWord
    partition: PointedMap  # the active pointed map being lifted
    letter_map: tuple[int, ...]  # position in source flatten -> position in target flatten


def cocartesian_lift(word: GroupedWord, partition: PointedMap) -> CocartLift:
    """Regroup a word along an active pointed map: group j of the target
    is the concatenation of the source groups it absorbs, content
    untouched."""
    from .gamma import is_active

    if not is_active(partition):
        raise EnvelopeError("only active maps have cocartesian regrouping lifts")
    if partition.src != word.arity():
        raise EnvelopeError(
            f"word has {word.arity()} groups but the partition starts at <{partition.src}>"
        )
    n, m = partition.src, partition.tgt
    target_groups = []
    placement = {}
    for j in range(1, m + 1):
        group = []
        for i in range(1, n + 1):
            if partition(i) == j:
                base = sum(len(word.groups[t]) for t in range(i - 1))
                for off, c in enumerate(word.groups[i - 1]):
                    placement[base + off] = (j - 1, len(group))
                    group.append(c)
        target_groups.append(tuple(group))
    target = GroupedWord(tuple(target_groups))
    letter_map = []
    for pos in range(len(word.flatten())):
        j, off = placement[pos]
        letter_map.append(sum(len(g) for g in target_groups[:j]) + off)
    return CocartLift(word, target, partition, tuple(letter_map))


@dataclass(frozen=True)
class WordMorphism:
    """A morphism of grouped words over a partition of their groups: a
    partition of the letters compatible with the group partition, plus
    one operation per target letter."""

    source: GroupedWord
    target: GroupedWord
    group_partition: PointedMap   # source groups -> target groups, active
    letter_partition: FinSetMap   # source letters -> target letters
    ops: tuple[str, ...]          # one operation id per target letter


class WordCategory:
    """Grouped words over an operad, with morphisms over partitions.

    This is the finite combinatorial model in which the regrouping
    lifts' universal property is verified.
    """

    def __init__(self, spec, max_letters: int = 3, max_groups: int = 3):
        self.spec = spec
        self.max_letters = max_letters
        self.max_groups = max_groups
        self._words = None
        self._morphisms_cache = {}

    def words(self):
        if self._words is not None:
            return self._words
        out = []
        for total in range(self.max_letters + 1):
            for letters in itertools.product(self.spec.colors, repeat=total):
                for grouping in self._groupings(total):
                    groups = []
                    k = 0
                    for size in grouping:
                        groups.append(tuple(letters[k:k + size]))
                        k += size
                    out.append(GroupedWord(tuple(groups)))
        self._words = sorted(set(out), key=lambda w: (w.arity(), w.groups))
        return self._words

    def _groupings(self, total):
        for n_groups in range(self.max_groups + 1):
            for sizes in itertools.product(range(total + 1), repeat=n_groups):
                if sum(sizes) == total:
                    yield sizes

    def morphisms(self, u: GroupedWord, v: GroupedWord, group_partition: PointedMap):
        """All morphisms u -> v over the given partition of groups."""
        from .gamma import is_active

        cache_key = (u, v, group_partition.table)
        if cache_key in self._morphisms_cache:
            return self._morphisms_cache[cache_key]
        if not is_active(group_partition) or group_partition.src != u.arity() \
           or group_partition.tgt != v.arity():
            return []
        flat_u, flat_v = u.flatten(), v.flatten()
        group_of_u = [i for i, g in enumerate(u.groups) for _ in g]
        group_of_v = [j for j, g in enumerate(v.groups) for _ in g]
        out = []
        for table in itertools.product(range(len(flat_v)), repeat=len(flat_u)):
            ok = True
            for pos, tgt_pos in enumerate(table):
                if group_partition(group_of_u[pos] + 1) != group_of_v[tgt_pos] + 1:
                    ok = False
                    break
            if not ok:
                continue
            p = FinSetMap(len(flat_u), len(flat_v), table) if flat_v else None
            if flat_v == () and flat_u != ():
                continue
            if p is None:
                p = FinSetMap(0, 0, ())
            ops_pools = []
            feasible = True
            for tgt_pos in range(len(flat_v)):
                fiber = tuple(pos for pos in range(len(flat_u)) if table[pos] == tgt_pos)
                sig = tuple(flat_u[pos] for pos in fiber)
                cands = [o for o in self.spec.ops_with_inputs(sig)
                         if self.spec.operations[o].output == flat_v[tgt_pos]]
                if not cands:
                    feasible = False
                    break
                ops_pools.append(cands)
            if not feasible:
                continue
            for ops in itertools.product(*ops_pools):
                out.append(WordMorphism(u, v, group_partition, p, tuple(ops)))
        self._morphisms_cache[cache_key] = out
        return out

    def compose(self, second: WordMorphism, first: WordMorphism) -> WordMorphism:
        gp = first.group_partition.then(second.group_partition)
        lp = first.letter_partition.then(second.letter_partition)
        flat_mid = first.target.flatten()
        ops = []
        for tgt_pos in range(len(second.target.flatten())):
            mid_fiber = tuple(p for p in range(len(flat_mid))
                              if second.letter_partition(p) == tgt_pos)
            outer = second.ops[tgt_pos]
            # assemble the outer op's inputs: mid positions in sorted order
            inners = [first.ops[p] for p in mid_fiber]
            composed = self.spec.multi_compose(outer, inners)
            # reorder: composed inputs are blocks per mid position; the
            # composite letter partition lists source letters per target
            block_order = [pos for p in mid_fiber
                           for pos in range(len(first.source.flatten()))
                           if first.letter_partition(pos) == p]
            global_fiber = [pos for pos in range(len(first.source.flatten()))
                            if lp(pos) == tgt_pos]
            pos_of = {pos: t for t, pos in enumerate(block_order)}
            perm = tuple(pos_of[pos] for pos in global_fiber)
            ops.append(self.spec.act(composed, perm))
        return WordMorphism(first.source, second.target, gp, lp, tuple(ops))

    def lift_morphism(self, lift: CocartLift) -> WordMorphism:
        """The regrouping lift as a word morphism: identity on letters,
        units as operations."""
        flat = lift.source.flatten()
        target_flat = lift.target.flatten()
        p = FinSetMap(len(flat), len(target_flat), lift.letter_map)
        ops = tuple(self.spec.units[target_flat[t]] for t in range(len(target_flat)))
        return WordMorphism(lift.source, lift.target, lift.partition, p, ops)

    def verify_cocartesian(self, lift: CocartLift):
        """Exhaustive universal property: every morphism out of the
        source over a composed partition factors uniquely through the
        lift.  Returns (ok, witness)."""
        from .gamma import enumerate_gamma_maps, is_active

        ell = self.lift_morphism(lift)
        m = lift.partition.tgt
        for w in self.words():
            for chi in enumerate_gamma_maps(m, w.arity(), is_active):
                composite_partition = lift.partition.then(chi)
                for h in self.morphisms(lift.source, w, composite_partition):
                    factorings = [
                        v for v in self.morphisms(lift.target, w, chi)
                        if self.compose(v, ell) == h
                    ]
                    if len(factorings) != 1:
                        return False, (w, chi, h, len(factorings))
        return True, None


def verify_cocartesian(lift: CocartLift, spec, max_letters: int = 3, max_groups: int = 3):
    """Exhaustive universal-property check of a regrouping lift over the
    word window of the given operad; returns (ok, witness)."""
    return WordCategory(spec, max_letters, max_groups).verify_cocartesian(lift)


def tensor_colours(spec, colours) -> tuple[str, ...]:
    """Target colour word of the chosen regrouping lift of the fold
    partition from the tuple of single-colour groups."""
    word = GroupedWord(tuple((c,) for c in colours))
    if len(colours) == 1:
        return (colours[0],)
    fold = PointedMap(len(colours), 1, (0,) + (1,) * len(colours))
    return cocartesian_lift(word, fold).target.groups[0]


# ---------------------------------------------------------------------------
# unit, counit, triangle identities


def unit_map(X: Presheaf, env: EnvelopeValue):
    """x in X(T) |-> its envelope class at the identity refinement."""
    T = env.T
    ident = SliceObject(T, tuple(FinSetMap.identity(w) for w in T.widths))
    return {x: env.class_of(ident, x) for x in X.value(T)}


def counit_on_class(V: Presheaf, env: EnvelopeValue, c: int):
    """Collapse one envelope class to a labeling of T (fixtures with a
    unique operation per signature only).  The collapse is symmetric in
    each fiber, so it is constant on classes."""
    obj, x = env.classes[c]
    return _collapse_refinement(V.spec, env.T, obj, x)


def counit_map(V: Presheaf, env: EnvelopeValue):
    """The full collapse table; only total when every class's colour
    products exist in the fixture (always true for the one-colour
    fixtures, bounded for truncated ones)."""
    return {c: counit_on_class(V, env, c) for c in range(env.class_count)}


def _colour_product(spec, colours):
    ops = [o for o in spec.ops_with_inputs(tuple(colours))]
    if len(ops) != 1:
        raise EnvelopeError("fixture lacks a unique product operation", witness=tuple(colours))
    return spec.operations[ops[0]].output


def _collapse_refinement(spec, T: Forest, obj: SliceObject, x):
    """Multiply a labeling of a refinement down to a labeling of T; the
    operad must have exactly one operation per signature."""
    colors, ops = x
    B, legs = obj.forest, obj.legs
    new_colors = []
    for i in range(T.length + 1):
        fibers = legs[i].fibers()
        new_colors.append(tuple(
            _colour_product(spec, tuple(colors[i][e] for e in fibers[t]))
            for t in range(T.widths[i])
        ))
    new_ops = []
    for i in range(1, T.length + 1):
        level = []
        for v in range(T.widths[i]):
            sig = tuple(new_colors[i - 1][e] for e in T.chain[i - 1].fibers()[v])
            cands = [o for o in spec.ops_with_inputs(sig)
                     if spec.operations[o].output == new_colors[i][v]]
            if len(cands) != 1:
                raise EnvelopeError("fixture lacks a unique collapse operation",
                                    witness=(i, v, sig))
            level.append(cands[0])
        new_ops.append(tuple(level))
    return (tuple(new_colors), tuple(new_ops))


def check_triangles(V: Presheaf, forests, cap: int, strict: bool = True,
                    exclude_empty: bool = True, gluing: str = "profile"):
    """Both triangle identities, elementwise.

    (a) counit . unit == identity on V(T) for every window forest T;
    (b) on colour words: unit followed by the envelope of the counit is
        the identity regrouping (checked in the word model: wrapping
        each letter as a singleton group and flattening returns the
        word).
    Returns (ok, witness).
    """
    for T in forests:
        env = envelope_value(V, T, cap, strict, exclude_empty, gluing,
                             check_stability=False, check_inner=False)
        eta = unit_map(V, env)
        for x in V.value(T):
            if counit_on_class(V, env, eta[x]) != x:
                return False, ("triangle-a", T, x)
    spec = V.spec
    for total in range(1, cap + 1):
        for letters in itertools.product(spec.colors, repeat=total):
            # wrap each letter as a singleton group (the unit on colour
            # words), then multiply the groups back together (the counit
            # of the envelope collapses the extra parenthesising level)
            w = GroupedWord(tuple((c,) for c in letters))
            fold = PointedMap(total, 1, (0,) + (1,) * total)
            lifted = cocartesian_lift(w, fold)
            if lifted.target != GroupedWord((tuple(letters),)):
                return False, ("triangle-b", letters)
            if tensor_colours(spec, letters) != tuple(letters):
                return False, ("triangle-b-tensor", letters)
    return True, None
