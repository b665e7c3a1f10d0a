"""Operad specifications, presheaves on forest windows, Segal checks.

An operad is given extensionally: finitely many colours, finitely many
operations per arity with ordered input signatures, a unit per colour,
a symmetric-group action and a partial-composition (grafting) table.
Nothing is trusted: associativity, unitality and equivariance are
validated on load, so a corrupted table cannot masquerade as a Segal
failure downstream.

The nerve of an operad assigns to a forest the set of labelings (a
colour per edge, an operation of matching signature per vertex) and
transports along forest maps by restricting colours and composing
operations over grouped subtrees, inserting units when a map stretches
a vertex over no levels.

A window is the set of all forests within given height/width bounds; it
is closed under the restrictions and fiber pieces the Segal checks
quantify over.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .fincat import FinSetMap
from .forests import (
    Forest,
    ForestMap,
    compose_forest_maps,
    edge_forest,
    enumerate_concrete_forests,
    forest_maps,
    plus_map,
    restrict_forest,
)
from .simplex import SimplexMap, interval_inclusion

MISSING = object()


class OperadError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class WindowError(ValueError):
    """A check needed a forest outside the presheaf's window."""

    def __init__(self, message, forest=None):
        super().__init__(message)
        self.forest = forest


@dataclass(frozen=True)
class Operation:
    op_id: str
    inputs: tuple[str, ...]
    output: str

    @property
    def arity(self) -> int:
        return len(self.inputs)


class OperadSpec:
    """Extensional operad data.  ``gamma`` and ``sigma`` are validated
    tables; generated fixtures may additionally carry ``graft_fn`` and
    ``act_fn`` closures extending them beyond the tabulation window (the
    tabulated part is what gets validated exhaustively)."""

    def __init__(self, colors, operations, units, gamma, sigma, validate=True,
                 graft_fn=None, act_fn=None):
        self.colors = tuple(colors)
        self.operations = {op.op_id: op for op in operations}
        self.units = dict(units)
        self.gamma = dict(gamma)  # (outer_id, slot, inner_id) -> result_id
        self.sigma = dict(sigma)  # (op_id, perm tuple) -> result_id
        self.graft_fn = graft_fn
        self.act_fn = act_fn
        self.by_inputs = {}
        for op in self.operations.values():
            self.by_inputs.setdefault(op.inputs, []).append(op.op_id)
        for sig in self.by_inputs:
            self.by_inputs[sig].sort()
        if validate:
            self.validate()

    def arity(self, op_id: str) -> int:
        return self.operations[op_id].arity

    def max_arity(self) -> int:
        return max((op.arity for op in self.operations.values()), default=0)

    def ops_with_inputs(self, signature: tuple[str, ...]) -> list[str]:
        return self.by_inputs.get(tuple(signature), [])

    # -- axioms ------------------------------------------------------------

    def validate(self):
        for c, u in self.units.items():
            if c not in self.colors:
                raise OperadError(f"unit declared for unknown colour {c!r}")
            op = self.operations.get(u)
            if op is None or op.inputs != (c,) or op.output != c:
                raise OperadError(f"unit of {c!r} must be a unary {c}->{c} operation", witness=u)
        for c in self.colors:
            if c not in self.units:
                raise OperadError(f"colour {c!r} has no unit")
        for (outer, slot, inner), result in self.gamma.items():
            f, g, h = self.operations[outer], self.operations[inner], self.operations[result]
            if not 0 <= slot < f.arity:
                raise OperadError("grafting slot out of range", witness=(outer, slot, inner))
            if g.output != f.inputs[slot]:
                raise OperadError("grafting colours mismatch", witness=(outer, slot, inner))
            expected_inputs = f.inputs[:slot] + g.inputs + f.inputs[slot + 1:]
            if h.inputs != expected_inputs or h.output != f.output:
                raise OperadError("grafting result has wrong signature", witness=(outer, slot, inner))
        self._validate_units_in_gamma()
        self._validate_associativity()
        self._validate_sigma()

    def _validate_units_in_gamma(self):
        for (outer, slot, inner), result in self.gamma.items():
            if inner in self.units.values() and result != outer:
                raise OperadError("composing with a unit must be the identity",
                                  witness=(outer, slot, inner))
            f = self.operations[outer]
            if outer in self.units.values() and result != inner:
                raise OperadError("a unit composed with g must be g", witness=(outer, slot, inner))

    def _validate_associativity(self):
        # nested: (f o_k g) o_{k+j} h == f o_k (g o_j h)
        for (f, k, g), fg in self.gamma.items():
            for j in range(self.arity(g)):
                for h in self.operations:
                    left1 = self.gamma.get((fg, k + j, h))
                    gh = self.gamma.get((g, j, h))
                    right = self.gamma.get((f, k, gh)) if gh is not None else None
                    if left1 is not None and right is not None and left1 != right:
                        raise OperadError("nested associativity fails", witness=(f, k, g, j, h))
        # parallel: (f o_k g) o_{l+|g|-1} h == (f o_l h) o_k g for k < l
        for (f, k, g), fg in self.gamma.items():
            for l in range(k + 1, self.arity(f)):
                for h in self.operations:
                    left = self.gamma.get((fg, l + self.arity(g) - 1, h))
                    fh = self.gamma.get((f, l, h))
                    right = self.gamma.get((fh, k, g)) if fh is not None else None
                    if left is not None and right is not None and left != right:
                        raise OperadError("parallel associativity fails", witness=(f, k, g, l, h))

    def _validate_sigma(self):
        for (op, perm), result in self.sigma.items():
            f, g = self.operations[op], self.operations[result]
            if sorted(perm) != list(range(f.arity)):
                raise OperadError("sigma entry is not a permutation", witness=(op, perm))
            if g.output != f.output or g.inputs != tuple(f.inputs[p] for p in perm):
                raise OperadError("sigma entry has wrong signature", witness=(op, perm))
        for op in self.operations:
            n = self.arity(op)
            ident = tuple(range(n))
            if (op, ident) in self.sigma and self.sigma[(op, ident)] != op:
                raise OperadError("identity permutation must act trivially", witness=op)
        for (op, p), fp in self.sigma.items():
            for q in itertools.permutations(range(len(p))):
                fpq = self.sigma.get((fp, q))
                pq = tuple(p[q[t]] for t in range(len(p)))
                direct = self.sigma.get((op, pq))
                if fpq is not None and direct is not None and fpq != direct:
                    raise OperadError("sigma is not a group action", witness=(op, p, q))

    # -- derived composition -------------------------------------------------

    def act(self, op_id: str, perm: tuple[int, ...]) -> str:
        """The operation with inputs re-indexed: result.inputs[t] ==
        op.inputs[perm[t]]."""
        n = self.arity(op_id)
        if tuple(perm) == tuple(range(n)):
            return op_id
        key = (op_id, tuple(perm))
        if key in self.sigma:
            return self.sigma[key]
        if self.act_fn is not None:
            return self.act_fn(self.operations[op_id], tuple(perm))
        raise OperadError("sigma table lacks an entry", witness=key)

    def graft(self, outer: str, slot: int, inner: str) -> str:
        if inner in self.units.values():
            return outer
        if outer in self.units.values():
            return inner
        key = (outer, slot, inner)
        if key in self.gamma:
            return self.gamma[key]
        if self.graft_fn is not None:
            result = self.graft_fn(self.operations[outer], slot, self.operations[inner])
            if result is None:
                raise OperadError("composite exceeds the operad's arity window", witness=key)
            return result
        raise OperadError("gamma table lacks an entry", witness=key)

    def multi_compose(self, outer: str, inners: list[str]) -> str:
        """Full composition gamma(outer; inners), substituting nullary
        inners first so intermediate arities never exceed
        max(arity(outer), sum of inner arities)."""
        n = self.arity(outer)
        if len(inners) != n:
            raise OperadError("wrong number of inner operations")
        order = sorted(range(n), key=lambda k: (self.arity(inners[k]) != 0, -k))
        current = outer
        slot_of = list(range(n))
        for k in order:
            current = self.graft(current, slot_of[k], inners[k])
            shift = self.arity(inners[k]) - 1
            for j in range(n):
                if slot_of[j] > slot_of[k]:
                    slot_of[j] += shift
        return current

    # -- serialisation -------------------------------------------------------

    def to_json(self) -> dict:
        ops = {}
        for op in sorted(self.operations.values(), key=lambda o: (o.arity, o.op_id)):
            ops.setdefault(str(op.arity), []).append(
                {"inputs": list(op.inputs), "output": op.output, "id": op.op_id}
            )
        return {
            "colors": list(self.colors),
            "ops": ops,
            "units": dict(sorted(self.units.items())),
            "gamma": [
                {"outer": o, "slot": s, "inner": i, "result": r}
                for (o, s, i), r in sorted(self.gamma.items())
            ],
            "sigma": [
                {"op": o, "perm": list(p), "result": r}
                for (o, p), r in sorted(self.sigma.items())
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "OperadSpec":
        operations = [
            Operation(entry["id"], tuple(entry["inputs"]), entry["output"])
            for group in data["ops"].values()
            for entry in group
        ]
        gamma = {(e["outer"], e["slot"], e["inner"]): e["result"] for e in data.get("gamma", [])}
        sigma = {(e["op"], tuple(e["perm"])): e["result"] for e in data.get("sigma", [])}
        return OperadSpec(tuple(data["colors"]), operations, data["units"], gamma, sigma)


# ---------------------------------------------------------------------------
# fixtures


def _close_gamma(operations, compose_fn, table_arity):
    """Tabulate gamma for all pairs whose composite stays within the
    tabulation window."""
    gamma = {}
    for f in operations:
        for slot in range(f.arity):
            for g in operations:
                if g.output != f.inputs[slot]:
                    continue
                if f.arity - 1 + g.arity > table_arity:
                    continue
                result = compose_fn(f, slot, g)
                if result is not None:
                    gamma[(f.op_id, slot, g.op_id)] = result
    return gamma


def _close_sigma(operations, act_fn, table_arity):
    sigma = {}
    for f in operations:
        if f.arity > table_arity:
            continue
        for perm in itertools.permutations(range(f.arity)):
            sigma[(f.op_id, perm)] = act_fn(f, perm)
    return sigma


def _fixture(colors, ops, units, compose_fn, act_fn, table_arity):
    gamma = _close_gamma(ops, compose_fn, table_arity)
    sigma = _close_sigma(ops, act_fn, table_arity)
    return OperadSpec(colors, ops, units, gamma, sigma,
                      graft_fn=compose_fn, act_fn=act_fn)


def com_operad(max_arity: int = 5, table_arity: int = 4) -> OperadSpec:
    """One colour, one operation per arity."""
    ops = [Operation(f"m{n}", ("*",) * n, "*") for n in range(max_arity + 1)]

    def compose_fn(f, k, g):
        return f"m{f.arity - 1 + g.arity}" if f.arity - 1 + g.arity <= max_arity else None

    return _fixture(("*",), ops, {"*": "m1"}, compose_fn, lambda f, perm: f.op_id,
                    min(table_arity, max_arity))


def _ass_id(word: tuple[int, ...]) -> str:
    return "w" + "".join(str(x) for x in word) if word else "w()"


def ass_operad(max_arity: int = 4, table_arity: int = 4) -> OperadSpec:
    """One colour, the n! multiplication orders in arity n.

    An operation is a word: the order in which the inputs are
    multiplied.  Grafting substitutes a word into a letter; the
    symmetric action relabels letters.
    """
    ops, words = [], {}
    for n in range(max_arity + 1):
        for word in itertools.permutations(range(n)):
            op_id = f"a{n}|" + ",".join(map(str, word))
            ops.append(Operation(op_id, ("*",) * n, "*"))
            words[op_id] = word

    def compose_fn(f, k, g):
        fw, gw = words[f.op_id], words[g.op_id]
        m = len(gw)
        if len(fw) - 1 + m > max_arity:
            return None
        out = []
        for s in fw:
            if s == k:
                out.extend(k + j for j in gw)
            else:
                out.append(s if s < k else s + m - 1)
        return f"a{len(out)}|" + ",".join(map(str, out))

    def act_fn(f, perm):
        fw = words[f.op_id]
        inv = [0] * len(perm)
        for t, p in enumerate(perm):
            inv[p] = t
        out = tuple(inv[s] for s in fw)
        return f"a{len(out)}|" + ",".join(map(str, out))

    return _fixture(("*",), ops, {"*": "a1|0"}, compose_fn, act_fn,
                    min(table_arity, max_arity))


def _tree_leaves(t):
    if isinstance(t, int):
        return [t]
    return _tree_leaves(t[0]) + _tree_leaves(t[1])


def _tree_relabel(t, table):
    if isinstance(t, int):
        return table[t]
    return (_tree_relabel(t[0], table), _tree_relabel(t[1], table))


def _tree_id(n, t):
    return f"t{n}|{t}" if n != 1 else "e"


def free_binary_operad(max_arity: int = 4) -> OperadSpec:
    """The free symmetric operad on one binary generator, truncated: an
    arity-n operation is a planar binary tree with leaves labeled by the
    n slots."""
    shapes = {1: [0]}
    for n in range(2, max_arity + 1):
        shapes[n] = []
        # binary trees on slots; build by choosing a left subset
        def build(slots):
            if len(slots) == 1:
                return [slots[0]]
            out = []
            for left_size in range(1, len(slots)):
                for left_slots in itertools.combinations(slots, left_size):
                    right_slots = tuple(s for s in slots if s not in left_slots)
                    for lt in build(left_slots):
                        for rt in build(right_slots):
                            out.append((lt, rt))
            return out
        shapes[n] = build(tuple(range(n)))
    ops = [Operation("e", ("*",), "*")]
    trees = {"e": 0}
    for n in range(2, max_arity + 1):
        for t in shapes[n]:
            op_id = _tree_id(n, t)
            ops.append(Operation(op_id, ("*",) * n, "*"))
            trees[op_id] = t

    def compose_fn(f, k, g):
        ft, gt = trees[f.op_id], trees[g.op_id]
        m = g.arity
        if f.arity - 1 + m > max_arity or f.arity - 1 + m < 1:
            return None

        def relab_f(s):
            return s if s < k else s + m - 1

        def subst(t):
            if isinstance(t, int):
                if t == k:
                    return _tree_relabel(gt, {j: k + j for j in range(m)}) if not isinstance(gt, int) \
                        else k + gt
                return relab_f(t)
            return (subst(t[0]), subst(t[1]))

        new = subst(ft)
        return _tree_id(f.arity - 1 + m, new)

    def act_fn(f, perm):
        inv = [0] * len(perm)
        for t, p in enumerate(perm):
            inv[p] = t
        new = _tree_relabel(trees[f.op_id], {s: inv[s] for s in range(f.arity)}) \
            if not isinstance(trees[f.op_id], int) else trees[f.op_id]
        return _tree_id(f.arity, new)

    return _fixture(("*",), ops, {"*": "e"}, compose_fn, act_fn, min(4, max_arity))


def two_color_operad(max_arity: int = 4, table_arity: int = 4) -> OperadSpec:
    """Two colours a < b; one operation per signature, with output the
    maximum of the inputs (and a for the empty input)."""
    colors = ("a", "b")
    ops = []
    for n in range(max_arity + 1):
        for sig in itertools.product(colors, repeat=n):
            out = "b" if "b" in sig else "a"
            ops.append(Operation(f"x{n}|{''.join(sig)}", sig, out))

    def compose_fn(f, k, g):
        sig = f.inputs[:k] + g.inputs + f.inputs[k + 1:]
        if len(sig) > max_arity:
            return None
        return f"x{len(sig)}|{''.join(sig)}"

    def act_fn(f, perm):
        sig = tuple(f.inputs[p] for p in perm)
        return f"x{len(sig)}|{''.join(sig)}"

    return _fixture(colors, ops, {"a": "x1|a", "b": "x1|b"}, compose_fn, act_fn,
                    min(table_arity, max_arity))


def free_monoid_operad(max_color: int = 4, max_arity: int = 4) -> OperadSpec:
    """Colours 0..max_color (word lengths in a free monoid on one
    generator); exactly one operation per signature whose inputs sum to
    its output.  Signature-unique and representably monoidal: the
    fixture used for counit and triangle checks."""
    colors = tuple(str(c) for c in range(max_color + 1))
    ops = []
    for n in range(max_arity + 1):
        for sig in itertools.product(range(max_color + 1), repeat=n):
            if sum(sig) <= max_color:
                ops.append(Operation(
                    f"s{n}|{','.join(map(str, sig))}",
                    tuple(str(c) for c in sig),
                    str(sum(sig)),
                ))

    def compose_fn(f, k, g):
        sig = f.inputs[:k] + g.inputs + f.inputs[k + 1:]
        if sum(int(c) for c in sig) > max_color or len(sig) > max_arity:
            return None
        return f"s{len(sig)}|{','.join(sig)}"

    def act_fn(f, perm):
        sig = tuple(f.inputs[p] for p in perm)
        return f"s{len(sig)}|{','.join(sig)}"

    units = {str(c): f"s1|{c}" for c in range(max_color + 1)}
    return _fixture(colors, ops, units, compose_fn, act_fn, min(3, max_arity))


FIXTURES = {
    "com": com_operad,
    "ass": ass_operad,
    "free-binary": free_binary_operad,
    "two-color": two_color_operad,
    "free-monoid": free_monoid_operad,
}


# ---------------------------------------------------------------------------
# windows and presheaves


class Window:
    """All forests with length <= max_height and widths <= max_width
    (optionally a total-size cap), in a deterministic order.  Such a
    window is closed under level restrictions, edge pieces and the
    fiber pieces the shrub condition quantifies over.  Membership is
    checked from the bounds; the forest list materializes on demand."""

    def __init__(self, max_height: int, max_width: int, max_total: int | None = None):
        self.max_height = max_height
        self.max_width = max_width
        self.max_total = max_total
        self._forests = None

    @property
    def forests(self):
        if self._forests is None:
            self._forests = sorted(
                enumerate_concrete_forests(self.max_height, self.max_width,
                                           total_cap=self.max_total),
                key=lambda F: F.key(),
            )
        return self._forests

    def __contains__(self, F: Forest) -> bool:
        if F.length > self.max_height or any(w > self.max_width for w in F.widths):
            return False
        if self.max_total is not None and F.total_size() > self.max_total:
            return False
        return True

    def __iter__(self):
        return iter(self.forests)

    def __len__(self):
        return len(self.forests)


class Presheaf:
    """Set-valued contravariant functor on a window of forests: a finite
    value per forest, a transport value(B) -> value(A) per map A -> B."""

    def __init__(self, window):
        self.window = window

    def value(self, F: Forest) -> tuple:
        raise NotImplementedError

    def transport(self, m: ForestMap) -> dict:
        """Mapping from value(m.tgt) to value(m.src); entries may be
        MISSING for corrupted presheaves."""
        raise NotImplementedError

    def transport_element(self, m: ForestMap, x):
        """Image of a single element under transport(m)."""
        return self.transport(m).get(x, MISSING)

    def element_structure(self, F: Forest, x):
        """Levelwise (colors, vertex labels) of an element, when the
        presheaf's elements are labelings; None for opaque elements.
        Used for canonical forms in the envelope."""
        return None

    def act_vertex(self, label, perm: tuple[int, ...]):
        """Reindex a vertex label's inputs (labelings only)."""
        raise NotImplementedError

    def vertex_label_choices(self, signature: tuple, output):
        """All vertex labels with the given ordered input signature and
        output (labelings only)."""
        raise NotImplementedError

    def colors(self):
        raise NotImplementedError


class NervePresheaf(Presheaf):
    """The nerve of an operad: labelings of forests."""

    def __init__(self, spec: OperadSpec, window: Window):
        super().__init__(window)
        self.spec = spec
        if spec.max_arity() < window.max_width:
            raise OperadError(
                f"window needs arities up to {window.max_width}, "
                f"operad stops at {spec.max_arity()}"
            )
        self._values = {}
        self._transports = {}

    def value(self, F: Forest) -> tuple:
        key = F.key()
        if key in self._values:
            return self._values[key]
        if F not in self.window:
            raise WindowError("forest outside the window", forest=F)
        level0 = list(itertools.product(self.spec.colors, repeat=F.widths[0]))
        partial = [((colors,), ()) for colors in level0]
        for i in range(1, F.length + 1):
            fibers = F.chain[i - 1].fibers()
            new_partial = []
            for colors, ops in partial:
                choices_per_vertex = []
                for v in range(F.widths[i]):
                    sig = tuple(colors[i - 1][e] for e in fibers[v])
                    choices_per_vertex.append(self.spec.ops_with_inputs(sig))
                for combo in itertools.product(*choices_per_vertex):
                    level_colors = tuple(self.spec.operations[o].output for o in combo)
                    new_partial.append((colors + (level_colors,), ops + (combo,)))
            partial = new_partial
        out = tuple(sorted(partial))
        self._values[key] = out
        return out

    def _subtree_composite(self, x, G: Forest, j0: int, j1: int, root: int):
        """Composite operation of the subtree of G between levels j0 and
        j1 hanging under edge `root` at level j1, together with the
        order in which level-j0 edges appear as its inputs."""
        colors, ops = x
        if j1 == j0:
            return self.spec.units[colors[j0][root]], (root,)
        children = G.chain[j1 - 1].fibers()[root]
        inner = [self._subtree_composite(x, G, j0, j1 - 1, c) for c in children]
        op = self.spec.multi_compose(ops[j1 - 1][root], [o for o, _ in inner])
        order = tuple(e for _, block in inner for e in block)
        return op, order

    def transport_element(self, m: ForestMap, x):
        F, G, phi = m.src, m.tgt, m.phi
        colors, ops = x
        new_colors = tuple(
            tuple(colors[phi(i)][m.components[i](e)] for e in range(F.widths[i]))
            for i in range(F.length + 1)
        )
        new_ops = []
        for i in range(1, F.length + 1):
            level_ops = []
            fibers = F.chain[i - 1].fibers()
            for v in range(F.widths[i]):
                comp, order = self._subtree_composite(
                    x, G, phi(i - 1), phi(i), m.components[i](v)
                )
                pos = {e: t for t, e in enumerate(order)}
                perm = tuple(pos[m.components[i - 1](a)] for a in fibers[v])
                level_ops.append(self.spec.act(comp, perm))
            new_ops.append(tuple(level_ops))
        return (new_colors, tuple(new_ops))

    def transport(self, m: ForestMap) -> dict:
        key = m.key()
        if key not in self._transports:
            self._transports[key] = {
                x: self.transport_element(m, x) for x in self.value(m.tgt)
            }
        return self._transports[key]

    def element_structure(self, F: Forest, x):
        return x

    def act_vertex(self, label, perm):
        return self.spec.act(label, perm)

    def vertex_label_choices(self, signature, output):
        return [o for o in self.spec.ops_with_inputs(tuple(signature))
                if self.spec.operations[o].output == output]

    def colors(self):
        return self.spec.colors


def nerve_of_operad(spec: OperadSpec, window: Window) -> NervePresheaf:
    return NervePresheaf(spec, window)


class TerminalPresheaf(Presheaf):
    def value(self, F: Forest) -> tuple:
        return ("*",)

    def transport(self, m: ForestMap) -> dict:
        return {"*": "*"}

    def element_structure(self, F: Forest, x):
        colors = tuple(("*",) * w for w in F.widths)
        labels = tuple(("*",) * w for w in F.widths[1:])
        return colors, labels

    def act_vertex(self, label, perm):
        return label

    def vertex_label_choices(self, signature, output):
        return ["*"]

    def colors(self):
        return ("*",)


class RepresentablePresheaf(Presheaf):
    """Restricted Yoneda presheaf of a forest T: maps into T."""

    def __init__(self, T: Forest, window: Window):
        super().__init__(window)
        self.T = T
        self._values = {}

    def value(self, F: Forest) -> tuple:
        key = F.key()
        if key not in self._values:
            self._values[key] = tuple(sorted(g.key() for g in forest_maps(F, self.T)))
        return self._values[key]

    def transport(self, m: ForestMap) -> dict:
        out = {}
        by_key = {g.key(): g for g in forest_maps(m.tgt, self.T)}
        for gk in self.value(m.tgt):
            out[gk] = compose_forest_maps(by_key[gk], m).key()
        return out


class TabulatedPresheaf(Presheaf):
    def __init__(self, window, values: dict, transports: dict):
        super().__init__(window)
        self.values = values
        self.transports = transports

    def value(self, F: Forest) -> tuple:
        key = F.key()
        if key not in self.values:
            raise WindowError("forest not tabulated", forest=F)
        return self.values[key]

    def transport(self, m: ForestMap) -> dict:
        key = m.key()
        if key not in self.transports:
            raise WindowError("transport not tabulated", forest=m)
        return self.transports[key]


class CorruptedPresheaf(Presheaf):
    """Overlay corruption: drop one element, or add a duplicate of one.

    Transports into a forest with an added element send the new element
    where its template goes; transports producing a removed element
    report MISSING.
    """

    def __init__(self, base: Presheaf, removed=None, added=None):
        super().__init__(base.window)
        self.base = base
        self.removed = removed  # (forest key, element)
        self.added = added  # (forest key, template element, new tag)

    def value(self, F: Forest) -> tuple:
        vals = self.base.value(F)
        key = F.key()
        if self.removed and self.removed[0] == key:
            vals = tuple(v for v in vals if v != self.removed[1])
        if self.added and self.added[0] == key:
            vals = vals + ((self.added[2], self.added[1]),)
        return vals

    def transport(self, m: ForestMap) -> dict:
        base_map = self.base.transport(m)
        out = {}
        for x in self.value(m.tgt):
            if self.added and m.tgt.key() == self.added[0] and isinstance(x, tuple) \
               and len(x) == 2 and x[0] == self.added[2]:
                y = base_map.get(x[1], MISSING)
            else:
                y = base_map.get(x, MISSING)
            if self.removed and m.src.key() == self.removed[0] and y == self.removed[1]:
                y = MISSING
            out[x] = y
        return out


# ---------------------------------------------------------------------------
# the Segal conditions


@dataclass
class CheckResult:
    ok: bool
    witness: object = None
    checked: int = 0


@dataclass
class SegalReport:
    level: CheckResult
    root: CheckResult
    shrub: CheckResult
    window_note: str = (
        "checks quantify over the finite window only; an infinite pattern "
        "may have conditions beyond it"
    )

    @property
    def all_pass(self) -> bool:
        return self.level.ok and self.root.ok and self.shrub.ok


def _bijection_check(pairs, codomain):
    """pairs: list of (x, image tuple); codomain: list of tuples."""
    seen = {}
    for x, img in pairs:
        if any(v is MISSING for v in img):
            return False, ("missing transport", x)
        if img in seen:
            return False, ("not injective", seen[img], x)
        seen[img] = x
    for fam in codomain:
        if fam not in seen:
            return False, ("not surjective", fam)
    return True, None


def level_segments(F: Forest):
    """The length-1 restrictions of F and their shared edge pieces."""
    segs = []
    for i in range(F.length):
        seg, lift = restrict_forest(F, interval_inclusion(i, 1, F.length))
        segs.append((seg, lift))
    return segs


def check_level(X: Presheaf, F: Forest) -> CheckResult:
    """The canonical map from X(F) to the fiber product of the values on
    the length-1 segments, matched over the shared edges, must be a
    bijection.  Vacuous for length <= 1."""
    n = F.length
    if n <= 1:
        return CheckResult(True, None, 0)
    segs = level_segments(F)
    seg_transports = [X.transport(lift) for _, lift in segs]
    seg_values = [X.value(seg) for seg, _ in segs]
    edge_maps = []
    for i in range(1, n):
        seg_below, _ = segs[i - 1]
        seg_above, _ = segs[i]
        edge, top_lift = restrict_forest(seg_below, interval_inclusion(1, 0, 1))
        _, bottom_lift = restrict_forest(seg_above, interval_inclusion(0, 0, 1))
        edge_maps.append((X.transport(top_lift), X.transport(bottom_lift)))
    families = []
    for combo in itertools.product(*seg_values):
        ok = True
        for i in range(1, n):
            top, bottom = edge_maps[i - 1]
            if top.get(combo[i - 1], MISSING) != bottom.get(combo[i], MISSING) or \
               top.get(combo[i - 1], MISSING) is MISSING:
                ok = False
                break
        if ok:
            families.append(combo)
    pairs = [
        (x, tuple(seg_transports[i].get(x, MISSING) for i in range(n)))
        for x in X.value(F)
    ]
    ok, witness = _bijection_check(pairs, families)
    return CheckResult(ok, witness if not ok else None, 1)


def check_root(X: Presheaf, F: Forest, general_form: bool = False) -> CheckResult:
    """For a length-0 forest on <k>: X(F) must be the product of the
    values on its k single-edge pieces.

    With ``general_form`` the right-hand side is computed as a genuine
    limit over the category of active arrows from the elementary (which
    is discrete here, since every such arrow has a unique inert
    retraction), exercising the general machinery the product form
    specializes."""
    if F.length != 0:
        raise ValueError("root decomposition applies to length-0 forests")
    k = F.widths[0]
    piece = edge_forest(1)
    transports = []
    for i in range(k):
        m = plus_map(piece, F, SimplexMap.identity(0), (FinSetMap(1, k, (i,)),))
        transports.append(X.transport(m))
    piece_vals = X.value(piece) if k > 0 else ()
    if general_form:
        from .fincat import SetDiagram, discrete_category, limit_over_cone

        shape = discrete_category(k)
        d = SetDiagram(shape, [len(piece_vals)] * k, {})
        codomain = [
            tuple(piece_vals[j] for j in fam) for fam in limit_over_cone(d)
        ]
    else:
        codomain = list(itertools.product(piece_vals, repeat=k)) if k > 0 else [()]
    pairs = [
        (x, tuple(transports[i].get(x, MISSING) for i in range(k)))
        for x in X.value(F)
    ]
    ok, witness = _bijection_check(pairs, codomain)
    return CheckResult(ok, witness if not ok else None, 1)


def check_shrub(X: Presheaf, F: Forest, general_form: bool = False) -> CheckResult:
    """For a length-1 forest O_0 -> O_1: X(F) must be the product over
    the roots of the values on the fiber pieces (fiber_i -> <1>).

    The pieces are the active pullbacks of the chain over each root;
    with ``general_form`` the product is computed as a limit over the
    (discrete) category of active arrows from the elementary."""
    if F.length != 1:
        raise ValueError("shrub decomposition applies to length-1 forests")
    w1 = F.widths[1]
    transports = []
    piece_vals = []
    for i in range(w1):
        fiber = F.chain[0].fibers()[i]
        piece = Forest((len(fiber), 1), (FinSetMap(len(fiber), 1, (0,) * len(fiber)),))
        m = plus_map(
            piece, F, SimplexMap.identity(1),
            (FinSetMap(len(fiber), F.widths[0], fiber), FinSetMap(1, w1, (i,))),
        )
        transports.append(X.transport(m))
        piece_vals.append(X.value(piece))
    if general_form:
        from .fincat import SetDiagram, discrete_category, limit_over_cone

        shape = discrete_category(w1)
        d = SetDiagram(shape, [len(v) for v in piece_vals], {})
        codomain = [
            tuple(piece_vals[i][fam[i]] for i in range(w1))
            for fam in limit_over_cone(d)
        ]
    else:
        codomain = list(itertools.product(*piece_vals)) if w1 > 0 else [()]
    pairs = [
        (x, tuple(transports[i].get(x, MISSING) for i in range(w1)))
        for x in X.value(F)
    ]
    ok, witness = _bijection_check(pairs, codomain)
    return CheckResult(ok, witness if not ok else None, 1)


def check_segal(X: Presheaf, forests=None, stop_early: bool = False) -> SegalReport:
    """Aggregate the three decompositions over every applicable forest,
    reporting the first failure of each kind.  With ``stop_early`` a
    kind is not re-checked after its first failure (the report carries
    only the first witness anyway), which matters when values are
    expensive to build."""
    if forests is None:
        forests = list(X.window)
    level = CheckResult(True, None, 0)
    root = CheckResult(True, None, 0)
    shrub = CheckResult(True, None, 0)
    for F in sorted(forests, key=lambda F: (F.total_size(), F.key())):
        if F.length == 0:
            if stop_early and not root.ok:
                continue
            r = check_root(X, F)
            root.checked += 1
            if not r.ok and root.ok:
                root.ok, root.witness = False, (F, r.witness)
        elif F.length == 1:
            if stop_early and not shrub.ok:
                continue
            r = check_shrub(X, F)
            shrub.checked += 1
            if not r.ok and shrub.ok:
                shrub.ok, shrub.witness = False, (F, r.witness)
        else:
            if stop_early and not level.ok:
                continue
            r = check_level(X, F)
            level.checked += 1
            if not r.ok and level.ok:
                level.ok, level.witness = False, (F, r.witness)
    return SegalReport(level, root, shrub)


def _check_pieces(G: Forest):
    """The forests whose values a Segal check of G consults."""
    pieces = set()
    if G.length >= 2:
        for i in range(G.length):
            seg, _ = restrict_forest(G, interval_inclusion(i, 1, G.length))
            pieces.add(seg.key())
            for j in (0, 1):
                edge, _ = restrict_forest(seg, interval_inclusion(j, 0, 1))
                pieces.add(edge.key())
    elif G.length == 1:
        for i in range(G.widths[1]):
            fiber = G.chain[0].fibers()[i]
            piece = Forest((len(fiber), 1), (FinSetMap(len(fiber), 1, (0,) * len(fiber)),))
            pieces.add(piece.key())
    else:
        pieces.add(edge_forest(1).key())
    return pieces


def touching_index(window) -> dict:
    """piece key -> forests of the window whose checks consult it."""
    index = {}
    for G in window:
        for key in _check_pieces(G):
            index.setdefault(key, []).append(G)
    return index


def forests_touching(F: Forest, window, index: dict | None = None) -> list:
    """The window forests whose Segal check involves F (for targeted
    re-checking after a corruption at F): F itself plus any forest one
    of whose segment / edge / fiber pieces equals F."""
    if index is None:
        index = touching_index(window)
    fkey = F.key()
    out = [F]
    for G in index.get(fkey, []):
        if G.key() != fkey:
            out.append(G)
    return out


def validate_presheaf_functoriality(X: Presheaf, map_pairs) -> tuple[bool, object]:
    """transport(g . f) == transport(f) . transport(g) for the supplied
    composable pairs (g after f)."""
    for f, g in map_pairs:
        composite = compose_forest_maps(g, f)
        tf, tg, tc = X.transport(f), X.transport(g), X.transport(composite)
        for x in X.value(g.tgt):
            via = tf.get(tg.get(x, MISSING), MISSING)
            direct = tc.get(x, MISSING)
            if via != direct:
                return False, (f, g, x)
    return True, None


def checking_maps(window) -> list:
    """Every forest map whose transport the Segal checks of the window
    consult: segment lifts with their edge restrictions, root pieces and
    shrub fiber pieces."""
    out = {}

    def add(m):
        out.setdefault(m.key(), m)

    for G in window:
        if G.length >= 2:
            segs = level_segments(G)
            for _, lift in segs:
                add(lift)
            for i in range(1, G.length):
                seg_below, _ = segs[i - 1]
                seg_above, _ = segs[i]
                _, top_lift = restrict_forest(seg_below, interval_inclusion(1, 0, 1))
                _, bottom_lift = restrict_forest(seg_above, interval_inclusion(0, 0, 1))
                add(top_lift)
                add(bottom_lift)
        elif G.length == 1:
            for i in range(G.widths[1]):
                fiber = G.chain[0].fibers()[i]
                piece = Forest((len(fiber), 1), (FinSetMap(len(fiber), 1, (0,) * len(fiber)),))
                add(plus_map(
                    piece, G, SimplexMap.identity(1),
                    (FinSetMap(len(fiber), G.widths[0], fiber), FinSetMap(1, G.widths[1], (i,))),
                ))
        else:
            piece = edge_forest(1)
            for i in range(G.widths[0]):
                add(plus_map(piece, G, SimplexMap.identity(0), (FinSetMap(1, G.widths[0], (i,)),)))
    return list(out.values())


def presheaf_to_json(X: Presheaf, maps=None) -> dict:
    """Tabulated JSON form: values keyed by the canonical forest
    encoding, plus transport tables (defaulting to every map the window's
    checks consult)."""
    if maps is None:
        maps = checking_maps(X.window)
    values = {}
    for F in X.window:
        values[json.dumps(F.to_json(), sort_keys=True)] = [repr(v) for v in X.value(F)]
    return {
        "window": {"max_height": X.window.max_height, "max_width": X.window.max_width},
        "values": values,
        "transports": [
            {
                "phi": list(m.phi.table),
                "src": m.src.to_json(),
                "tgt": m.tgt.to_json(),
                "components": [c.to_json() for c in m.components],
                "table": {repr(k): repr(v) for k, v in X.transport(m).items()},
            }
            for m in maps
        ],
    }


def tabulated_from_json(data: dict) -> TabulatedPresheaf:
    """Inverse of presheaf_to_json up to element opacity: elements are
    their serialized names."""
    window = Window(data["window"]["max_height"], data["window"]["max_width"])
    values = {}
    for key, elems in data["values"].items():
        F = Forest.from_json(json.loads(key))
        values[F.key()] = tuple(elems)
    transports = {}
    for entry in data["transports"]:
        src = Forest.from_json(entry["src"])
        tgt = Forest.from_json(entry["tgt"])
        phi = SimplexMap(src.length, tgt.length, tuple(entry["phi"]))
        comps = tuple(FinSetMap.from_json(c) for c in entry["components"])
        from .forests import validate_forest_map

        m = validate_forest_map(src, tgt, phi, comps)
        table = dict(entry["table"])
        transports[m.key()] = {
            x: table[x] for x in values.get(tgt.key(), ()) if x in table
        }
    return TabulatedPresheaf(window, values, transports)
