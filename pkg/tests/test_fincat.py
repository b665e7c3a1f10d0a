import itertools
import random

import pytest

from forestcat.fincat import (
    DiagramError,
    FinCategory,
    FinSetMap,
    NonCommutingSquare,
    SetDiagram,
    all_maps,
    colimit_set,
    discrete_category,
    free_category_on_arrows,
    is_cartesian_square,
    limit_over_cone,
    pullback_finset,
)


def chain_category(n_arrows):
    """0 -> 1 -> ... -> n_arrows as a FinCategory (with composites)."""
    n = n_arrows + 1
    objects = list(range(n))
    arrows = [(i, i, f"id_{i}") for i in range(n)]
    identities = list(range(n))
    index = {}
    for s in range(n):
        for t in range(s + 1, n):
            index[(s, t)] = len(arrows)
            arrows.append((s, t, f"{s}->{t}"))
    comp = {}
    for f, (fs, ft, _) in enumerate(arrows):
        for g, (gs, gt, _) in enumerate(arrows):
            if ft != gs:
                continue
            if fs == ft:
                comp[(f, g)] = g
            elif gs == gt:
                comp[(f, g)] = f
            else:
                comp[(f, g)] = index[(fs, gt)]
    return FinCategory(objects, arrows, comp, identities)


# -- colimit_set -----------------------------------------------------------


def test_colimit_connected_shape_terminal_values():
    # 3 objects, connecting arrows spanning all of them, singleton values
    shape = chain_category(2)
    sizes = [1, 1, 1]
    transport = {k: FinSetMap(1, 1, (0,)) for k in range(len(shape.arrows))}
    d = SetDiagram(shape, sizes, transport)
    assert colimit_set(d).size == 1


def test_colimit_discrete_shape_sums_sizes():
    shape = discrete_category(3)
    d = SetDiagram(shape, [1, 2, 3], {})
    assert colimit_set(d).size == 6


def test_colimit_single_arrow_collapse():
    # a -> b with {x1, x2} both mapped to {y}: one class
    shape = free_category_on_arrows(2, [(0, 1)])
    d = SetDiagram(shape, [2, 1], {2: FinSetMap(2, 1, (0, 0))})
    res = colimit_set(d)
    assert res.size == 1
    assert res.assign[(0, 0)] == res.assign[(0, 1)] == res.assign[(1, 0)]


def brute_force_colimit_classes(d: SetDiagram) -> int:
    """Orbit closure oracle: saturate the relation x ~ transport(f)(x)."""
    elements = list(d.elements())
    rel = {e: {e} for e in elements}
    changed = True
    while changed:
        changed = False
        for k, (s, t, _) in enumerate(d.shape.arrows):
            m = d.transport[k]
            for x in range(m.src_size):
                a, b = (s, x), (t, m(x))
                union = rel[a] | rel[b]
                for e in union:
                    if rel[e] != union:
                        rel[e] = union
                        changed = True
                rel[a] = rel[b] = union
    return len({frozenset(v) for v in rel.values()})


def brute_force_limit(d: SetDiagram):
    """Matching-family oracle by full product enumeration."""
    out = []
    for family in itertools.product(*[range(s) for s in d.sizes]):
        ok = True
        for k, (s, t, _) in enumerate(d.shape.arrows):
            if d.transport[k](family[s]) != family[t]:
                ok = False
                break
        if ok:
            out.append(family)
    return out


def random_diagram(rng):
    """A functorial diagram over a chain-shaped category (transport of
    composites is forced, so functoriality holds by construction)."""
    n_arrows = rng.randint(0, 3)
    shape = chain_category(n_arrows)
    sizes = [rng.randint(0, 4) for _ in range(n_arrows + 1)]
    steps = []
    for i in range(n_arrows):
        if sizes[i] > 0 and sizes[i + 1] == 0:
            sizes[i + 1] = 1
        steps.append(FinSetMap(sizes[i], sizes[i + 1],
                               tuple(rng.randrange(sizes[i + 1]) for _ in range(sizes[i]))))
    transport = {}
    k = n_arrows + 1
    for s in range(n_arrows + 1):
        for t in range(s + 1, n_arrows + 1):
            m = FinSetMap.identity(sizes[s])
            for i in range(s, t):
                m = m.then(steps[i])
            transport[k] = m
            k += 1
    return SetDiagram(shape, sizes, transport)


def test_colimit_and_limit_against_bruteforce_random():
    rng = random.Random(20240817)
    for _ in range(1000):
        d = random_diagram(rng)
        assert colimit_set(d).size == brute_force_colimit_classes(d)
        assert limit_over_cone(d) == brute_force_limit(d)


def test_colimit_invariant_under_relabeling():
    rng = random.Random(99)
    for _ in range(200):
        d = random_diagram(rng)
        # relabel each value set by a random permutation
        perms = [list(range(s)) for s in d.sizes]
        for p in perms:
            rng.shuffle(p)
        transport = {}
        for k, (s, t, _) in enumerate(d.shape.arrows):
            m = d.transport[k]
            inv_s = [0] * d.sizes[s]
            for x, y in enumerate(perms[s]):
                inv_s[y] = x
            transport[k] = FinSetMap(m.src_size, m.tgt_size,
                                     tuple(perms[t][m(inv_s[x])] for x in range(m.src_size)))
        d2 = SetDiagram(d.shape, d.sizes, transport)
        assert colimit_set(d).size == colimit_set(d2).size


def test_nonfunctorial_diagram_rejected_with_witness():
    shape = chain_category(2)
    # arrows: identities 0,1,2 then (0,1),(0,2),(1,2)
    bad = {
        3: FinSetMap(1, 1, (0,)),
        5: FinSetMap(1, 1, (0,)),
        4: FinSetMap(1, 1, (0,)),
    }
    d = SetDiagram(shape, [1, 1, 1], bad, validate=False)
    d.validate()  # this one is fine
    shape2 = chain_category(2)
    bad2 = {
        3: FinSetMap(2, 2, (0, 1)),
        5: FinSetMap(2, 2, (1, 0)),
        4: FinSetMap(2, 2, (0, 1)),
    }
    with pytest.raises(DiagramError) as exc:
        SetDiagram(shape2, [2, 2, 2], bad2)
    assert exc.value.witness is not None


# -- limit_over_cone -------------------------------------------------------


def test_limit_discrete_is_product():
    shape = discrete_category(2)
    d = SetDiagram(shape, [2, 3], {})
    assert len(limit_over_cone(d)) == 6


def test_limit_cospan_fiber_product_over_point():
    shape = free_category_on_arrows(3, [(0, 2), (1, 2)])
    d = SetDiagram(shape, [2, 2, 1], {3: FinSetMap(2, 1, (0, 0)), 4: FinSetMap(2, 1, (0, 0))})
    assert len(limit_over_cone(d)) == 4


def test_limit_cospan_hand_computed():
    # A = {a1, a2} -> C = {c1, c2} by (c1, c2); B = {b} -> C hitting c1
    shape = free_category_on_arrows(3, [(0, 2), (1, 2)])
    d = SetDiagram(shape, [2, 1, 2], {3: FinSetMap(2, 2, (0, 1)), 4: FinSetMap(1, 2, (0,))})
    fams = limit_over_cone(d)
    assert fams == [(0, 0, 0)]


# -- pullback and cartesian squares ----------------------------------------


def test_pullback_of_identities_is_diagonal():
    f = FinSetMap.identity(3)
    pb = pullback_finset(f, f)
    assert pb.apex_size == 3
    assert all(a == b for a, b in pb.pairs)


def test_pullback_over_point_is_product():
    f = FinSetMap(2, 1, (0, 0))
    g = FinSetMap(3, 1, (0, 0, 0))
    assert pullback_finset(f, g).apex_size == 6


def test_pullback_agreeing_pairs():
    f = FinSetMap.identity(2)
    g = FinSetMap(1, 2, (0,))
    assert pullback_finset(f, g).apex_size == 1


def test_pullback_universal_property_random():
    rng = random.Random(7)

    def rand_map(t):
        n = rng.randint(0, 3)
        return FinSetMap(n, t, tuple(rng.randrange(t) for _ in range(n)))

    for _ in range(200):
        t = rng.randint(1, 3)
        f, g = rand_map(t), rand_map(t)
        pb = pullback_finset(f, g)
        # any cone factors uniquely
        n = rng.randint(0, 3)
        cones = []
        for u in all_maps(n, f.src_size):
            for v in all_maps(n, g.src_size):
                if u.then(f).table == v.then(g).table:
                    cones.append((u, v))
                    if len(cones) > 5:
                        break
            if len(cones) > 5:
                break
        for u, v in cones:
            mediators = [
                h for h in all_maps(n, pb.apex_size)
                if h.then(pb.proj1).table == u.table and h.then(pb.proj2).table == v.table
            ]
            assert len(mediators) == 1


def test_fincategory_rejects_broken_associativity():
    # two composable arrows whose composite is deliberately mis-set
    objects = [0, 1]
    arrows = [(0, 0, "id0"), (1, 1, "id1"), (0, 1, "f"), (0, 1, "g")]
    comp = {(0, 0): 0, (1, 1): 1, (0, 2): 2, (2, 1): 2, (0, 3): 3, (3, 1): 3}
    FinCategory(objects, arrows, comp, [0, 1]).validate()
    bad = dict(comp)
    bad[(2, 1)] = 3  # right unit law broken: f . id1 == g
    with pytest.raises(DiagramError):
        FinCategory(objects, arrows, bad, [0, 1]).validate()


def test_cartesian_square_identities():
    i = FinSetMap.identity(3)
    assert is_cartesian_square(i, i, i, i)


def test_cartesian_square_empty_corner_fails():
    top = FinSetMap(0, 1, ())
    left = FinSetMap(0, 2, ())
    bottom = FinSetMap(2, 1, (0, 0))
    right = FinSetMap.identity(1)
    assert is_cartesian_square(top, bottom, left, right) is False


def test_square_completed_by_pullback_is_cartesian():
    rng = random.Random(13)

    def rand_map(t):
        n = rng.randint(0, 3)
        return FinSetMap(n, t, tuple(rng.randrange(t) for _ in range(n)))

    for _ in range(100):
        t = rng.randint(1, 3)
        f, g = rand_map(t), rand_map(t)
        pb = pullback_finset(f, g)
        assert is_cartesian_square(top=pb.proj2, bottom=f, left=pb.proj1, right=g)


def test_noncommuting_square_reports_witness():
    top = FinSetMap(1, 1, (0,))
    left = FinSetMap(1, 2, (0,))
    bottom = FinSetMap(2, 2, (1, 0))
    right = FinSetMap(1, 2, (0,))
    with pytest.raises(NonCommutingSquare) as exc:
        is_cartesian_square(top, bottom, left, right)
    assert exc.value.witness == 0
