"""Property-style tests across modules: invariance under relabeling,
composition laws of the word category, and the factorization shape of
mixed forest maps."""

import itertools
import random

from forestcat.fincat import FinSetMap
from forestcat.forests import (
    Forest,
    are_isomorphic,
    classify_forest_map,
    compose_forest_maps,
    corolla,
    eta,
    factorize_forest_map,
    forest_encoding,
    forest_maps,
    make_forest,
    restrict_forest,
)
from forestcat.gamma import PointedMap, enumerate_gamma_maps, is_active
from forestcat.simplex import SimplexMap
from forestcat.segal import com_operad, two_color_operad
from forestcat.envelope import GroupedWord, WordCategory, cocartesian_lift


def random_forest(rng, max_len=2, max_width=3):
    n = rng.randint(0, max_len)
    widths = [rng.randint(0, max_width) for _ in range(n + 1)]
    for i in range(n):
        if widths[i] > 0 and widths[i + 1] == 0:
            widths[i + 1] = 1
    chain = [
        FinSetMap(widths[i], widths[i + 1],
                  tuple(rng.randrange(widths[i + 1]) for _ in range(widths[i])))
        for i in range(n)
    ]
    return Forest(tuple(widths), tuple(chain))


def relabel_forest(rng, F):
    perms = [list(range(w)) for w in F.widths]
    for p in perms:
        rng.shuffle(p)
    inv = [{old: new for new, old in enumerate(p)} for p in perms]
    chain = tuple(
        FinSetMap(F.widths[i], F.widths[i + 1],
                  tuple(inv[i + 1][F.chain[i](p)] for p in perms[i]))
        for i in range(F.length)
    )
    return Forest(F.widths, chain)


def test_forest_encoding_invariant_under_relabeling():
    rng = random.Random(424242)
    for _ in range(500):
        F = random_forest(rng)
        G = relabel_forest(rng, F)
        assert forest_encoding(F) == forest_encoding(G)
        assert are_isomorphic(F, G)


def test_factorization_of_corolla_to_tree_maps():
    T = make_forest([PointedMap(3, 2, (0, 1, 1, 2)), PointedMap(2, 1, (0, 1, 1))])
    # over the endpoint-preserving [1] -> [2] reindexing, the equifibred
    # condition forces bijective components: those maps are the
    # level-reindexings, active outright
    skips = [m for m in forest_maps(corolla(3), T) if m.phi.table == (0, 2)]
    assert len(skips) == 6
    for m in skips:
        assert classify_forest_map(m).active
        i, a = factorize_forest_map(m)
        assert a.key() == m.key()
        assert i.src.key() == T.key() and i.phi.table == (0, 1, 2)
    # a genuinely mixed map: both levels land at level 0 of the tree;
    # its middle forest is the refinement the inert part includes
    two_chain = Forest((2, 2), (FinSetMap.identity(2),))
    mixed = [m for m in forest_maps(two_chain, T) if m.phi.table == (0, 0)]
    assert mixed
    from forestcat.forests import edge_forest

    for m in mixed:
        cls = classify_forest_map(m)
        assert not cls.inert and not cls.active
        i, a = factorize_forest_map(m)
        assert classify_forest_map(i).inert and classify_forest_map(a).active
        assert compose_forest_maps(i, a).key() == m.key()
        assert are_isomorphic(i.src, edge_forest(2))


def test_word_category_composition_is_associative():
    spec = two_color_operad(4)
    wc = WordCategory(spec, max_letters=2, max_groups=2)
    words = [w for w in wc.words() if w.arity() >= 1]
    rng = random.Random(7)
    triples = 0
    for u in words:
        for v in words:
            for part1 in enumerate_gamma_maps(u.arity(), v.arity(), is_active):
                fs = wc.morphisms(u, v, part1)
                if not fs:
                    continue
                for w in words:
                    for part2 in enumerate_gamma_maps(v.arity(), w.arity(), is_active):
                        gs = wc.morphisms(v, w, part2)
                        if not gs:
                            continue
                        for z in words:
                            for part3 in enumerate_gamma_maps(w.arity(), z.arity(), is_active):
                                hs = wc.morphisms(w, z, part3)
                                if not hs:
                                    continue
                                f = rng.choice(fs)
                                g = rng.choice(gs)
                                h = rng.choice(hs)
                                left = wc.compose(h, wc.compose(g, f))
                                right = wc.compose(wc.compose(h, g), f)
                                assert left == right
                                triples += 1
                                if triples > 400:
                                    return
    assert triples > 0


def test_lift_letter_map_is_a_bijection():
    rng = random.Random(99)
    spec = com_operad(5)
    for _ in range(200):
        n = rng.randint(1, 4)
        groups = tuple(tuple("*" for _ in range(rng.randint(0, 2))) for _ in range(n))
        w = GroupedWord(groups)
        m = rng.randint(1, 3)
        table = tuple(rng.randint(1, m) for _ in range(n))
        part = PointedMap(n, m, (0,) + table)
        lift = cocartesian_lift(w, part)
        flat = w.flatten()
        assert sorted(lift.letter_map) == list(range(len(flat)))
        for pos, tgt in enumerate(lift.letter_map):
            assert lift.target.flatten()[tgt] == flat[pos]
