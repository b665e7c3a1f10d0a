import itertools

import pytest

from forestcat.fincat import FinSetMap
from forestcat.forests import Forest, corolla, edge_forest, eta
from forestcat.gamma import PointedMap
from forestcat.segal import (
    TerminalPresheaf,
    Window,
    ass_operad,
    com_operad,
    free_monoid_operad,
    nerve_of_operad,
)
from forestcat.envelope import (
    CocartLift,
    EnvelopeError,
    EnvelopePresheaf,
    EnvelopeSlice,
    GroupedWord,
    WordCategory,
    _classes_at_cap,
    canonical_pair_encoding,
    check_envelope_segal,
    check_triangles,
    cocartesian_lift,
    counit_map,
    counit_on_class,
    enumerate_slice_objects,
    env_corolla,
    envelope_slice,
    envelope_value,
    inner_limit_matches,
    skeleton_object,
    tensor_colours,
    unit_map,
)

WIDE = Window(2, 9)
COM = nerve_of_operad(com_operad(9), WIDE)
ASS = nerve_of_operad(ass_operad(6), Window(2, 6))


# -- slices ------------------------------------------------------------------


def test_eta_slice_objects_and_morphisms():
    sl = EnvelopeSlice(eta(), 2, strict=True, exclude_empty=True)
    assert [o.forest.widths for o in sl.objects] == [(1,), (2,)]
    # morphisms are injections of the underlying sets
    non_identity = [(a, b, c) for a, b, c in sl.morphisms()
                    if a != b or c[0].table != tuple(range(len(c[0].table)))]
    assert all(c[0].is_injective() for _, _, c in sl.morphisms())
    # id_1, two injections 1 -> 2, id_2, the swap of 2
    assert len(sl.morphisms()) == 5


def test_corolla_slice_contains_partition_refinements():
    sl = EnvelopeSlice(corolla(1), 2, strict=True, exclude_empty=True)
    widths = {o.forest.widths for o in sl.objects}
    assert (2, 1) in widths and (1, 1) in widths and (2, 2) in widths


def test_envelope_slice_fincategory_validates():
    cat = envelope_slice(eta(), 2)
    cat.validate()
    cat_pre = envelope_slice(eta(), 2, strict=False)
    cat_pre.validate()
    assert len(cat_pre.arrows) >= len(cat.arrows)


def test_cap_too_small():
    with pytest.raises(EnvelopeError):
        EnvelopeSlice(eta(), 0)
    with pytest.raises(EnvelopeError):
        envelope_value(COM, eta(), 0)


# -- envelope values ---------------------------------------------------------


def test_envelope_of_com_at_eta_headline_counts():
    ev = envelope_value(COM, eta(), 3)
    assert ev.class_count == 3
    assert ev.stabilized
    assert ev.inner_limit_ok
    ev_incl = envelope_value(COM, eta(), 3, exclude_empty=False)
    assert ev_incl.class_count == 1


def test_envelope_fast_path_matches_reference():
    linear2 = Forest((1, 1, 1), (FinSetMap.identity(1), FinSetMap.identity(1)))
    cases = [(eta(), 3), (edge_forest(2), 2), (corolla(1), 2), (corolla(2), 2),
             (linear2, 2)]
    for T, cap in cases:
        for excl in (True, False):
            ev = envelope_value(COM, T, cap, exclude_empty=excl,
                                check_stability=False, check_inner=False)
            _, slow, _, _ = _classes_at_cap(COM, T, cap, True, excl, "profile")
            assert ev.class_count == len(slow), (T.key(), cap, excl)


def test_envelope_fast_path_matches_reference_with_labels():
    # two colours exercise the label-aware canonical forms
    two = nerve_of_operad(
        __import__("forestcat.segal", fromlist=["two_color_operad"]).two_color_operad(6),
        Window(2, 6),
    )
    for T, cap in [(eta(), 2), (corolla(1), 2), (edge_forest(2), 2)]:
        ev = envelope_value(two, T, cap, check_stability=False, check_inner=False)
        _, slow, _, _ = _classes_at_cap(two, T, cap, True, True, "profile")
        assert ev.class_count == len(slow), (T.key(), cap)


def test_envelope_plain_mode_matches_reference():
    for T, cap in [(eta(), 3), (edge_forest(2), 2), (corolla(1), 2)]:
        ev = envelope_value(COM, T, cap, gluing="plain",
                            check_stability=False, check_inner=False)
        _, slow, _, _ = _classes_at_cap(COM, T, cap, True, True, "plain")
        assert ev.class_count == len(slow), (T.key(), cap)


def test_envelope_of_terminal_matches_slice_components():
    # for the terminal presheaf the plain value is the set of connected
    # components of the slice
    X = TerminalPresheaf(WIDE)
    for T, cap in [(eta(), 3), (corolla(1), 2)]:
        ev = envelope_value(X, T, cap, gluing="plain",
                            check_stability=False, check_inner=False)
        _, slow, _, _ = _classes_at_cap(X, T, cap, True, True, "plain")
        assert ev.class_count == len(slow)


def test_envelope_of_ass_at_eta():
    # single colour: classes at the edge still count sizes only
    ev = envelope_value(ASS, eta(), 3)
    assert ev.class_count == 3


def test_classes_grow_monotonically_with_cap():
    # a class at cap c embeds into the classes at cap c+1: no merging
    for cap in (1, 2):
        now = envelope_value(COM, corolla(1), cap, check_inner=False)
        nxt = envelope_value(COM, corolla(1), cap + 1, check_inner=False)
        assert nxt.stabilized or not now.stabilized
        for enc, c in now.assign.items():
            assert enc in nxt.assign


def test_inner_limit_consistency_for_segal_inputs():
    for T in [eta(), corolla(2), edge_forest(2)]:
        ev = envelope_value(COM, T, 2, check_stability=False)
        assert ev.inner_limit_ok
        ev = envelope_value(ASS, T, 2, check_stability=False)
        assert ev.inner_limit_ok


def test_class_lookup_canonicalizes_relabelings():
    ev = envelope_value(COM, edge_forest(2), 2, check_stability=False, check_inner=False)
    # a refinement with scrambled legs must land in the same class as
    # its slot-sorted relabeling
    scrambled = (FinSetMap(3, 2, (1, 0, 0)),)
    obj = __import__("forestcat.envelope", fromlist=["SliceObject"]).SliceObject(
        Forest((3,), ()), scrambled
    )
    x = COM.value(Forest((3,), ()))[0]
    c = ev.class_of(obj, x)
    sorted_obj = __import__("forestcat.envelope", fromlist=["SliceObject"]).SliceObject(
        Forest((3,), ()), (FinSetMap(3, 2, (0, 0, 1)),)
    )
    assert c == ev.class_of(sorted_obj, x)


# -- the corolla coproduct ---------------------------------------------------


def test_env_corolla_entry_counts_com():
    cc = env_corolla(COM, 1, 2)
    # one entry per function r -> 1, r in {0, 1, 2}
    assert len(cc.entries) == 3


def test_env_corolla_empty_product_is_a_point():
    cc = env_corolla(COM, 0, 2)
    assert len(cc.entries) == 1
    assert cc.entries[0][0] == 0


def test_env_corolla_surjects_onto_plain():
    for X in (COM, ASS):
        for n in (0, 1, 2):
            cc = env_corolla(X, n, 2)
            assert cc.surjective_onto_plain(), (n,)


def test_env_corolla_default_coverage_reported():
    cc = env_corolla(COM, 1, 3)
    hit, total = cc.default_coverage()
    assert 0 < hit <= total


def test_ass_corolla_raw_counts():
    # entries for n=1: one per multiplication order of each r <= cap
    cc = env_corolla(ASS, 1, 3)
    assert len(cc.entries) == 1 + 1 + 2 + 6


# -- envelope Segal checks ---------------------------------------------------


def test_envelope_root_and_shrub_pass_cap3():
    small = Window(2, 2)
    rep = check_envelope_segal(COM, small, 3)
    assert rep.root.ok
    assert rep.shrub.ok


def test_envelope_level_defect_is_the_known_truncation_artifact():
    # the level decomposition cannot hold for set-valued classes: two
    # refinements of the (1,2,1) tree are segmentwise isomorphic but not
    # jointly isomorphic; pin the honest failure
    small = Window(2, 2)
    rep = check_envelope_segal(COM, small, 2)
    assert rep.root.ok and rep.shrub.ok
    assert not rep.level.ok
    T = Forest((1, 2, 1), (FinSetMap(1, 2, (0,)), FinSetMap(2, 1, (0, 0))))
    ev = envelope_value(COM, T, 2, check_stability=False, check_inner=False)
    a = canonical_pair_encoding(
        COM,
        __import__("forestcat.envelope", fromlist=["SliceObject"]).SliceObject(
            Forest((1, 3, 2), (FinSetMap(1, 3, (1,)), FinSetMap(3, 2, (0, 1, 1)))),
            (FinSetMap(1, 1, (0,)), FinSetMap(3, 2, (0, 0, 1)), FinSetMap(2, 1, (0, 0))),
        ),
        COM.value(Forest((1, 3, 2), (FinSetMap(1, 3, (1,)), FinSetMap(3, 2, (0, 1, 1)))))[0],
    )
    b = canonical_pair_encoding(
        COM,
        __import__("forestcat.envelope", fromlist=["SliceObject"]).SliceObject(
            Forest((1, 3, 2), (FinSetMap(1, 3, (0,)), FinSetMap(3, 2, (0, 1, 1)))),
            (FinSetMap(1, 1, (0,)), FinSetMap(3, 2, (0, 0, 1)), FinSetMap(2, 1, (0, 0))),
        ),
        COM.value(Forest((1, 3, 2), (FinSetMap(1, 3, (0,)), FinSetMap(3, 2, (0, 1, 1)))))[0],
    )
    assert a != b
    assert ev.assign[a] != ev.assign[b]


def test_unquotiented_envelope_satisfies_all_decompositions_cap2():
    # the failure pinned above is purely the quotient's doing: with no
    # gluing at all, every decomposition holds across the whole window
    small = Window(2, 2)
    rep = check_envelope_segal(COM, small, 2, gluing="none", stop_early=False)
    assert rep.level.ok and rep.root.ok and rep.shrub.ok, rep


def test_envelope_presheaf_transport_functorial_smoke():
    small = Window(1, 2)
    E = EnvelopePresheaf(COM, small, 2, True, True, "profile")
    from forestcat.forests import forest_maps, compose_forest_maps
    A, B, C = eta(), edge_forest(1), corolla(1)
    f = forest_maps(A, B)[0]
    g = forest_maps(B, C)[0]
    tf, tg = E.transport(f), E.transport(g)
    tc = E.transport(compose_forest_maps(g, f))
    for x in E.value(C):
        assert tf[tg[x]] == tc[x]


# -- words, lifts, adjunction ------------------------------------------------


def test_cocartesian_lift_fold():
    w = GroupedWord((("a", "b"), ("c",)))
    fold = PointedMap(2, 1, (0, 1, 1))
    lift = cocartesian_lift(w, fold)
    assert lift.target.groups == (("a", "b", "c"),)


def test_cocartesian_lift_identity_and_swap():
    w = GroupedWord((("a",), ("b", "c")))
    ident = PointedMap.identity(2)
    assert cocartesian_lift(w, ident).target.groups == w.groups
    swap = PointedMap(2, 2, (0, 2, 1))
    assert cocartesian_lift(w, swap).target.groups == (("b", "c"), ("a",))


def test_lift_content_preserved():
    spec = com_operad(5)
    from forestcat.gamma import enumerate_gamma_maps, is_active
    for n in range(1, 4):
        for m in range(1, 4):
            for part in enumerate_gamma_maps(n, m, is_active):
                groups = tuple(("*",) * ((i % 2) + 1) for i in range(n))
                w = GroupedWord(groups)
                lift = cocartesian_lift(w, part)
                assert sorted(lift.target.flatten()) == sorted(w.flatten())


def test_verify_cocartesian_com():
    spec = com_operad(5)
    wc = WordCategory(spec, max_letters=3, max_groups=3)
    for w in [GroupedWord((("*",), ("*",))), GroupedWord((("*", "*"), ("*",)))]:
        for part in [PointedMap(2, 1, (0, 1, 1)), PointedMap.identity(2)]:
            lift = cocartesian_lift(w, part)
            ok, witness = wc.verify_cocartesian(lift)
            assert ok, witness


def test_wrong_lift_fails_verification():
    spec = com_operad(5)
    wc = WordCategory(spec, max_letters=3, max_groups=3)
    w = GroupedWord((("*", "*"), ("*",)))
    fold = PointedMap(2, 1, (0, 1, 1))
    good = cocartesian_lift(w, fold)
    # regroup by the wrong partition: pretend the target still has two groups
    bad = CocartLift(w, GroupedWord((("*", "*"), ("*",))), fold, good.letter_map)
    ok, _ = wc.verify_cocartesian(bad)
    assert not ok


def test_identity_lift_verifies():
    spec = com_operad(5)
    wc = WordCategory(spec, max_letters=3, max_groups=3)
    w = GroupedWord((("*",), ("*",)))
    lift = cocartesian_lift(w, PointedMap.identity(2))
    ok, _ = wc.verify_cocartesian(lift)
    assert ok


def test_composite_of_lifts_is_lift_of_composite():
    from forestcat.gamma import enumerate_gamma_maps, is_active, compose
    for n in range(1, 4):
        groups = tuple(("*",) * ((i % 2) + 1) for i in range(n))
        w = GroupedWord(groups)
        for m in range(1, 3):
            for p1 in enumerate_gamma_maps(n, m, is_active):
                first = cocartesian_lift(w, p1)
                for q in range(1, 3):
                    for p2 in enumerate_gamma_maps(m, q, is_active):
                        second = cocartesian_lift(first.target, p2)
                        direct = cocartesian_lift(w, compose(p2, p1))
                        assert second.target == direct.target


def test_tensor_colours():
    spec = com_operad(5)
    assert tensor_colours(spec, ("*",)) == ("*",)
    assert tensor_colours(spec, ("*",) * 3 ) == ("*", "*", "*")
    fm = free_monoid_operad(4, 4)
    assert tensor_colours(fm, ("1", "2")) == ("1", "2")


def test_unit_lands_in_identity_refinement_class():
    X = TerminalPresheaf(WIDE)
    env = envelope_value(X, corolla(1), 2, check_stability=False, check_inner=False)
    table = unit_map(X, env)
    from forestcat.envelope import SliceObject
    ident = SliceObject(corolla(1), (FinSetMap.identity(1), FinSetMap.identity(1)))
    assert table["*"] == env.class_of(ident, "*")


def test_counit_after_unit_is_identity_com():
    forests = [eta(), corolla(0), corolla(1), corolla(2)]
    ok, witness = check_triangles(COM, forests, 2)
    assert ok, witness


def test_counit_after_unit_is_identity_free_monoid():
    fm_window = Window(1, 4)
    fm = nerve_of_operad(free_monoid_operad(8, 6), fm_window)
    forests = [eta(), corolla(1), corolla(2)]
    ok, witness = check_triangles(fm, forests, 2)
    assert ok, witness


def test_counit_collapses_two_level_grouping():
    # (ab)(c) -> abc in the word model
    w = GroupedWord((("a", "b"), ("c",)))
    fold = PointedMap(2, 1, (0, 1, 1))
    assert cocartesian_lift(w, fold).target == GroupedWord((("a", "b", "c"),))


def test_envelope_value_json_shape():
    ev = envelope_value(COM, eta(), 2)
    data = ev.to_json()
    assert data["cap"] == 2 and data["strict"] and data["exclude_empty"]
    assert len(data["classes"]) == ev.class_count
    assert all("size_of_orbit" in c for c in data["classes"])
    assert data["stabilized"] is True
