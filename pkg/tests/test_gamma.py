import itertools

import pytest
from hypothesis import given, settings, strategies as st

from forestcat.gamma import (
    BoundExceeded,
    PointedMap,
    classify_gamma,
    compose,
    diagonal_fillers_bruteforce,
    enumerate_gamma_maps,
    factorize_gamma,
    is_active,
    is_inert,
    is_semi_inert,
    lam,
    rho,
    unique_diagonal_filler,
)


def pointed_maps(max_size=4):
    @st.composite
    def build(draw):
        n = draw(st.integers(0, max_size))
        m = draw(st.integers(0, max_size))
        tail = draw(st.lists(st.integers(0, m), min_size=n, max_size=n))
        return PointedMap(n, m, (0, *tail))

    return build()


def test_classify_rho_is_inert():
    cls = classify_gamma(rho(2, 2))
    assert (cls.inert, cls.active, cls.semi_inert) == (True, False, True)


def test_classify_identity_is_everything():
    cls = classify_gamma(PointedMap.identity(3))
    assert cls.inert and cls.active and cls.semi_inert


def test_classify_fold_is_active_only():
    fold = PointedMap(2, 1, (0, 1, 1))
    cls = classify_gamma(fold)
    assert (cls.inert, cls.active, cls.semi_inert) == (False, True, False)


@given(pointed_maps())
def test_inert_implies_semi_inert(f):
    cls = classify_gamma(f)
    if cls.inert:
        assert cls.semi_inert


@given(pointed_maps())
def test_active_from_small_source_is_semi_inert(f):
    if f.src <= 1 and is_active(f):
        assert is_semi_inert(f)


def test_factorize_active_has_trivial_inert_part():
    fold = PointedMap(2, 1, (0, 1, 1))
    i, a = factorize_gamma(fold)
    assert i.table == PointedMap.identity(2).table
    assert a.table == fold.table


def test_factorize_inert_has_trivial_active_part():
    i, a = factorize_gamma(rho(3, 2))
    assert is_inert(i) and is_active(a)
    assert a.src == a.tgt == 1


def test_factorize_mixed_example():
    f = PointedMap(3, 1, (0, 1, 1, 0))
    i, a = factorize_gamma(f)
    assert i.table == (0, 1, 2, 0)
    assert a.table == (0, 1, 1)
    assert compose(a, i).table == f.table


@given(pointed_maps())
def test_factorize_recomposes_and_classifies(f):
    i, a = factorize_gamma(f)
    assert is_inert(i) and is_active(a)
    assert compose(a, i).table == f.table


def middle_objects_up_to(f, bound=4):
    """Exhaustive search for inert/active factorizations of f through any
    middle <k>, k <= bound."""
    found = []
    for k in range(bound + 1):
        for i in enumerate_gamma_maps(f.src, k, is_inert):
            for a in enumerate_gamma_maps(k, f.tgt, is_active):
                if compose(a, i).table == f.table:
                    found.append((k, i, a))
    return found


def pointed_isos(n):
    for perm in itertools.permutations(range(1, n + 1)):
        yield PointedMap(n, n, (0, *perm))


def test_factorization_unique_up_to_unique_iso_window():
    for n, m in itertools.product(range(4), repeat=2):
        for f in enumerate_gamma_maps(n, m):
            factorizations = middle_objects_up_to(f)
            i0, a0 = factorize_gamma(f)
            ks = {k for k, _, _ in factorizations}
            assert ks == {i0.tgt}
            for k, i, a in factorizations:
                mediators = [
                    s for s in pointed_isos(k)
                    if compose(s, i0).table == i.table and compose(a, s).table == a0.table
                ]
                assert len(mediators) == 1


def test_rho_examples():
    assert rho(1, 1).table == (0, 1)
    assert rho(3, 2).table == (0, 0, 1, 0)
    with pytest.raises(ValueError):
        rho(3, 4)


def test_rho_count_matches_exhaustive_inert_enumeration():
    distinct = {rho(4, i).table for i in range(1, 5)}
    all_inert = enumerate_gamma_maps(4, 1, is_inert)
    assert len(distinct) == 4
    assert {f.table for f in all_inert} == distinct


def test_lam_examples():
    assert lam(1, 1).table == (0, 1)
    f = lam(2, 2)
    cls = classify_gamma(f)
    assert cls.active and cls.semi_inert and not cls.inert


def test_rho_retracts_lam():
    for n in range(1, 6):
        for i in range(1, n + 1):
            assert compose(rho(n, i), lam(n, i)).table == PointedMap.identity(1).table


def test_lam_count_matches_exhaustive_active_semi_inert():
    for n in range(1, 7):
        found = enumerate_gamma_maps(1, n, is_active, bound=8)
        assert len(found) == n
        assert all(is_semi_inert(f) for f in found)


def test_enumerate_counts():
    assert len(enumerate_gamma_maps(2, 1, is_inert)) == 2
    for m in range(4):
        assert len(enumerate_gamma_maps(0, m)) == 1
    assert len(enumerate_gamma_maps(2, 2, is_active)) == 4


def test_enumerate_bound_exceeded():
    with pytest.raises(BoundExceeded):
        enumerate_gamma_maps(9, 1)


def test_active_maps_count_as_functions():
    for n, m in itertools.product(range(5), repeat=2):
        count = len(enumerate_gamma_maps(n, m, is_active))
        assert count == m**n


def test_semi_inert_active_maps_are_injective_on_nonbase():
    for n, m in itertools.product(range(5), repeat=2):
        for f in enumerate_gamma_maps(n, m, is_active):
            injective = len({f.table[x] for x in range(1, n + 1)}) == n
            assert is_semi_inert(f) == injective


def test_composition_preserves_classes():
    for n, m, p in itertools.product(range(4), repeat=3):
        for f in enumerate_gamma_maps(n, m):
            for g in enumerate_gamma_maps(m, p):
                h = compose(g, f)
                if is_inert(f) and is_inert(g):
                    assert is_inert(h)
                if is_active(f) and is_active(g):
                    assert is_active(h)


def test_unique_filler_matches_bruteforce_small():
    sizes = range(3)
    for p, r in itertools.product(sizes, repeat=2):
        for i in enumerate_gamma_maps(p, r, is_inert):
            for q, s in itertools.product(sizes, repeat=2):
                for a in enumerate_gamma_maps(q, s, is_active):
                    for t in enumerate_gamma_maps(p, q):
                        u_tables = set()
                        for b in enumerate_gamma_maps(r, s):
                            if compose(b, i).table != compose(a, t).table:
                                continue
                            brute = diagonal_fillers_bruteforce(i, a, t, b)
                            fast = unique_diagonal_filler(i, a, t, b)
                            assert len(brute) == 1
                            assert fast is not None and fast.table == brute[0].table
