import itertools

from forestcat.gamma import classify_gamma, is_active as gamma_active, is_inert as gamma_inert, is_semi_inert
from forestcat.simplex import (
    SimplexMap,
    classify_delta,
    compose,
    enumerate_monotone,
    factorize_delta,
    flat_elementary_coslice_matches,
    interval_inclusion,
    is_active_delta,
    is_cellular,
    is_inert_delta,
    underlying_gamma,
)


def test_classify_examples():
    inert = SimplexMap(1, 2, (0, 1))
    assert classify_delta(inert) == {"inert": True, "active": False}
    active = SimplexMap(1, 2, (0, 2))
    assert classify_delta(active) == {"inert": False, "active": True}
    for n in range(4):
        assert classify_delta(SimplexMap.identity(n)) == {"inert": True, "active": True}


def test_factorize_inert_input():
    phi = SimplexMap(1, 3, (1, 2))
    alpha, iota = factorize_delta(phi)
    assert alpha.table == (0, 1)
    assert iota.table == (1, 2)
    assert is_active_delta(alpha) and is_inert_delta(iota)
    assert compose(iota, alpha).table == phi.table


def test_factorize_active_input():
    phi = SimplexMap(2, 2, (0, 0, 2))
    alpha, iota = factorize_delta(phi)
    assert alpha.table == phi.table
    assert iota.table == (0, 1, 2)


def test_factorize_all_window():
    for n, m in itertools.product(range(4), repeat=2):
        for phi in enumerate_monotone(n, m):
            alpha, iota = factorize_delta(phi)
            assert is_active_delta(alpha) and is_inert_delta(iota)
            assert compose(iota, alpha).table == phi.table


def test_underlying_gamma_fold():
    phi = SimplexMap(1, 2, (0, 2))
    assert underlying_gamma(phi).table == (0, 1, 1)


def test_underlying_gamma_identity():
    for n in range(5):
        assert underlying_gamma(SimplexMap.identity(n)).table == tuple(range(n + 1))


def test_underlying_gamma_collapse():
    phi = SimplexMap(0, 2, (1,))
    assert underlying_gamma(phi).table == (0, 0, 0)


def test_underlying_gamma_functorial():
    for n, m, p in itertools.product(range(4), repeat=3):
        for phi in enumerate_monotone(n, m):
            for chi in enumerate_monotone(m, p):
                lhs = underlying_gamma(compose(chi, phi))
                rhs = underlying_gamma(chi).then(underlying_gamma(phi))
                assert lhs.table == rhs.table


def test_underlying_gamma_preserves_classes():
    for n, m in itertools.product(range(5), repeat=2):
        for phi in enumerate_monotone(n, m):
            u = underlying_gamma(phi)
            if is_inert_delta(phi):
                assert gamma_inert(u)
            if is_active_delta(phi):
                assert gamma_active(u)


def test_semi_inert_matches_cellular():
    for n, m in itertools.product(range(5), repeat=2):
        for phi in enumerate_monotone(n, m):
            assert is_semi_inert(underlying_gamma(phi)) == is_cellular(phi)


def test_flat_elementary_coslice():
    for n in range(6):
        assert flat_elementary_coslice_matches(n)


def test_interval_inclusion_is_inert():
    for lo in range(3):
        for length in range(3):
            phi = interval_inclusion(lo, length, lo + length + 1)
            assert is_inert_delta(phi)


def test_json_roundtrip_with_direction_tag():
    phi = SimplexMap(2, 3, (0, 2, 3))
    data = phi.to_json(op=True)
    assert data["op"] is True
    assert SimplexMap.from_json(data).table == phi.table
