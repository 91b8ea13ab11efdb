import pytest
from hypothesis import given, strategies as st

from unillc.arith import HalfLaurent, ONE
from unillc.catalog import DEFAULT_ISOGENY
from unillc.diagrams import Facet, enumerate_facets
from unillc.finquot import (
    Factor, OrderPolynomial, TwistedFiniteType, UnsupportedType, check_facet_match,
    compare_quotients, disconnected_order, factor_order, order_poly, quotient_of_local_index,
    reductive_quotient, torus_order, torus_order_charpoly,
)
from unillc.rootdata import cartan_matrix, group_dimension

import oracles


def q_of(h, q):
    v = h.eval(q=q)
    assert v.denominator == 1
    return int(v)


def proper_facets(side):
    return [f for f in enumerate_facets(side.relative) if len(f.J) < side.relative.size]


# -- brute-force anchors -----------------------------------------------------------

# brute-force counts from tests/oracles.py, frozen after one run
ANCHORS = {
    (Factor("A", 1), 1, 2): 6, (Factor("A", 1), 1, 3): 24,
    (Factor("A", 1), 2, 2): 60, (Factor("A", 1), 2, 3): 720,
    (Factor("A", 2), 1, 2): 168, (Factor("A", 2), 1, 3): 5616,
    (Factor("A", 2), 2, 2): 60480,
    (Factor("A", 2, 2), 1, 2): 216, (Factor("A", 2, 2), 1, 3): 6048,
    (Factor("C", 2), 1, 2): 720, (Factor("C", 2), 1, 3): 51840,
    (Factor("B", 2), 1, 2): 720, (Factor("B", 2), 1, 3): 51840,
    (Factor("G", 2), 1, 2): 12096, (Factor("G", 2), 1, 3): 4245696,
}


def brute_force(factor, m, q):
    if factor.typ == "A" and factor.twist == 1:
        p, deg = (q, 1) if m == 1 else (q, 2)
        return oracles.count_sl(factor.rank + 1, oracles.Field(p, deg))
    if factor.typ == "A" and factor.twist == 2:
        return oracles.count_su3(q)
    if factor.typ in "BC":
        return oracles.count_sp4(q)
    if factor.typ == "G":
        return oracles.split_group_order(cartan_matrix("G", 2), q)
    raise AssertionError(factor)


@pytest.mark.parametrize("key", list(ANCHORS), ids=lambda k: f"{k[0].label}^{k[1]}@q={k[2]}")
def test_brute_force_anchor(key):
    factor, m, q = key
    got = brute_force(factor, m, q)
    assert got == ANCHORS[key]
    t = TwistedFiniteType(((factor, m),), (1,))
    assert q_of(order_poly(t).poly, q) == got


def test_order_examples():
    c2 = order_poly(TwistedFiniteType(((Factor("C", 2), 1),), (1,)))
    q = HalfLaurent.q
    assert c2.poly == q(4) * (q(2) - ONE) * (q(4) - ONE)
    assert c2.dimension == 10
    assert c2.at(2) == 720
    a2 = order_poly(TwistedFiniteType(((Factor("A", 2, 2), 1),), (1,)))
    assert a2.poly == q(3) * (q(2) - ONE) * (q(3) + ONE)
    assert a2.at(2) == 216


def test_tori():
    q = HalfLaurent.q
    for r in range(1, 5):
        t = order_poly(TwistedFiniteType((), (1,) * (r + 1)))
        assert t.poly == (q(1) - ONE) ** r
        assert t.dimension == r
    # a single swapped pair: rank one anisotropic torus
    assert torus_order((2,)) == q(1) + ONE
    assert [q_of(torus_order((2,)), p) for p in (2, 3)] == [
        oracles.count_norm_one(p) for p in (2, 3)]
    assert torus_order((1, 2)) == (q(1) - ONE) * (q(1) + ONE)


def test_unsupported_twists():
    with pytest.raises(UnsupportedType):
        Factor("B", 3, 2)
    with pytest.raises(UnsupportedType):
        Factor("D", 5, 3)
    with pytest.raises(UnsupportedType):
        Factor("A", 1, 2)
    with pytest.raises(UnsupportedType):
        Factor("E", 7, 2)


# -- Weyl-group oracle for split types ----------------------------------------------

SPLIT = [(t, r) for t, lo in (("A", 1), ("B", 2), ("C", 3), ("D", 4)) for r in range(lo, 5)]
SPLIT += [("G", 2), ("F", 4)]


@pytest.mark.parametrize("typ,rank", SPLIT, ids=lambda x: str(x))
def test_split_orders_match_weyl_poincare(typ, rank):
    poly = factor_order(Factor(typ, rank))
    cm = cartan_matrix(typ, rank)
    for q in (2, 3):
        assert q_of(poly, q) == oracles.split_group_order(cm, q)


# -- structural properties -------------------------------------------------------------


def test_dual_types_have_equal_orders():
    for n in range(2, 9):
        assert factor_order(Factor("B", n)) == factor_order(Factor("C", n))


def test_ennola_duality():
    # twisted orders are the untwisted ones at -q up to sign
    def at_minus_q(h):
        return HalfLaurent({e: c * (-1) ** (e // 2) for e, c in h.terms.items()})

    cases = [(Factor("A", n, 2), Factor("A", n)) for n in range(2, 8)]
    cases.append((Factor("E", 6, 2), Factor("E", 6)))
    for tw, sp in cases:
        a, b = factor_order(tw), at_minus_q(factor_order(sp))
        assert a == b or a == -b


factors = st.sampled_from([Factor("A", n) for n in range(1, 6)]
                          + [Factor("A", n, 2) for n in range(2, 6)]
                          + [Factor("B", n) for n in range(2, 5)]
                          + [Factor("C", n) for n in range(3, 5)]
                          + [Factor("D", n) for n in range(4, 6)]
                          + [Factor("D", n, 2) for n in range(4, 6)]
                          + [Factor("D", 4, 3), Factor("G", 2), Factor("F", 4),
                             Factor("E", 6), Factor("E", 6, 2), Factor("E", 7), Factor("E", 8)])


@given(st.lists(st.tuples(factors, st.integers(1, 3)), max_size=3),
       st.lists(st.integers(1, 3), min_size=1, max_size=4))
def test_order_polynomial_invariants(orbits, torus):
    t = TwistedFiniteType(tuple(orbits), tuple(torus))
    op = order_poly(t)
    assert isinstance(op, OrderPolynomial)
    assert op.poly.all_even()
    assert op.poly.degree_in_q() == op.dimension == t.dimension()
    assert all(op.at(q) > 0 for q in (2, 3, 4, 5, 7))
    # multiplicative over orbits, additive in dimension
    parts = [order_poly(TwistedFiniteType((o,), (1,))) for o in orbits]
    prod = torus_order(t.torus)
    for p in parts:
        prod = prod * p.poly
    assert prod == op.poly
    assert sum(p.dimension for p in parts) + t.torus_rank == op.dimension


def test_factor_dimension_matches_group_dimension():
    for typ, rank in SPLIT:
        t = TwistedFiniteType(((Factor(typ, rank), 1),), (1,))
        assert t.dimension() == group_dimension(typ, rank)


# -- quotients of facets --------------------------------------------------------------


def test_chamber_gives_torus_only(catalog):
    for e in catalog.entries:
        for companion in (False, True):
            side = e.companion if companion else e.group
            t = reductive_quotient(e, Facet(frozenset(), side.relative.size), companion)
            assert t.orbits == ()
            assert t.semisimple_rank == 0


def test_split_c2_quotient(catalog):
    e = catalog.lookup("C-BC_2")
    t = reductive_quotient(e, Facet({1, 2}, 3), companion=True)
    assert [(f.arrow_free_key(), m) for f, m in t.orbits] == [(("B", 2, 1), 1)]
    assert order_poly(t).poly == factor_order(Factor("C", 2))


def test_swapped_legs_glue_into_one_orbit(catalog):
    e = catalog.lookup("2B-C_2")
    assert e.group.local_index.lift({0}) == {0, 1}
    t = reductive_quotient(e, Facet({0}, 2))
    assert t.orbits == ((Factor("A", 1), 2),)
    assert order_poly(t).at(2) == 60


def test_non_stable_lift_rejected(catalog):
    li = catalog.lookup("2B-C_2").group.local_index
    with pytest.raises(ValueError):
        quotient_of_local_index(li, {0})


def test_proper_facet_required(catalog):
    e = catalog.lookup("C-BC_2")
    with pytest.raises(ValueError):
        reductive_quotient(e, Facet({0, 1, 2}, 3))


def test_torus_charpoly_fallback_agrees(catalog):
    for e in catalog.entries:
        if e.n > 4:
            continue
        for side in (e.group, e.companion):
            li = side.local_index
            for f in proper_facets(side):
                lifted = li.lift(f.J)
                t = quotient_of_local_index(li, lifted)
                assert torus_order_charpoly(li, lifted) == torus_order(t.torus)


# -- the four-way comparison -------------------------------------------------------------


def test_cbc2_all_facets(catalog):
    e = catalog.lookup("C-BC_2")
    for f in proper_facets(e.group):
        r = check_facet_match(e, f)
        assert r.ok, r.to_text()


def test_bc3_chamber(catalog):
    e = catalog.lookup("B-C_3")
    r = check_facet_match(e, Facet(frozenset(), 4))
    assert (r.type_match, r.dim_match, r.order_match, r.omega_match) == (True,) * 4
    assert r.to_json()["entry"] == e.ident


def test_mismatched_pair_negative_control():
    a = TwistedFiniteType(((Factor("A", 2), 1),), (1,))
    b = TwistedFiniteType(((Factor("A", 2, 2), 1),), (1,))
    type_ok, dim_ok, order_ok = compare_quotients(a, b)
    assert dim_ok and not order_ok and not type_ok


def test_dual_arrows_still_match():
    a = TwistedFiniteType(((Factor("B", 3), 1),), (1, 1))
    b = TwistedFiniteType(((Factor("C", 3), 1),), (1, 1))
    assert compare_quotients(a, b) == (True, True, True)


def test_full_sweep(catalog):
    bad = []
    for e in catalog.entries:
        if e.n > 4:
            continue
        for f in proper_facets(e.group):
            r = check_facet_match(e, f)
            if not r.ok:
                bad.append(r.to_text())
    assert not bad


def test_disconnected_order(catalog):
    e = catalog.lookup("2B-C_2", isogeny=DEFAULT_ISOGENY["2B-C_n"])
    f = Facet(frozenset(), 2)
    conn = order_poly(reductive_quotient(e, f)).poly
    assert disconnected_order(e, f) == conn * HalfLaurent.const(len(e.group.omega.elements()))
