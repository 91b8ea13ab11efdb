import json
import random
import subprocess
import sys
import threading
from fractions import Fraction
from math import inf

import pytest
from hypothesis import given, strategies as st

from conftest import ROOT, load_schema
from unillc.arith import HalfLaurent, ONE
from unillc.catalog import DEFAULT_ISOGENY
from unillc.diagrams import Facet, fold
from unillc.hecke import (
    CapacityError, CoxeterGroup, CoxeterPresentation, HeckeAlgebraSpec, HeckeElement, HeckeError,
    MissingTable, ParamData, ParameterTable, TableRecord, coxeter_from_local_index,
    facet_coxeter, facet_parameters, hecke_mul, iwahori_coxeter, iwahori_transfer_check,
    levi_embedding, levi_subgroup_elements, load_params, parse_params, records_from_json,
    records_to_json, render_params, specialize_to_one, transfer_check,
)

import oracles


def pres_from_edges(k, edges):
    mat = [[1 if i == j else 2 for j in range(k)] for i in range(k)]
    for i, j, m in edges:
        mat[i][j] = mat[j][i] = m
    return CoxeterPresentation(tuple(range(k)), tuple(tuple(r) for r in mat))


AFF_A1 = pres_from_edges(2, [(0, 1, inf)])
AFF_G2 = pres_from_edges(3, [(0, 1, 3), (1, 2, 6)])
AFF_C2 = pres_from_edges(3, [(0, 1, 4), (1, 2, 4)])
FIN_A3 = pres_from_edges(3, [(0, 1, 3), (1, 2, 3)])
FIN_B3 = pres_from_edges(3, [(0, 1, 3), (1, 2, 4)])


def spec_for(pres, N=None, omega=(), bound=12):
    N = N or (1,) * pres.rank
    return HeckeAlgebraSpec(pres, ParameterTable(tuple(N)), omega, bound)


# -- presentations ------------------------------------------------------------------


def test_affine_a1_is_infinite():
    assert AFF_A1.m(0, 1) == inf
    assert CoxeterGroup(AFF_A1).length((0, 1) * 5) == 10


def test_affine_c_coxeter_matrix(catalog):
    for n in range(2, 6):
        e = catalog.lookup("C-BC_n", n)
        pres = iwahori_coxeter(e.companion.relative)
        chain = [pres.m(i, i + 1) for i in range(n)]
        assert chain == [4] + [3] * (n - 2) + [4]
        assert all(pres.m(i, j) == 2 for i in range(n + 1) for j in range(i + 2, n + 1))


def test_folded_twisted_diagram_matches_companion(catalog):
    for n in range(2, 6):
        e = catalog.lookup("2B-C_n", n)
        mg = iwahori_coxeter(fold(e.group.local_index)).relabel(e.bijection)
        assert mg.matrix == iwahori_coxeter(e.companion.relative).matrix


def test_iwahori_transfer_all_entries(catalog):
    assert all(iwahori_transfer_check(e) for e in catalog.entries)


def test_local_index_oracle_agrees_with_bond_rule(catalog):
    for e in catalog.entries:
        if e.n > 4:
            continue
        for side in (e.group, e.companion):
            a = coxeter_from_local_index(side.local_index)
            assert a.matrix == iwahori_coxeter(side.relative).matrix


def test_presentation_validation():
    with pytest.raises(HeckeError):
        CoxeterPresentation((0, 1), ((1, 3), (4, 1)))
    with pytest.raises(HeckeError):
        CoxeterPresentation((0, 1), ((1, 5), (5, 1)))
    with pytest.raises(HeckeError):
        CoxeterPresentation((0, 1), ((2, 3), (3, 1)))
    with pytest.raises(HeckeError):
        CoxeterPresentation((0, 1), ((1, 3),))


def test_relabel_and_restrict():
    p = AFF_G2.relabel((2, 1, 0))
    assert p.m(2, 1) == 3 and p.m(1, 0) == 6
    r = AFF_G2.restrict({1, 2})
    assert r.matrix == ((1, 6), (6, 1))


def test_parameter_validation():
    with pytest.raises(HeckeError):
        ParameterTable((0,))
    with pytest.raises(HeckeError):
        ParameterTable((Fraction(1, 3),))
    ParameterTable((Fraction(3, 2), 1))
    with pytest.raises(HeckeError):
        ParameterTable((1, 2, 1)).check_conjugation(FIN_A3)
    # even m: s and t need not be conjugate
    ParameterTable((1, 2)).check_conjugation(AFF_A1)


# -- parameter tables ------------------------------------------------------------------


SAMPLE = """\
# two tables
table C-BC_n 3 G {0,1} theta10
note transcribed
m s0 s1 inf
gen s0 3
gen s1 1

table B-C_n 2 G' {} triv
m 0 1 4
m 1 2 4
gen 0 1
gen 1 1/2
gen 2 1
"""


def test_parse_render_roundtrip():
    recs = parse_params(SAMPLE)
    assert [r.key for r in recs] == [("C-BC_n", 3, "G", "{0,1}", "theta10"),
                                     ("B-C_n", 2, "G'", "{}", "triv")]
    assert recs[0].note == "transcribed"
    assert recs[1].params.N == (1, Fraction(1, 2), 1)
    assert parse_params(render_params(recs)) == recs
    assert records_from_json(json.loads(json.dumps(records_to_json(recs)))) == recs


@pytest.mark.parametrize("bad", [
    "tabel X 1 G {} triv\ngen 0 1\n",
    "table X 1 H {} triv\ngen 0 1\n",
    "table X 1 G {} triv\ngen 0 -1\n",
    "table X 1 G {} triv\ngen 0 1\nm 0 9 3\n",
    "table X 1 G {} triv\ngen 0 1\ngen 1 2\nm 0 1 3\n",
    "table X 1 G {} triv\ngen 0 1\nbogus line here\n",
    "table X 1 G {} triv\ngen 0 1\ngen 1 1\nm 0 1 5\n",
])
def test_parse_rejects(bad):
    with pytest.raises(HeckeError):
        parse_params(bad)


def test_duplicate_tables_rejected():
    recs = parse_params(SAMPLE)
    with pytest.raises(HeckeError):
        ParamData(recs + recs[:1])


def test_json_document_checks():
    with pytest.raises(HeckeError):
        records_from_json({"format": "other", "version": 1, "tables": []})


def test_shipped_tables(params):
    shipped_json = load_params(ROOT / "src/unillc/data/hecke_params.v1.json")
    assert shipped_json.records == params.records
    for r in params.records.values():
        r.params.check_conjugation(r.presentation)
    jsonschema = pytest.importorskip("jsonschema")
    doc = json.loads((ROOT / "src/unillc/data/hecke_params.v1.json").read_text())
    jsonschema.validate(doc, load_schema("hecke_params"))
    notes = {r.note for r in params.records.values() if r.sigma != "triv"}
    assert notes and all("data" in n for n in notes)


def test_builder_is_current():
    r = subprocess.run([sys.executable, str(ROOT / "tools/build_hecke_params.py"), "--check"],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr


# -- facet presentations and transfer ------------------------------------------------------


def test_facet_coxeter_fallback(catalog, params):
    e = catalog.lookup("B-C_3")
    f = Facet(frozenset(), e.group.relative.size)
    assert facet_coxeter(e, f, params) == iwahori_coxeter(e.group.relative)


def test_facet_coxeter_sample_entry(catalog, params):
    e = catalog.lookup("C-BC_3")
    f = Facet({0, 1}, e.group.relative.size)
    pres = facet_coxeter(e, f, params, sigma="theta10")
    assert pres.generators == ("s0", "s1") and pres.m(0, 1) == inf
    assert facet_parameters(e, f, params, sigma="theta10").N == (3, 1)
    assert transfer_check(e, f, params, sigma="theta10")


def test_facet_coxeter_missing(catalog, params):
    e = catalog.lookup("C-BC_3")
    f = Facet({0}, e.group.relative.size)
    with pytest.raises(MissingTable):
        facet_coxeter(e, f, params, sigma="theta10")
    assert transfer_check(e, f, params, sigma="theta10") is False


def test_transfer_every_family_iwahori(catalog, params):
    fams = set()
    for e in catalog.entries:
        if e.n > 4 or e.isogeny != DEFAULT_ISOGENY.get(e.family, "ad"):
            continue
        assert transfer_check(e, Facet(frozenset(), e.group.relative.size), params), e.ident
        fams.add(e.family)
    assert len(fams) == 8


def test_transfer_f4_chamber(catalog, params):
    e = catalog.lookup("F4^I")
    assert transfer_check(e, Facet(frozenset(), 5), params)


def test_transfer_negative_control(catalog, params):
    e = catalog.lookup("B-C_3")
    key = (e.family, e.n, "G'", "{}", "triv")
    good = params.records[key]
    N = list(good.params.N)
    N[0] = N[0] + 1
    bad = TableRecord(*key, good.presentation, ParameterTable(tuple(N)))
    perturbed = ParamData([bad if k == key else r for k, r in params.records.items()])
    assert not transfer_check(e, Facet(frozenset(), 4), perturbed)


# -- multiplication ---------------------------------------------------------------------


def basis(spec, word, coeff=ONE, omega=0):
    return spec.basis(word, omega, coeff)


def test_quadratic_relation():
    spec = spec_for(AFF_C2, (1, Fraction(1, 2), 2))
    for s in range(3):
        sq = hecke_mul(spec, spec.generator(s), spec.generator(s))
        assert sq == basis(spec, (), HalfLaurent.monomial(int(2 * spec.params.N[s])))
    assert spec.q_power(1) == HalfLaurent.monomial(1)


@pytest.mark.parametrize("pres,s,t,m", [(AFF_G2, 0, 1, 3), (AFF_C2, 0, 1, 4),
                                         (AFF_G2, 1, 2, 6)])
def test_braid_relations(pres, s, t, m):
    spec = spec_for(pres)

    def alt(a, b):
        el = spec.basis(())
        for k in range(m):
            el = hecke_mul(spec, el, spec.generator(a if k % 2 == 0 else b))
        return el

    lhs, rhs = alt(s, t), alt(t, s)
    assert lhs == rhs and lhs.is_basis()
    ((_, word), coeff), = lhs.terms.items()
    assert len(word) == m and coeff == ONE


def test_no_braid_relation_for_infinite_bond():
    spec = spec_for(AFF_A1)
    for m in range(1, 8):
        a = tuple((0, 1)[k % 2] for k in range(m))
        b = tuple((1, 0)[k % 2] for k in range(m))
        assert spec.group.normal_form(a) == a
        assert spec.group.normal_form(b) == b != a


def test_identity_is_neutral():
    spec = spec_for(AFF_G2, (1, 1, 2))
    w = basis(spec, (2, 1, 0, 1))
    e = spec.basis(())
    assert hecke_mul(spec, e, w) == w == hecke_mul(spec, w, e)


def random_word(rng, k, max_len):
    return tuple(rng.randrange(k) for _ in range(rng.randrange(max_len + 1)))


def test_associativity_random_triples():
    rng = random.Random(20240611)
    spec = spec_for(AFF_G2, (1, 1, Fraction(3, 2)), bound=18)
    for _ in range(500):
        a, b, c = (basis(spec, random_word(rng, 3, 6)) for _ in range(3))
        assert hecke_mul(spec, hecke_mul(spec, a, b), c) == \
            hecke_mul(spec, a, hecke_mul(spec, b, c))


words3 = st.lists(st.integers(0, 2), max_size=6).map(tuple)


@given(words3, words3, words3)
def test_associativity_property_affine_c2(x, y, z):
    spec = spec_for(AFF_C2, (2, 1, Fraction(1, 2)), bound=18)
    a = basis(spec, x) + basis(spec, y, HalfLaurent.monomial(1))
    b, c = basis(spec, y), basis(spec, z)
    assert hecke_mul(spec, hecke_mul(spec, a, b), c) == hecke_mul(spec, a, hecke_mul(spec, b, c))


@given(st.lists(st.integers(0, 2), max_size=5).map(tuple),
       st.lists(st.integers(0, 2), max_size=5).map(tuple))
def test_specialization_gives_group_algebra(x, y):
    spec = spec_for(AFF_G2, (1, 1, 2))
    prod = hecke_mul(spec, basis(spec, x), basis(spec, y))
    spec1 = specialize_to_one(prod)
    target = spec.group.normal_form(x + y)
    assert spec1 == {(0, target): 1}


# -- normal forms ---------------------------------------------------------------------------


def braid_class(pres, word):
    """All words reachable by braid moves; reduced words of one element form one class."""
    moves = []
    for s in range(pres.rank):
        for t in range(pres.rank):
            m = pres.m(s, t)
            if s != t and m != inf:
                moves.append((tuple((s, t)[k % 2] for k in range(m)),
                              tuple((t, s)[k % 2] for k in range(m))))
    seen = {word}
    stack = [word]
    while stack:
        w = stack.pop()
        for a, b in moves:
            m = len(a)
            for i in range(len(w) - m + 1):
                if w[i:i + m] == a:
                    v = w[:i] + b + w[i + m:]
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
    return seen


@pytest.mark.parametrize("pres", [AFF_G2, AFF_C2, FIN_B3, AFF_A1], ids=["G2~", "C2~", "B3", "A1~"])
def test_normal_form_is_lexmin_of_braid_class(pres):
    rng = random.Random(7)
    grp = CoxeterGroup(pres)
    for _ in range(150):
        nf = grp.normal_form(random_word(rng, pres.rank, 9))
        cls = braid_class(pres, nf)
        assert min(cls) == nf
        # no reduced word of the class admits a cancellation
        assert all(w[i] != w[i + 1] for w in cls for i in range(len(w) - 1))
        assert all(grp.normal_form(w) == nf for w in cls)


@pytest.mark.parametrize("pres,cartan", [
    (FIN_A3, [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]),
    (FIN_B3, [[2, -1, 0], [-1, 2, -2], [0, -1, 2]]),
])
def test_finite_length_distribution(pres, cartan):
    grp = CoxeterGroup(pres)
    elems = {()}
    frontier = {()}
    while frontier:
        frontier = {grp.normal_form(w + (s,)) for w in frontier for s in range(pres.rank)}
        frontier -= elems
        elems |= frontier
    counts = [0] * (max(len(w) for w in elems) + 1)
    for w in elems:
        counts[len(w)] += 1
    assert counts == oracles.weyl_length_counts(cartan)


def test_capacity_error():
    grp = CoxeterGroup(AFF_A1, bound=4)
    with pytest.raises(CapacityError):
        grp.normal_form((0, 1) * 3)
    with pytest.raises(CapacityError):
        grp.normal_form((0,) * 9)
    assert grp.normal_form((0, 0) * 4) == ()
    with pytest.raises(HeckeError):
        grp.normal_form((5,))


def test_concurrent_multiplication_is_consistent():
    spec = spec_for(AFF_G2, (1, 1, 2))
    rng = random.Random(3)
    pairs = [(random_word(rng, 3, 6), random_word(rng, 3, 6)) for _ in range(200)]
    fresh = spec_for(AFF_G2, (1, 1, 2))
    expected = [hecke_mul(fresh, basis(fresh, x), basis(fresh, y)) for x, y in pairs]
    results = [None] * 8
    errors = []

    def work(slot):
        try:
            results[slot] = [hecke_mul(spec, basis(spec, x), basis(spec, y)) for x, y in pairs]
        except Exception as exc:  # pragma: no cover - surfaced below
            errors.append(exc)

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert all(r == expected for r in results)


# -- Omega extension ----------------------------------------------------------------------


def test_omega_extension_twists_generators():
    # the diagram flip of affine C_2 swaps the two end nodes
    flip = (2, 1, 0)
    spec = spec_for(AFF_C2, (1, 2, 1), omega=((0, 1, 2), flip))
    w = spec.basis((), omega=1)
    # N_w N_{s0} = N_{s2} N_w
    assert hecke_mul(spec, w, spec.generator(0)) == HeckeElement({(1, (0,)): ONE})
    assert hecke_mul(spec, spec.generator(2), w) == HeckeElement({(1, (0,)): ONE})
    assert hecke_mul(spec, w, w) == spec.basis(())
    rng = random.Random(11)
    for _ in range(100):
        a, b, c = (spec.basis(random_word(rng, 3, 4), omega=rng.randrange(2)) for _ in range(3))
        assert hecke_mul(spec, hecke_mul(spec, a, b), c) == \
            hecke_mul(spec, a, hecke_mul(spec, b, c))


def test_omega_extension_validation():
    with pytest.raises(HeckeError):
        spec_for(AFF_C2, (1, 2, 2), omega=((0, 1, 2), (2, 1, 0)))
    with pytest.raises(HeckeError):
        spec_for(AFF_G2, omega=((0, 1, 2), (2, 1, 0)))
    with pytest.raises(HeckeError):
        spec_for(AFF_C2, omega=((2, 1, 0), (0, 1, 2)))


# -- Levi subalgebras ---------------------------------------------------------------------


def cbc2_spec(catalog):
    e = catalog.lookup("C-BC_2")
    li = e.group.local_index
    return e, spec_for(coxeter_from_local_index(li), None)


def test_levi_full_is_identity(catalog):
    e, spec = cbc2_spec(catalog)
    emb = levi_embedding(spec, {1, 2}, {1, 2})
    assert emb.identity
    assert emb.contains((0, (0, 1, 2)))


def test_levi_empty_is_omega_part(catalog):
    e, spec = cbc2_spec(catalog)
    emb = levi_embedding(spec, set(), {1, 2})
    assert not emb.identity
    assert levi_subgroup_elements(spec, emb, 4) == [(0, ())]


def test_levi_singleton_rank_one(catalog):
    e, spec = cbc2_spec(catalog)
    emb = levi_embedding(spec, {1}, {1, 2})
    assert emb.presentation.rank == 1
    assert levi_subgroup_elements(spec, emb, 4) == [(0, ()), (0, (1,))]


def test_levi_invalid_subset(catalog):
    e, spec = cbc2_spec(catalog)
    with pytest.raises(HeckeError):
        levi_embedding(spec, {0}, {1, 2})


def test_levi_span_is_multiplicative():
    spec = spec_for(AFF_G2, (1, 1, 2))
    # nodes 0 and 1 span a finite A_2 parabolic
    emb = levi_embedding(spec, {0, 1}, {0, 1, 2})
    keys = levi_subgroup_elements(spec, emb, 4)
    assert len(keys) == 6
    for a in keys:
        for b in keys:
            prod = hecke_mul(spec, spec.basis(a[1]), spec.basis(b[1]))
            assert all(emb.contains(k) for k in prod.terms)
