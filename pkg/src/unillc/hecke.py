"""Coxeter presentations, parameter tables, and N_w-basis Hecke multiplication.

The quadratic relation is N_s^2 = q^{N(s)} N_e, so the structure constants are
monomials: N_x N_y = q^{c} N_{xy} where c sums N(s) over the letters that
cancel. Words are kept in lexicographically smallest reduced form.
"""

from __future__ import annotations

import itertools
import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import inf
from pathlib import Path

from .arith import ONE, HalfLaurent
from .catalog import facet_transfer
from .diagrams import fold

DATA_DIR = Path(__file__).resolve().parent / "data"
PARAMS_PATH = DATA_DIR / "hecke_params.v1.txt"
WORD_BOUND = 12
BOND_TO_M = {1: 3, 2: 4, 3: 6, 4: inf}


class HeckeError(ValueError):
    pass


class CapacityError(HeckeError):
    pass


class MissingTable(HeckeError, LookupError):
    pass


def _m_token(m):
    return "inf" if m == inf else str(m)


def _m_parse(tok):
    return inf if tok == "inf" else int(tok)


@dataclass(frozen=True)
class CoxeterPresentation:
    generators: tuple
    matrix: tuple

    def __post_init__(self):
        k = len(self.generators)
        mat = tuple(tuple(r) for r in self.matrix)
        object.__setattr__(self, "matrix", mat)
        if len(mat) != k or any(len(r) != k for r in mat):
            raise HeckeError("Coxeter matrix has the wrong shape")
        for i in range(k):
            if mat[i][i] != 1:
                raise HeckeError("diagonal entries must be 1")
            for j in range(k):
                if mat[i][j] != mat[j][i]:
                    raise HeckeError("Coxeter matrix is not symmetric")
                if i != j and mat[i][j] not in (2, 3, 4, 6, inf):
                    raise HeckeError(f"unsupported m = {mat[i][j]}")

    @property
    def rank(self):
        return len(self.generators)

    def m(self, s, t):
        return self.matrix[s][t]

    def relabel(self, perm):
        """Presentation with generator i moved to position perm[i]."""
        k = self.rank
        inv = [0] * k
        for i, p in enumerate(perm):
            inv[p] = i
        return CoxeterPresentation(tuple(self.generators[inv[i]] for i in range(k)),
                                   tuple(tuple(self.matrix[inv[i]][inv[j]] for j in range(k))
                                         for i in range(k)))

    def restrict(self, subset):
        idx = sorted(subset)
        return CoxeterPresentation(tuple(self.generators[i] for i in idx),
                                   tuple(tuple(self.matrix[i][j] for j in idx) for i in idx))


def iwahori_coxeter(rel):
    """Coxeter matrix of the relative affine diagram by the bond rule."""
    k = rel.size
    mat = [[1 if i == j else 2 for j in range(k)] for i in range(k)]
    for i, j, b, _ in rel.edges:
        if b not in BOND_TO_M:
            raise HeckeError(f"unsupported bond {b}")
        mat[i][j] = mat[j][i] = BOND_TO_M[b]
    return CoxeterPresentation(tuple(range(k)), tuple(tuple(r) for r in mat))


# -- geometric oracle on the local index ---------------------------------------


def _gcm_from_diagram(d):
    """Integer generalized Cartan matrix a[i][j] = <alpha_i, alpha_j^vee>."""
    k = d.size
    a = [[2 if i == j else 0 for j in range(k)] for i in range(k)]
    for i, j, b, arrow in d.edges:
        if b == 1:
            a[i][j] = a[j][i] = -1
        elif b == 4:
            a[i][j] = a[j][i] = -2
        else:
            # arrow long -> short; <long, short^vee> = -b
            long_, short = (i, j) if arrow == ">" else (j, i)
            a[long_][short] = -b
            a[short][long_] = -1
    return a


def _reflection(a, s):
    """Matrix of s_s on the root lattice: alpha_i -> alpha_i - a[i][s] alpha_s."""
    k = len(a)
    m = [[int(i == j) for j in range(k)] for i in range(k)]
    for i in range(k):
        m[s][i] -= a[i][s]
    return m


def _mat_mul(x, y):
    k = len(x)
    return [[sum(x[i][t] * y[t][j] for t in range(k)) for j in range(k)] for i in range(k)]


def _apply(m, v):
    return [sum(m[i][t] * v[t] for t in range(len(v))) for i in range(len(m))]


def _longest(a, gens):
    """Matrix of the longest element of the parabolic subgroup on ``gens``."""
    k = len(a)
    w = [[int(i == j) for j in range(k)] for i in range(k)]
    refl = {s: _reflection(a, s) for s in gens}
    length = 0
    while True:
        for s in gens:
            e = [int(i == s) for i in range(k)]
            if all(x >= 0 for x in _apply(w, e)):
                w = _mat_mul(w, refl[s])
                length += 1
                break
        else:
            return w, length
        if length > 64:
            raise HeckeError("parabolic subgroup is not finite")


def coxeter_from_local_index(li, bound=12):
    """Coxeter matrix of the relative system from longest elements of Frobenius orbits.

    m(O1, O2) is the order of w_{O1} w_{O2} on the root lattice of the local
    index, or infinity when the two orbits together exhaust the diagram.
    """
    d = li.diagram
    a = _gcm_from_diagram(d)
    orbs = li.orbits()
    k = len(orbs)
    longest = [_longest(a, o)[0] for o in orbs]
    ident = [[int(i == j) for j in range(d.size)] for i in range(d.size)]
    mat = [[1 if i == j else None for j in range(k)] for i in range(k)]
    for x, y in itertools.combinations(range(k), 2):
        if len(orbs[x]) + len(orbs[y]) == d.size:
            m = inf
        else:
            p = _mat_mul(longest[x], longest[y])
            cur, m = p, 1
            while cur != ident:
                cur = _mat_mul(cur, p)
                m += 1
                if m > bound:
                    m = inf
                    break
        mat[x][y] = mat[y][x] = m
    return CoxeterPresentation(tuple(range(k)), tuple(tuple(r) for r in mat))


def iwahori_parameters(li):
    """N(O) = length of the longest element of the orbit's parabolic subgroup."""
    a = _gcm_from_diagram(li.diagram)
    return {k: Fraction(_longest(a, o)[1]) for k, o in enumerate(li.orbits())}


# -- parameter tables -------------------------------------------------------


@dataclass(frozen=True)
class ParameterTable:
    N: tuple

    def __post_init__(self):
        vals = tuple(Fraction(x) for x in self.N)
        object.__setattr__(self, "N", vals)
        for x in vals:
            if x <= 0 or x.denominator > 2:
                raise HeckeError(f"parameter {x} must be positive with denominator <= 2")

    def check_conjugation(self, pres):
        """N(s) = N(t) whenever m(s,t) is odd (s and t are conjugate)."""
        k = pres.rank
        for s, t in itertools.combinations(range(k), 2):
            m = pres.m(s, t)
            if m != inf and m % 2 == 1 and self.N[s] != self.N[t]:
                raise HeckeError(f"generators {s}, {t} are conjugate but have different parameters")


@dataclass(frozen=True)
class TableRecord:
    family: str
    n: int
    side: str
    facet: str
    sigma: str
    presentation: CoxeterPresentation
    params: ParameterTable
    note: str = ""

    @property
    def key(self):
        return (self.family, self.n, self.side, self.facet, self.sigma)


def parse_params(text):
    """Parse the text parameter format; blocks are separated by blank lines."""
    records = []
    block = []
    for raw in text.splitlines() + [""]:
        line = raw.split("#", 1)[0].strip()
        if line:
            block.append(line)
            continue
        if not block:
            continue
        records.append(_parse_block(block))
        block = []
    return records


def _parse_block(lines):
    head = lines[0].split()
    if head[0] != "table" or len(head) != 6:
        raise HeckeError(f"bad table header {lines[0]!r}")
    _, family, n, side, facet, sigma = head
    if side not in ("G", "G'"):
        raise HeckeError(f"side must be G or G', got {side}")
    gens, Ns, ms, note = [], {}, {}, ""
    for line in lines[1:]:
        tok = line.split()
        if tok[0] == "gen" and len(tok) == 3:
            gens.append(tok[1])
            Ns[tok[1]] = Fraction(tok[2])
        elif tok[0] == "m" and len(tok) == 4:
            ms[(tok[1], tok[2])] = _m_parse(tok[3])
        elif tok[0] == "note":
            note = line[5:].strip()
        else:
            raise HeckeError(f"bad table line {line!r}")
    k = len(gens)
    pos = {g: i for i, g in enumerate(gens)}
    mat = [[1 if i == j else 2 for j in range(k)] for i in range(k)]
    for (s, t), m in ms.items():
        if s not in pos or t not in pos:
            raise HeckeError(f"m line names unknown generator in {lines[0]!r}")
        mat[pos[s]][pos[t]] = mat[pos[t]][pos[s]] = m
    pres = CoxeterPresentation(tuple(gens), tuple(tuple(r) for r in mat))
    params = ParameterTable(tuple(Ns[g] for g in gens))
    params.check_conjugation(pres)
    return TableRecord(family, int(n), side, facet, sigma, pres, params, note)


def render_params(records):
    blocks = []
    for r in records:
        lines = [f"table {r.family} {r.n} {r.side} {r.facet} {r.sigma}"]
        if r.note:
            lines.append(f"note {r.note}")
        g = r.presentation.generators
        for i, j in itertools.combinations(range(len(g)), 2):
            m = r.presentation.matrix[i][j]
            if m != 2:
                lines.append(f"m {g[i]} {g[j]} {_m_token(m)}")
        for s, N in zip(g, r.params.N):
            lines.append(f"gen {s} {N}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def records_to_json(records):
    out = []
    for r in records:
        g = r.presentation.generators
        out.append({
            "family": r.family, "n": r.n, "side": r.side, "facet": r.facet, "sigma": r.sigma,
            "note": r.note, "generators": [str(x) for x in g],
            "coxeter": [[_m_token(m) for m in row] for row in r.presentation.matrix],
            "N": [str(x) for x in r.params.N],
        })
    return out


def records_from_json(obj):
    if isinstance(obj, dict):
        if obj.get("format") != "unillc-hecke-params" or obj.get("version") != 1:
            raise HeckeError("not a version-1 parameter document")
        obj = obj["tables"]
    out = []
    for o in obj:
        mat = tuple(tuple(_m_parse(str(m)) for m in row) for row in o["coxeter"])
        pres = CoxeterPresentation(tuple(o["generators"]), mat)
        params = ParameterTable(tuple(Fraction(x) for x in o["N"]))
        params.check_conjugation(pres)
        out.append(TableRecord(o["family"], o["n"], o["side"], o["facet"], o["sigma"], pres,
                               params, o.get("note", "")))
    return out


class ParamData:
    def __init__(self, records):
        self.records = {}
        for r in records:
            if r.key in self.records:
                raise HeckeError(f"duplicate table {r.key}")
            self.records[r.key] = r

    def get(self, family, n, side, facet, sigma):
        r = self.records.get((family, n, side, facet, sigma))
        if r is None:
            raise MissingTable(f"no parameter table for {family} n={n} {side} {facet} {sigma}")
        return r


def load_params(path=None):
    p = Path(path or PARAMS_PATH)
    text = p.read_text()
    if p.suffix == ".json":
        return ParamData(records_from_json(json.loads(text)))
    return ParamData(parse_params(text))


def facet_coxeter(e, f, table, sigma="triv", companion=False):
    """Presentation for (f, sigma); the chamber falls back to the bond rule."""
    side = e.companion if companion else e.group
    if not f.J:
        return iwahori_coxeter(side.relative)
    rec = table.get(e.family, e.n, "G'" if companion else "G", f.ident, sigma)
    return rec.presentation


def facet_parameters(e, f, table, sigma="triv", companion=False):
    fid = f.ident
    return table.get(e.family, e.n, "G'" if companion else "G", fid, sigma).params


def transfer_check(e, f, table, sigma="triv"):
    """Equal Coxeter matrices and parameters on both sides under the diagram bijection."""
    fp = facet_transfer(e, f)
    try:
        rg = table.get(e.family, e.n, "G", f.ident, sigma)
        rc = table.get(e.family, e.n, "G'", fp.ident, sigma)
    except MissingTable:
        return False
    if not f.J:
        if rg.presentation.matrix != iwahori_coxeter(e.group.relative).matrix:
            return False
        if rc.presentation.matrix != iwahori_coxeter(e.companion.relative).matrix:
            return False
        bij = e.bijection
        moved = rg.presentation.relabel(bij)
        Nmoved = [None] * len(bij)
        for i, p in enumerate(bij):
            Nmoved[p] = rg.params.N[i]
        return (moved.matrix == rc.presentation.matrix
                and tuple(Nmoved) == rc.params.N)
    return (rg.presentation.matrix == rc.presentation.matrix
            and rg.presentation.generators == rc.presentation.generators
            and rg.params == rc.params)


# -- Coxeter group elements in normal form --------------------------------------


def _gcm_from_coxeter(pres):
    k = pres.rank
    a = [[2 if i == j else 0 for j in range(k)] for i in range(k)]
    for i, j in itertools.combinations(range(k), 2):
        m = pres.m(i, j)
        if m == 2:
            continue
        if m == 3:
            a[i][j] = a[j][i] = -1
        elif m == 4:
            a[i][j], a[j][i] = -2, -1
        elif m == 6:
            a[i][j], a[j][i] = -3, -1
        else:
            a[i][j] = a[j][i] = -2
    return a


class CoxeterGroup:
    """Words over generator indices with a lexicographically minimal normal form."""

    def __init__(self, pres, bound=WORD_BOUND):
        self.pres = pres
        self.bound = bound
        a = _gcm_from_coxeter(pres)
        self._refl = [_reflection(a, s) for s in range(pres.rank)]
        self._memo = {}
        self._lock = threading.Lock()

    def _inverse_matrix(self, word):
        k = self.pres.rank
        m = [[int(i == j) for j in range(k)] for i in range(k)]
        for s in word:
            m = _mat_mul(self._refl[s], m)
        return m

    def normal_form(self, word):
        word = tuple(word)
        with self._lock:
            hit = self._memo.get(word)
        if hit is not None:
            return hit
        if len(word) > 2 * self.bound:
            raise CapacityError(f"word of length {len(word)} exceeds the bound")
        k = self.pres.rank
        for s in word:
            if not 0 <= s < k:
                raise HeckeError(f"generator {s} out of range")
        # winv = w^{-1} as a matrix; s is a left descent iff w^{-1}(alpha_s) < 0
        winv = self._inverse_matrix(word)
        out = []
        while True:
            for s in range(k):
                col = [winv[i][s] for i in range(k)]
                if any(x < 0 for x in col):
                    out.append(s)
                    winv = _mat_mul(winv, self._refl[s])
                    break
            else:
                break
            if len(out) > self.bound:
                raise CapacityError(f"reduced length exceeds the bound {self.bound}")
        nf = tuple(out)
        with self._lock:
            self._memo[word] = nf
        return nf

    def length(self, word):
        return len(self.normal_form(word))


# -- Hecke algebras ---------------------------------------------------------------


@dataclass(frozen=True)
class HeckeAlgebraSpec:
    """Presentation, parameters, and a finite group acting on the generators.

    ``omega_ext`` is a tuple of generator permutations closed under
    composition; element 0 must be the identity.
    """

    presentation: CoxeterPresentation
    params: ParameterTable
    omega_ext: tuple = ()
    bound: int = WORD_BOUND
    group: CoxeterGroup = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        k = self.presentation.rank
        if len(self.params.N) != k:
            raise HeckeError("one parameter per generator")
        self.params.check_conjugation(self.presentation)
        omega = tuple(tuple(p) for p in (self.omega_ext or (tuple(range(k)),)))
        if omega[0] != tuple(range(k)):
            raise HeckeError("first Omega element must be the identity")
        for p in omega:
            for i in range(k):
                if self.params.N[p[i]] != self.params.N[i]:
                    raise HeckeError("Omega action does not preserve parameters")
                for j in range(k):
                    if self.presentation.m(p[i], p[j]) != self.presentation.m(i, j):
                        raise HeckeError("Omega action does not preserve the Coxeter matrix")
        for p, r in itertools.product(omega, omega):
            if tuple(p[x] for x in r) not in omega:
                raise HeckeError("Omega elements are not closed under composition")
        object.__setattr__(self, "omega_ext", omega)
        object.__setattr__(self, "group", CoxeterGroup(self.presentation, self.bound))

    def omega_mul(self, a, b):
        p, r = self.omega_ext[a], self.omega_ext[b]
        return self.omega_ext.index(tuple(p[x] for x in r))

    def omega_inv(self, a):
        p = self.omega_ext[a]
        inv = [0] * len(p)
        for i, x in enumerate(p):
            inv[x] = i
        return self.omega_ext.index(tuple(inv))

    def basis(self, word, omega=0, coeff=ONE):
        return HeckeElement({(omega, self.group.normal_form(word)): coeff})

    def generator(self, s):
        return self.basis((s,))

    def q_power(self, s):
        """q^{N(s)} as a Laurent monomial in u."""
        N = self.params.N[s]
        return HalfLaurent.monomial(int(2 * N))


@dataclass(frozen=True)
class HeckeElement:
    terms: dict

    def __post_init__(self):
        clean = {k: v for k, v in self.terms.items() if not v.is_zero()}
        object.__setattr__(self, "terms", clean)

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, HalfLaurent()) + v
        return HeckeElement(out)

    def scale(self, c):
        return HeckeElement({k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, HeckeElement) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda kv: kv[0])))

    def is_basis(self):
        return len(self.terms) == 1


def _word_times(spec, word, omega, right):
    """N_word * N_right where right = (omega, reduced word); returns (coeff, key)."""
    coeff = ONE
    cur = right[1]
    grp = spec.group
    for s in reversed(word):
        if grp.length((s,) + cur) > len(cur):
            cur = grp.normal_form((s,) + cur)
        else:
            coeff = coeff * spec.q_power(s)
            cur = grp.normal_form((s,) + cur)
    return coeff, (omega, cur)


def hecke_mul(spec, a, b):
    """Product in the N_w basis; basis keys are (Omega index, reduced word)."""
    out = {}
    for (w1, x), c1 in a.terms.items():
        for (w2, y), c2 in b.terms.items():
            # N_{w1} N_x N_{w2} N_y = N_{w1 w2} N_{w2^{-1}(x)} N_y
            inv = spec.omega_ext[spec.omega_inv(w2)]
            twisted = tuple(inv[s] for s in x)
            w = spec.omega_mul(w1, w2)
            c, key = _word_times(spec, twisted, w, (w, y))
            out[key] = out.get(key, HalfLaurent()) + c1 * c2 * c
    return HeckeElement(out)


def specialize_to_one(el):
    """Set q^{N(s)} -> 1: every coefficient becomes its value at u = 1."""
    return {k: v.eval(u=1) for k, v in el.terms.items()}


# -- Levi subalgebras ---------------------------------------------------------------


@dataclass(frozen=True)
class LeviEmbedding:
    generators: frozenset
    omega_part: tuple
    identity: bool
    presentation: CoxeterPresentation

    def contains(self, key):
        omega, word = key
        if self.identity:
            return True
        return omega in self.omega_part and set(word) <= self.generators


def levi_embedding(spec, levi_subset, finite_basis):
    """Index set of the basis elements N_w spanning the Levi's Hecke algebra.

    ``finite_basis`` is the relative basis Delta (affine nodes minus the mark).
    The full basis gives the identity; otherwise the span is the parabolic
    subgroup on ``levi_subset`` extended by the Omega elements preserving it.
    Translations of the Levi's centre are not modeled.
    """
    S = frozenset(levi_subset)
    if not S <= frozenset(finite_basis):
        raise HeckeError(f"{sorted(S)} is not a subset of the finite basis")
    omegas = tuple(i for i, p in enumerate(spec.omega_ext) if {p[s] for s in S} == set(S))
    if S == frozenset(finite_basis):
        return LeviEmbedding(frozenset(range(spec.presentation.rank)), tuple(
            range(len(spec.omega_ext))), True, spec.presentation)
    return LeviEmbedding(S, omegas, False, spec.presentation.restrict(S))


def levi_subgroup_elements(spec, emb, max_len):
    """All keys of the embedded span with word length at most max_len."""
    words = {()}
    frontier = {()}
    gens = sorted(emb.generators)
    for _ in range(max_len):
        nxt = set()
        for w in frontier:
            for s in gens:
                v = spec.group.normal_form(w + (s,))
                if v not in words:
                    nxt.add(v)
        words |= nxt
        frontier = nxt
    return sorted((o, w) for o in emb.omega_part for w in words)


def iwahori_transfer_check(e):
    """Coxeter matrix of G's folded local index against the companion's diagram.

    Both sides are computed independently; the bijection of relative nodes
    must carry one matrix onto the other.
    """
    mg = iwahori_coxeter(fold(e.group.local_index))
    mc = iwahori_coxeter(e.companion.relative)
    return mg.relabel(e.bijection).matrix == mc.matrix
