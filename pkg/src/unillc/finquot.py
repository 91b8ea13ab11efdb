"""Reductive quotients of parahoric subgroups and their orders over the residue field."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .arith import ONE, HalfLaurent
from .catalog import facet_transfer
from .omega import facet_stabilizers, subgroup_signature
from .rootdata import degrees, positive_root_count


class UnsupportedType(ValueError):
    pass


VALID_TWISTS = {"A": (1, 2), "B": (1,), "C": (1,), "D": (1, 2, 3), "E": (1, 2), "F": (1,),
                "G": (1,)}


@dataclass(frozen=True)
class Factor:
    typ: str
    rank: int
    twist: int = 1

    def __post_init__(self):
        if self.twist not in VALID_TWISTS[self.typ]:
            raise UnsupportedType(f"twist {self.twist} invalid for {self.typ}")
        if self.typ == "A" and self.twist == 2 and self.rank < 2:
            raise UnsupportedType("A_1 has no outer twist")
        if self.typ == "D" and self.twist == 3 and self.rank != 4:
            raise UnsupportedType("triality twist needs D_4")
        if self.typ == "E" and self.twist == 2 and self.rank != 6:
            raise UnsupportedType("outer twist of E needs E_6")

    @property
    def label(self):
        pre = {1: "", 2: "2", 3: "3"}[self.twist]
        return f"{pre}{self.typ}{self.rank}"

    def arrow_free_key(self):
        typ = "B" if self.typ == "C" else self.typ
        if typ == "B" and self.rank == 1:
            typ = "A"
        return (typ, self.rank, self.twist)


@dataclass(frozen=True)
class TwistedFiniteType:
    """Components of the reductive quotient, grouped into Frobenius orbits.

    ``orbits`` holds (factor, orbit length) pairs: an orbit of m copies of a
    factor whose m-th Frobenius power acts on one copy with ``factor.twist``.
    ``torus`` lists the Frobenius orbit sizes of the local nodes outside the
    facet; the central torus has character polynomial prod (x^s - 1) / (x - 1).
    """

    orbits: tuple
    torus: tuple
    frob_factor_permutation: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "orbits", tuple(sorted(self.orbits, key=_orbit_key)))
        object.__setattr__(self, "torus", tuple(sorted(self.torus)))

    @property
    def torus_rank(self):
        return sum(self.torus) - 1

    @property
    def semisimple_rank(self):
        return sum(f.rank * m for f, m in self.orbits)

    def dimension(self):
        return sum(m * (f.rank + 2 * positive_root_count(f.typ, f.rank))
                   for f, m in self.orbits) + self.torus_rank

    def arrow_free_key(self):
        return (tuple(sorted((f.arrow_free_key(), m) for f, m in self.orbits)), self.torus)

    def label(self):
        parts = []
        for f, m in self.orbits:
            parts.append(f.label if m == 1 else f"({f.label})^{m}")
        parts.append(f"T[{','.join(map(str, self.torus))}]")
        return " x ".join(parts)


def _orbit_key(item):
    f, m = item
    return (f.typ, f.rank, f.twist, m)


@dataclass(frozen=True)
class OrderPolynomial:
    poly: HalfLaurent
    dimension: int

    def __post_init__(self):
        if not self.poly.all_even():
            raise ValueError("order polynomial must be a polynomial in q")
        if self.poly.degree_in_q() != self.dimension:
            raise ValueError("degree in q differs from the dimension")

    def at(self, q):
        return self.poly.eval(q=q)


# -- component classification -------------------------------------------------


def classify_component(d, comp):
    """Finite type (letter, rank) of a connected induced subdiagram."""
    nodes = set(comp)
    k = len(nodes)
    edges = [(i, j, b, a) for i, j, b, a in d.edges if i in nodes and j in nodes]
    deg = {i: 0 for i in nodes}
    for i, j, _, _ in edges:
        deg[i] += 1
        deg[j] += 1
    if len(edges) != k - 1:
        raise UnsupportedType(f"component {sorted(nodes)} is not a tree")
    bonds = sorted(e[2] for e in edges if e[2] > 1)
    if any(b == 4 for b in bonds):
        raise UnsupportedType("infinite bond inside a facet component")
    if not bonds:
        branch = [i for i in nodes if deg[i] >= 3]
        if not branch:
            return ("A", k)
        if len(branch) > 1 or deg[branch[0]] > 3:
            raise UnsupportedType(f"component {sorted(nodes)} is not of finite type")
        arms = sorted(_arm_length(d, nodes, branch[0], j) for j in d.neighbours(branch[0])
                      if j in nodes)
        if arms[0] == 1 and arms[1] == 1:
            return ("D", k)
        if arms[:2] == [1, 2] and arms[2] in (2, 3, 4):
            return ("E", k)
        raise UnsupportedType(f"component {sorted(nodes)} is not of finite type")
    if len(bonds) > 1:
        raise UnsupportedType(f"component {sorted(nodes)} has several multiple bonds")
    if any(deg[i] > 2 for i in nodes):
        raise UnsupportedType(f"component {sorted(nodes)} is not of finite type")
    (i, j, b, arrow), = [e for e in edges if e[2] > 1]
    if b == 3:
        if k != 2:
            raise UnsupportedType("triple bond outside G_2")
        return ("G", 2)
    if k == 2:
        return ("B", 2)
    if deg[i] == 1 or deg[j] == 1:
        end, other = (i, j) if deg[i] == 1 else (j, i)
        # arrow from long to short: pointing at the end node means a short end
        towards_end = (arrow == ">" and other == i) or (arrow == "<" and other == j)
        return ("B", k) if towards_end else ("C", k)
    if k == 4:
        return ("F", 4)
    raise UnsupportedType(f"component {sorted(nodes)} is not of finite type")


def _arm_length(d, nodes, centre, start):
    length, prev, cur = 1, centre, start
    while True:
        nxt = [j for j in d.neighbours(cur) if j in nodes and j != prev]
        if not nxt:
            return length
        prev, cur = cur, nxt[0]
        length += 1


def _perm_order(p, nodes):
    k = 1
    q = {i: p[i] for i in nodes}
    while any(q[i] != i for i in nodes):
        q = {i: p[q[i]] for i in nodes}
        k += 1
    return k


def quotient_of_local_index(li, lifted):
    """TwistedFiniteType of the induced subdiagram on a Frobenius-stable node set."""
    d = li.diagram
    lifted = frozenset(lifted)
    if {li.frob[i] for i in lifted} != set(lifted):
        raise ValueError("node set is not Frobenius stable")
    comps = d.components(lifted)
    index = {n: c for c, comp in enumerate(comps) for n in comp}
    perm = tuple(index[li.frob[comp[0]]] for comp in comps)
    seen = set()
    orbits = []
    for c in range(len(comps)):
        if c in seen:
            continue
        orbit = [c]
        x = perm[c]
        while x != c:
            orbit.append(x)
            x = perm[x]
        seen.update(orbit)
        m = len(orbit)
        comp = comps[c]
        fm = list(range(d.size))
        for _ in range(m):
            fm = [li.frob[x] for x in fm]
        twist = _perm_order(fm, comp)
        typ, rank = classify_component(d, comp)
        orbits.append((Factor(typ, rank, twist), m))
    rest = sorted(set(d.nodes) - lifted)
    torus = []
    seen = set()
    for i in rest:
        if i in seen:
            continue
        orb = [i]
        j = li.frob[i]
        while j != i:
            orb.append(j)
            j = li.frob[j]
        seen.update(orb)
        torus.append(len(orb))
    return TwistedFiniteType(tuple(orbits), tuple(torus), perm)


def reductive_quotient(e, f, companion=False):
    """Reductive quotient type of the parahoric attached to facet f.

    On the companion side f must already be a facet of the companion's
    relative diagram.
    """
    side = e.companion if companion else e.group
    if len(f.J) >= side.relative.size:
        raise ValueError("facet must be a proper subset")
    return quotient_of_local_index(side.local_index, side.local_index.lift(f.J))


# -- orders ------------------------------------------------------------------


def _signs(f):
    degs = list(degrees(f.typ, f.rank))
    if f.twist == 1:
        return [(d, 1) for d in degs]
    if f.typ == "A":
        return [(d, (-1) ** d) for d in degs]
    if f.typ == "D" and f.twist == 2:
        out, flipped = [], False
        for d in degs:
            if d == f.rank and not flipped:
                out.append((d, -1))
                flipped = True
            else:
                out.append((d, 1))
        return out
    if f.typ == "E" and f.twist == 2:
        return [(d, -1 if d in (5, 9) else 1) for d in degs]
    raise UnsupportedType(f"no sign table for {f.label}")


def factor_order(f):
    """|H(F_q)| for a simple factor as a polynomial in q (u^2 = q)."""
    out = HalfLaurent.q(positive_root_count(f.typ, f.rank))
    if f.typ == "D" and f.twist == 3:
        for d in (2, 6):
            out = out * (HalfLaurent.q(d) - ONE)
        return out * (HalfLaurent.q(8) + HalfLaurent.q(4) + ONE)
    for d, eps in _signs(f):
        out = out * (HalfLaurent.q(d) - HalfLaurent.const(eps))
    return out


def torus_order(orbit_sizes):
    """prod (q^s - 1) over orbit sizes, divided by (q - 1)."""
    out = ONE
    for s in orbit_sizes:
        out = out * (HalfLaurent.q(s) - ONE)
    return out.exact_div(HalfLaurent.q(1) - ONE)


def order_poly(t):
    out = torus_order(t.torus)
    for f, m in t.orbits:
        out = out * factor_order(f).substitute_power(m)
    return OrderPolynomial(out, t.dimension())


def torus_order_charpoly(li, lifted):
    """Fallback: det(q - F) on the span of the complementary nodes, over (q - 1)."""
    rest = sorted(set(li.diagram.nodes) - set(lifted))
    pos = {n: k for k, n in enumerate(rest)}
    k = len(rest)
    m = [[Fraction(0)] * k for _ in range(k)]
    for n in rest:
        m[pos[li.frob[n]]][pos[n]] = Fraction(1)
    coeffs = _charpoly(m)
    poly = HalfLaurent({2 * i: c for i, c in enumerate(coeffs) if c})
    return poly.exact_div(HalfLaurent.q(1) - ONE)


def _charpoly(m):
    """Coefficients (constant first) of det(x - m), Faddeev-LeVerrier."""
    n = len(m)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = m M_{k-1} + c_{n-k+1} I
        prev = M
        M = [[sum(m[i][t] * prev[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            M[i][i] += coeffs[n - k + 1]
        mM = [[sum(m[i][t] * M[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(mM[i][i] for i in range(n)) / k
    return coeffs


# -- the four-way comparison ---------------------------------------------------


@dataclass(frozen=True)
class MatchReport:
    entry: str
    facet: str
    facet_companion: str
    type_match: bool
    dim_match: bool
    order_match: bool
    omega_match: bool
    type_g: str
    type_gp: str

    @property
    def ok(self):
        return self.type_match and self.dim_match and self.order_match and self.omega_match

    def to_json(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def to_text(self):
        return json.dumps(self.to_json(), sort_keys=True)


def compare_quotients(ta, tb):
    """(type up to arrows, dimension, exact order) equalities for two quotients."""
    return (ta.arrow_free_key() == tb.arrow_free_key(),
            ta.dimension() == tb.dimension(),
            order_poly(ta).poly == order_poly(tb).poly)


def check_facet_match(e, f):
    fp = facet_transfer(e, f)
    tg = reductive_quotient(e, f)
    tc = reductive_quotient(e, fp, companion=True)
    type_ok, dim_ok, order_ok = compare_quotients(tg, tc)
    sg, _ = facet_stabilizers(e.group.omega, f)
    sc, _ = facet_stabilizers(e.companion.omega, fp)
    omega_ok = (subgroup_signature(e.group.omega.group, sg)
                == subgroup_signature(e.companion.omega.group, sc))
    return MatchReport(e.ident, f.ident, fp.ident, type_ok, dim_ok, order_ok, omega_ok,
                       tg.label(), tc.label())


def disconnected_order(e, f):
    """|Omega_{G,f}| times the identity-component order."""
    sg, _ = facet_stabilizers(e.group.omega, f)
    return order_poly(reductive_quotient(e, f)).poly * HalfLaurent.const(len(sg))
