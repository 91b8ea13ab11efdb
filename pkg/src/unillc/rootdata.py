"""Based root data, pinned Galois actions, and lattice quotients.

Coordinates: cocharacters are written in the basis of fundamental coweights
of the simply connected cover, so the coroot lattice is spanned by the
columns of the Cartan matrix ``a[i][j] = <alpha_i, alpha_j^vee>``. Simple
roots are numbered as in Bourbaki, shifted to start at 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod


# -- integer linear algebra -------------------------------------------------


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    if not a:
        return []
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(cols)]
            for i in range(len(a))]


def mat_vec(a, v):
    return [sum(a[i][k] * v[k] for k in range(len(v))) for i in range(len(a))]


def transpose(a, rows=None):
    if not a:
        return [[] for _ in range(rows or 0)]
    return [list(r) for r in zip(*a)]


def columns(a):
    return transpose(a)


def from_columns(cols, rows):
    if not cols:
        return [[] for _ in range(rows)]
    return [[c[i] for c in cols] for i in range(rows)]


def smith_normal_form(m, with_inverse=False):
    """Return (d, U, V) with U * m * V diagonal, diagonal d[0] | d[1] | ...

    ``m`` is a list of rows (r x c). U (r x r) and V (c x c) are unimodular.
    The returned ``d`` has length min(r, c); trailing zeros mark free rank.
    With ``with_inverse`` the inverse of U is appended to the result.
    """
    a = [list(row) for row in m]
    r = len(a)
    c = len(a[0]) if r else 0
    U = _identity(r)
    Ui = _identity(r)
    V = _identity(c)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]
        for row in Ui:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]
        for row in Ui:
            row[src] -= k * row[dst]

    def add_col(src, dst, k):
        for row in a:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    t = 0
    while t < min(r, c):
        nz = [(abs(a[i][j]), i, j) for i in range(t, r) for j in range(t, c) if a[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(t, i, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        done = False
                        swap_rows(t, i)
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(t, j, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        done = False
                        swap_cols(t, j)
            if not done:
                continue
            bad = [(i, j) for i in range(t + 1, r) for j in range(t + 1, c)
                   if a[i][j] % a[t][t]]
            if bad:
                add_row(bad[0][0], t, 1)
                continue
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
            for row in Ui:
                row[t] = -row[t]
        t += 1
    d = [a[i][i] for i in range(min(r, c))]
    if with_inverse:
        return d, U, V, Ui
    return d, U, V


def unimodular_inverse(m):
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    out = [[row[n + j] for j in range(n)] for row in aug]
    if any(x.denominator != 1 for row in out for x in row):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in out]


def integer_kernel(m, ncols):
    """Basis (list of vectors) of {x in Z^ncols : m x = 0}."""
    if not m:
        return [list(v) for v in _identity(ncols)]
    d, _, V = smith_normal_form(m)
    rank = sum(1 for x in d if x)
    return [[V[i][j] for i in range(ncols)] for j in range(rank, ncols)]


class SubLattice:
    """Sublattice of Z^k spanned by a list of generator vectors."""

    def __init__(self, gens, ambient):
        self.ambient = ambient
        gens = [list(g) for g in gens if any(g)]
        if not gens:
            self.rank = 0
            self.basis = []
            self._U = _identity(ambient)
            self._d = []
            return
        d, U, _, Uinv = smith_normal_form(from_columns(gens, ambient), True)
        self._d = [x for x in d if x]
        self.rank = len(self._d)
        self._U = U
        self.basis = [[Uinv[i][j] * self._d[j] for i in range(ambient)]
                      for j in range(self.rank)]

    def coords(self, x):
        """Coordinates of x in ``basis``; ValueError if x is not in the lattice."""
        y = mat_vec(self._U, x)
        if any(y[i] for i in range(self.rank, self.ambient)):
            raise ValueError(f"{x} not in sublattice")
        out = []
        for i in range(self.rank):
            if y[i] % self._d[i]:
                raise ValueError(f"{x} not in sublattice")
            out.append(y[i] // self._d[i])
        return out

    def contains(self, x):
        try:
            self.coords(x)
            return True
        except ValueError:
            return False

    def vector(self, coords):
        v = [0] * self.ambient
        for c, b in zip(coords, self.basis):
            for i in range(self.ambient):
                v[i] += c * b[i]
        return v


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Product of cyclic groups Z/d_1 x ... with d_1 | d_2 | ...; 0 = free Z."""

    factors: tuple = ()

    def __post_init__(self):
        fs = tuple(self.factors)
        if any(f < 0 or f == 1 for f in fs):
            raise ValueError(f"bad invariant factors {fs}")
        finite = [f for f in fs if f]
        for x, y in zip(finite, finite[1:]):
            if y % x:
                raise ValueError(f"divisibility chain fails in {fs}")
        object.__setattr__(self, "factors", fs)

    @property
    def free_rank(self):
        return sum(1 for f in self.factors if f == 0)

    def is_finite(self):
        return self.free_rank == 0

    def order(self):
        if not self.is_finite():
            raise ValueError("infinite group")
        return prod(self.factors)

    def identity(self):
        return tuple(0 for _ in self.factors)

    def reduce(self, x):
        return tuple(v % f if f else v for v, f in zip(x, self.factors))

    def add(self, x, y):
        return self.reduce(tuple(a + b for a, b in zip(x, y)))

    def neg(self, x):
        return self.reduce(tuple(-a for a in x))

    def scale(self, k, x):
        return self.reduce(tuple(k * a for a in x))

    def elements(self):
        if not self.is_finite():
            raise ValueError("cannot enumerate an infinite group")
        return [tuple(t) for t in itertools.product(*(range(f) for f in self.factors))]

    def element_order(self, x):
        k = 1
        for v, f in zip(x, self.factors):
            if v:
                k = k * (f // gcd(v, f)) // gcd(k, f // gcd(v, f))
        return k

    def generators(self):
        gens = []
        for i in range(len(self.factors)):
            e = [0] * len(self.factors)
            e[i] = 1
            gens.append(tuple(e))
        return gens

    def __str__(self):
        if not self.factors:
            return "1"
        return " x ".join("Z" if f == 0 else f"Z/{f}" for f in self.factors)


class LatticeQuotient:
    """K / L for lattices L inside K inside Z^k, with explicit representatives."""

    def __init__(self, K, L_gens):
        self.K = K
        self.ambient = K.ambient
        self.L_gens = [list(g) for g in L_gens if any(g)]
        coeff = [K.coords(g) for g in self.L_gens]
        r = K.rank
        if coeff:
            d, U, _, Uinv = smith_normal_form(from_columns(coeff, r), True)
        else:
            d, U, Uinv = [], _identity(r), _identity(r)
        d = list(d) + [0] * (r - len(d))
        self._U = U
        self._Uinv = Uinv
        self._keep = [i for i in range(r) if d[i] != 1]
        self._d = d
        self.group = FiniteAbelianGroup(tuple(d[i] for i in self._keep))

    def classify(self, x):
        """Class of an ambient vector x (which must lie in K)."""
        y = mat_vec(self._U, self.K.coords(x)) if self.K.rank else []
        return self.group.reduce(tuple(y[i] for i in self._keep))

    def lift(self, g):
        y = [0] * self.K.rank
        for i, v in zip(self._keep, g):
            y[i] = v
        return self.K.vector(mat_vec(self._Uinv, y)) if self.K.rank else []

    def induced(self, matrix):
        """The map on the quotient induced by an integer ambient matrix."""
        table = {}

        def f(g):
            if g not in table:
                table[g] = self.classify(mat_vec(matrix, self.lift(g)))
            return table[g]
        return f


# -- root system tables -------------------------------------------------------


def cartan_matrix(typ, rank):
    """Cartan matrix a[i][j] = <alpha_i, alpha_j^vee>, Bourbaki numbering."""
    n = rank
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, aij=-1, aji=-1):
        a[i][j] = aij
        a[j][i] = aji

    if typ == "A":
        for i in range(n - 1):
            link(i, i + 1)
    elif typ == "B":
        for i in range(n - 2):
            link(i, i + 1)
        if n >= 2:
            link(n - 2, n - 1, -2, -1)
    elif typ == "C":
        for i in range(n - 2):
            link(i, i + 1)
        if n >= 2:
            link(n - 2, n - 1, -1, -2)
    elif typ == "D":
        if n < 3:
            raise ValueError("D_n needs n >= 3")
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif typ == "E":
        if n not in (6, 7, 8):
            raise ValueError("E_n needs n in 6, 7, 8")
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif typ == "F":
        if n != 4:
            raise ValueError("F_4 only")
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif typ == "G":
        if n != 2:
            raise ValueError("G_2 only")
        link(0, 1, -1, -3)
    else:
        raise ValueError(f"unknown type {typ}")
    return a


DEGREES = {
    "E6": (2, 5, 6, 8, 9, 12),
    "E7": (2, 6, 8, 10, 12, 14, 18),
    "E8": (2, 8, 12, 14, 18, 20, 24, 30),
    "F4": (2, 6, 8, 12),
    "G2": (2, 6),
}


def degrees(typ, rank):
    """Degrees of the basic Weyl group invariants."""
    if typ == "A":
        return tuple(range(2, rank + 2))
    if typ in ("B", "C"):
        return tuple(range(2, 2 * rank + 1, 2))
    if typ == "D":
        return tuple(sorted(list(range(2, 2 * rank - 1, 2)) + [rank]))
    key = f"{typ}{rank}"
    if key in DEGREES:
        return DEGREES[key]
    raise ValueError(f"no degree table for {typ}{rank}")


def exponents(typ, rank):
    return tuple(d - 1 for d in degrees(typ, rank))


def positive_root_count(typ, rank):
    return sum(exponents(typ, rank))


def group_dimension(typ, rank):
    return rank + 2 * positive_root_count(typ, rank)


def parse_type(label):
    """'B3' -> ('B', 3)."""
    return label[0], int(label[1:])


def diagram_automorphism(typ, rank, name):
    """Permutation (tuple, 0-based) of the simple roots."""
    ident = list(range(rank))
    if name == "id":
        return tuple(ident)
    if name == "flip" and typ == "A":
        return tuple(rank - 1 - i for i in range(rank))
    if name == "flip" and typ == "D":
        p = ident[:]
        p[rank - 2], p[rank - 1] = rank - 1, rank - 2
        return tuple(p)
    if name == "flip" and typ == "E" and rank == 6:
        return (5, 1, 4, 3, 2, 0)
    if name == "triality" and typ == "D" and rank == 4:
        return (2, 1, 3, 0)
    raise ValueError(f"no automorphism {name} for {typ}{rank}")


def permutation_matrix(perm, extra=None):
    """Matrix sending e_i to e_perm[i], optionally block-summed with ``extra``."""
    n = len(perm)
    k = n + (len(extra) if extra else 0)
    m = [[0] * k for _ in range(k)]
    for i, p in enumerate(perm):
        m[p][i] = 1
    if extra:
        for i, row in enumerate(extra):
            for j, v in enumerate(row):
                m[n + i][n + j] = v
    return m


# -- based root data ----------------------------------------------------------


@dataclass(frozen=True)
class BasedRootDatum:
    """A based root datum, optionally times a central torus of rank ``central_rank``.

    ``xstar_gens`` span the cocharacter lattice inside the ambient space of
    fundamental-coweight coordinates (plus torus coordinates).
    """

    typ: str
    rank: int
    isogeny: str
    xstar_gens: tuple
    central_rank: int = 0
    cartan: tuple = field(init=False)
    simple_coroots: tuple = field(init=False)
    simple_roots: tuple = field(init=False)

    def __post_init__(self):
        a = cartan_matrix(self.typ, self.rank)
        object.__setattr__(self, "cartan", tuple(tuple(r) for r in a))
        X = self.xstar()
        cor = tuple(tuple(X.coords(v)) for v in self.coroot_vectors())
        object.__setattr__(self, "simple_coroots", cor)
        # alpha_i evaluated on the basis of X_*: the i-th ambient coordinate
        roots = tuple(tuple(b[i] for b in X.basis) for i in range(self.rank))
        object.__setattr__(self, "simple_roots", roots)
        self.check()

    @property
    def ambient(self):
        return self.rank + self.central_rank

    @property
    def type_label(self):
        return f"{self.typ}{self.rank}"

    def coroot_vectors(self):
        return [[self.cartan[i][j] for i in range(self.rank)] + [0] * self.central_rank
                for j in range(self.rank)]

    def xstar(self):
        if "_xstar" not in self.__dict__:
            object.__setattr__(self, "_xstar",
                               SubLattice([list(g) for g in self.xstar_gens], self.ambient))
        return self.__dict__["_xstar"]

    def check(self):
        for i in range(self.rank):
            for j in range(self.rank):
                pairing = sum(x * y for x, y in zip(self.simple_roots[i], self.simple_coroots[j]))
                if pairing != self.cartan[i][j]:
                    raise ValueError("root/coroot pairing does not reproduce the Cartan matrix")
        if not _positive_definite_symmetrized(self.cartan):
            raise ValueError("Cartan matrix is not of finite type")


def _positive_definite_symmetrized(a):
    n = len(a)
    # symmetrize with d_j = (alpha_j, alpha_j)/2 from the graph structure
    d = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if i != j and a[i][j] and d[j] is None:
                    # a[i][j] d_j = a[j][i] d_i
                    d[j] = Fraction(a[j][i]) * d[i] / a[i][j]
                    stack.append(j)
    s = [[Fraction(a[i][j]) * d[j] for j in range(n)] for i in range(n)]
    den = 1
    for row in s:
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
    m = [[int(x * den) for x in row] for row in s]
    # Bareiss elimination: the k-th pivot is the k-th leading principal minor
    prev = 1
    for k in range(n):
        if m[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return True


def _det(m):
    m = [list(r) for r in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det


def determinant(m):
    return _det([[Fraction(x) for x in row] for row in m])


def root_datum(typ, rank, isogeny="ad", extra_gens=(), central_rank=0):
    """Build a datum; isogeny is 'sc', 'ad', 'so' (type D), or 'd=<k>' (type A).

    For 'd=<k>' the cocharacter lattice is the coroot lattice plus the k-th
    fundamental coweight, so its quotient by coroots has order (rank+1)/k.
    """
    a = cartan_matrix(typ, rank)
    k = rank + central_rank
    pad = [0] * central_rank
    gens = [[a[i][j] for i in range(rank)] + pad for j in range(rank)]

    def unit(i):
        v = [0] * k
        v[i] = 1
        return v

    if isogeny == "ad":
        gens += [unit(i) for i in range(rank)]
    elif isogeny == "sc":
        pass
    elif isogeny == "so":
        if typ != "D":
            raise ValueError("'so' isogeny is for type D")
        gens.append(unit(0))
    elif isogeny.startswith("d="):
        d = int(isogeny[2:])
        if typ != "A" or (rank + 1) % d:
            raise ValueError(f"bad isogeny {isogeny} for {typ}{rank}")
        if d <= rank:
            gens.append(unit(d - 1))
    else:
        raise ValueError(f"unknown isogeny tag {isogeny}")
    gens += [list(g) for g in extra_gens]
    gens += [unit(rank + i) for i in range(central_rank)]
    return BasedRootDatum(typ, rank, isogeny, tuple(tuple(g) for g in gens), central_rank)


@dataclass(frozen=True)
class GaloisAction:
    """Inertia generators and Frobenius as ambient integer matrices.

    ``inertia_perms``/``frob_perm`` are the permutations of simple roots; the
    optional torus blocks act on the central-torus coordinates.
    """

    rank: int
    inertia_perms: tuple = ()
    frob_perm: tuple = None
    inertia_torus: tuple = ()
    frob_torus: tuple = None

    def inertia_matrices(self):
        out = []
        for i, p in enumerate(self.inertia_perms):
            t = self.inertia_torus[i] if self.inertia_torus else None
            out.append(permutation_matrix(p, t))
        return out

    def frob_matrix(self, central_rank=0):
        p = self.frob_perm if self.frob_perm is not None else tuple(range(self.rank))
        t = self.frob_torus
        if t is None and central_rank:
            t = _identity(central_rank)
        return permutation_matrix(p, t)

    def check(self, rd):
        a = rd.cartan
        perms = list(self.inertia_perms) + ([self.frob_perm] if self.frob_perm else [])
        for p in perms:
            if sorted(p) != list(range(rd.rank)):
                raise ValueError("not a permutation of the simple roots")
            for i in range(rd.rank):
                for j in range(rd.rank):
                    if a[p[i]][p[j]] != a[i][j]:
                        raise ValueError("automorphism does not preserve the Cartan matrix")
        X = rd.xstar()
        mats = self.inertia_matrices() + [self.frob_matrix(rd.central_rank)]
        for m in mats:
            for b in X.basis:
                if not X.contains(mat_vec(m, b)):
                    raise ValueError("Galois action does not preserve the cocharacter lattice")
            if _matrix_order(m) is None:
                raise ValueError("automorphism of infinite order")


def _matrix_order(m, bound=24):
    n = len(m)
    ident = _identity(n)
    p = m
    for k in range(1, bound + 1):
        if p == ident:
            return k
        p = mat_mul(p, m)
    return None


def coweight_mod_coroot(rd):
    """X_*(T) modulo the coroot lattice, as a LatticeQuotient."""
    return LatticeQuotient(rd.xstar(), rd.coroot_vectors())


def invariants_coinvariants(rd, action):
    """((X_* / coroots)_{inertia})^{Frob} with explicit representatives.

    Returns a LatticeQuotient K / L' where L' is the coroot lattice plus
    (1 - theta) X_* for each inertia generator theta, and K is the preimage
    in X_* of the Frobenius-fixed part of X_* / L'.
    """
    action.check(rd)
    X = rd.xstar()
    L = [list(v) for v in rd.coroot_vectors()]
    for th in action.inertia_matrices():
        for b in X.basis:
            tb = mat_vec(th, b)
            L.append([x - y for x, y in zip(b, tb)])
    B = LatticeQuotient(X, L)
    F = action.frob_matrix(rd.central_rank)
    # c -> class of (F - 1) applied to sum c_j b_j; kernel mod the invariant factors
    facs = B.group.factors
    cols = []
    for b in X.basis:
        fb = mat_vec(F, b)
        cols.append(list(B.classify([x - y for x, y in zip(fb, b)])))
    r = X.rank
    k = len(facs)
    if k == 0:
        K = X
    else:
        big = [[cols[j][i] for j in range(r)] + [-(facs[i]) if t == i else 0 for t in range(k)]
               for i in range(k)]
        ker = integer_kernel(big, r + k)
        gens = [X.vector(v[:r]) for v in ker]
        gens += [list(g) for g in L]
        K = SubLattice(gens, X.ambient)
    return LatticeQuotient(K, L)


def brute_force_quotient_structure(lattice_gens, sub_gens, ambient, box):
    """Element-order statistics of K/L by enumerating small combinations.

    Used only as an oracle: enumerate sum c_i g_i for c_i in [0, box), keep
    classes up to membership in L (tested by exact rational solving), and
    return {order: count}.
    """
    reps = []
    for cs in itertools.product(range(box), repeat=len(lattice_gens)):
        v = [sum(c * g[i] for c, g in zip(cs, lattice_gens)) for i in range(ambient)]
        if not any(_rational_member(sub_gens, [a - b for a, b in zip(v, w)]) for w in reps):
            reps.append(v)
    stats = {}
    for v in reps:
        k = 1
        while not _rational_member(sub_gens, [k * x for x in v]):
            k += 1
        stats[k] = stats.get(k, 0) + 1
    return stats


def _rational_member(gens, x):
    """Is x an integer combination of gens? Gaussian elimination over Q."""
    if not any(x):
        return True
    n = len(x)
    g = len(gens)
    if g == 0:
        return False
    rows = [[Fraction(gens[j][i]) for j in range(g)] + [Fraction(x[i])] for i in range(n)]
    piv_cols = []
    r = 0
    for c in range(g):
        p = next((i for i in range(r, n) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(n):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(rows[i][g] for i in range(r, n)):
        return False
    if r < g:
        raise ValueError("oracle expects linearly independent generators")
    return all(rows[i][g].denominator == 1 for i in range(r))


def order_statistics(group):
    stats = {}
    for x in group.elements():
        k = group.element_order(x)
        stats[k] = stats.get(k, 0) + 1
    return stats
