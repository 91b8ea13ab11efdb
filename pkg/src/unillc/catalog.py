"""The table of ramified simple groups and their unramified-split companions.

Entries are loaded from ``data/catalog.v1.json`` (regenerated by
``tools/build_catalog.py``) and re-verified at load time.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .arith import ONE, Q
from .diagrams import (AffineDiagram, Facet, LocalIndex, diagram_isomorphic_up_to_arrows,
                       fold)
from .omega import IntegrityError, compute_omega, dual_center_order
from .rootdata import (GaloisAction, coweight_mod_coroot, group_dimension, parse_type,
                       root_datum)

DATA_DIR = Path(__file__).resolve().parent / "data"
DEFAULT_PATH = DATA_DIR / "catalog.v1.json"

FAMILIES = ("B-C_n", "C-BC_n", "C-B_n", "2B-C_n", "2C-B_2n", "2C-B_2n+1", "F4^I", "G2^I")
DEFAULT_ISOGENY = {"B-C_n": "d=1", "C-BC_n": "d=1", "2B-C_n": "d=1"}


class CatalogError(LookupError):
    pass


@dataclass(frozen=True)
class DualGroupData:
    dual_type: str
    fixed_type: str
    fixed_label: str
    pi0: int
    dim_dual: int
    dim_fixed: int
    center_order: int
    conductor: int

    def to_json(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class Side:
    """One of the two groups of an entry: datum, local index, relative diagram, Omega."""

    label: str
    rd: object
    action: GaloisAction
    local_index: LocalIndex
    relative: AffineDiagram
    omega: object
    omega_quotient: object
    disconnected: bool
    split: str | None = None

    @property
    def type_label(self):
        return self.rd.type_label


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    family: str
    n: int
    isogeny: str
    quasi_split: bool
    relevance: str
    splitting: str
    galois_degrees: tuple
    wild: bool
    dim: int
    group: Side
    companion: Side
    marked: tuple
    dual: DualGroupData
    raw: dict = field(repr=False, compare=False, hash=False)

    @property
    def key(self):
        return (self.family, self.n, self.isogeny)

    @property
    def ident(self):
        return f"{self.name}[{self.isogeny}]"

    @property
    def bijection(self):
        return _bijection(self)


def _side(obj, twisted_sign=False):
    rdj = obj["root_datum"]
    rd = root_datum(rdj["type"], rdj["rank"], rdj["isogeny"])
    act = GaloisAction(rd.rank, tuple(tuple(p) for p in rdj["inertia"]), tuple(rdj["frob"]))
    li = LocalIndex.from_json(obj["local_index"])
    rel = AffineDiagram.from_json(obj["relative"])
    gens = [(g["vector"], tuple(g["perm"])) for g in obj["omega"]["generators"]]
    om, quot = compute_omega(rd, act, rel, gens, obj["omega"]["order"], orbits=li.orbits(),
                             extra_sign=obj["disconnected"])
    return Side(obj["label"], rd, act, li, rel, om, quot, obj["disconnected"], obj.get("split"))


def build_entry(obj):
    if obj.get("wild"):
        raise CatalogError(f"{obj['name']}: wild ramification is not supported")
    entry = CatalogEntry(
        name=obj["name"], family=obj["family"], n=obj["n"], isogeny=obj["isogeny"],
        quasi_split=obj["quasi_split"], relevance=obj["relevance"], splitting=obj["splitting"],
        galois_degrees=tuple(obj["galois_degrees"]), wild=obj["wild"], dim=obj["dim"],
        group=_side(obj["group"]), companion=_side(obj["companion"]),
        marked=tuple(obj["marked"]), dual=DualGroupData(**obj["dual"]), raw=obj,
    )
    check_entry(entry)
    return entry


def check_entry(e):
    """Type-level invariants of an entry; raises IntegrityError."""
    for s in (e.group, e.companion):
        if fold(s.local_index) != s.relative:
            raise IntegrityError(f"{e.ident}: folded local index differs from stored diagram")
        if not s.relative.is_connected():
            raise IntegrityError(f"{e.ident}: relative diagram is disconnected")
    if group_dimension(e.group.rd.typ, e.group.rd.rank) != e.dim:
        raise IntegrityError(f"{e.ident}: dim G mismatch")
    if e.group.omega.order() != e.companion.omega.order():
        raise IntegrityError(f"{e.ident}: |Omega_G| != |Omega_G'|")
    if _bijection(e) is None:
        raise IntegrityError(f"{e.ident}: relative diagrams are not isomorphic up to arrows")
    if e.quasi_split != (e.relevance == "trivial"):
        raise IntegrityError(f"{e.ident}: relevance flag inconsistent with quasi-splitness")
    dual_invariants(e)


@lru_cache(maxsize=None)
def _bijection_cached(e_ident, g_rel, c_rel, m0, m1, g_act, c_act):
    bij = diagram_isomorphic_up_to_arrows(g_rel, c_rel, anchor=(m0, m1), respect_special=True)
    if bij is None:
        return None
    # Omega-equivariance: the bijection must intertwine the two diagram actions
    gp = dict(g_act)
    cp = dict(c_act)
    if len(gp) != len(cp):
        return None
    gset = sorted(tuple(bij[p[i]] for i in range(len(bij))) for p in gp.values())
    cset = sorted(tuple(p[bij[i]] for i in range(len(bij))) for p in cp.values())
    if gset != cset:
        return None
    return bij


def _bijection(e):
    return _bijection_cached(e.ident, e.group.relative, e.companion.relative, e.marked[0],
                             e.marked[1], e.group.omega.action, e.companion.omega.action)


def dual_invariants(e):
    """Return the stored dual data after recomputing what can be recomputed."""
    d = e.dual
    typ, rank = parse_type(d.dual_type)
    if group_dimension(typ, rank) != d.dim_dual:
        raise IntegrityError(f"{e.ident}: dim of the dual group mismatch")
    ftyp, frank = parse_type(d.fixed_type)
    if group_dimension(ftyp, frank) != d.dim_fixed:
        raise IntegrityError(f"{e.ident}: dim of the inertia-fixed dual group mismatch")
    crd = e.companion.rd
    if group_dimension(crd.typ, crd.rank) != d.dim_fixed:
        raise IntegrityError(f"{e.ident}: dim of the fixed group differs from dim of G' dual")
    if d.conductor != d.dim_dual - d.dim_fixed or d.conductor <= 0:
        raise IntegrityError(f"{e.ident}: conductor violates the tame rule")
    if d.center_order != e.group.omega.order():
        raise IntegrityError(f"{e.ident}: dual centre order differs from |Omega_G|")
    if dual_center_from_lattice(e.group) != d.center_order:
        raise IntegrityError(f"{e.ident}: enumerated dual centre order mismatch")
    if e.companion.disconnected != (d.pi0 == 2):
        raise IntegrityError(f"{e.ident}: component group of G' dual mismatch")
    return d


def dual_center_from_lattice(side):
    quot = coweight_mod_coroot(side.rd)
    return dual_center_order(quot, side.action.inertia_matrices(),
                             side.action.frob_matrix(side.rd.central_rank))


class Catalog:
    def __init__(self, entries, version, checksum, path):
        self.entries = entries
        self.version = version
        self.checksum = checksum
        self.path = path
        self._by_key = {e.key: e for e in entries}

    def lookup(self, label, n=None, isogeny=None):
        return lookup(label, n, isogeny, catalog=self)

    def families(self):
        return [f for f in FAMILIES if any(e.family == f for e in self.entries)]


def canonical_checksum(entries):
    canon = json.dumps(entries, sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(canon.encode()).hexdigest()


def read_document(path):
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "unillc-catalog" or doc.get("version") != 1:
        raise CatalogError(f"{path}: not a version-1 catalog")
    if canonical_checksum(doc["entries"]) != doc["checksum"]:
        raise IntegrityError(f"{path}: checksum mismatch")
    return doc


@lru_cache(maxsize=4)
def _load(path, stamp):
    # stamp (mtime, size) makes an edited file miss the cache
    doc = read_document(path)
    entries = [build_entry(obj) for obj in doc["entries"]]
    return Catalog(entries, doc["version"], doc["checksum"], path)


def catalog_path(path=None):
    return str(path or os.environ.get("UNILLC_CATALOG") or DEFAULT_PATH)


def _stamp(path):
    try:
        st = os.stat(path)
    except OSError:
        return None
    return st.st_mtime_ns, st.st_size


def load_catalog(path=None):
    p = catalog_path(path)
    return _load(p, _stamp(p))


def parse_name(name):
    """'C-BC_2' -> ('C-BC_n', 2); '2C-B_4' -> ('2C-B_2n', 2); 'F4^I' -> ('F4^I', 4)."""
    if name in ("F4^I", "G2^I"):
        return name, int(name[1])
    if name in FAMILIES:
        return name, None
    m = re.match(r"^(2?[A-Z][A-Z\-]*)_(\d+)$", name)
    if not m:
        raise CatalogError(f"cannot parse entry name {name!r}")
    stem, k = m.group(1), int(m.group(2))
    if stem == "2C-B":
        return ("2C-B_2n", k // 2) if k % 2 == 0 else ("2C-B_2n+1", (k - 1) // 2)
    fam = stem + "_n"
    if fam not in FAMILIES:
        raise CatalogError(f"unknown family {stem!r}")
    return fam, k


def lookup(label, n=None, isogeny=None, catalog=None):
    """Find an entry by family label (or entry name) and parameters."""
    cat = catalog or load_catalog()
    fam, parsed_n = parse_name(label)
    n = parsed_n if n is None else n
    if n is None:
        raise CatalogError(f"{label}: rank parameter required")
    iso = isogeny or DEFAULT_ISOGENY.get(fam, "ad")
    e = cat._by_key.get((fam, n, iso))
    if e is None:
        raise CatalogError(f"no catalog entry for {fam} n={n} isogeny={iso}")
    return e


def facet_transfer(e, f, inverse=False):
    """Image of a facet of G's relative diagram in G''s (or back with inverse)."""
    bij = e.bijection
    if inverse:
        inv = {b: a for a, b in enumerate(bij)}
        return Facet(frozenset(inv[j] for j in f.J), f.size)
    return Facet(frozenset(bij[j] for j in f.J), f.size)


def parabolic_transfer(e, S):
    """Image of a subset of the finite relative basis (relative nodes minus the mark)."""
    S = frozenset(S)
    if e.marked[0] in S:
        raise CatalogError("the marked affine vertex is not in the finite basis")
    if not S <= set(e.group.relative.nodes):
        raise CatalogError(f"{sorted(S)} is not a set of relative nodes")
    bij = e.bijection
    return frozenset(bij[s] for s in S)


def finite_basis(e, companion=False):
    s = e.companion if companion else e.group
    mark = e.marked[1] if companion else e.marked[0]
    return frozenset(s.relative.nodes) - {mark}


# -- groups with a central torus ----------------------------------------------


@dataclass(frozen=True)
class CenterFixture:
    """G = G_ss x Z with Z a one-dimensional torus (or absent).

    ``torus`` is None, "unramified" (Frobenius acts by -1) or "ramified"
    (inertia acts by -1).
    """

    name: str
    family: str
    n: int
    isogeny: str
    torus: str | None

    def entry(self, catalog=None):
        return lookup(self.family, self.n, self.isogeny, catalog=catalog)

    def adjoint_entry(self, catalog=None):
        return lookup(self.family, self.n, DEFAULT_ISOGENY.get(self.family, "ad"),
                      catalog=catalog)

    def whole_side(self, catalog=None):
        """Side object for G_ss x Z, recomputing Omega on the enlarged lattice."""
        e = self.entry(catalog)
        s = e.group
        rdj = e.raw["group"]["root_datum"]
        k = 1 if self.torus else 0
        rd = root_datum(rdj["type"], rdj["rank"], rdj["isogeny"], central_rank=k)
        inertia = tuple(tuple(p) for p in rdj["inertia"])
        if self.torus == "ramified":
            act = GaloisAction(rd.rank, inertia, tuple(rdj["frob"]),
                               inertia_torus=tuple([[-1]] for _ in inertia))
        elif self.torus == "unramified":
            act = GaloisAction(rd.rank, inertia, tuple(rdj["frob"]),
                               inertia_torus=tuple([[1]] for _ in inertia), frob_torus=[[-1]])
        else:
            act = s.action
        gens = [(list(g["vector"]) + [0] * k, tuple(g["perm"]))
                for g in e.raw["group"]["omega"]["generators"]]
        if self.torus == "ramified":
            gens.append(([0] * rd.rank + [1], tuple(range(s.local_index.diagram.size))))
        om, quot = compute_omega(rd, act, s.relative, gens, None, orbits=s.local_index.orbits())
        return Side(f"{s.label} x {self.torus or 'trivial'} torus", rd, act, s.local_index,
                    s.relative, om, quot, False, None)

    def torus_data(self):
        """Reductive quotient order and dimension, conductor, and fixed dual dimension.

        unramified: q+1 points in dimension 1, conductor 0, fixed dim 1;
        ramified: trivial reductive quotient, conductor 1, fixed dim 0.
        """
        if self.torus == "unramified":
            return {"points": Q + ONE, "dim": 1, "conductor": 0, "fixed_dim": 1}
        if self.torus == "ramified":
            return {"points": ONE, "dim": 0, "conductor": 1, "fixed_dim": 0}
        return {"points": ONE, "dim": 0, "conductor": 0, "fixed_dim": 0}


CENTER_FIXTURES = (
    CenterFixture("PU_4", "B-C_n", 2, "d=1", None),
    CenterFixture("PU_4 x U_1 unramified", "B-C_n", 2, "d=1", "unramified"),
    CenterFixture("SU_4/mu_2 x U_1 ramified", "B-C_n", 2, "d=2", "ramified"),
    CenterFixture("SU_4/mu_2", "B-C_n", 2, "d=2", None),
    CenterFixture("SU_8/mu_2", "B-C_n", 4, "d=4", None),
    CenterFixture("SO*_6", "C-B_n", 2, "so", None),
    CenterFixture("SO*_8", "C-B_n", 3, "so", None),
    CenterFixture("SO*_8 x U_1 unramified", "C-B_n", 3, "so", "unramified"),
    CenterFixture("PSO*_8", "C-B_n", 3, "ad", None),
)
