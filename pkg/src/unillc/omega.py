"""The Kottwitz group, its action on the relative diagram, and stabilizers."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .rootdata import FiniteAbelianGroup, invariants_coinvariants


class IntegrityError(ValueError):
    pass


def _compose(p, r):
    """p after r."""
    return tuple(p[i] for i in r)


@dataclass(frozen=True)
class OmegaGroup:
    """A finite abelian group with a permutation action on diagram nodes.

    ``action`` is a tuple of (element, permutation) pairs covering the group.
    """

    group: FiniteAbelianGroup
    action: tuple
    size: int

    def __post_init__(self):
        acts = dict(self.action)
        elems = self.group.elements()
        if set(acts) != set(elems):
            raise IntegrityError("diagram action does not cover the group")
        for g in elems:
            for h in elems:
                if acts[self.group.add(g, h)] != _compose(acts[g], acts[h]):
                    raise IntegrityError("diagram action is not a homomorphism")

    def order(self):
        return self.group.order()

    def perm(self, g):
        return dict(self.action)[g]

    def elements(self):
        return self.group.elements()

    def acts_trivially(self):
        ident = tuple(range(self.size))
        return all(p == ident for _, p in self.action)

    def to_json(self):
        return {
            "factors": list(self.group.factors),
            "action": [[list(g), list(p)] for g, p in self.action],
        }


def orbit_perm_to_relative(perm, orbits):
    """Induced permutation on orbits; IntegrityError if perm does not permute them."""
    index = {n: k for k, o in enumerate(orbits) for n in o}
    out = []
    for o in orbits:
        images = {index[perm[n]] for n in o}
        if len(images) != 1:
            raise IntegrityError("node permutation does not respect Frobenius orbits")
        out.append(images.pop())
    return tuple(out)


def build_action(group, gens, size, check_diagram=None):
    """Extend generator permutations to the whole group by breadth-first search.

    ``gens`` is a list of (element, permutation). Raises IntegrityError if the
    generators do not span the group or if two paths disagree.
    """
    ident = tuple(range(size))
    acts = {group.identity(): ident}
    frontier = [group.identity()]
    while frontier:
        nxt = []
        for g in frontier:
            for h, p in gens:
                k = group.add(g, h)
                q = _compose(p, acts[g])
                if k in acts:
                    if acts[k] != q:
                        raise IntegrityError("generator actions are inconsistent")
                else:
                    acts[k] = q
                    nxt.append(k)
        frontier = nxt
    if len(acts) != group.order():
        raise IntegrityError("diagram-action generators do not span the group")
    if check_diagram is not None:
        for p in acts.values():
            if not check_diagram.is_automorphism(p):
                raise IntegrityError(f"{p} is not a diagram automorphism")
    return tuple(sorted(acts.items()))


def compute_omega(rd, act, rel, gen_data, declared_order=None, orbits=None,
                  extra_sign=False):
    """Omega from the lattice, with the catalog-supplied diagram action attached.

    ``gen_data`` lists (cocharacter vector, node permutation); permutations are
    on local-index nodes when ``orbits`` is given, otherwise on ``rel`` nodes.
    ``extra_sign`` adds a trivially acting Z/2 for a disconnected {+-1} factor.
    """
    quot = invariants_coinvariants(rd, act)
    grp = quot.group
    if not grp.is_finite():
        raise IntegrityError("Omega is infinite; the centre is not anisotropic")
    gens = []
    for vec, perm in gen_data:
        p = orbit_perm_to_relative(perm, orbits) if orbits is not None else tuple(perm)
        gens.append((quot.classify(list(vec)), p))
    if extra_sign:
        grp = FiniteAbelianGroup(grp.factors + (2,))
        gens = [(g + (0,), p) for g, p in gens]
        gens.append((tuple(0 for _ in quot.group.factors) + (1,), tuple(range(rel.size))))
    action = build_action(grp, gens, rel.size, rel)
    om = OmegaGroup(grp, action, rel.size)
    if declared_order is not None and om.order() != declared_order:
        raise IntegrityError(f"|Omega| = {om.order()} but the catalog declares {declared_order}")
    return om, quot


def facet_stabilizers(om, f):
    """(setwise stabilizer of J, pointwise stabilizer of the facet's vertices).

    The vertices of the facet are the nodes outside J.
    """
    J = f.J
    verts = f.complement()
    setwise, pointwise = [], []
    for g, p in om.action:
        if {p[j] for j in J} == set(J):
            setwise.append(g)
            if all(p[v] == v for v in verts):
                pointwise.append(g)
    return frozenset(setwise), frozenset(pointwise)


def subgroup_signature(group, elems):
    """Element-order statistics; determines a finite abelian group up to isomorphism."""
    stats = {}
    for g in elems:
        k = group.element_order(g)
        stats[k] = stats.get(k, 0) + 1
    return tuple(sorted(stats.items()))


def isogeny_kernel_image(om_G, om_Gad, images):
    """Kernel and image of Omega_G -> Omega_{G_ad} given generator images.

    ``images[i]`` is the image of the i-th standard generator of om_G.group.
    Checks the homomorphism property, compatibility with the diagram action,
    and |Omega_G| = |kernel| |image|.
    """
    G, A = om_G.group, om_Gad.group
    if len(images) != len(G.factors):
        raise IntegrityError("need one image per generator")
    for f, img in zip(G.factors, images):
        if A.scale(f, tuple(img)) != A.identity():
            raise IntegrityError("map data is not a homomorphism")

    def phi(x):
        out = A.identity()
        for c, img in zip(x, images):
            out = A.add(out, A.scale(c, tuple(img)))
        return out

    kernel, image = set(), set()
    for x in G.elements():
        y = phi(x)
        if om_G.perm(x) != om_Gad.perm(y):
            raise IntegrityError("isogeny map does not respect the diagram action")
        image.add(y)
        if y == A.identity():
            kernel.add(x)
    if len(kernel) * len(image) != G.order():
        raise IntegrityError("Omega sequence fails to be exact")
    return frozenset(kernel), frozenset(image)


def lattice_images(quot_G, quot_ad, project=None):
    """Generator images for the map induced by cocharacter inclusion."""
    out = []
    for e in quot_G.group.generators():
        v = quot_G.lift(e)
        if project is not None:
            v = project(v)
        out.append(quot_ad.classify(v))
    return out


def dual_center_order(quot, inertia_mats, frob_mat):
    """|(Z(G^vee)^I)_Frob| by enumerating characters of X_* / coroots.

    Characters of Z/d_1 x ... are indexed by c with chi_c(x) = sum c_i x_i / d_i.
    Invariance under inertia is tested on generators; Frobenius coinvariants
    are the quotient by the image of chi -> chi o F - chi.
    """
    grp = quot.group
    if not grp.is_finite():
        raise IntegrityError("dual enumeration needs a finite quotient")
    facs = grp.factors
    L = 1
    for f in facs:
        L = L * f // gcd(L, f)

    def value(c, x):
        return sum(ci * xi * (L // f) for ci, xi, f in zip(c, x, facs)) % L

    gens = grp.generators()
    maps = [quot.induced(m) for m in inertia_mats]
    F = quot.induced(frob_mat)
    chars = grp.elements()
    fixed = [c for c in chars
             if all(value(c, m(x)) == value(c, x) for m in maps for x in gens)]
    fixed_set = set(fixed)

    def pull(c):
        # chi o F as a character index
        vals = [value(c, F(x)) for x in gens]
        return tuple(v * f // L % f for v, f in zip(vals, facs))

    image = set()
    for c in fixed:
        image.add(grp.add(pull(c), grp.neg(c)))
    if not image <= fixed_set:
        raise IntegrityError("Frobenius does not preserve inertia invariants")
    return len(fixed) // len(image)

