"""Affine Dynkin diagrams, local indices, folding, and facets.

Edges are stored as ``(i, j, bonds, arrow)`` with ``i < j`` and arrow one of
``"-"`` (none), ``">"`` (i to j) or ``"<"`` (j to i). Arrows point from the
long root to the short one. A bond count of 4 stands for an infinite bond
(the rank-one affine diagrams).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


class DiagramError(ValueError):
    pass


class UnsupportedFolding(DiagramError):
    pass


_FLIP = {"-": "-", ">": "<", "<": ">"}


def _norm_edge(i, j, bonds, arrow):
    if arrow not in _FLIP:
        raise DiagramError(f"bad arrow token {arrow!r}")
    if i == j:
        raise DiagramError("loops are not allowed")
    if i > j:
        i, j, arrow = j, i, _FLIP[arrow]
    return (i, j, bonds, arrow)


@dataclass(frozen=True)
class AffineDiagram:
    nodes: tuple
    edges: tuple
    special: frozenset = frozenset()
    labels: tuple = ()

    def __post_init__(self):
        nodes = tuple(self.nodes)
        if nodes != tuple(range(len(nodes))):
            raise DiagramError("nodes must be 0..k-1")
        edges = tuple(sorted(_norm_edge(*e) for e in self.edges))
        seen = set()
        for i, j, b, arrow in edges:
            if j >= len(nodes):
                raise DiagramError(f"edge {i}-{j} leaves the node set")
            if (i, j) in seen:
                raise DiagramError(f"duplicate edge {i}-{j}")
            seen.add((i, j))
            if b not in (1, 2, 3, 4):
                raise DiagramError(f"bond count {b} out of range")
            if (b >= 2) != (arrow != "-"):
                raise DiagramError(f"edge {i}-{j}: arrow present iff bonds >= 2")
        labels = tuple(self.labels) or tuple(f"a{i}" for i in nodes)
        if len(labels) != len(nodes):
            raise DiagramError("one label per node")
        special = frozenset(self.special)
        if not special <= set(nodes):
            raise DiagramError("special marks outside the node set")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "special", special)

    @property
    def size(self):
        return len(self.nodes)

    def edge(self, i, j):
        """(bonds, arrow) oriented from i to j, or None."""
        a, b = (i, j) if i < j else (j, i)
        for e in self.edges:
            if e[0] == a and e[1] == b:
                arrow = e[3] if i < j else _FLIP[e[3]]
                return e[2], arrow
        return None

    def neighbours(self, i):
        out = []
        for a, b, _, _ in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)

    def is_connected(self, subset=None):
        subset = set(self.nodes if subset is None else subset)
        if not subset:
            return True
        start = min(subset)
        seen = {start}
        stack = [start]
        while stack:
            i = stack.pop()
            for j in self.neighbours(i):
                if j in subset and j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen == subset

    def components(self, subset):
        left = set(subset)
        out = []
        while left:
            start = min(left)
            comp = {start}
            stack = [start]
            while stack:
                i = stack.pop()
                for j in self.neighbours(i):
                    if j in left and j not in comp:
                        comp.add(j)
                        stack.append(j)
            left -= comp
            out.append(tuple(sorted(comp)))
        return out

    def is_automorphism(self, perm, arrows=True):
        if sorted(perm) != list(self.nodes):
            return False
        for i, j, b, arrow in self.edges:
            e = self.edge(perm[i], perm[j])
            if e is None or e[0] != b or (arrows and e[1] != arrow):
                return False
        return True

    def relabel(self, perm):
        """Diagram with node i renamed perm[i]."""
        inv = {p: i for i, p in enumerate(perm)}
        return AffineDiagram(
            self.nodes,
            tuple((perm[i], perm[j], b, a) for i, j, b, a in self.edges),
            frozenset(perm[s] for s in self.special),
            tuple(self.labels[inv[k]] for k in self.nodes),
        )

    # -- serialization --

    def to_text(self):
        lines = []
        for i in self.nodes:
            mark = " special" if i in self.special else ""
            lines.append(f"{i}{mark} {self.labels[i]}")
        for i, j, b, arrow in self.edges:
            lines.append(f"{i} {j} {b} {arrow}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        nodes, labels, special, edges = [], [], set(), []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if len(tok) == 4:
                edges.append((int(tok[0]), int(tok[1]), int(tok[2]), tok[3]))
            elif len(tok) == 3 and tok[1] == "special":
                nodes.append(int(tok[0]))
                special.add(int(tok[0]))
                labels.append(tok[2])
            elif len(tok) == 2:
                nodes.append(int(tok[0]))
                labels.append(tok[1])
            else:
                raise DiagramError(f"cannot parse diagram line {raw!r}")
        order = sorted(range(len(nodes)), key=lambda k: nodes[k])
        return cls(tuple(nodes[k] for k in order), tuple(edges), frozenset(special),
                   tuple(labels[k] for k in order))

    def to_json(self):
        return {
            "nodes": [{"id": i, "label": self.labels[i], "special": i in self.special}
                      for i in self.nodes],
            "edges": [[i, j, b, a] for i, j, b, a in self.edges],
        }

    @classmethod
    def from_json(cls, obj):
        nodes = sorted(obj["nodes"], key=lambda n: n["id"])
        return cls(
            tuple(n["id"] for n in nodes),
            tuple(tuple(e) for e in obj["edges"]),
            frozenset(n["id"] for n in nodes if n.get("special")),
            tuple(n["label"] for n in nodes),
        )


@dataclass(frozen=True)
class LocalIndex:
    diagram: AffineDiagram
    frob: tuple

    def __post_init__(self):
        frob = tuple(self.frob)
        object.__setattr__(self, "frob", frob)
        if not self.diagram.is_automorphism(frob):
            raise DiagramError("Frobenius is not a diagram automorphism")

    def orbits(self):
        """Frobenius orbits, each sorted, ordered by their smallest node."""
        seen = set()
        out = []
        for i in self.diagram.nodes:
            if i in seen:
                continue
            orb = [i]
            j = self.frob[i]
            while j != i:
                orb.append(j)
                j = self.frob[j]
            seen.update(orb)
            out.append(tuple(sorted(orb)))
        return out

    def lift(self, J):
        """Union of the orbits indexed by the relative nodes in J."""
        orbs = self.orbits()
        return frozenset(n for k in J for n in orbs[k])

    def to_text(self):
        return self.diagram.to_text() + "frob " + " ".join(map(str, self.frob)) + "\n"

    @classmethod
    def from_text(cls, text):
        body, frob = [], None
        for line in text.splitlines():
            if line.startswith("frob"):
                frob = tuple(int(t) for t in line.split()[1:])
            else:
                body.append(line)
        d = AffineDiagram.from_text("\n".join(body))
        return cls(d, frob if frob is not None else tuple(d.nodes))

    def to_json(self):
        return {"diagram": self.diagram.to_json(), "frob": list(self.frob)}

    @classmethod
    def from_json(cls, obj):
        return cls(AffineDiagram.from_json(obj["diagram"]), tuple(obj["frob"]))


def _self_adjacent(d, orb):
    return any(d.edge(a, b) for a, b in itertools.combinations(orb, 2))


def _fold_pair(d, o1, o2):
    """Bond and arrow (oriented o1 -> o2) between two orbits, or None."""
    links = [(a, b, d.edge(a, b)) for a in o1 for b in o2 if d.edge(a, b)]
    if not links:
        return None
    bonds = {e[0] for _, _, e in links}
    arrows = {e[1] for _, _, e in links}
    if len(bonds) != 1 or len(arrows) != 1:
        raise UnsupportedFolding(f"inhomogeneous links between orbits {o1} and {o2}")
    b, arrow = bonds.pop(), arrows.pop()
    adj1, adj2 = _self_adjacent(d, o1), _self_adjacent(d, o2)
    matched = (len(links) == len(o1) == len(o2)
               and len({a for a, _, _ in links}) == len(o1)
               and len({c for _, c, _ in links}) == len(o2))

    if len(o1) == 1 and len(o2) == 1:
        return b, arrow
    if matched and not adj1 and not adj2:
        return b, arrow
    if matched and len(o1) == 2 and (adj1 != adj2) and b in (1, 2):
        # pair glued onto a self-adjacent pair
        return (2, ">" if adj2 else "<") if b == 1 else (4, arrow)
    if {len(o1), len(o2)} == {1, 2} and len(links) == 2 and b in (1, 2):
        pair_is_2 = len(o2) == 2
        if adj1 or adj2:
            raise UnsupportedFolding(f"self-adjacent pair next to a fixed node: {o1}, {o2}")
        return (2, ">" if pair_is_2 else "<") if b == 1 else (4, arrow)
    raise UnsupportedFolding(f"no folding rule for orbits {o1}, {o2}")


def fold(li):
    """Relative diagram: one node per Frobenius orbit, bonds from the rule table."""
    d = li.diagram
    orbs = li.orbits()
    if all(len(o) == 1 for o in orbs):
        return d
    for o in orbs:
        if len(o) > 2 and _self_adjacent(d, o):
            raise UnsupportedFolding(f"self-adjacent orbit {o} of size {len(o)}")
    edges = []
    for x, y in itertools.combinations(range(len(orbs)), 2):
        e = _fold_pair(d, orbs[x], orbs[y])
        if e:
            edges.append((x, y, e[0], e[1]))
    special = frozenset(k for k, o in enumerate(orbs) if set(o) <= d.special)
    labels = tuple("+".join(d.labels[n] for n in o) for o in orbs)
    return AffineDiagram(tuple(range(len(orbs))), tuple(edges), special, labels)


@dataclass(frozen=True)
class Facet:
    J: frozenset
    size: int = field(compare=False)

    def __post_init__(self):
        J = frozenset(self.J)
        object.__setattr__(self, "J", J)
        if len(J) >= self.size or not J <= set(range(self.size)):
            raise DiagramError(f"{sorted(J)} is not a proper subset of {self.size} nodes")

    @property
    def is_maximal(self):
        """Vertex facet: the parahoric is maximal."""
        return len(self.J) == self.size - 1

    @property
    def is_chamber(self):
        return not self.J

    @property
    def ident(self):
        return "{" + ",".join(map(str, sorted(self.J))) + "}"

    def complement(self):
        return frozenset(range(self.size)) - self.J


def enumerate_facets(rel):
    """All proper subsets, ordered by size then lexicographically."""
    k = rel.size
    out = []
    for r in range(k):
        for J in itertools.combinations(range(k), r):
            out.append(Facet(frozenset(J), k))
    return out


def diagram_isomorphic_up_to_arrows(a, b, anchor=None, respect_special=False,
                                    frob_a=None, frob_b=None):
    """First node bijection a -> b preserving edges and bond counts.

    ``anchor`` pins one pair of nodes. With both ``frob_a`` and ``frob_b``
    given, the bijection must intertwine them.
    """
    if a.size != b.size or len(a.edges) != len(b.edges):
        return None
    n = a.size
    bonds_a = {(i, j): bd for i, j, bd, _ in a.edges}
    bonds_b = {(i, j): bd for i, j, bd, _ in b.edges}

    def bond(bonds, i, j):
        return bonds.get((min(i, j), max(i, j)))

    def profile(d, bonds, i):
        return sorted(bond(bonds, i, j) for j in d.neighbours(i))

    pa = [profile(a, bonds_a, i) for i in range(n)]
    pb = [profile(b, bonds_b, i) for i in range(n)]
    order = list(range(n))
    if anchor is not None:
        order.remove(anchor[0])
        order.insert(0, anchor[0])
    image = {}
    used = set()

    def ok(i, t):
        if pa[i] != pb[t]:
            return False
        if respect_special and ((i in a.special) != (t in b.special)):
            return False
        for j, s in image.items():
            if bond(bonds_a, i, j) != bond(bonds_b, t, s):
                return False
        if frob_a is not None and frob_b is not None:
            fi = frob_a[i]
            if fi in image and image[fi] != frob_b[t]:
                return False
            for j, s in image.items():
                if frob_a[j] == i and frob_b[s] != t:
                    return False
        return True

    def search(k):
        if k == n:
            return True
        i = order[k]
        cands = [anchor[1]] if (anchor is not None and k == 0) else range(n)
        for t in cands:
            if t in used or not ok(i, t):
                continue
            image[i] = t
            used.add(t)
            if search(k + 1):
                return True
            del image[i]
            used.discard(t)
        return False

    if search(0):
        return tuple(image[i] for i in range(n))
    return None

