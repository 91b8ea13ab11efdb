"""Generate src/unillc/data/catalog.v1.json from the hand-written family templates.

Run from the repository root:  python3 tools/build_catalog.py [--check]
With --check the file is regenerated in memory and compared byte for byte.
"""

import argparse
import hashlib
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "src" / "unillc" / "data" / "catalog.v1.json"
MAX_N = 8


def divisors(k):
    return [d for d in range(1, k + 1) if k % d == 0]


def chain(a, b):
    return [[i, i + 1, 1, "-"] for i in range(a, b)]


def diagram(k, edges, special):
    return {
        "nodes": [{"id": i, "label": f"a{i}", "special": i in special} for i in range(k)],
        "edges": sorted(edges),
    }


def rel_diagram(labels, edges, special):
    return {
        "nodes": [{"id": i, "label": lab, "special": i in special} for i, lab in enumerate(labels)],
        "edges": sorted(edges),
    }


def identity(k):
    return list(range(k))


def unit(k, i):
    v = [0] * k
    v[i] = 1
    return v


# -- local indices over the maximal unramified extension ---------------------


def li_BC(n):
    """Fork of two special nodes, double bond at the far end pointing back."""
    if n == 2:
        return diagram(3, [[0, 2, 2, "<"], [1, 2, 2, "<"]], {0, 1})
    return diagram(n + 1, [[0, 2, 1, "-"], [1, 2, 1, "-"]] + chain(2, n - 1)
                   + [[n - 1, n, 2, "<"]], {0, 1})


def li_B(n):
    if n == 2:
        return diagram(3, [[0, 2, 2, ">"], [1, 2, 2, ">"]], {0, 1})
    return diagram(n + 1, [[0, 2, 1, "-"], [1, 2, 1, "-"]] + chain(2, n - 1)
                   + [[n - 1, n, 2, ">"]], {0, 1})


def li_CBC(n):
    if n == 1:
        return diagram(2, [[0, 1, 4, "<"]], {0, 1})
    return diagram(n + 1, [[0, 1, 2, "<"]] + chain(1, n - 1) + [[n - 1, n, 2, "<"]], {0, n})


def li_C(n):
    if n == 1:
        return diagram(2, [[0, 1, 4, ">"]], {0, 1})
    return diagram(n + 1, [[0, 1, 2, ">"]] + chain(1, n - 1) + [[n - 1, n, 2, "<"]], {0, n})


def li_CB(n):
    return diagram(n + 1, [[0, 1, 2, "<"]] + chain(1, n - 1) + [[n - 1, n, 2, ">"]], {0, n})


def li_F4I():
    return diagram(5, [[0, 1, 1, "-"], [1, 2, 1, "-"], [2, 3, 2, "<"], [3, 4, 1, "-"]], {0})


def li_F4():
    return diagram(5, [[0, 1, 1, "-"], [1, 2, 1, "-"], [2, 3, 2, ">"], [3, 4, 1, "-"]], {0})


def li_G2I():
    return diagram(3, [[0, 1, 1, "-"], [1, 2, 3, "<"]], {0})


def li_G2():
    return diagram(3, [[0, 1, 1, "-"], [1, 2, 3, ">"]], {0})


def swap01(k):
    p = identity(k)
    p[0], p[1] = 1, 0
    return p


def reflection(k):
    return [k - 1 - i for i in range(k)]


# -- relative diagrams, written out directly ---------------------------------


def rel_2BC(n, companion):
    """Legs glued into one node; the glued node sits at position 0."""
    labels = ["a0+a1"] + [f"a{i}" for i in range(2, n + 1)]
    if n == 2:
        return rel_diagram(labels, [[0, 1, 4, ">" if companion else "<"]], {0})
    last = ">" if companion else "<"
    return rel_diagram(labels, [[0, 1, 2, "<"]] + chain(1, n - 2) + [[n - 2, n - 1, 2, last]], {0})


def rel_2CB_even(n, companion):
    """Fold of a chain with 2n nodes by the reflection; n orbits."""
    m = 2 * n - 1
    labels = [f"a{i}+a{m - i}" for i in range(n)]
    end = ">" if companion else "<"
    if n == 2:
        return rel_diagram(labels, [[0, 1, 4, end]], {0})
    return rel_diagram(labels, [[0, 1, 2, end]] + chain(1, n - 2) + [[n - 2, n - 1, 2, ">"]], {0})


def rel_2CB_odd(n, companion):
    """Fold of a chain with 2n+1 nodes by the reflection; n+1 orbits."""
    m = 2 * n
    labels = [f"a{i}+a{m - i}" for i in range(n)] + [f"a{n}"]
    end = ">" if companion else "<"
    if n == 1:
        return rel_diagram(labels, [[0, 1, 4, end]], {0})
    return rel_diagram(labels, [[0, 1, 2, end]] + chain(1, n - 1) + [[n - 1, n, 2, "<"]], {0})


# -- families ----------------------------------------------------------------


def datum(typ, rank, isogeny, inertia=(), frob=None):
    return {"type": typ, "rank": rank, "isogeny": isogeny,
            "inertia": [list(p) for p in inertia],
            "frob": list(frob) if frob is not None else identity(rank)}


def flip_A(r):
    return [r - 1 - i for i in range(r)]


def flip_D(r):
    p = identity(r)
    p[r - 2], p[r - 1] = r - 1, r - 2
    return p


def omega_block(order, gens):
    return {"order": order, "generators": [{"vector": v, "perm": p} for v, p in gens]}


def side(label, dat, li, frob, rel, omega, disconnected=False, split=None):
    out = {"label": label, "root_datum": dat, "local_index": {"diagram": li, "frob": frob},
           "relative": rel, "omega": omega, "disconnected": disconnected}
    if split is not None:
        out["split"] = split
    return out


def dual_block(dual_type, fixed_type, fixed_label, pi0, dim_dual, dim_fixed, center):
    return {"dual_type": dual_type, "fixed_type": fixed_type, "fixed_label": fixed_label,
            "pi0": pi0, "dim_dual": dim_dual, "dim_fixed": dim_fixed,
            "center_order": center, "conductor": dim_dual - dim_fixed}


def family_BC(n, twisted):
    k = n + 1
    r = 2 * n - 1
    fam = "2B-C_n" if twisted else "B-C_n"
    frob_li = swap01(k) if twisted else identity(k)
    out = []
    for d in divisors(2 * n):
        m = 2 * n // d
        iso = f"d={d}"
        if d == 1:
            glabel = f"PU_{2 * n}"
        elif m == 1:
            glabel = f"SU_{2 * n}"
        else:
            glabel = f"SU_{2 * n}/mu_{m}"
        if d % 2:
            om = omega_block(2, [(unit(r, d - 1), swap01(k))])
            c_iso, c_label, c_dis, c_om = "ad", f"SO_{2 * n + 1}", False, omega_block(
                2, [(unit(n, 0), swap01(k))])
            fixed, pi0 = f"Sp_{2 * n}", 1
        elif m % 2 == 0:
            om = omega_block(2, [(unit(r, d - 1), identity(k))])
            c_iso, c_label, c_dis, c_om = "sc", f"Spin_{2 * n + 1} x {{+-1}}", True, omega_block(2, [])
            fixed, pi0 = f"PSp_{2 * n} x {{+-1}}", 2
        else:
            om = omega_block(1, [])
            c_iso, c_label, c_dis, c_om = "sc", f"Spin_{2 * n + 1}", False, omega_block(1, [])
            fixed, pi0 = f"PSp_{2 * n}", 1
        prefix = "inner form of " if twisted else ""
        if twisted:
            g_rel, c_rel = rel_2BC(n, False), rel_2BC(n, True)
        else:
            g_rel, c_rel = li_BC(n), li_B(n)
        out.append({
            "name": f"{'2' if twisted else ''}B-C_{n}",
            "family": fam, "n": n, "isogeny": iso,
            "quasi_split": not twisted,
            "relevance": "nontrivial" if twisted else "trivial",
            "splitting": "E^(2) over F^(2)" if twisted else "E ramified quadratic",
            "galois_degrees": [2], "wild": False,
            "dim": (2 * n) ** 2 - 1,
            "group": side(prefix + glabel, datum("A", r, iso, [flip_A(r)]), li_BC(n), frob_li,
                          g_rel, om),
            "companion": side(prefix + c_label, datum("B", n, c_iso), li_B(n), frob_li, c_rel,
                              c_om, c_dis, "F2-split" if twisted else "split"),
            "marked": [0, 0],
            "dual": dual_block(f"A{r}", f"C{n}", fixed, pi0, (2 * n) ** 2 - 1, n * (2 * n + 1),
                               om["order"]),
        })
    return out


def family_CBC(n):
    k = n + 1
    r = 2 * n
    out = []
    for d in divisors(2 * n + 1):
        m = (2 * n + 1) // d
        iso = f"d={d}"
        glabel = (f"PU_{2 * n + 1}" if d == 1 else f"SU_{2 * n + 1}" if m == 1
                  else f"SU_{2 * n + 1}/mu_{m}")
        out.append({
            "name": f"C-BC_{n}", "family": "C-BC_n", "n": n, "isogeny": iso,
            "quasi_split": True, "relevance": "trivial", "splitting": "E ramified quadratic",
            "galois_degrees": [2], "wild": False,
            "dim": (2 * n + 1) ** 2 - 1,
            "group": side(glabel, datum("A", r, iso, [flip_A(r)]), li_CBC(n), identity(k),
                          li_CBC(n), omega_block(1, [])),
            "companion": side(f"Sp_{2 * n}", datum("C", n, "sc"), li_C(n), identity(k), li_C(n),
                              omega_block(1, []), False, "split"),
            "marked": [0, 0],
            "dual": dual_block(f"A{r}", f"B{n}", f"SO_{2 * n + 1}", 1, (2 * n + 1) ** 2 - 1,
                               n * (2 * n + 1), 1),
        })
    return out


def _cb_variants(n, li, frob_li, g_rel, c_rel, name, fam, twisted, param=None):
    """C-B shaped families: orthogonal group of rank n+1 with a ramified fork swap.

    ``n`` is the rank of the chain; ``param`` the family parameter if different.
    """
    k = n + 1
    r = n + 1
    prefix = "inner form of " if twisted else ""
    dim = r * (2 * r - 1)
    variants = [
        ("ad", f"PSO*_{2 * r}", omega_block(2, [(unit(r, r - 1), reflection(k))]),
         "ad", f"PSp_{2 * n}", omega_block(2, [(unit(n, n - 1), reflection(k))]), False,
         f"Spin_{2 * n + 1}", 1),
        ("so", f"SO*_{2 * r}", omega_block(2, [(unit(r, 0), identity(k))]),
         "sc", f"Sp_{2 * n} x {{+-1}}", omega_block(2, []), True, f"O_{2 * n + 1}", 2),
        ("sc", f"Spin*_{2 * r}", omega_block(1, []),
         "sc", f"Sp_{2 * n}", omega_block(1, []), False, f"SO_{2 * n + 1}", 1),
    ]
    out = []
    for iso, glabel, om, c_iso, c_label, c_om, c_dis, fixed, pi0 in variants:
        out.append({
            "name": name, "family": fam, "n": n if param is None else param, "isogeny": iso,
            "quasi_split": not twisted,
            "relevance": "nontrivial" if twisted else "trivial",
            "splitting": "E^(2) over F^(2)" if twisted else "E ramified quadratic",
            "galois_degrees": [2], "wild": False, "dim": dim,
            "group": side(prefix + glabel, datum("D", r, iso, [flip_D(r)]), li, frob_li, g_rel, om),
            "companion": side(prefix + c_label, datum("C", n, c_iso), li_C(n), frob_li, c_rel,
                              c_om, c_dis, "F2-split" if twisted else "split"),
            "marked": [0, 0],
            "dual": dual_block(f"D{r}", f"B{n}", fixed, pi0, dim, n * (2 * n + 1), om["order"]),
        })
    return out


def family_CB(n):
    return _cb_variants(n, li_CB(n), identity(n + 1), li_CB(n), li_C(n), f"C-B_{n}", "C-B_n",
                        False)


def family_2CB_even(n):
    m = 2 * n - 1
    return _cb_variants(m, li_CB(m), reflection(m + 1), rel_2CB_even(n, False),
                        rel_2CB_even(n, True), f"2C-B_{2 * n}", "2C-B_2n", True, n)


def family_2CB_odd(n):
    m = 2 * n
    return _cb_variants(m, li_CB(m), reflection(m + 1), rel_2CB_odd(n, False),
                        rel_2CB_odd(n, True), f"2C-B_{2 * n + 1}", "2C-B_2n+1", True, n)


def family_F4I():
    out = []
    for iso in ("ad", "sc"):
        out.append({
            "name": "F4^I", "family": "F4^I", "n": 4, "isogeny": iso,
            "quasi_split": True, "relevance": "trivial", "splitting": "E ramified quadratic",
            "galois_degrees": [2], "wild": False, "dim": 78,
            "group": side(f"E6 ramified ({iso})", datum("E", 6, iso, [[5, 1, 4, 3, 2, 0]]),
                          li_F4I(), identity(5), li_F4I(), omega_block(1, [])),
            "companion": side("F4", datum("F", 4, "ad"), li_F4(), identity(5), li_F4(),
                              omega_block(1, []), False, "split"),
            "marked": [0, 0],
            "dual": dual_block("E6", "F4", "F4", 1, 78, 52, 1),
        })
    return out


def family_G2I():
    out = []
    for iso in ("ad", "sc"):
        out.append({
            "name": "G2^I", "family": "G2^I", "n": 2, "isogeny": iso,
            "quasi_split": True, "relevance": "trivial",
            "splitting": "degree-r E' (r = 3 modeled; r = 6 has identical data)",
            "galois_degrees": [3, 6], "wild": False, "dim": 28,
            "group": side(f"D4 triality ({iso})", datum("D", 4, iso, [[2, 1, 3, 0]]),
                          li_G2I(), identity(3), li_G2I(), omega_block(1, [])),
            "companion": side("G2", datum("G", 2, "ad"), li_G2(), identity(3), li_G2(),
                              omega_block(1, []), False, "split"),
            "marked": [0, 0],
            "dual": dual_block("D4", "G2", "G2", 1, 28, 14, 1),
        })
    return out


def build_entries(max_n=MAX_N):
    entries = []
    for n in range(2, max_n + 1):
        entries += family_BC(n, False)
    for n in range(1, max_n + 1):
        entries += family_CBC(n)
    for n in range(2, max_n + 1):
        entries += family_CB(n)
    for n in range(2, max_n + 1):
        entries += family_BC(n, True)
    for n in range(2, max_n // 2 + 1):
        entries += family_2CB_even(n)
    for n in range(1, (max_n - 1) // 2 + 1):
        entries += family_2CB_odd(n)
    entries += family_F4I()
    entries += family_G2I()
    return entries


def checksum(entries):
    canon = json.dumps(entries, sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(canon.encode()).hexdigest()


def render(entries):
    doc = {"format": "unillc-catalog", "version": 1, "checksum": checksum(entries),
           "entries": entries}
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args(argv)
    text = render(build_entries())
    if args.check:
        if OUT.read_text() != text:
            print("catalog.v1.json is stale", file=sys.stderr)
            return 1
        return 0
    OUT.write_text(text)
    print(f"wrote {OUT} ({len(json.loads(text)['entries'])} entries)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
