"""Command-line entry point: ``unillc list | show | verify``.

Exit codes: 0 when everything passes, 1 when an identity fails, 2 for usage
or data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .arith import HalfLaurent, RationalFunction, evaluate, render
from .catalog import (CENTER_FIXTURES, DEFAULT_ISOGENY, CatalogError, dual_center_from_lattice,
                      facet_transfer, load_catalog, lookup)
from .diagrams import Facet, enumerate_facets
from .fdeg import (FdegInput, center_ratios, cuspidal_family_count, fdeg_transfer_check,
                   formal_degree, parahoric_volume, volume_ratio_check)
from .finquot import check_facet_match, reductive_quotient
from .gamma import (companion_gamma_check, full_principal_module, gamma_abs_at_zero,
                    ramified_split_check)
from .hecke import (HeckeError, iwahori_coxeter, iwahori_transfer_check, load_params,
                    transfer_check, _m_token)
from .omega import IntegrityError, facet_stabilizers, isogeny_kernel_image, lattice_images

SUITES = ("prop21", "coxeter", "volumes", "fdeg", "gamma", "omega-duality", "center")
SHOW = ("diagram", "omega", "facets", "dual", "hecke", "volumes")
DEFAULT_MAX_RANK = 4


class UsageError(Exception):
    pass


def specialize(x, q):
    """Exact value at q as a string: a rational, or a rational times sqrt(q)."""
    try:
        return str(Fraction(evaluate(x, q=q)))
    except ValueError:
        pass
    inv_u = HalfLaurent.monomial(-1)
    y = x * (inv_u if isinstance(x, HalfLaurent) else RationalFunction(inv_u))
    try:
        return f"{Fraction(evaluate(y, q=q))}*sqrt({q})"
    except ValueError:
        return None


def fmt_value(x, at_q=None):
    s = render(x)
    if at_q is None:
        return s
    v = specialize(x, at_q)
    return f"{s} [q={at_q}: {'not in Q(sqrt q)' if v is None else v}]"


def _value_json(x, at_q=None):
    out = {"u": render(x)}
    if at_q is not None:
        out["at_q"] = specialize(x, at_q)
    return out


# -- list --------------------------------------------------------------------


def list_rows(cat, family=None, rank=None):
    rows = []
    for e in cat.entries:
        if family and e.family != family:
            continue
        if rank is not None and e.n != rank:
            continue
        rows.append({
            "name": e.name, "family": e.family, "n": e.n, "isogeny": e.isogeny,
            "omega_order": e.group.omega.order(), "group": e.group.label,
            "companion": e.companion.label, "quasi_split": e.quasi_split,
        })
    return rows


def cmd_list(cat, args, out):
    rows = list_rows(cat, args.family, args.rank)
    if args.family and not rows:
        raise UsageError(f"unknown family {args.family!r}")
    if args.json:
        doc = {"tool": "unillc", "version": __version__, "catalog_checksum": cat.checksum,
               "entries": rows}
        out.write(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        return 0
    for r in rows:
        qs = "quasi-split" if r["quasi_split"] else "inner form"
        out.write(f"{r['name']:<12} {r['isogeny']:<5} |Omega|={r['omega_order']}  "
                  f"{r['group']} <-> {r['companion']}  {qs}\n")
    return 0


# -- show --------------------------------------------------------------------


def _side_json(side):
    return {"label": side.label, "local_index": side.local_index.to_json(),
            "relative": side.relative.to_json()}


def show_data(e, what, at_q=None, params=None):
    if what == "diagram":
        return {"group": _side_json(e.group), "companion": _side_json(e.companion),
                "marked": list(e.marked), "bijection": list(e.bijection)}
    if what == "omega":
        return {"group": e.group.omega.to_json(), "companion": e.companion.omega.to_json(),
                "order": e.group.omega.order()}
    if what == "facets":
        rows = []
        for f in enumerate_facets(e.group.relative):
            fp = facet_transfer(e, f)
            sg, st = facet_stabilizers(e.group.omega, f)
            rows.append({"facet": f.ident, "companion_facet": fp.ident,
                         "quotient": reductive_quotient(e, f).label(),
                         "companion_quotient": reductive_quotient(e, fp, True).label(),
                         "omega_f": len(sg), "omega_f_tor": len(st), "maximal": f.is_maximal})
        return {"facets": rows}
    if what == "dual":
        return e.dual.to_json()
    if what == "hecke":
        out = {}
        for key, side in (("group", e.group), ("companion", e.companion)):
            pres = iwahori_coxeter(side.relative)
            entry = {"coxeter": [[_m_token(m) for m in row] for row in pres.matrix]}
            if params is not None:
                try:
                    rec = params.get(e.family, e.n, "G'" if key == "companion" else "G", "{}",
                                     "triv")
                    entry["N"] = [str(x) for x in rec.params.N]
                except HeckeError:
                    entry["N"] = None
            out[key] = entry
        return out
    if what == "volumes":
        rows = []
        for f in enumerate_facets(e.group.relative):
            v = parahoric_volume(e, f).value
            vc = parahoric_volume(e, facet_transfer(e, f), companion=True).value
            rows.append({"facet": f.ident, "vol": _value_json(v, at_q),
                         "companion_vol": _value_json(vc, at_q)})
        return {"volumes": rows, "conductor": e.dual.conductor}
    raise UsageError(f"unknown show target {what!r}")


def _show_text(e, what, data, out):
    out.write(f"{e.ident}: {e.group.label} <-> {e.companion.label}\n")
    if what == "diagram":
        for key, side in (("group", e.group), ("companion", e.companion)):
            out.write(f"[{key} local index]\n{side.local_index.to_text()}")
            out.write(f"[{key} relative]\n{side.relative.to_text()}")
        out.write(f"marked {e.marked[0]} {e.marked[1]}\n")
        return
    if what == "omega":
        for key in ("group", "companion"):
            d = data[key]
            out.write(f"[{key}] factors {d['factors']}\n")
            for g, p in d["action"]:
                out.write(f"  {g} -> {p}\n")
        return
    if what == "facets":
        for r in data["facets"]:
            out.write(f"{r['facet']:<12} {r['quotient']:<24} {r['companion_facet']:<12} "
                      f"{r['companion_quotient']:<24} |Omega_f|={r['omega_f']}\n")
        return
    if what == "volumes":
        for r in data["volumes"]:
            out.write(f"{r['facet']:<12} {r['vol']['u']}"
                      + (f" [q: {r['vol']['at_q']}]" if "at_q" in r["vol"] else "") + "\n")
        return
    for k in sorted(data):
        out.write(f"{k}: {data[k]}\n")


def cmd_show(cat, args, out):
    e = lookup(args.name, args.rank, args.isogeny, catalog=cat)
    params = load_params(args.params) if args.what == "hecke" else None
    data = show_data(e, args.what, args.at_q, params)
    if args.json:
        doc = {"entry": e.ident, "what": args.what, "data": data}
        out.write(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    else:
        _show_text(e, args.what, data, out)
    return 0


# -- verify ------------------------------------------------------------------


def _case(cid, ok, detail=""):
    return {"id": cid, "status": "pass" if ok else "fail", "detail": detail}


def _entries(cat, max_rank, family=None):
    return [e for e in cat.entries
            if e.n <= max_rank and (family is None or e.family == family)]


def suite_prop21(cat, max_rank, family, at_q, params):
    cases = []
    for e in _entries(cat, max_rank, family):
        for f in enumerate_facets(e.group.relative):
            r = check_facet_match(e, f)
            cases.append(_case(f"{e.ident} {f.ident}", r.ok, f"{r.type_g} ~ {r.type_gp}"))
    return cases


def suite_coxeter(cat, max_rank, family, at_q, params):
    cases = []
    for e in _entries(cat, max_rank, family):
        chamber = Facet(frozenset(), e.group.relative.size)
        ok = iwahori_transfer_check(e)
        detail = "folded vs companion"
        if params is not None and e.isogeny == DEFAULT_ISOGENY.get(e.family, "ad"):
            ok = ok and transfer_check(e, chamber, params)
            detail += " + parameters"
        cases.append(_case(f"{e.ident} {{}}", ok, detail))
    return cases


def suite_volumes(cat, max_rank, family, at_q, params):
    cases = []
    for e in _entries(cat, max_rank, family):
        for f in enumerate_facets(e.group.relative):
            ok = volume_ratio_check(e, f)
            v = parahoric_volume(e, f).value
            cases.append(_case(f"{e.ident} {f.ident}", ok, "vol " + fmt_value(v, at_q)))
    return cases


def suite_fdeg(cat, max_rank, family, at_q, params):
    cases = []
    for e in _entries(cat, max_rank, family):
        for f in enumerate_facets(e.group.relative):
            if not f.is_maximal:
                continue
            fp = facet_transfer(e, f)
            ok = (fdeg_transfer_check(e, f)
                  and cuspidal_family_count(e, f) == cuspidal_family_count(e, fp, True))
            fd = formal_degree(FdegInput(e, f))
            cases.append(_case(f"{e.ident} {f.ident}", ok, "fdeg " + fmt_value(fd, at_q)))
    return cases


def suite_gamma(cat, max_rank, family, at_q, params):
    cases = []
    for e in _entries(cat, max_rank, family):
        m = full_principal_module(e)
        ok = ramified_split_check(m) and companion_gamma_check(e)
        g = gamma_abs_at_zero(m)
        cases.append(_case(e.ident, ok, "gamma " + fmt_value(g, at_q)))
    return cases


def suite_omega_duality(cat, max_rank, family, at_q, params):
    cases = []
    for e in _entries(cat, max_rank, family):
        dual = dual_center_from_lattice(e.group)
        om = e.group.omega.order()
        ok = dual == om == e.dual.center_order
        cases.append(_case(e.ident, ok, f"dual centre {dual}, Omega {om}"))
    return cases


def suite_center(cat, max_rank, family, at_q, params):
    cases = []
    for e in _entries(cat, max_rank, family):
        ad = lookup(e.family, e.n, DEFAULT_ISOGENY.get(e.family, "ad"), catalog=cat)
        try:
            k, i = isogeny_kernel_image(e.group.omega, ad.group.omega,
                                        lattice_images(e.group.omega_quotient,
                                                       ad.group.omega_quotient))
            ok, detail = True, f"kernel {len(k)}, image {len(i)}"
        except IntegrityError as exc:
            ok, detail = False, str(exc)
        cases.append(_case(f"{e.ident} sequence", ok, detail))
    for fx in CENTER_FIXTURES:
        if fx.n > max_rank or (family is not None and fx.family != family):
            continue
        e = fx.entry(cat)
        for f in enumerate_facets(e.group.relative):
            r = center_ratios(fx, f, cat)
            fr = "" if r.fdeg_formula is None else ", fdeg ratio " + fmt_value(r.fdeg_ratio, at_q)
            cases.append(_case(f"{fx.name} {f.ident}", r.ok,
                               "vol ratio " + fmt_value(r.vol_ratio, at_q) + fr))
    return cases


RUNNERS = {
    "prop21": suite_prop21, "coxeter": suite_coxeter, "volumes": suite_volumes,
    "fdeg": suite_fdeg, "gamma": suite_gamma, "omega-duality": suite_omega_duality,
    "center": suite_center,
}


def run_suites(cat, suites, max_rank, family=None, at_q=None, params=None):
    out = []
    for name in suites:
        cases = RUNNERS[name](cat, max_rank, family, at_q, params)
        passed = sum(c["status"] == "pass" for c in cases)
        out.append({"suite": name, "cases": cases,
                    "summary": {"total": len(cases), "pass": passed, "fail": len(cases) - passed}})
    return out


def build_report(cat, suites, max_rank, family=None, at_q=None, params=None):
    results = run_suites(cat, suites, max_rank, family, at_q, params)
    total = sum(r["summary"]["total"] for r in results)
    passed = sum(r["summary"]["pass"] for r in results)
    return {
        "tool": "unillc", "version": __version__,
        "catalog": {"version": cat.version, "checksum": cat.checksum},
        "max_rank": max_rank, "family": family, "at_q": at_q,
        "suites": results,
        "summary": {"total": total, "pass": passed, "fail": total - passed},
    }


def cmd_verify(cat, args, out):
    suites = []
    for s in args.suites:
        if s == "all":
            suites.extend(x for x in SUITES if x not in suites)
        elif s in SUITES:
            if s not in suites:
                suites.append(s)
        else:
            raise UsageError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}, all")
    params = load_params(args.params)
    rep = build_report(cat, suites, args.max_rank, args.family, args.at_q, params)
    if args.json:
        out.write(json.dumps(rep, indent=1, sort_keys=True) + "\n")
    else:
        for r in rep["suites"]:
            s = r["summary"]
            out.write(f"{r['suite']}: {s['pass']}/{s['total']} pass\n")
            for c in r["cases"]:
                if c["status"] == "fail":
                    out.write(f"  FAIL {c['id']}: {c['detail']}\n")
        s = rep["summary"]
        out.write(f"total: {s['pass']}/{s['total']} pass\n")
    return 0 if rep["summary"]["fail"] == 0 else 1


# -- entry point -------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", help="catalog JSON path (default: shipped catalog)")
    common.add_argument("--params", help="Hecke parameter table path (.txt or .json)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--at-q", type=int, dest="at_q", help="also evaluate at this q")
    common.add_argument("--family", help="restrict to one family, e.g. B-C_n")
    common.add_argument("--rank", type=int, help="rank parameter n")
    common.add_argument("--isogeny", help="isogeny tag, e.g. ad, sc, so, d=2")

    ap = argparse.ArgumentParser(prog="unillc", description="Ramified groups, companions, "
                                 "and the identities relating them.")
    ap.add_argument("--version", action="version", version=f"unillc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("list", parents=[common], help="list catalog entries")
    p = sub.add_parser("show", parents=[common], help="show one entry")
    p.add_argument("name", help="entry or family name, e.g. C-BC_2, 2C-B_4, F4^I")
    p.add_argument("what", choices=SHOW)
    p = sub.add_parser("verify", parents=[common], help="run identity suites")
    p.add_argument("suites", nargs="+", metavar="SUITE", help=", ".join(SUITES) + ", all")
    p.add_argument("--max-rank", type=int, default=DEFAULT_MAX_RANK, dest="max_rank")
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cat = load_catalog(args.catalog)
        if args.command == "list":
            return cmd_list(cat, args, out)
        if args.command == "show":
            return cmd_show(cat, args, out)
        return cmd_verify(cat, args, out)
    except (UsageError, CatalogError, IntegrityError, HeckeError, OSError,
            json.JSONDecodeError) as exc:
        print(f"unillc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
