"""Generate the Hecke parameter tables in src/unillc/data/.

Iwahori tables are computed from each side's local index: the Coxeter matrix
from orders of products of orbit longest elements and N(O) from their
lengths. Cuspidal entries are transcribed by hand and carry a note line.

Run from the repository root:  python3 tools/build_hecke_params.py [--check]
"""

import argparse
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from unillc.catalog import DEFAULT_ISOGENY, load_catalog  # noqa: E402
from unillc.hecke import (  # noqa: E402
    CoxeterPresentation, ParameterTable, TableRecord, coxeter_from_local_index,
    iwahori_parameters, records_to_json, render_params,
)

TXT = ROOT / "src" / "unillc" / "data" / "hecke_params.v1.txt"
JSN = ROOT / "src" / "unillc" / "data" / "hecke_params.v1.json"
MAX_N = 4

HEADER = """\
# Hecke parameter tables, format version 1.
# Block: 'table <family> <n> <side> <facet> <sigma>', optional 'note', then
# 'm <s> <t> <m>' for each pair with m != 2 and 'gen <s> <N>' per generator.
# Iwahori blocks are generated from the local index by tools/build_hecke_params.py.

"""

CUSPIDAL_NOTE = "transcribed from published unipotent Hecke tables; data, not derived"


def iwahori_record(e, companion):
    side = e.companion if companion else e.group
    li = side.local_index
    pres = coxeter_from_local_index(li)
    N = iwahori_parameters(li)
    return TableRecord(e.family, e.n, "G'" if companion else "G", "{}", "triv", pres,
                       ParameterTable(tuple(N[k] for k in range(pres.rank))))


def cuspidal_records():
    # Sp_6 facet {0,1} with the cuspidal unipotent of Sp_4; both sides carry the same data.
    inf = float("inf")
    pres = CoxeterPresentation(("s0", "s1"), ((1, inf), (inf, 1)))
    params = ParameterTable((3, 1))
    return [TableRecord("C-BC_n", 3, side, "{0,1}", "theta10", pres, params, CUSPIDAL_NOTE)
            for side in ("G", "G'")]


def build_records():
    cat = load_catalog()
    out = []
    for e in cat.entries:
        if e.n > MAX_N or e.isogeny != DEFAULT_ISOGENY.get(e.family, "ad"):
            continue
        out.append(iwahori_record(e, False))
        out.append(iwahori_record(e, True))
    return out + cuspidal_records()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args(argv)
    recs = build_records()
    txt = HEADER + render_params(recs)
    jsn = json.dumps({"format": "unillc-hecke-params", "version": 1,
                      "tables": records_to_json(recs)}, indent=1, sort_keys=True) + "\n"
    if args.check:
        stale = [p.name for p, t in ((TXT, txt), (JSN, jsn)) if p.read_text() != t]
        if stale:
            print("stale: " + ", ".join(stale), file=sys.stderr)
            return 1
        return 0
    TXT.write_text(txt)
    JSN.write_text(jsn)
    print(f"wrote {len(recs)} tables")
    return 0


if __name__ == "__main__":
    sys.exit(main())
