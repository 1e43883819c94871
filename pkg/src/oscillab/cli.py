"""Command-line surface: geometry reports, audit batches, oscillation
search, covering construction, and aggregate tables.

Every command writes its outputs plus a manifest.json; outputs embed the
manifest hash, and re-running the same manifest reproduces the files byte
for byte.  Exit codes: 0 success, 2 input error, 3 audit failure, 4 search
incomplete, 5 covering failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from pathlib import Path

from . import __version__
from .audits import AUDIT_IDS, run_batch
from .covering import build_covering, max_feasible_r, r_schedule
from .errors import FamilyTooLarge, NoCutPoint
from .geometry import ConvexDomain, transfinite_diameter_estimate
from .search import (
    SearchConfig,
    minimize_oscillation,
    nlogn_floor,
    upper_witness_check,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_AUDIT = 3
EXIT_SEARCH = 4
EXIT_COVERING = 5

_FORMAT_VERSION = "1"


def _parse_q(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    q = float(text)
    if q < 1:
        raise argparse.ArgumentTypeError("q must be at least 1 (or inf)")
    return q


def _load_domain(path: str) -> ConvexDomain:
    with open(path, "r", encoding="utf-8") as fh:
        return ConvexDomain.from_json(fh.read())


def _manifest(command: str, domain_file: str, params: dict,
              outputs: list) -> tuple:
    doc = {
        "command": command,
        "domain_file": domain_file,
        "params": params,
        "outputs": outputs,
        "versions": {"tool": __version__, "format": _FORMAT_VERSION},
    }
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return doc, hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")


def _write_jsonl(path: Path, records) -> None:
    lines = [json.dumps(rec, sort_keys=True, separators=(",", ":"))
             for rec in records]
    path.write_text("\n".join(lines) + ("\n" if lines else ""),
                    encoding="utf-8")


def _write_csv(path: Path, header, rows, manifest_hash: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# manifest: {manifest_hash}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ------------------------------------------------------------- commands

def cmd_geometry(args) -> int:
    try:
        K = _load_domain(args.domain)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"invalid domain: {exc}", file=sys.stderr)
        return EXIT_INPUT
    est = transfinite_diameter_estimate(K, m=10)
    report = {
        "kind": K.kind,
        "diameter": K.diameter,
        "width": K.width,
        "perimeter": K.perimeter,
        "depth": K.depth(),
        "transfinite_bracket": [est.lower, est.upper],
        "fekete_estimate": est.fekete_estimate,
    }
    if K.kind == "polygon":
        report["vertex_turns"] = [K.vertex_point(i).omega
                                  for i in range(len(K.vertices))]
    else:
        report["vertex_turns"] = []
    print(f"domain: {K.kind}")
    print(f"diameter       {report['diameter']:.12g}")
    print(f"width          {report['width']:.12g}")
    print(f"perimeter      {report['perimeter']:.12g}")
    print(f"depth          {report['depth']:.12g}")
    print(f"transfinite in [{est.lower:.12g}, {est.upper:.12g}] "
          f"(fekete m=10: {est.fekete_estimate:.12g})")
    for i, om in enumerate(report["vertex_turns"]):
        print(f"vertex {i}: turn {om:.12g}")
    if args.out is not None:
        out = _out_dir(args)
        params = {"m": 10}
        doc, h = _manifest("geometry", args.domain, params,
                           ["geometry.json"])
        report["manifest_hash"] = h
        _write_json(out / "geometry.json", report)
        _write_json(out / "manifest.json", doc)
    return EXIT_OK


def cmd_audit(args) -> int:
    try:
        K = _load_domain(args.domain) if args.domain else None
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"invalid domain: {exc}", file=sys.stderr)
        return EXIT_INPUT
    params = {"q": args.q}
    if args.n is not None:
        params["n"] = args.n
    run_params = dict(params)
    if K is not None:
        run_params["domain"] = K
    reports = run_batch(args.audit_id, args.trials, args.seed, run_params)

    n_pass = sum(1 for r in reports if r.applicable and r.passed)
    n_fail = sum(1 for r in reports if r.applicable and not r.passed)
    n_na = sum(1 for r in reports if not r.applicable)
    margins = [r.margin for r in reports
               if r.applicable and math.isfinite(r.margin)]
    worst = min(margins) if margins else math.nan
    print(f"audit {args.audit_id}: pass={n_pass} fail={n_fail} na={n_na} "
          f"worst_margin={worst:.6g}")

    if args.out is not None:
        out = _out_dir(args)
        man_params = {"audit_id": args.audit_id, "trials": args.trials,
                      "seed": args.seed, **params}
        doc, h = _manifest("audit", args.domain or "", man_params,
                           ["audit.jsonl", "audit_summary.json"])
        records = []
        for rep in reports:
            rec = rep.as_record()
            rec["manifest_hash"] = h
            records.append(rec)
        _write_jsonl(out / "audit.jsonl", records)
        _write_json(out / "audit_summary.json", {
            "audit_id": args.audit_id, "pass": n_pass, "fail": n_fail,
            "na": n_na,
            "worst_margin": None if math.isnan(worst) else worst,
            "manifest_hash": h,
        })
        _write_json(out / "manifest.json", doc)
    return EXIT_AUDIT if n_fail else EXIT_OK


def cmd_search(args) -> int:
    try:
        K = _load_domain(args.domain)
        config = SearchConfig(n=args.n, q=args.q, budget=args.budget,
                              seed=args.seed, restarts=args.restarts,
                              init=args.init)
        result = minimize_oscillation(K, config)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"invalid search input: {exc}", file=sys.stderr)
        return EXIT_INPUT

    ceiling = (15.0 / K.diameter) * args.n
    print(f"best_M = {result.best_M:.12g}")
    print(f"ceiling (15/d)n = {ceiling:.12g}  margin = "
          f"{ceiling - result.best_M:.12g}")
    if args.n >= 2:
        floor = nlogn_floor(K, args.n)
        print(f"floor n/log n = {floor:.12g}  margin = "
              f"{result.best_M - floor:.12g}")

    if args.out is not None:
        out = _out_dir(args)
        man_params = {"n": args.n, "q": args.q, "budget": args.budget,
                      "seed": args.seed, "restarts": args.restarts,
                      "init": args.init}
        doc, h = _manifest("search", args.domain, man_params,
                           ["search.json", "trace.csv"])
        record = result.as_record()
        record["manifest_hash"] = h
        _write_json(out / "search.json", record)
        _write_csv(out / "trace.csv", ["evaluation", "incumbent_M"],
                   [[i, repr(v)] for i, v in result.trace], h)
        _write_json(out / "manifest.json", doc)

    witness = upper_witness_check(K, args.n, args.q, result)
    if not witness.passed:
        print("SEARCH-INCOMPLETE: no polynomial below (15/d) n found",
              file=sys.stderr)
        return EXIT_SEARCH
    return EXIT_OK


def cmd_covering(args) -> int:
    try:
        K = _load_domain(args.domain)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"invalid domain: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if (args.r is None) == (args.n is None):
        print("covering needs exactly one of --r or --n", file=sys.stderr)
        return EXIT_INPUT
    if args.n is not None:
        try:
            r = r_schedule(args.n, K).r
        except ValueError as exc:
            print(f"invalid degree: {exc}", file=sys.stderr)
            return EXIT_INPUT
        print(f"r(n={args.n}) = {r:.12g}")
    else:
        r = args.r

    try:
        cov = build_covering(K, r, theta=args.theta)
    except (ValueError, NoCutPoint, FamilyTooLarge) as exc:
        suggestion = max_feasible_r(K, theta=args.theta)
        print(f"covering failed: {exc}", file=sys.stderr)
        print(f"suggested maximal r: {suggestion:.12g}", file=sys.stderr)
        return EXIT_COVERING

    d, w = K.diameter, K.width
    bound = 48.0 * r * d / w
    print(f"k0 = {cov.k0}")
    print(f"|L| = {cov.total_measure:.12g}  bound 48rd/w = {bound:.12g}  "
          f"margin = {bound - cov.total_measure:.12g}")
    for i, comp in enumerate(cov.components):
        print(f"component {i}: start {comp.arc.start_s % cov.perimeter:.9g} "
              f"length {comp.arc.length:.9g}")
    print(f"cut point = {cov.cut_point:.12g}")

    if args.out is not None:
        out = _out_dir(args)
        man_params = {"r": r, "theta": args.theta, "n": args.n}
        doc, h = _manifest("covering", args.domain, man_params,
                           ["covering.json"])
        record = cov.as_record()
        record["manifest_hash"] = h
        _write_json(out / "covering.json", record)
        _write_json(out / "manifest.json", doc)
    return EXIT_OK


def cmd_table(args) -> int:
    if not args.manifests:
        print("no manifests given", file=sys.stderr)
        return EXIT_INPUT
    rows = []
    for man_path in args.manifests:
        path = Path(man_path)
        if not path.is_file():
            print(f"missing manifest: {man_path}", file=sys.stderr)
            return EXIT_INPUT
        doc = json.loads(path.read_text(encoding="utf-8"))
        if doc.get("command") != "search":
            print(f"not a search manifest: {man_path}", file=sys.stderr)
            return EXIT_INPUT
        result_path = path.parent / "search.json"
        if not result_path.is_file():
            print(f"missing search output next to manifest: {man_path}",
                  file=sys.stderr)
            return EXIT_INPUT
        record = json.loads(result_path.read_text(encoding="utf-8"))
        try:
            K = _load_domain(doc["domain_file"])
        except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
            print(f"invalid domain in manifest {man_path}: {exc}",
                  file=sys.stderr)
            return EXIT_INPUT
        n = doc["params"]["n"]
        q = doc["params"]["q"]
        d, w = K.diameter, K.width
        best = record["best_M"]
        rows.append((
            doc["domain_file"], n, q, best,
            n / 2.0 if K.kind == "disk" else "",
            (15.0 / d) * n,
            1e-3 * (w / (d * d)) * n,
            nlogn_floor(K, n) if n >= 2 else "",
        ))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))

    # soft monotonicity check in n per (domain, q)
    by_kq = {}
    for row in rows:
        by_kq.setdefault((row[0], row[2]), []).append((row[1], row[3]))
    for (dom, q), pairs in sorted(by_kq.items()):
        pairs.sort()
        for (n1, m1), (n2, m2) in zip(pairs, pairs[1:]):
            if m2 < m1 - 1e-12:
                print(f"warning: best_M not monotone on {dom} q={q}: "
                      f"M({n2})={m2:.6g} < M({n1})={m1:.6g}")

    header = ["domain", "n", "q", "best_M", "disk_half_n", "ceiling_15_d_n",
              "infnorm_floor", "nlogn_floor"]
    out = _out_dir(args)
    doc, h = _manifest("table", "", {"manifests": list(args.manifests)},
                       ["table.csv"])
    _write_csv(out / "table.csv", header,
               [[r[0], r[1], r[2], repr(r[3]), r[4],
                 repr(r[5]), repr(r[6]),
                 repr(r[7]) if r[7] != "" else ""] for r in rows], h)
    _write_json(out / "manifest.json", doc)
    print(f"wrote {out / 'table.csv'} ({len(rows)} rows)")
    return EXIT_OK


# --------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscillab",
        description="Inverse Markov factor laboratory on convex domains")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("geometry", help="domain geometry report")
    g.add_argument("--domain", required=True)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_geometry)

    a = sub.add_parser("audit", help="run an audit batch")
    a.add_argument("audit_id", choices=AUDIT_IDS)
    a.add_argument("--domain", default=None)
    a.add_argument("--trials", type=int, default=100)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--q", type=_parse_q, default=2.0)
    a.add_argument("--n", type=int, default=None)
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_audit)

    s = sub.add_parser("search", help="minimize the oscillation factor")
    s.add_argument("--domain", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--q", type=_parse_q, default=2.0)
    s.add_argument("--budget", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--restarts", type=int, default=4)
    s.add_argument("--init", default="boundary-uniform",
                   choices=("boundary-uniform", "interior-uniform",
                            "corner-clustered"))
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_search)

    c = sub.add_parser("covering", help="build the boundary covering")
    c.add_argument("--domain", required=True)
    c.add_argument("--r", type=float, default=None)
    c.add_argument("--n", type=float, default=None)
    c.add_argument("--theta", type=float, default=None)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_covering)

    t = sub.add_parser("table", help="aggregate search results to CSV")
    t.add_argument("manifests", nargs="*")
    t.add_argument("--out", default="oscillab-out")
    t.set_defaults(func=cmd_table)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
