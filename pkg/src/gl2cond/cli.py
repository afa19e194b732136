"""Command line entry point: ``gl2cond <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .bounds import CurveRecord, parse_records, serre_constant, theorem_bound_check
from .conductor import LevelInsufficientError, conductor
from .corpus import DEFAULT_SEED
from .goursat import decompose
from .residue import DomainError, ResourceGuardError
from .subgroups import FiniteSubgroup, full_group, sl2, subgroups_up_to_conjugacy
from .tables import LATTICE_GUARD
from .taxonomy import classify_mod_ell
from .verify import CHECK_IDS, verify_paper


class UsageError(Exception):
    pass


def _load_json(text):
    """A JSON literal, or ``@path`` / an existing path holding one."""
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    elif not text.lstrip().startswith(("{", "[")) and Path(text).exists():
        text = Path(text).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc.msg}") from None


def _subgroup(args) -> FiniteSubgroup:
    if args.subgroup:
        return FiniteSubgroup.from_json(_load_json(args.subgroup))
    if args.level is None:
        raise UsageError("give --subgroup or --level with --generators")
    gens = _load_json(args.generators) if args.generators else []
    return FiniteSubgroup.from_json({"level": args.level, "generators": gens})


def _add_subgroup_args(p):
    p.add_argument("--subgroup", help="subgroup JSON {level, generators}, or @file")
    p.add_argument("--level", type=int)
    p.add_argument("--generators", help="JSON list of [[a,b],[c,d]] matrices")


def _table(rows, cols):
    cells = [[str(r.get(c, "")) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def _emit(args, payload, rows=None, cols=None):
    if args.format == "table" and rows is not None:
        print(_table(rows, cols))
    else:
        print(json.dumps(payload, indent=None if isinstance(payload, list) else 2, sort_keys=False))


# --------------------------------------------------------------------------
# subcommands


def cmd_conductor(args):
    H = _subgroup(args)
    rep = conductor(H, strict=args.strict)
    out = rep.to_json()
    rows = [{"prime": p, "beta": b} for p, b in out["local_exponents"].items()]
    if args.format == "table":
        print(f"conductor {rep.conductor}  (level {H.level}, mod-9 condition {rep.condition_1_8})")
        if rows:
            print(_table(rows, ["prime", "beta"]))
    else:
        _emit(args, out)
    return 0


def cmd_classify(args):
    H = _subgroup(args)
    v = classify_mod_ell(H)
    if args.format == "table":
        print(_table([{"flag": f, "witness": json.dumps(v.witnesses.get(f, ""))} for f in v.flags], ["flag", "witness"]))
    else:
        _emit(args, v.to_json())
    return 0


def cmd_goursat(args):
    H = _subgroup(args)
    try:
        m1, m2 = (int(x) for x in args.split.split(","))
    except ValueError:
        raise UsageError("--split expects two integers, e.g. 4,9") from None
    dec = decompose(H, m1, m2)
    if args.format == "table":
        print(_table([{"m1": m1, "m2": m2, "|G1|": dec.g1.order, "|G2|": dec.g2.order,
                       "|N1|": dec.n1.order, "|N2|": dec.n2.order, "|Gamma|": dec.gamma_order}],
                     ["m1", "m2", "|G1|", "|G2|", "|N1|", "|N2|", "|Gamma|"]))
    else:
        _emit(args, dec.to_json())
    return 0


def _check_record(rec: CurveRecord):
    try:
        rep = theorem_bound_check(rec)
        out = rep.to_json()
        out["serre_constant"] = serre_constant(rec.subgroup())
        return out
    except LevelInsufficientError as exc:
        return {"label": rec.label, "pass": False, "error": str(exc), "needed_level": exc.needed}
    except (DomainError, ResourceGuardError) as exc:
        return {"label": rec.label, "pass": False, "error": str(exc)}


def cmd_check_bounds(args):
    if args.records == "-":
        batch = parse_records(sys.stdin)
    else:
        try:
            with open(args.records) as fh:
                batch = parse_records(fh)
        except OSError as exc:
            raise UsageError(f"cannot read {args.records}: {exc.strerror}") from None
    for lineno, msg in batch.diagnostics:
        print(f"line {lineno}: {msg}", file=sys.stderr)
    if args.jobs > 1 and len(batch) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_check_record, batch))
    else:
        results = [_check_record(r) for r in batch]
    if args.format == "table":
        print(_table(results, ["label", "conductor", "index", "rad_term", "bound", "pass", "equality", "error"]))
    else:
        for r in results:
            print(json.dumps(r))
    failed = [r["label"] for r in results if not r["pass"]]
    for label in failed:
        print(f"FAILED {label}", file=sys.stderr)
    return 1 if failed or batch.diagnostics else 0


def cmd_verify(args):
    only = None
    if args.only:
        only = [c.strip() for c in args.only.split(",")]
        unknown = [c for c in only if c not in CHECK_IDS]
        if unknown:
            raise UsageError(f"unknown check ids: {', '.join(unknown)}")
    rep = verify_paper(seed=args.seed, jobs=args.jobs, only=only)
    if args.format == "table":
        rows = [{"id": c.id, "status": c.status, "ms": c.runtime_ms, "description": c.description} for c in rep.checks]
        print(_table(rows, ["id", "status", "ms", "description"]))
    else:
        _emit(args, rep.to_json())
    return 0 if rep.passed else 1


def cmd_enumerate(args):
    if args.group in ("full", "sl2"):
        if args.level is None:
            raise UsageError("--level is required with --group full|sl2")
        G = full_group(args.level) if args.group == "full" else sl2(args.level)
    else:
        G = _subgroup(args)
    flt = _load_json(args.filter) if args.filter else {}
    if not isinstance(flt, dict):
        raise UsageError("--filter must be a JSON object")
    subs = subgroups_up_to_conjugacy(G, flt, guard=args.guard)
    if args.format == "table":
        print(_table([{"#": i, "order": H.order, "index": G.order // H.order, "generators": len(H.generators)}
                      for i, H in enumerate(subs)], ["#", "order", "index", "generators"]))
    else:
        _emit(args, [H.to_json() | {"order": H.order} for H in subs])
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--guard", type=int, default=LATTICE_GUARD, help="element-count guard for enumeration")
    common.add_argument("--jobs", type=int, default=1)

    p = argparse.ArgumentParser(prog="gl2cond", description="Conductors and images of open subgroups of GL2(Zhat).")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("conductor", parents=[common], help="conductor of a subgroup")
    _add_subgroup_args(c)
    c.add_argument("--strict", action="store_true", help="refuse to assume preimage closure beyond the level")
    c.set_defaults(func=cmd_conductor)

    c = sub.add_parser("classify", parents=[common], help="mod-l classification of a prime-level subgroup")
    _add_subgroup_args(c)
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("goursat", parents=[common], help="decompose over a coprime split")
    _add_subgroup_args(c)
    c.add_argument("--split", required=True, help="m1,m2")
    c.set_defaults(func=cmd_goursat)

    c = sub.add_parser("check-bounds", parents=[common], help="bound checks on JSON-lines curve records")
    c.add_argument("records", help="path, or - for stdin")
    c.set_defaults(func=cmd_check_bounds)

    c = sub.add_parser("verify-paper", parents=[common], help="run the V1-V9 reproduction checks")
    c.add_argument("--only", help="comma-separated check ids")
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("enumerate", parents=[common], help="subgroup classes passing a filter")
    _add_subgroup_args(c)
    c.add_argument("--group", choices=("full", "sl2", "subgroup"), default="full")
    c.add_argument("--filter", help='JSON predicate, e.g. {"surjects_mod": 3}')
    c.set_defaults(func=cmd_enumerate)
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (UsageError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceGuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
