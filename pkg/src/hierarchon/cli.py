"""Command line front end over enumeration, verification and survey runs.

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 bad usage or
configuration.  Machine reports are JSON documents with a versioned schema
field; nothing time- or host-dependent goes into them, so a rerun with the
same configuration produces identical bytes.
"""

import argparse
import json
import os
import sys

from . import __version__
from .diagonal import verify_cgk
from .exactmat import from_interchange
from .hierarchy import REFERENCE_COUNTS, enumerate_level, membership
from .qutrit3 import survey
from .semiclifford import find_witness, gate_hash, gate_report
from .teleport import verify_gadget

# refuse enumerations whose estimated size runs away; the estimate leans on
# the reference table and the d^2n-per-level growth beyond it
SIZE_CEILING = 1_000_000


def _cache_dir(args):
    return args.cache_dir or os.environ.get("HIERARCHON_CACHE") or None


def _estimate_members(d, n, k):
    ref = REFERENCE_COUNTS.get((d, n), {})
    if k in ref:
        return ref[k]
    if not ref:
        return (d ** (2 * n)) ** k
    last = max(ref)
    if k < last:
        return ref[min(kk for kk in ref if kk >= k)]
    return ref[last] * (d ** (2 * n)) ** (k - last)


def _verdict(count, reference):
    if reference is None:
        return "NEW"
    return "MATCH" if count == reference else "MISMATCH"


def _emit(args, report, table_lines):
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if getattr(args, "format", "table") == "json":
        print(text)
    else:
        for line in table_lines:
            print(line)


def cmd_enumerate(args):
    if args.max_level < 1:
        print("error: --max-level must be at least 1", file=sys.stderr)
        return 2
    est = _estimate_members(args.d, args.n, args.max_level)
    if est > SIZE_CEILING:
        print(
            "error: estimated %d gates at level %d is past the ceiling of %d"
            % (est, args.max_level, SIZE_CEILING),
            file=sys.stderr,
        )
        return 2
    cache = _cache_dir(args)
    refs = REFERENCE_COUNTS.get((args.d, args.n), {})
    levels = []
    lines = ["level  count    reference  verdict"]
    closure_failures = 0
    for k in range(1, args.max_level + 1):
        cat = enumerate_level(args.d, args.n, k, cache_dir=cache, jobs=args.jobs)
        ref = refs.get(k)
        verdict = _verdict(len(cat), ref)
        closure_failures += cat.meta.get("closure_failure_count", 0)
        levels.append(
            {"level": k, "count": len(cat), "reference": ref, "verdict": verdict}
        )
        lines.append(
            "%5d  %-7d  %-9s  %s"
            % (k, len(cat), "-" if ref is None else ref, verdict)
        )
    report = {
        "schema": "hierarchon.enumerate/1",
        "library": __version__,
        "d": args.d,
        "n": args.n,
        "max_level": args.max_level,
        "levels": levels,
        "closure_failures": closure_failures,
    }
    _emit(args, report, lines)
    return 0 if closure_failures == 0 else 1


def _load_gate(path):
    with open(path) as fh:
        doc = json.load(fh)
    su, n = from_interchange(doc)
    su.verify()
    return su, n


def cmd_membership(args):
    try:
        su, n = _load_gate(args.gate)
    except (OSError, ValueError, KeyError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    cache = _cache_dir(args)
    catalogs = {
        k: enumerate_level(su.d, n, k, cache_dir=cache, jobs=args.jobs)
        for k in range(1, args.max_level + 1)
    }
    level = None
    for k in range(1, args.max_level + 1):
        if membership(su, k, catalogs=catalogs):
            level = k
            break
    report = {
        "schema": "hierarchon.membership/1",
        "library": __version__,
        "d": su.d,
        "n": n,
        "max_level": args.max_level,
        "gate_hash": gate_hash(su),
        "level": level,
    }
    line = (
        "level: %d" % level
        if level is not None
        else "not within levels 1..%d" % args.max_level
    )
    _emit(args, report, [line])
    return 0


def cmd_diagonal(args):
    cache = _cache_dir(args)
    catalog = enumerate_level(args.d, 1, args.k, cache_dir=cache, jobs=args.jobs)
    result = verify_cgk(args.d, args.k, catalog)
    ok = not result["missing"] and not result["extra"]
    report = {
        "schema": "hierarchon.diagonal/1",
        "library": __version__,
        "verdict": "pass" if ok else "fail",
    }
    report.update(result)
    lines = [
        "%s: %d diagonal classes at level %d (d=%d)"
        % (report["verdict"], result["delta_count"], args.k, args.d)
    ]
    if result["missing"]:
        lines.append("missing from catalog: %d" % len(result["missing"]))
    if result["extra"]:
        lines.append("extra diagonal classes: %d" % len(result["extra"]))
    _emit(args, report, lines)
    return 0 if ok else 1


def cmd_semiclifford(args):
    if (args.catalog is None) == (args.gate is None):
        print("error: pass a gate file or --catalog K, not both", file=sys.stderr)
        return 2
    if args.gate is not None:
        try:
            su, _ = _load_gate(args.gate)
        except (OSError, ValueError, KeyError) as e:
            print("error: %s" % e, file=sys.stderr)
            return 2
        rep = gate_report(su)
        report = {
            "schema": "hierarchon.semiclifford/1",
            "library": __version__,
            "mode": "gate",
            "report": rep,
        }
        line = "semi-Clifford" if rep["semi_clifford"] else "not semi-Clifford"
        _emit(args, report, [line])
        return 0
    cache = _cache_dir(args)
    catalog = enumerate_level(args.d, 1, args.catalog, cache_dir=cache, jobs=args.jobs)
    total = len(catalog)
    found = 0
    counterexamples = []
    certificates = []
    for su in catalog.representatives():
        witness = find_witness(su)
        if witness is None:
            counterexamples.append(gate_report(su))
            continue
        found += 1
        if args.certificates:
            certificates.append(gate_report(su))
    report = {
        "schema": "hierarchon.semiclifford/1",
        "library": __version__,
        "mode": "catalog",
        "d": args.d,
        "k": args.catalog,
        "total": total,
        "semi_clifford": found,
        "counterexamples": counterexamples,
    }
    if args.certificates:
        report["certificates"] = certificates
    _emit(
        args,
        report,
        ["%d/%d semi-Clifford at level %d (d=%d)" % (found, total, args.catalog, args.d)],
    )
    return 0 if found == total else 1


def cmd_teleport(args):
    cache = _cache_dir(args)
    catalog = enumerate_level(args.d, 1, 3, cache_dir=cache, jobs=args.jobs)
    result = verify_gadget(args.d, samples=args.samples, seed=args.seed, catalog=catalog)
    report = {
        "schema": "hierarchon.teleport/1",
        "library": __version__,
        "seed": args.seed,
    }
    report.update(result)
    lines = [
        "%d failures across %d branches (%d samples, seed %d)"
        % (len(result["failures"]), result["branches_checked"], args.samples, args.seed)
    ]
    _emit(args, report, lines)
    return 0 if not result["failures"] else 1


def cmd_qutrit3(args):
    result = survey(jobs=args.jobs, stride=args.stride)
    report = {"schema": "hierarchon.qutrit3/1", "library": __version__}
    report.update(result)
    lines = [
        "%d/%d tuples contain a Lagrangian semibasis; %d fail"
        % (result["passed"], result["total"], result["failed"])
    ]
    _emit(args, report, lines)
    return 0 if result["failed"] == 0 else 1


def _common(sub, jobs=True):
    sub.add_argument("--cache-dir", default=None)
    if jobs:
        sub.add_argument("--jobs", type=int, default=1)
    sub.add_argument("--format", choices=("table", "json"), default="table")
    sub.add_argument("--out", default=None)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="hierarchon",
        description="Exact Clifford hierarchy workbench.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("enumerate", help="build hierarchy level catalogs")
    p.add_argument("--d", type=int, choices=(3, 5, 7), default=3)
    p.add_argument("--n", type=int, choices=(1, 2), default=1)
    p.add_argument("--max-level", type=int, default=3)
    _common(p)
    p.set_defaults(func=cmd_enumerate)

    p = subs.add_parser("membership", help="place a gate file in the hierarchy")
    p.add_argument("gate", help="gate in interchange JSON")
    p.add_argument("--max-level", type=int, default=4)
    _common(p)
    p.set_defaults(func=cmd_membership)

    p = subs.add_parser("diagonal", help="diagonal gate classification checks")
    p.add_argument("action", choices=("verify",))
    p.add_argument("--d", type=int, choices=(3, 5, 7), default=3)
    p.add_argument("--k", type=int, default=3)
    _common(p)
    p.set_defaults(func=cmd_diagonal)

    p = subs.add_parser("semiclifford", help="witness and diagonalise gates")
    p.add_argument("gate", nargs="?", default=None, help="gate in interchange JSON")
    p.add_argument("--catalog", type=int, default=None, metavar="K")
    p.add_argument("--d", type=int, choices=(3, 5, 7), default=3)
    p.add_argument("--certificates", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_semiclifford)

    p = subs.add_parser("teleport", help="gate teleportation checks")
    p.add_argument("action", choices=("verify",))
    p.add_argument("--d", type=int, choices=(3,), default=3)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_teleport)

    p = subs.add_parser("qutrit3", help="two-qutrit third-level survey")
    p.add_argument("action", choices=("survey",))
    p.add_argument("--stride", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_qutrit3)

    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
