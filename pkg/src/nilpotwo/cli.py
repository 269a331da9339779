"""Command line: ``nilpotwo analyze | verify | oracle | construct``.

Exit codes: 0 pass, 1 input error (or an entry that could not be analysed),
2 theorem violation (negative margin, failed certificate, or a falsified
exhaustive check).
"""

import argparse
import concurrent.futures
import json
import os
import sys

from . import construct
from .config import CAPS, default_seed, derive_seed, override_caps
from .errors import CapExceededError, NilpotwoError, ParseError, TheoremViolation
from .groupio import (
    CSV_COLUMNS,
    build_entry,
    builtin_manifest,
    csv_row,
    format_perm_spec,
    load_group_text,
    read_manifest,
)
from .permutation import Permutation
from .theorem import main_pipeline, thompson_minimizer, verify_certificate

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2


def _dumps(obj):
    return json.dumps(obj, sort_keys=False, separators=(", ", ": "))


def _out_of_range(name, order):
    return {"name": name, "order": str(order), "notice": "out of theorem range"}


def _corrupt(cert, group):
    """Test hook: swap a commutator generator for a non-central element."""
    sub = cert.subgroup
    for x in group.generators:
        if any((x * h) != (h * x) for h in sub.generators):
            cert.commutator_gens = [x] + list(cert.commutator_gens[1:])
            return cert
    cert.commutator_gens = [Permutation.from_cycles([(1, 2)], group.degree)] if group.degree > 1 else []
    return cert


def analyze_group(name, group, seed, corrupt=False):
    """Run the main pipeline.

    Returns (row, status, certificate_ok, reasons); status is one of
    ok / violation / out-of-range.
    """
    if group.order < 3:
        return _out_of_range(name, group.order), "out-of-range", True, []
    report = main_pipeline(group, name, seed)
    cert = report.certificate
    if corrupt:
        cert = _corrupt(cert, group)
    ok, reasons = verify_certificate(cert, group)
    status = "ok" if ok and report.passed else "violation"
    return report.to_dict(), status, ok, reasons


def _run_entry(args):
    entry, base_dir, seed, caps, corrupt = args
    with override_caps(**caps):
        try:
            group = build_entry(entry, base_dir)
            return analyze_group(entry.name, group, seed, corrupt)
        except (NilpotwoError, ValueError, OSError) as exc:
            return {"name": entry.name, "error": f"{type(exc).__name__}: {exc}"}, "error", False, []


# -- commands --


def cmd_analyze(ns):
    seed = ns.seed if ns.seed is not None else default_seed()
    try:
        if ns.family:
            group = construct.build(ns.family)
            name = ns.name or ns.family
        else:
            src = ns.group
            if src is None or src == "-":
                text = sys.stdin.read()
                name = ns.name or "stdin"
            elif src.lstrip().startswith("perm"):
                text = src
                name = ns.name or "input"
            else:
                with open(src, encoding="utf-8") as fh:
                    text = fh.read()
                name = ns.name or os.path.basename(src)
            group = load_group_text(text)
    except (ParseError, ValueError, OSError, CapExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if group.order < 3:
        print(_dumps(_out_of_range(name, group.order)))
        return EXIT_OK
    row, status, ok, reasons = analyze_group(name, group, derive_seed(name, seed))
    print(_dumps(row))
    if status != "ok":
        print(f"theorem check failed: margin {row['margin_log2']}, certificate {reasons or 'ok'}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def run_verify(manifest, seed, jobs=1, corrupt=()):
    """Analyse every entry; returns the analyze_group tuples in manifest order."""
    if manifest.seed is not None:
        seed = manifest.seed
    tasks = [
        (e, manifest.base_dir, derive_seed(e.name, seed), manifest.caps, e.name in corrupt)
        for e in manifest.entries
    ]
    if jobs > 1 and len(tasks) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_entry, tasks))
    else:
        results = [_run_entry(t) for t in tasks]
    return results


def format_verify(results, fmt):
    lines = []
    margins = []
    failures = []
    errors = []
    cert_failures = []
    for row, status, ok, _ in results:
        if "margin_log2" in row:
            margins.append(row["margin_log2"])
        if status == "violation":
            failures.append(row["name"])
        if status == "error":
            errors.append(row["name"])
        if not ok and status != "error":
            cert_failures.append(row["name"])
        if fmt == "csv":
            vals = [row.get(c) for c in CSV_COLUMNS]
            vals[CSV_COLUMNS.index("certificate_ok")] = str(ok).lower() if status not in ("error", "out-of-range") else ""
            if status in ("error", "out-of-range"):
                vals[CSV_COLUMNS.index("path")] = status
            lines.append(csv_row(vals))
        else:
            lines.append(_dumps(row))
    summary = {
        "rows": len(results),
        "min_margin_log2": min(margins) if margins else None,
        "violations": failures,
        "certificate_failures": cert_failures,
        "errors": errors,
    }
    if fmt == "csv":
        lines.insert(0, csv_row(CSV_COLUMNS))
        lines.append(csv_row(["#summary", len(results), summary["min_margin_log2"], len(failures), len(cert_failures), len(errors)]))
    else:
        lines.append(_dumps({"summary": summary}))
    if failures or cert_failures:
        code = EXIT_VIOLATION
    elif errors:
        code = EXIT_INPUT
    else:
        code = EXIT_OK
    return "\n".join(lines) + "\n", code


def cmd_verify(ns):
    seed = ns.seed if ns.seed is not None else default_seed()
    try:
        manifest = read_manifest(ns.manifest) if ns.manifest else builtin_manifest(ns.extended)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    # validate every source before any analysis runs
    with override_caps(**manifest.caps):
        for e in manifest.entries:
            try:
                build_entry(e, manifest.base_dir)
            except (NilpotwoError, ValueError, OSError) as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_INPUT
    results = run_verify(manifest, seed, ns.jobs, set(ns.corrupt_certificate or ()))
    text, code = format_verify(results, ns.format)
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def oracle_rows(max_order):
    if max_order > CAPS.subgroup_enumeration:
        raise CapExceededError("oracle max order", max_order, CAPS.subgroup_enumeration)
    rows = []
    for name, text in construct.corpus_specs():
        order = construct.expected_order(text)
        if order < 2 or order > max_order:
            continue
        g = construct.build(text)
        cert = thompson_minimizer(g, mode="exhaustive")
        ok, reasons = verify_certificate(cert, g)
        if not ok:
            raise TheoremViolation(f"{name}: minimal witness certificate rejected ({reasons})")
        rows.append({
            "name": name,
            "order": str(order),
            "a": str(cert.info["section"]),
            "witness_order": str(cert.size),
            "class": cert.cls,
            "witnesses": cert.info["witnesses"],
        })
    return rows


def cmd_oracle(ns):
    try:
        rows = oracle_rows(ns.max_order)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TheoremViolation as exc:
        print(f"theorem violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    for r in rows:
        print(_dumps(r))
    print(_dumps({"summary": {"rows": len(rows), "max_class": max((r["class"] for r in rows), default=0)}}))
    return EXIT_OK


def cmd_construct(ns):
    try:
        group = construct.build(ns.spec)
    except (ParseError, ValueError, CapExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = format_perm_spec(group)
    if ns.out:
        try:
            with open(ns.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="nilpotwo", description="Large class-2 nilpotent subgroups of finite permutation groups.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run the main pipeline on one group")
    a.add_argument("group", nargs="?", help="inline 'perm deg=.. gens=..' spec, a group file, or '-' for stdin")
    a.add_argument("--family", help="family spec such as 'symmetric(4)'")
    a.add_argument("--name", help="name used in the report")
    a.add_argument("--seed", type=int, default=None)
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="run the main pipeline over a manifest (default: built-in corpus)")
    v.add_argument("manifest", nargs="?")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--extended", action="store_true", help="add dixon_tower_3 and Alt(9) to the built-in corpus")
    v.add_argument("--out", help="write the report here instead of stdout")
    v.add_argument("--corrupt-certificate", action="append", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exhaustive minimal-witness check on small corpus groups")
    o.add_argument("--max-order", type=int, default=64)
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("construct", help="write the permutation spec of a family")
    c.add_argument("spec")
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)
    return p


def main(argv=None):
    ns = build_parser().parse_args(argv)
    return ns.func(ns)


if __name__ == "__main__":
    sys.exit(main())
