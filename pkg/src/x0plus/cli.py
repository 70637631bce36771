"""Command-line interface.

Commands: genus, count, analyze, sweep, verify-paper, cache.
Exit codes: 0 success, 1 verification contradiction, 2 usage error.
Progress and diagnostics go to stderr; data goes to stdout.
"""

import argparse
import csv
import io
import json
import sys

from . import arith, classify, modsym, pointcount
from .cache import OperatorCache
from .modsym import AtkinLehnerKey


def _parse_keys(text, level):
    keys = set()
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        q = int(tok)
        AtkinLehnerKey.validate(q, level)
        keys.add(q)
    if not keys:
        raise ValueError("empty key list")
    return keys


def _parse_range(text):
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
    else:
        lo = hi = int(text)
    if lo > hi:
        raise ValueError(f"empty range {text}")
    return lo, hi


def _parse_budget(text):
    primes = []
    for tok in text.split(","):
        p = int(tok.strip())
        if p < 2 or any(p % r == 0 for r in range(2, p)):
            raise ValueError(f"{p} is not prime")
        primes.append(p)
    return tuple(primes)


def _emit(payload, fmt, text_lines):
    if fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _cached_space(level, cache_dir):
    space = modsym.build_space(level)
    store = OperatorCache(cache_dir)
    store.load_into(space)
    return space, store


def cmd_genus(args):
    level = arith.as_level(args.N)
    if args.keys:
        keys = _parse_keys(args.keys, level)
        space, store = _cached_space(level, args.cache_dir)
        g = modsym.quotient_genus(space, keys)
        store.store(space)
        label = f"X0({level.N})/<{','.join(f'w{q}' for q in sorted(keys))}>"
    else:
        g = arith.genus_x0(level)
        label = f"X0({level.N})"
    _emit({"N": level.N, "genus": g}, args.format, [f"{label}: genus {g}"])
    return 0


def cmd_count(args):
    level = arith.as_level(args.N)
    keys = _parse_keys(args.keys, level) if args.keys else set()
    req = pointcount.make_request(level.N, keys, args.p, args.r)
    space, store = _cached_space(level, args.cache_dir)
    n = pointcount.count_points(req, space)
    store.store(space)
    q = args.p**args.r
    _emit(
        {"N": level.N, "keys": sorted(keys), "p": args.p, "r": args.r, "count": n},
        args.format,
        [f"#C(F_{q}) = {n}"],
    )
    return 0


def _report_text(rep):
    lines = [
        f"N = {rep.level.N}: genus(X0+) = {rep.genus_plus}",
        f"  gonality over Q: {_interval_text(rep.gonq)}",
        f"  gonality over C: {_interval_text(rep.gonc)}",
        f"  verdict: {rep.verdict}",
    ]
    for ev in rep.evidence:
        d = ev.as_dict()
        lines.append(
            f"  evidence: {d['kind']} -> gon_{ev.field_tag} {ev.side} {ev.bound} {d['params']}"
        )
    for cert in rep.certificates_used:
        lines.append(f"  certificate: {cert.claim} ({cert.source})")
    return lines


def _interval_text(interval):
    if interval.pinned:
        return f"= {interval.lower}"
    hi = "?" if interval.upper is None else interval.upper
    return f"in [{interval.lower}, {hi}]"


def cmd_analyze(args):
    level = arith.as_level(args.N)
    space, store = _cached_space(level, args.cache_dir)
    rep = classify.analyze_level(
        level.N,
        use_certificates=not args.no_certificates,
        prime_budget=args.prime_budget,
        space=space,
    )
    store.store(space)
    _emit(rep.as_dict(), args.format, _report_text(rep))
    return 0


def _sweep_worker(task):
    n, use_certs, budget, cache_dir = task
    space = modsym.build_space(n)
    store = OperatorCache(cache_dir)
    store.load_into(space)
    rep = classify.analyze_level(
        n, use_certificates=use_certs, prime_budget=budget, space=space
    )
    store.store(space)
    return rep


def _run_levels(levels, args):
    tasks = [
        (n, not args.no_certificates, args.prime_budget, args.cache_dir)
        for n in levels
    ]
    if args.jobs > 1:
        import concurrent.futures

        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for rep in pool.map(_sweep_worker, tasks, chunksize=4):
                print(f"level {rep.level.N} done", file=sys.stderr)
                yield rep
    else:
        for task in tasks:
            rep = _sweep_worker(task)
            print(f"level {rep.level.N} done", file=sys.stderr)
            yield rep


def cmd_sweep(args):
    lo, hi = args.range
    reports = list(_run_levels(range(lo, hi + 1), args))
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            [
                "N",
                "genus_plus",
                "gonQ_lower",
                "gonQ_upper",
                "gonC_lower",
                "gonC_upper",
                "verdict",
            ]
        )
        for rep in reports:
            writer.writerow(
                [
                    rep.level.N,
                    rep.genus_plus,
                    rep.gonq.lower,
                    rep.gonq.upper,
                    rep.gonc.lower,
                    rep.gonc.upper,
                    rep.verdict,
                ]
            )
        sys.stdout.write(buf.getvalue())
    elif args.format == "json":
        print(json.dumps([rep.as_dict() for rep in reports], indent=2, sort_keys=True))
    else:
        for rep in reports:
            for line in _report_text(rep):
                print(line)
    counts = {}
    for rep in reports:
        counts[rep.verdict] = counts.get(rep.verdict, 0) + 1
    print(f"sweep summary: {counts}", file=sys.stderr)
    return 0


def cmd_verify_paper(args):
    lo, hi = args.range
    if not (2 <= lo <= hi <= 5000):
        raise ValueError("range must lie within [2, 5000]")
    facts = classify.embedded_facts()
    diff = classify.DiffReport(lo, hi)
    for rep in _run_levels(range(lo, hi + 1), args):
        n = rep.level.N
        if n in facts.anomalies:
            diff.anomalies.append(n)
        elif rep.verdict == classify.VERDICT_MATCH:
            diff.exact_match.append(n)
        elif rep.verdict == classify.VERDICT_INCOMPLETE:
            diff.consistent.append(n)
        else:
            diff.contradiction.append(n)
    payload = diff.as_dict()
    _emit(
        payload,
        args.format,
        [
            f"levels {lo}..{hi}",
            f"exact match: {len(diff.exact_match)}",
            f"consistent (interval not pinned): {sorted(diff.consistent)}",
            f"contradiction: {sorted(diff.contradiction)}",
            f"recorded anomalies: {sorted(diff.anomalies)}",
        ],
    )
    return 0 if diff.clean else 1


def cmd_cache(args):
    store = OperatorCache(args.cache_dir)
    if args.action == "inspect":
        records = store.inspect()
        _emit(
            {"directory": store.directory, "entries": records},
            args.format,
            [f"cache directory: {store.directory}"]
            + [
                f"  {r['file']}: {r['status']}"
                + (f" level {r['level']} ops {','.join(r['operators'])}" if r["status"] == "ok" else "")
                for r in records
            ],
        )
    else:
        removed = store.clear()
        _emit(
            {"directory": store.directory, "removed": removed},
            args.format,
            [f"removed {removed} cache files from {store.directory}"],
        )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="x0plus",
        description="Genus, point counts and gonality bounds for Atkin-Lehner "
        "quotients of X0(N).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, budget=False, certs=False, jobs=False):
        p.add_argument("--format", choices=("json", "csv", "text"), default="text")
        p.add_argument("--cache-dir", default=None)
        if budget:
            p.add_argument(
                "--prime-budget",
                type=_parse_budget,
                default=None,
                help="comma-separated primes for point-count lower bounds",
            )
        if certs:
            p.add_argument("--no-certificates", action="store_true")
        if jobs:
            p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("genus", help="genus of X0(N) or an Atkin-Lehner quotient")
    p.add_argument("N", type=int)
    p.add_argument("--keys", default=None)
    common(p)
    p.set_defaults(func=cmd_genus)

    p = sub.add_parser("count", help="point count over F_{p^r}")
    p.add_argument("N", type=int)
    p.add_argument("--keys", default=None)
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-r", type=int, default=1, choices=(1, 2))
    common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("analyze", help="full gonality report for one level")
    p.add_argument("N", type=int)
    common(p, budget=True, certs=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="reports for a level range A..B")
    p.add_argument("range", type=_parse_range)
    common(p, budget=True, certs=True, jobs=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "verify-paper", help="compare a level range against the published lists"
    )
    p.add_argument("range", type=_parse_range)
    common(p, budget=True, certs=True, jobs=True)
    p.set_defaults(func=cmd_verify_paper)

    p = sub.add_parser("cache", help="inspect or clear the operator cache")
    p.add_argument("action", choices=("inspect", "clear"))
    common(p)
    p.set_defaults(func=cmd_cache)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except (ValueError, pointcount.BadReduction) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
