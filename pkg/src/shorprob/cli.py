"""Command-line entry point: ``shorprob {prob,verify,census,simulate,sweep}``.

Exit codes: 0 success, 2 usage error, 3 resource limit, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import closedform, serialize
from .errors import InvalidInput, ResourceLimit, UnsupportedCase
from .numtheory import factorize
from .oracle import census, census_limit, census_many, iter_records, oracle_probabilities
from .simulator import Mode, RangeMode, monte_carlo

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_LIMIT = 3
EXIT_IO = 4


class UsageError(Exception):
    pass


def _parse_n(text: str) -> int:
    try:
        n = int(text.replace("_", ""))
    except ValueError:
        raise UsageError(f"not an integer: {text!r}") from None
    if n < 2:
        raise UsageError(f"N must be >= 2, got {n}")
    return n


def _parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise UsageError(f"expected a range A..B, got {text!r}")
    a, b = _parse_n(lo), _parse_n(hi)
    if a > b:
        raise UsageError(f"invalid range {text}: {a} > {b}")
    return a, b


def _factorization(args):
    if args.factors is None:
        if args.n is None:
            raise UsageError("give N or --factors")
        return factorize(_parse_n(args.n))
    f = serialize.parse_factor_expression(args.factors)
    if args.n is not None and _parse_n(args.n) != f.n:
        raise UsageError(f"--factors multiplies to {f.n}, not {args.n}")
    return f


def _print_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _pretty(doc: dict) -> str:
    lines = [f"N = {doc['n']}"]
    fac = " * ".join(f"{t['p']}^{t['k']}" if t["k"] > 1 else t["p"] for t in doc["factorization"])
    lines.append(f"{'factorization':<20}{fac}")
    for key, label in (
        ("step1", "P(coprime)"),
        ("step2", "P(even | coprime)"),
        ("step3", "P(good | even)"),
        ("overall", "P(success)"),
    ):
        q = doc["probabilities"][key]
        lines.append(f"{label:<20}{q['num']}/{q['den']:<12} ~ {q['approx']}")
    if doc["printed_overall"] is not None:
        q = doc["printed_overall"]
        lines.append(f"{'printed overall':<20}{q['num']}/{q['den']:<12} ~ {q['approx']}")
    lines.append(f"{'failure class':<20}{doc['failure_class']['tag']}")
    for name, v in doc.get("census", {}).items():
        lines.append(f"{name:<20}{v}")
    return "\n".join(lines) + "\n"


def cmd_prob(args) -> int:
    f = _factorization(args)
    doc = serialize.output_document(f, census(f) if args.census else None)
    if args.pretty:
        sys.stdout.write(_pretty(doc))
    else:
        _print_json(doc)
    return EXIT_OK


def cmd_verify(args) -> int:
    a, b = _parse_range(args.range)
    limit = census_limit()
    if b > limit:
        raise ResourceLimit(f"range end {b} exceeds census limit {limit}")
    counts = census_many(range(a, b + 1), workers=args.workers)
    mismatches = []
    printed_diverges = []
    for n, c in counts.items():
        f = factorize(n)
        closed = closedform.overall_probability(f)
        brute = oracle_probabilities(c)
        same = (
            closed.p_coprime == brute.p_coprime
            and closed.p_even_given_coprime == brute.p_even_given_coprime
            and closed.p_overall == brute.p_overall
            and (c.even_order_count == 0 or closed.p_good_given_even == brute.p_good_given_even)
        )
        if not same:
            mismatches.append((n, closed, brute))
        try:
            printed = closedform.printed_overall_probability(f)
        except UnsupportedCase:
            continue
        if printed != closed.p_overall:
            printed_diverges.append((n, printed, closed.p_overall))

    out = sys.stdout
    out.write(f"{len(counts)} values checked, {len(mismatches)} mismatches\n")
    for n, closed, brute in mismatches:
        out.write(
            f"  N={n}: closed form {[str(x) for x in closed.as_tuple()]}"
            f" vs census {[str(x) for x in brute.as_tuple()]}\n"
        )
    if printed_diverges:
        out.write(f"printed overall differs from composed overall for {len(printed_diverges)} values:\n")
        for n, printed, composed in printed_diverges:
            ratio = printed / composed if composed else None
            how = f"= {ratio} x overall" if ratio is not None else f"= {printed}, overall 0"
            out.write(f"  N={n}: printed {printed} {how} ({composed})\n")
    return EXIT_OK if not mismatches else 1


def cmd_census(args) -> int:
    n = _parse_n(args.n)
    limit = census_limit()
    if n > limit:
        raise ResourceLimit(f"N = {n} exceeds census limit {limit}")
    f = factorize(n)
    if args.dump:
        out = sys.stdout
        for rec in iter_records(f):
            out.write(json.dumps(rec.to_json()) + "\n")
        return EXIT_OK
    _print_json(serialize.output_document(f, census(f, workers=args.workers)))
    return EXIT_OK


def cmd_simulate(args) -> int:
    f = factorize(_parse_n(args.n))
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.seed < 0:
        raise UsageError("--seed must be >= 0")
    report = monte_carlo(
        f,
        args.trials,
        args.seed,
        Mode(args.mode),
        RangeMode(args.range),
        workers=args.workers,
        engine=args.engine,
    )
    doc = serialize.report_to_json(report)
    exp = closedform.expected_iterations(f)
    doc["expected_iterations"] = None if exp is None else serialize.rational_to_json(exp)
    _print_json(doc)
    return EXIT_OK


def cmd_sweep(args) -> int:
    a, b = _parse_range(args.range)
    facs = [factorize(n) for n in range(a, b + 1)]
    if args.format == "csv":
        text = serialize.sweep_csv(facs)
    else:
        text = json.dumps([serialize.output_document(f) for f in facs], indent=2) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shorprob",
        description="Exact success probabilities of Shor's algorithm.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prob", help="closed-form probabilities for one N")
    p.add_argument("n", nargs="?", help="the modulus N")
    p.add_argument("--factors", help='known factorization, e.g. "2^2*3*5"')
    p.add_argument("--pretty", action="store_true", help="human-readable table instead of JSON")
    p.add_argument("--census", action="store_true", help="attach brute-force census counts")
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("verify", help="closed forms against the census over a range A..B")
    p.add_argument("range")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("census", help="brute-force counts for one N")
    p.add_argument("n")
    p.add_argument("--dump", action="store_true", help="one JSON record per residue instead")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("simulate", help="seeded Monte-Carlo runs")
    p.add_argument("n")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.PAPER.value)
    p.add_argument("--range", choices=[m.value for m in RangeMode], default=RangeMode.FULL.value)
    p.add_argument("--engine", choices=["run", "bernoulli"], default="run")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="table of probabilities over a range A..B")
    p.add_argument("range")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, InvalidInput, UnsupportedCase) as exc:
        print(f"shorprob: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimit as exc:
        print(f"shorprob: error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except OSError as exc:
        print(f"shorprob: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
