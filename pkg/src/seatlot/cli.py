"""Command-line interface: census ingestion, apportionment, verification.

Subcommands
-----------
apportion     allocate seats to a census file by any implemented method
distribution  exact law of the randomized scheme (small state counts)
simulate      seeded Monte Carlo report for a method
paradox-scan  search seeded corpora for Alabama/population/new-state paradoxes
bound-check   lower-bound diagnostics for a quota vector (or audit published
              original/adjusted quota pairs)
table1        per-decade lower-bound diagnostics over a directory of census
              files

Exit status: 0 on success, 1 when the request is infeasible (diagnostics on
stderr), 2 on usage or parse errors.  Identical invocations with identical
seeds produce byte-identical output.  Exact rationals are printed as
"num/den" next to a fixed-precision decimal; the decimal is never the
source of truth.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from .core import Problem, broadcast_lower_bound, compute_quota, quota_vector
from .divisor import (RULES, divisor_apportion, divisor_with_bounds,
                      hamilton_apportion, resolve_method)
from .errors import (ApportionmentError, CapacityError, InfeasibleError,
                     InputError)
from .lowerbound import (adjusted_quota_from_values, classify,
                         equal_representation_quota, iterate_lower_bound,
                         lower_bound_apportion, lower_bound_distribution,
                         trace_audit, violation_probability_bound)
from .montecarlo import simulate
from .rng import SeededSource
from .stochastic import exact_distribution, stochastic_apportion

METHOD_CHOICES = ("stochastic", "hamilton") + tuple(RULES)
FORMAT_CHOICES = ("table", "csv", "json-lines")


def fraction_str(f: Fraction) -> str:
    f = Fraction(f)
    return f"{f.numerator}/{f.denominator}"


def decimal_str(f: Fraction, places: int = 6) -> str:
    """Fixed-precision decimal rendering (round half away from zero)."""
    f = Fraction(f)
    sign = "-" if f < 0 else ""
    scaled = abs(f) * 10 ** places
    n = math.floor(scaled + Fraction(1, 2))
    whole, frac = divmod(n, 10 ** places)
    return f"{sign}{whole}.{str(frac).zfill(places)}"


def parse_fraction(text: str) -> Fraction:
    """Parse 'num/den' or decimal text to an exact rational."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {text!r}") from exc


def parse_census(source) -> list[tuple[str, int]]:
    """Read (label, population) rows from a CSV path or stream.

    An optional header row is tolerated on the first line only.  Duplicate
    labels and non-positive populations are rejected with their line number.
    File order is preserved.
    """
    close = False
    if isinstance(source, (str, Path)):
        try:
            stream = open(source, "r", encoding="utf-8", newline="")
        except OSError as exc:
            raise InputError(f"cannot read census file: {exc}") from exc
        close = True
    else:
        stream = source
    try:
        rows = []
        seen = set()
        for lineno, row in enumerate(csv.reader(stream), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise InputError(f"line {lineno}: expected 'label,population'")
            label = row[0].strip()
            pop_text = row[1].strip()
            if not pop_text.isdigit():
                if lineno == 1 and not rows:
                    continue  # header row
                raise InputError(
                    f"line {lineno}: population must be a positive integer, "
                    f"got {pop_text!r}")
            population = int(pop_text)
            if population < 1:
                raise InputError(f"line {lineno}: population must be >= 1")
            if not label:
                raise InputError(f"line {lineno}: empty state label")
            if label in seen:
                raise InputError(f"line {lineno}: duplicate state label {label!r}")
            seen.add(label)
            rows.append((label, population))
        if not rows:
            raise InputError("census file contains no states")
        return rows
    finally:
        if close:
            stream.close()


def parse_quota_file(path) -> tuple[list[str], list[Fraction], list]:
    """Read label,quota[,adjusted] rows; adjusted column all-or-none."""
    try:
        stream = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"cannot read quota file: {exc}") from exc
    labels, quotas, adjusted = [], [], []
    with stream:
        for lineno, row in enumerate(csv.reader(stream), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise InputError(f"line {lineno}: expected 'label,quota[,adjusted]'")
            label = row[0].strip()
            try:
                q = parse_fraction(row[1])
            except InputError:
                if lineno == 1 and not labels:
                    continue  # header row
                raise InputError(f"line {lineno}: bad quota value {row[1]!r}")
            labels.append(label)
            quotas.append(q)
            adjusted.append(parse_fraction(row[2]) if len(row) > 2
                            and row[2].strip() else None)
    if not labels:
        raise InputError("quota file contains no states")
    has_adj = [a is not None for a in adjusted]
    if any(has_adj) and not all(has_adj):
        raise InputError("adjusted quota column must be present for all states or none")
    return labels, quotas, (adjusted if all(has_adj) else None)


def read_lower_bound(value: str, labels) -> tuple[int, ...]:
    """Scalar broadcast ('1') or per-state bound file matched by label."""
    if value is None:
        return (0,) * len(labels)
    try:
        return broadcast_lower_bound(int(value), len(labels))
    except ValueError:
        pass
    try:
        stream = open(value, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"cannot read lower-bound file: {exc}") from exc
    by_label = {}
    with stream:
        for lineno, row in enumerate(csv.reader(stream), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2 or not row[1].strip().lstrip("-").isdigit():
                if lineno == 1 and not by_label:
                    continue
                raise InputError(f"line {lineno}: expected 'label,bound'")
            label = row[0].strip()
            if label in by_label:
                raise InputError(f"line {lineno}: duplicate label {label!r}")
            by_label[label] = int(row[1])
    missing = [lab for lab in labels if lab not in by_label]
    extra = [lab for lab in by_label if lab not in labels]
    if missing or extra:
        raise InputError(
            f"lower-bound file mismatch; missing {missing}, unknown {extra}")
    return broadcast_lower_bound([by_label[lab] for lab in labels],
                                 len(labels))


class Emitter:
    """Writes rows in table/csv/json-lines form, deterministically."""

    def __init__(self, fmt: str, out):
        self.fmt = fmt
        self.out = out

    def rows(self, columns, rows, kind="row"):
        if self.fmt == "json-lines":
            for row in rows:
                obj = {"type": kind}
                obj.update(zip(columns, row))
                self._json(obj)
        elif self.fmt == "csv":
            writer = csv.writer(self.out, lineterminator="\n")
            writer.writerow(columns)
            writer.writerows(rows)
        else:
            widths = [max(len(str(c)), *(len(str(r[i])) for r in rows))
                      if rows else len(str(c))
                      for i, c in enumerate(columns)]
            line = "  ".join(str(c).ljust(w) for c, w in zip(columns, widths))
            print(line, file=self.out)
            print("-" * len(line), file=self.out)
            for row in rows:
                print("  ".join(str(v).ljust(w)
                                for v, w in zip(row, widths)), file=self.out)

    def note(self, text: str):
        if self.fmt == "table":
            print(text, file=self.out)

    def record(self, obj: dict):
        """Structured extra record: always emitted in json-lines, summarized
        in table mode, omitted from csv (keeps csv round-trippable)."""
        if self.fmt == "json-lines":
            self._json(obj)
        elif self.fmt == "table":
            print(json.dumps(obj, sort_keys=True, separators=(", ", ": ")),
                  file=self.out)

    def _json(self, obj):
        print(json.dumps(obj, sort_keys=True, separators=(",", ":")),
              file=self.out)


def _problem_from_args(data_path, seats) -> Problem:
    rows = parse_census(data_path)
    return Problem(tuple(lab for lab, _ in rows),
                   tuple(pop for _, pop in rows), seats)


def _apportion_once(prob, method, bounds, src):
    if method == "stochastic":
        if any(bounds):
            return lower_bound_apportion(prob, bounds, src)
        return stochastic_apportion(prob, src)
    if method == "hamilton":
        if any(bounds):
            raise InputError(
                "lower bounds are supported for the stochastic scheme and "
                "the divisor methods, not for hamilton")
        return hamilton_apportion(prob)
    rule = RULES[method]
    if any(bounds):
        return divisor_with_bounds(prob, rule, bounds)
    return divisor_apportion(prob, rule)


def cmd_apportion(args, out) -> int:
    emitter = Emitter(args.format, out)
    reuse = args.reuse_stream
    sizes = set()
    problems = []
    for path in args.data:
        prob = _problem_from_args(path, args.seats)
        problems.append((path, prob))
        sizes.add(prob.size)
    if reuse and len(sizes) > 1:
        raise InputError("--reuse-stream requires equal state counts across files")
    master = SeededSource(args.seed if args.seed is not None else 0)
    for index, (path, prob) in enumerate(problems):
        bounds = read_lower_bound(args.lower_bound, prob.labels)
        if args.method == "stochastic":
            src = SeededSource(master.seed) if reuse else master.child(index)
        else:
            src = None
        alloc = _apportion_once(prob, args.method, bounds, src)
        quota = compute_quota(prob)
        columns = ["label", "population", "quota", "quota_decimal", "seats"]
        rows = [(prob.labels[i], prob.populations[i],
                 fraction_str(quota.quotas[i]),
                 decimal_str(quota.quotas[i]), alloc.seats[i])
                for i in range(prob.size)]
        if len(problems) > 1:
            emitter.note(f"# {path}")
        emitter.rows(columns, rows, kind="seat")
        record = {"type": "audit", "source": str(path),
                  "method": alloc.method, "total_seats": alloc.total}
        if args.method == "stochastic":
            record["master_seed"] = master.seed
            record["stream_seed"] = alloc.seed
            record["permutation"] = list(alloc.audit["permutation"])
            record["u"] = (f"{alloc.audit['u_numerator']}/"
                           f"{alloc.audit['u_denominator']}")
            if "trace" in alloc.audit:
                record["trace"] = alloc.audit["trace"]
        elif alloc.audit:
            cut = alloc.audit.get("cut_priority")
            nxt = alloc.audit.get("next_priority")
            record["cut_priority"] = None if cut is None else fraction_str(cut)
            record["next_priority"] = None if nxt is None else fraction_str(nxt)
            record["squared_priorities"] = alloc.audit.get("squared", False)
        emitter.record(record)
    return 0


def cmd_distribution(args, out) -> int:
    emitter = Emitter(args.format, out)
    prob = _problem_from_args(args.data, args.seats)
    bounds = read_lower_bound(args.lower_bound, prob.labels)
    if any(bounds):
        law = lower_bound_distribution(prob, bounds, limit=args.limit)
    else:
        law = exact_distribution(prob, limit=args.limit)
    columns = ["allocation", "probability", "probability_decimal"]
    rows = [(" ".join(str(a) for a in seats), fraction_str(p), decimal_str(p))
            for seats, p in law.items()]
    emitter.rows(columns, rows, kind="mass")
    means = law.marginal_means()
    emitter.record({
        "type": "marginals",
        "labels": list(prob.labels),
        "expected_seats": [fraction_str(m) for m in means],
    })
    return 0


def cmd_simulate(args, out) -> int:
    emitter = Emitter(args.format, out)
    prob = _problem_from_args(args.data, args.seats)
    bounds = read_lower_bound(args.lower_bound, prob.labels)
    if args.method != "stochastic" and any(bounds):
        raise InputError("simulate supports lower bounds with --method stochastic")
    report = simulate(args.method, prob, args.seed, args.n,
                      lower_bounds=bounds if any(bounds) else None)
    quota = compute_quota(prob)
    columns = ["label", "quota_decimal", "mean_seats", "mean_exact",
               "std_error"]
    rows = []
    for i, label in enumerate(prob.labels):
        mean = report.mean(i)
        rows.append((label, decimal_str(quota.quotas[i]), decimal_str(mean),
                     fraction_str(mean), f"{report.std_error(i):.6e}"))
    emitter.rows(columns, rows, kind="state")
    emitter.record({
        "type": "summary", "method": report.method,
        "master_seed": report.master_seed, "replicates": report.replicates,
        "quota_violations": report.quota_violations,
        "bound_violations": report.bound_violations,
    })
    return 0


def cmd_paradox_scan(args, out) -> int:
    from .divisor import (detect_alabama, detect_new_state_paradox,
                          detect_population_paradox, fair_share_seats)
    from .montecarlo import random_problem

    emitter = Emitter(args.format, out)
    src = SeededSource(args.seed)
    reports = []
    checked = 0
    for _ in range(args.trials):
        if args.kind == "alabama":
            prob = random_problem(
                src, min_states=2, max_states=args.max_states,
                max_population=args.max_population,
                max_seats=1, min_seats=1)
            reports.extend(detect_alabama(
                prob, args.method, range(1, args.max_seats + 1)))
            checked += 1
        elif args.kind == "population":
            prob = random_problem(
                src, min_states=2, max_states=args.max_states,
                max_population=args.max_population,
                max_seats=args.max_seats, min_seats=2)
            grown = tuple(p + src.randbelow(args.max_growth + 1)
                          for p in prob.populations)
            after = Problem(prob.labels, grown, prob.seats)
            reports.extend(detect_population_paradox(prob, after, args.method))
            checked += 1
        else:
            prob = random_problem(
                src, min_states=2, max_states=args.max_states,
                max_population=args.max_population,
                max_seats=args.max_seats, min_seats=2)
            new_pop = 1 + src.randbelow(args.max_population)
            extra = fair_share_seats(new_pop, prob)
            extended = Problem(prob.labels + ("NEW",),
                               prob.populations + (new_pop,),
                               prob.seats + extra)
            reports.extend(detect_new_state_paradox(prob, extended,
                                                    args.method))
            checked += 1
    for rep in reports:
        emitter.record({"type": "paradox", "kind": rep.kind,
                        "method": rep.method, "witness": rep.witness})
    if args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["kind", "method", "witness"])
        for rep in reports:
            writer.writerow([rep.kind, rep.method,
                             json.dumps(rep.witness, sort_keys=True)])
    emitter.note(f"scanned {checked} instances, found {len(reports)} reports")
    if args.format == "json-lines":
        Emitter(args.format, out).record(
            {"type": "summary", "kind": args.kind, "method": args.method,
             "instances": checked, "reports": len(reports)})
    return 0


def cmd_bound_check(args, out) -> int:
    emitter = Emitter(args.format, out)
    labels, quotas, adjusted = parse_quota_file(args.quotas)
    bounds = read_lower_bound(args.lower_bound, labels)
    if adjusted is not None:
        adj = adjusted_quota_from_values(quotas, adjusted)
        vb = violation_probability_bound(adj)
        gap_by_state = dict(vb.gaps)
        columns = ["label", "quota", "adjusted", "lower_quota", "offender",
                   "gap", "gap_decimal"]
        rows = []
        for i, label in enumerate(labels):
            gap = gap_by_state.get(i)
            rows.append((
                label, decimal_str(quotas[i]), decimal_str(adjusted[i]),
                adj.original_floors[i], "yes" if i in adj.offenders else "no",
                fraction_str(gap) if gap is not None else "",
                decimal_str(gap, 3) if gap is not None else ""))
        emitter.rows(columns, rows, kind="state")
        emitter.record({
            "type": "bound", "offenders": list(adj.offenders),
            "verbatim_bound": fraction_str(vb.verbatim),
            "union_bound": fraction_str(vb.union),
            "union_bound_decimal": decimal_str(vb.union, 3),
            "exact_for_single_offender": vb.exact_for_single_offender,
        })
        return 0
    if args.seats is None:
        raise InputError("--seats is required unless the quota file carries "
                         "an adjusted column")
    qv = quota_vector(quotas)
    cls_ = classify(qv, bounds, args.seats)
    if not cls_.surplus:
        raise InputError("no state's quota exceeds its bound; nothing to rescale")
    adj = equal_representation_quota(cls_, qv)
    vb = violation_probability_bound(adj)
    trace = iterate_lower_bound(qv, bounds, args.seats)
    value_by_state = dict(zip(adj.indices, adj.values))
    gap_by_state = dict(vb.gaps)
    columns = ["label", "quota", "class", "rescaled", "offender", "gap_decimal"]
    rows = []
    for i, label in enumerate(labels):
        if i in cls_.small:
            kind = "small"
        elif i in cls_.exact:
            kind = "exact"
        else:
            kind = "surplus"
        value = value_by_state.get(i)
        gap = gap_by_state.get(i)
        rows.append((
            label, decimal_str(quotas[i]), kind,
            decimal_str(value) if value is not None else "",
            "yes" if i in adj.offenders else
            ("no" if value is not None else ""),
            decimal_str(gap, 3) if gap is not None else ""))
    emitter.rows(columns, rows, kind="state")
    emitter.record({
        "type": "bound",
        "scale": fraction_str(adj.scale),
        "scale_decimal": decimal_str(adj.scale),
        "remaining_seats": cls_.remaining_seats,
        "small_states": list(cls_.small),
        "offenders": list(adj.offenders),
        "verbatim_bound": fraction_str(vb.verbatim),
        "union_bound": fraction_str(vb.union),
        "union_bound_decimal": decimal_str(vb.union, 3),
        "exact_for_single_offender": vb.exact_for_single_offender,
        "iteration": trace_audit(trace),
    })
    return 0


def cmd_table1(args, out) -> int:
    emitter = Emitter(args.format, out)
    directory = Path(args.data)
    if not directory.is_dir():
        raise InputError(f"not a directory: {directory}")
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise InputError(f"no census files (*.csv) in {directory}")
    columns = ["year", "small_states", "state", "quota", "rescaled_quota"]
    rows = []
    for path in files:
        prob = _problem_from_args(path, args.seats)
        bounds = read_lower_bound(str(args.lower_bound), prob.labels)
        quota = compute_quota(prob)
        cls_ = classify(quota, bounds, args.seats)
        year = path.stem
        if not cls_.surplus:
            rows.append((year, len(cls_.small), "none", "", ""))
            continue
        adj = equal_representation_quota(cls_, quota)
        value_by_state = dict(zip(adj.indices, adj.values))
        if not adj.offenders:
            rows.append((year, len(cls_.small), "none", "", ""))
        for i in adj.offenders:
            rows.append((year, len(cls_.small), prob.labels[i],
                         decimal_str(quota.quotas[i], 3),
                         decimal_str(value_by_state[i], 3)))
    emitter.rows(columns, rows, kind="offender")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seatlot",
        description="Exact apportionment: fair seat lottery, divisor methods, "
                    "and verification tooling.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=FORMAT_CHOICES, default="table")

    p = sub.add_parser("apportion", help="allocate seats for a census file")
    p.add_argument("--data", required=True, nargs="+",
                   help="census CSV file(s): label,population")
    p.add_argument("--seats", required=True, type=int)
    p.add_argument("--method", required=True, choices=METHOD_CHOICES)
    p.add_argument("--seed", type=int, default=None,
                   help="64-bit seed for the stochastic scheme (default 0)")
    p.add_argument("--lower-bound", default=None,
                   help="scalar minimum per state, or a label,bound CSV file")
    p.add_argument("--reuse-stream", action="store_true",
                   help="replay identical randomness for every data file "
                        "(coupling studies); default derives a fresh child "
                        "stream per file")
    add_format(p)
    p.set_defaults(func=cmd_apportion)

    p = sub.add_parser("distribution",
                       help="exact allocation law of the randomized scheme")
    p.add_argument("--data", required=True)
    p.add_argument("--seats", required=True, type=int)
    p.add_argument("--lower-bound", default=None)
    p.add_argument("--limit", type=int, default=8,
                   help="maximum number of states to enumerate exactly")
    add_format(p)
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("simulate", help="seeded Monte Carlo report")
    p.add_argument("--data", required=True)
    p.add_argument("--seats", required=True, type=int)
    p.add_argument("--method", required=True, choices=METHOD_CHOICES)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--lower-bound", default=None)
    add_format(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("paradox-scan",
                       help="search a seeded corpus for paradoxes")
    p.add_argument("--kind", required=True,
                   choices=("alabama", "population", "new-state"))
    p.add_argument("--method", required=True,
                   choices=("hamilton",) + tuple(RULES))
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-states", type=int, default=5)
    p.add_argument("--max-population", type=int, default=40)
    p.add_argument("--max-seats", type=int, default=25)
    p.add_argument("--max-growth", type=int, default=10)
    add_format(p)
    p.set_defaults(func=cmd_paradox_scan)

    p = sub.add_parser("bound-check",
                       help="lower-bound diagnostics on a quota vector")
    p.add_argument("--quotas", required=True,
                   help="CSV: label,quota[,adjusted]; quotas as decimals or "
                        "num/den")
    p.add_argument("--lower-bound", default="1")
    p.add_argument("--seats", type=int, default=None)
    add_format(p)
    p.set_defaults(func=cmd_bound_check)

    p = sub.add_parser("table1",
                       help="offender diagnostics per census file in a "
                            "directory")
    p.add_argument("--data", required=True, help="directory of census CSVs")
    p.add_argument("--seats", type=int, default=435)
    p.add_argument("--lower-bound", default=1)
    add_format(p)
    p.set_defaults(func=cmd_table1)
    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        if exc.diagnostics:
            print(f"diagnostics: {exc.diagnostics}", file=sys.stderr)
        return 1
    except (InputError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ApportionmentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
