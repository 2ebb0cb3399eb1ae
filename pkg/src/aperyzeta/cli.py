"""Command line entry point: ``aperyzeta <command> ...``.

Exit status is 0 when every check passes, 1 when a mathematical check
fails and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import discover, hypergeom, identities, series
from .exceptions import AperyZetaError, PrecisionError
from .precision import GaussianRational, clear_caches, parse_decimal, zeta_reference

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunReport:
    command: str
    parameters: dict = field(default_factory=dict)
    outcome: str = "pass"
    wall_time_seconds: float = 0.0
    term_count: int = 0
    digits: int = 0
    value: str | None = None
    detail: dict = field(default_factory=dict)

    CSV_FIELDS = (
        "command",
        "parameters",
        "outcome",
        "wall_time_seconds",
        "term_count",
        "digits",
        "value",
        "detail",
    )

    @property
    def passed(self) -> bool:
        return self.outcome != "fail"

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "RunReport":
        return cls(**{k: data[k] for k in cls.CSV_FIELDS if k in data})

    def to_csv_row(self) -> dict:
        row = self.to_json()
        row["parameters"] = json.dumps(self.parameters, sort_keys=True)
        row["detail"] = json.dumps(self.detail, sort_keys=True, default=str)
        row["value"] = "" if self.value is None else self.value
        row["wall_time_seconds"] = repr(self.wall_time_seconds)
        return row

    @classmethod
    def from_csv_row(cls, row: dict) -> "RunReport":
        return cls(
            command=row["command"],
            parameters=json.loads(row["parameters"]),
            outcome=row["outcome"],
            wall_time_seconds=float(row["wall_time_seconds"]),
            term_count=int(row["term_count"]),
            digits=int(row["digits"]),
            value=row["value"] or None,
            detail=json.loads(row["detail"]),
        )


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=RunReport.CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.to_csv_row())
    return buf.getvalue()


def reports_from_csv(text: str) -> list[RunReport]:
    return [RunReport.from_csv_row(row) for row in csv.DictReader(io.StringIO(text))]


def _emit(reports, fmt: str, out) -> None:
    if fmt == "json":
        payload = [r.to_json() for r in reports]
        out.write(json.dumps(payload if len(payload) != 1 else payload[0], indent=2, default=str) + "\n")
    elif fmt == "csv":
        out.write(reports_to_csv(reports))


def _status(reports) -> int:
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return v


def _number(text: str):
    """'1/2', '0.5', '0.5+0.5j' -> exact Fraction or GaussianRational."""
    text = text.strip()
    try:
        if "/" in text:
            return Fraction(text)
        return parse_decimal(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        c = complex(text.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    return GaussianRational(Fraction(repr(c.real)), Fraction(repr(c.imag)))


# ---------------------------------------------------------------------------
# commands


def cmd_zeta(args, out) -> list[RunReport]:
    t0 = time.perf_counter()
    try:
        value, terms = series.zeta(args.target, args.digits, args.method, args.n)
    except ValueError as exc:
        raise UsageError(str(exc))
    elapsed = time.perf_counter() - t0
    text = value.to_decimal(args.digits)
    record = {
        "method": args.method,
        "digits": args.digits,
        "terms": terms,
        "value": text,
        "errBound": value.err_string(),
    }
    report = RunReport(
        "zeta",
        {"target": args.target, "method": args.method, "n": args.n},
        "value",
        elapsed,
        terms,
        args.digits,
        text,
        {"errBound": record["errBound"]},
    )
    if args.json:
        _emit([report], "json", out)
    else:
        out.write(text + "\n")
        out.write(json.dumps(record) + "\n")
    return [report]


def _verify_one(job):
    name, n = job
    return identities.verify(name, n)


def cmd_verify(args, out) -> list[RunReport]:
    names = identities.IDENTITIES if args.identity == "all" else (args.identity,)
    jobs = [(name, n) for name in names for n in range(args.n_min, args.n_max + 1)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_verify_one, jobs, chunksize=8))
    else:
        results = [_verify_one(j) for j in jobs]
    reports = [
        RunReport(
            "verify",
            {"identity": r.identity, "n": r.n},
            "pass" if r.passed else "fail",
            r.seconds,
            r.n,
            0,
            r.value,
            {"expected": r.expected, **r.detail},
        )
        for r in results
    ]
    if args.report == "text":
        for name in names:
            rs = [r for r in reports if r.parameters["identity"] == name]
            ok = sum(r.passed for r in rs)
            secs = sum(r.wall_time_seconds for r in rs)
            out.write(f"{name}: n={args.n_min}..{args.n_max}  {ok}/{len(rs)} passed  ({secs:.2f}s)\n")
            for r in rs:
                if not r.passed:
                    out.write(f"  FAIL n={r.parameters['n']}: got {r.value}, expected {r.detail['expected']}\n")
    else:
        _emit(reports, args.report, out)
    return reports


def cmd_hyper(args, out) -> list[RunReport]:
    d, n = args.digits, args.n
    t0 = time.perf_counter()
    detail: dict = {}
    if args.eval == "cor3":
        v = hypergeom.pfq_numeric(hypergeom.cor3_spec(), d)
        exact = hypergeom.reflection_corollary3(check_digits=min(d, 30))
        ok = abs(v.re.value - exact) + abs(v.im.value) < Fraction(1, 10**d)
        value, detail["exact"] = v.re.to_decimal(d), str(exact)
        terms = 0
    elif args.eval == "cor2":
        v = hypergeom.pfq_numeric(hypergeom.cor2_spec(n), d)
        exact = hypergeom.cor2_rhs(n)
        ok = abs(v.re.value - exact) + abs(v.im.value) < Fraction(1, 10 ** (d - 2))
        value, detail["exact"] = v.re.to_decimal(d), str(exact)
        terms = 0
    elif args.eval == "eq61":
        v = hypergeom.pfq_terminating(hypergeom.eq61_spec(n))
        exact = hypergeom.eq61_value(n)
        ok = v == exact
        value, detail["exact"] = str(v), str(exact)
        terms = n
    else:
        try:
            system = hypergeom.gosper_solve(n)
            ok = system.ok
            value = str(system.s)
            detail.update({k: bool(c) for k, c in system.checks.items()})
            detail["T0"] = str(system.T0())
        except AperyZetaError as exc:
            ok, value = False, str(exc)
        terms = 3 * n - 3
    report = RunReport(
        "hyper",
        {"eval": args.eval, "n": n},
        "pass" if ok else "fail",
        time.perf_counter() - t0,
        terms,
        d,
        value,
        detail,
    )
    if args.json:
        _emit([report], "json", out)
    else:
        out.write(f"{args.eval}: {value}\n")
        for k, v in detail.items():
            out.write(f"  {k}: {v}\n")
        out.write(f"  {'pass' if ok else 'FAIL'}\n")
    return [report]


def cmd_discover(args, out) -> list[RunReport]:
    t0 = time.perf_counter()
    if args.target == "zeta":
        try:
            row = discover.rediscover_row(args.n, args.digits, args.s, args.max_height)
        except PrecisionError as exc:
            raise UsageError(str(exc))
        result = row.result
        payload = row.to_json()
        ok = row.found
        if row.table is not None:
            lines = [f"(2/5) {row.basis.target} ="] + [f"  {str(c):>10}  {label}" for label, c in row.table]
        elif result:
            lines = ["relation without the target: " + " ".join(map(str, result.coefficients))]
        else:
            lines = [f"no relation; height >= 10^{result.log10_bound:.1f}"]
    else:
        try:
            result = discover.negative_search(args.m, args.digits, args.max_height)
        except PrecisionError as exc:
            raise UsageError(str(exc))
        payload = result.to_json()
        ok = True
        if result:
            lines = [f"relation {result.coefficients} on {result.basis_labels}"]
        else:
            lines = [f"no relation with height <= {args.max_height}; any relation has height >= 10^{result.log10_bound:.1f}"]
    if args.ledger:
        discover.append_ledger(args.ledger, result if args.target != "zeta" else row, command="discover")
    report = RunReport(
        "discover",
        {"target": args.target, "n": args.n, "s": args.s, "m": args.m, "max_height": args.max_height},
        "pass" if ok else "fail",
        time.perf_counter() - t0,
        len(payload.get("basis", [])),
        args.digits,
        None,
        payload,
    )
    if args.json:
        _emit([report], "json", out)
    else:
        out.write("\n".join(lines) + "\n")
    return [report]


def cmd_gf(args, out) -> list[RunReport]:
    d = args.digits
    t0 = time.perf_counter()
    z = args.z
    try:
        if args.koecher:
            rhs, lhs = series.koecher_gf_rhs(z, d), series.koecher_gf_lhs(z, d)
        else:
            rhs, lhs = series.gf_rhs(z, d), series.gf_lhs(z, d)
    except ValueError as exc:
        raise UsageError(str(exc))
    diff = abs(rhs.re.value - lhs.re.value) + abs(rhs.im.value - lhs.im.value)
    ok = diff < Fraction(1, 10 ** (d - 2))
    detail = {
        "rhs": f"{rhs.re.to_decimal(d)} {rhs.im.to_decimal(d)}i",
        "lhs": f"{lhs.re.to_decimal(d)} {lhs.im.to_decimal(d)}i",
        "difference": float(diff),
    }
    report = RunReport(
        "gf",
        {"z": str(z), "koecher": args.koecher},
        "pass" if ok else "fail",
        time.perf_counter() - t0,
        series.TruncationPlan.for_digits(d).N,
        d,
        detail["rhs"],
        detail,
    )
    if args.json:
        _emit([report], "json", out)
    else:
        out.write(f"rhs  {detail['rhs']}\nlhs  {detail['lhs']}\n|diff| {diff and float(diff):.3e}  {'pass' if ok else 'FAIL'}\n")
    return [report]


BENCH_METHODS = {"fast3": 3, "fast5": 5, "fast7": 7}


def _time_min(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cmd_bench(args, out) -> list[RunReport]:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in BENCH_METHODS and m != "reference":
            raise UsageError(f"unknown method {m!r}")
    reports = []
    for d in args.digits:
        plan = series.TruncationPlan.for_digits(d)
        for m in methods:
            if m == "reference":
                target = args.reference_target

                def run(d=d, target=target):
                    clear_caches()
                    zeta_reference(target, d)

                terms = 0
            else:
                target = BENCH_METHODS[m]

                def run(d=d, target=target):
                    series.zeta_fast(target, d)

                terms = plan.N
            secs = _time_min(run, args.repeat)
            reports.append(RunReport("bench", {"method": m, "target": target}, "value", secs, terms, d, f"{secs:.6f}"))
    dpt = series.measure_digits_per_term(3, max(args.digits))
    summary = {"digits_per_term_fast3": round(dpt, 4)}
    if args.json:
        payload = {"rows": [r.to_json() for r in reports], **summary}
        out.write(json.dumps(payload, indent=2) + "\n")
    elif args.csv:
        out.write(reports_to_csv(reports))
    else:
        out.write(f"{'method':<10} {'target':>6} {'digits':>6} {'terms':>6} {'seconds':>10}\n")
        for r in reports:
            out.write(
                f"{r.parameters['method']:<10} {r.parameters['target']:>6} {r.digits:>6} {r.term_count:>6} {r.wall_time_seconds:>10.5f}\n"
            )
        out.write(f"digits per term (fast3, {max(args.digits)} digits): {dpt:.4f}\n")
    return reports


# ---------------------------------------------------------------------------


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aperyzeta", description="Apery-like zeta series, identities and relation search.")
    sub = p.add_subparsers(dest="command", required=True)

    z = sub.add_parser("zeta", help="evaluate an odd zeta value")
    z.add_argument("--target", type=int, required=True)
    z.add_argument("--digits", type=_positive, required=True)
    z.add_argument("--method", choices=("fast", "corollary1", "koecher", "reference"), default="fast")
    z.add_argument("--n", type=_nonneg, default=None)
    z.add_argument("--json", action="store_true")
    z.set_defaults(func=cmd_zeta)

    v = sub.add_parser("verify", help="check a finite identity exactly for a range of n")
    v.add_argument("--identity", choices=identities.IDENTITIES + ("all",), required=True)
    v.add_argument("--n-min", type=_positive, default=1)
    v.add_argument("--n-max", type=_positive, required=True)
    v.add_argument("--report", choices=("text", "json", "csv"), default="text")
    v.add_argument("--jobs", type=_positive, default=1)
    v.set_defaults(func=cmd_verify)

    h = sub.add_parser("hyper", help="hypergeometric evaluations and Gosper certificates")
    h.add_argument("--eval", choices=("cor2", "cor3", "eq61", "gosper"), required=True)
    h.add_argument("--n", type=_positive, default=1)
    h.add_argument("--digits", type=_positive, default=30)
    h.add_argument("--json", action="store_true")
    h.set_defaults(func=cmd_hyper)

    dsc = sub.add_parser("discover", help="integer-relation search over lambda sums")
    dsc.add_argument("--target", choices=("zeta", "negative"), default="zeta")
    dsc.add_argument("--n", type=_nonneg, default=1)
    dsc.add_argument("--m", type=_positive, default=5, help="zeta argument for --target negative")
    dsc.add_argument("--digits", type=_positive, default=None)
    dsc.add_argument("--s", type=int, choices=(2, 4), default=4)
    dsc.add_argument("--max-height", type=_positive, default=None)
    dsc.add_argument("--json", action="store_true")
    dsc.add_argument("--ledger", default=None, help="append the result to this NDJSON file")
    dsc.set_defaults(func=cmd_discover)

    g = sub.add_parser("gf", help="compare both sides of a generating function at z")
    g.add_argument("--z", type=_number, required=True)
    g.add_argument("--digits", type=_positive, default=50)
    g.add_argument("--koecher", action="store_true")
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=cmd_gf)

    b = sub.add_parser("bench", help="time the fast procedures against the reference")
    b.add_argument("--digits", type=_positive, nargs="+", default=[200, 300])
    b.add_argument("--methods", default="fast3,fast5,fast7,reference")
    b.add_argument("--reference-target", type=int, choices=(3, 5, 7), default=3)
    b.add_argument("--repeat", type=_positive, default=3)
    fmt = b.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    b.set_defaults(func=cmd_bench)
    return p


def _fill_defaults(args) -> None:
    if args.command == "discover":
        if args.digits is None:
            if args.target == "zeta":
                args.digits = 60 + 20 * len(discover.discovery_basis(args.n, args.s).entries)
            else:
                args.digits = 100
        if args.max_height is None:
            args.max_height = 10**10 if args.target == "negative" else 10**8


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _fill_defaults(args)
    try:
        reports = args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"aperyzeta {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except AperyZetaError as exc:
        sys.stderr.write(f"aperyzeta {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL
    return _status(reports)


if __name__ == "__main__":
    sys.exit(main())
