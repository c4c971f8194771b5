"""Command-line front end.

Subcommands: ``test`` (complete data), ``test-censored``, ``simulate``
(table reproduction or a custom cell), and ``calibrate`` (censoring upper
bound for a target rate). Exit code 0 means the null was accepted, 1 means
it was rejected, and anything >= 2 is an error, so scripts can branch on
the decision directly.
"""

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .censored import censored_test
from .classical import classical_test
from .delta import TestResult, delta_test
from .distributions import calibrate_censoring, censoring_rate, parse_distribution
from .errors import (
    ArgumentError,
    DegenerateDataError,
    ParseError,
    UnifitError,
    UnsupportedCombinationError,
)
from .samples import CensoredSample, Sample
from .simulate import (
    FORMAT_VERSION,
    PowerTable,
    SimulationConfig,
    rejection_rate,
    reproduce_table,
    table_ids,
)

COMPLETE_CLI_METHODS = ("delta", "ks", "frozini", "sherman", "q")


@dataclass
class Report:
    """One test run in machine-readable form; JSON round-trips exactly."""

    format_version: int
    tool_version: str
    method: str
    n: int
    statistic: float
    standardized: float
    critical_value: float
    critical_lower: float | None
    p_value: float
    alpha: float
    decision: str
    tail: str
    standardization: str
    seed: int | None
    reps: int | None
    warnings: list[str]

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls(**json.loads(text))

    def to_text(self) -> str:
        rows = [
            ("method", self.method),
            ("n", self.n),
            ("statistic", f"{self.statistic:.6g}"),
            ("standardized", f"{self.standardized:.6g}"),
            ("critical value", f"{self.critical_value:.6g}"),
            ("p-value", f"{self.p_value:.6g}"),
            ("alpha", f"{self.alpha:g}"),
            ("tail", self.tail),
            ("decision", self.decision),
            ("standardization", self.standardization),
        ]
        if self.critical_lower is not None:
            rows.insert(5, ("lower critical value", f"{self.critical_lower:.6g}"))
        if self.seed is not None:
            rows.append(("calibration seed", self.seed))
            rows.append(("calibration reps", self.reps))
        width = max(len(k) for k, _ in rows)
        lines = [f"{k:<{width}}  {v}" for k, v in rows]
        return "\n".join(lines) + "\n"


def read_dataset(path: str) -> tuple[np.ndarray, np.ndarray | None]:
    """Read a dataset CSV: header ``time`` or ``time,status``, '.' decimals, UTF-8.

    Anything else is rejected with a line-numbered ParseError; permissive
    guessing has no place in a verification tool.
    """
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise ParseError(0, f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(1, "file is empty; expected a 'time[,status]' header") from None
        header = [h.strip().lower() for h in header]
        if header == ["time"]:
            has_status = False
        elif header == ["time", "status"]:
            has_status = True
        else:
            raise ParseError(1, f"expected header 'time' or 'time,status', got {','.join(header)!r}")
        times: list[float] = []
        status: list[int] = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ParseError(lineno, f"expected {len(header)} field(s), got {len(row)}")
            cell = row[0].strip()
            if not cell:
                raise ParseError(lineno, "blank time cell")
            try:
                t = float(cell)
            except ValueError:
                raise ParseError(lineno, f"cannot parse time value {row[0]!r}") from None
            if not np.isfinite(t):
                raise ParseError(lineno, f"time value must be finite, got {row[0]!r}")
            times.append(t)
            if has_status:
                s = row[1].strip()
                if s not in ("0", "1"):
                    raise ParseError(lineno, f"status must be 0 or 1, got {row[1]!r}")
                status.append(int(s))
        if not times:
            raise ParseError(2, "no data rows")
    return np.asarray(times), (np.asarray(status, dtype=np.int64) if has_status else None)


def parse_standardize(text: str | None):
    if text is None or text == "none":
        return None
    if text == "minmax":
        return ("minmax",)
    if text.startswith("range:"):
        parts = text[len("range:"):].split(",")
        if len(parts) != 2:
            raise ArgumentError(f"--standardize range needs 'range:a,b', got {text!r}")
        try:
            a, b = float(parts[0]), float(parts[1])
        except ValueError:
            raise ArgumentError(f"bad range bounds in {text!r}") from None
        if not b > a:
            raise ArgumentError(f"range upper bound must exceed lower bound, got a={a:g}, b={b:g}")
        return ("range", a, b)
    raise ArgumentError(f"--standardize must be 'minmax' or 'range:a,b', got {text!r}")


def apply_standardization(values: np.ndarray, mode) -> tuple[np.ndarray, str]:
    if mode is None:
        return values, "none"
    if mode[0] == "minmax":
        lo, hi = float(values.min()), float(values.max())
        if hi == lo:
            raise DegenerateDataError("min-max scaling is undefined on constant data")
        return (values - lo) / (hi - lo), "minmax"
    _, a, b = mode
    return (values - a) / (b - a), f"range({a:g},{b:g})"


def _warn(messages: list[str]) -> None:
    for msg in messages:
        print(f"warning: {msg}", file=sys.stderr)


def _result_report(
    result: TestResult,
    n: int,
    standardization: str,
    seed: int | None,
    reps: int | None,
    warnings: list[str],
) -> Report:
    fields = (
        result.statistic,
        result.standardized,
        result.critical_value,
        result.p_value,
    )
    if not all(np.isfinite(fields)):
        raise DegenerateDataError(
            "test produced a non-finite value (degenerate sample); no report emitted"
        )
    return Report(
        format_version=FORMAT_VERSION,
        tool_version=__version__,
        method=result.method,
        n=n,
        statistic=float(result.statistic),
        standardized=float(result.standardized),
        critical_value=float(result.critical_value),
        critical_lower=None if result.critical_lower is None else float(result.critical_lower),
        p_value=float(result.p_value),
        alpha=float(result.alpha),
        decision="reject" if result.reject else "accept",
        tail=result.tail,
        standardization=standardization,
        seed=seed,
        reps=reps,
        warnings=warnings,
    )


def _emit(report: Report, out: str | None) -> int:
    sys.stdout.write(report.to_text())
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    return 1 if report.decision == "reject" else 0


def cmd_test(args) -> int:
    times, status = read_dataset(args.file)
    if status is not None:
        raise UnsupportedCombinationError(
            f"{args.file} carries a status column; use 'unifit test-censored' "
            "(the complete-data methods have no censored form)"
        )
    values, standardization = apply_standardization(times, parse_standardize(args.standardize))
    warnings: list[str] = []
    if values.min() < 0.0 or values.max() > 1.0:
        if args.method in ("delta", "ks"):
            warnings.append(
                "data fall outside [0, 1]; the statistic is computed as-is "
                "(consider --standardize)"
            )
            _warn(warnings)
        else:
            raise UnsupportedCombinationError(
                f"the {args.method} statistic needs data in [0, 1]; "
                "standardize first (--standardize minmax or range:a,b)"
            )
    sample = Sample(values)
    if args.method == "delta":
        result = delta_test(sample, args.alpha)
        seed = reps = None
    else:
        result = classical_test(
            sample, args.method, args.alpha, reps=args.reps, seed=args.seed,
            q_tail=args.q_tail,
        )
        seed, reps = args.seed, args.reps
    report = _result_report(result, sample.n, standardization, seed, reps, warnings)
    return _emit(report, args.out)


def cmd_test_censored(args) -> int:
    times, status = read_dataset(args.file)
    if status is None:
        raise UnsupportedCombinationError(
            f"{args.file} has no status column; use 'unifit test' for complete data"
        )
    values, standardization = apply_standardization(times, parse_standardize(args.standardize))
    warnings: list[str] = []
    if values.min() < 0.0 or values.max() > 1.0:
        warnings.append(
            "times fall outside [0, 1]; the statistic is computed as-is "
            "(consider --standardize)"
        )
        _warn(warnings)
    cs = CensoredSample.from_arrays(values, status)
    result = censored_test(
        cs, args.alpha, residual=args.residual, left_limit=(args.km_weights == "left"),
    )
    report = _result_report(result, cs.n, standardization, None, None, warnings)
    return _emit(report, args.out)


def cmd_simulate(args) -> int:
    if args.table:
        table = reproduce_table(
            args.table, reps=args.reps, seed=args.seed, workers=args.workers,
            calibration_reps=args.calibration_reps,
        )
    else:
        if not args.dist or args.n is None or not args.method:
            raise ArgumentError("custom simulation needs --dist, --n and --method")
        config = SimulationConfig(
            dist=parse_distribution(args.dist),
            n=args.n,
            alpha=args.alpha,
            reps=args.reps,
            seed=args.seed,
            censoring_target=args.censoring,
        )
        row = rejection_rate(
            config, args.method, workers=args.workers,
            calibration_reps=args.calibration_reps,
        )
        table = PowerTable(table=None, rows=[row])
    sys.stdout.write(table.to_text())
    if args.out:
        text_path, json_path = table.write(args.out)
        print(f"wrote {text_path} and {json_path}", file=sys.stderr)
    return 0


def cmd_calibrate(args) -> int:
    spec = parse_distribution(args.dist)
    c = calibrate_censoring(spec, args.target)
    attained = censoring_rate(spec, c)
    print(f"c = {c!r}")
    print(f"attained censoring rate = {attained!r} (target {args.target:g})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unifit",
        description="Goodness-of-fit tests for the standard uniform distribution.",
    )
    parser.add_argument("--version", action="version", version=f"unifit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    test = sub.add_parser("test", help="test a complete-data CSV against U(0,1)")
    test.add_argument("file", help="CSV with a 'time' column")
    test.add_argument("--method", choices=COMPLETE_CLI_METHODS, default="delta")
    test.add_argument("--alpha", type=float, default=0.05)
    test.add_argument("--standardize", metavar="MODE", help="minmax or range:a,b")
    test.add_argument("--reps", type=int, default=10_000, help="Monte Carlo calibration size")
    test.add_argument("--seed", type=int, default=0, help="Monte Carlo calibration seed")
    test.add_argument("--q-tail", choices=("equal-tail", "upper"), default="equal-tail")
    test.add_argument("--out", help="write the report as JSON to this path")
    test.set_defaults(func=cmd_test)

    censored = sub.add_parser("test-censored", help="test a right-censored CSV against U(0,1)")
    censored.add_argument("file", help="CSV with 'time,status' columns (status 1=event)")
    censored.add_argument("--alpha", type=float, default=0.05)
    censored.add_argument("--standardize", metavar="MODE", help="minmax or range:a,b")
    censored.add_argument("--residual", choices=("corrected", "literal"), default="corrected")
    censored.add_argument("--km-weights", choices=("left", "right"), default="left",
                          help="evaluate censoring survival at Y- (left) or Y (right)")
    censored.add_argument("--out", help="write the report as JSON to this path")
    censored.set_defaults(func=cmd_test_censored)

    simulate = sub.add_parser("simulate", help="reproduce a published table or run a custom cell")
    simulate.add_argument("--table", help=f"one of {', '.join(table_ids())}")
    simulate.add_argument("--dist", help="custom cell distribution, e.g. uniform:0,1.2")
    simulate.add_argument("--n", type=int, help="custom cell sample size")
    simulate.add_argument("--method", help="delta, ks, frozini, sherman, q or censored")
    simulate.add_argument("--alpha", type=float, default=0.05)
    simulate.add_argument("--censoring", type=float, help="target censoring rate in (0,1)")
    simulate.add_argument("--reps", type=int, default=10_000)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--workers", type=int, default=None)
    simulate.add_argument("--calibration-reps", type=int, default=100_000)
    simulate.add_argument("--out", help="path prefix for .txt and .json outputs")
    simulate.set_defaults(func=cmd_simulate)

    calibrate = sub.add_parser("calibrate", help="solve for the censoring upper bound")
    calibrate.add_argument("--dist", required=True, help="e.g. uniform:0,1 or exp:1")
    calibrate.add_argument("--target", type=float, required=True, help="censoring rate in (0,1)")
    calibrate.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnifitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
