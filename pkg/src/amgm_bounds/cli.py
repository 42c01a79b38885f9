"""Command-line front end.

Exit codes: 0 success, 1 unreadable input or bad flags, 2 input violating an
inequality's hypotheses, 3 internal invariant violation (no report is
written in that case).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import __version__
from .bounds import (
    BoundReport,
    Method,
    cartwright_field_bounds,
    cross_weight_bounds,
    refined_young_bounds_any,
    theorem_bounds,
    variance_comparison,
    weight_change_gap_bounds,
)
from .errors import AmgmError, InvariantViolation, PreconditionError
from .holder import holder_refinement
from .io import (
    ParseError,
    ProblemFile,
    ReportEnvelope,
    content_digest,
    dumps,
    load_function_set,
    load_problem,
)
from .means import DataVector, WeightVector, stable_gap
from .sharpness import Direction, SearchConfig, ratio, search_extremal

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PRECONDITION = 2
EXIT_INTERNAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2; bad flags are exit 1 here
        raise _UsageError(f"{self.prog}: error: {message}")


def _needs_b(pf: ProblemFile, method: Method) -> WeightVector:
    if pf.second_weights is None:
        raise PreconditionError(f"{method.value} needs a second weight vector ('weights_b' / beta column)")
    return pf.second_weights


def compute_bounds(pf: ProblemFile, method: Method) -> BoundReport:
    if method is Method.THEOREM:
        return theorem_bounds(pf.data, pf.weights)
    if method is Method.CARTWRIGHT_FIELD:
        return cartwright_field_bounds(pf.data, pf.weights)
    if method is Method.REFINED_YOUNG:
        if len(pf.data) != 2:
            raise PreconditionError(f"refined-young needs exactly 2 data values, got {len(pf.data)}")
        x, y = pf.data
        return refined_young_bounds_any(x, y, pf.weights.normalized[0])
    b = _needs_b(pf, method)
    if method is Method.WEIGHT_CHANGE:
        return weight_change_gap_bounds(pf.data, pf.weights, b)
    if method is Method.VARIANCE_COMPARISON:
        return variance_comparison(pf.data, pf.weights, b)
    return cross_weight_bounds(pf.data, pf.weights, b)


def run_bounds(pf: ProblemFile, method: Method | str) -> ReportEnvelope:
    method = Method(method)
    return ReportEnvelope("bounds", pf.digest, compute_bounds(pf, method))


def run_holder(path) -> ReportEnvelope:
    s, digest = load_function_set(path)
    return ReportEnvelope("holder", digest, holder_refinement(s))


def run_sharpness(cfg: SearchConfig) -> ReportEnvelope:
    payload = {
        "weights": cfg.weights.values,
        "n_starts": cfg.n_starts,
        "max_iters": cfg.max_iters,
        "step_tolerance": cfg.step_tolerance,
        "direction": cfg.direction.value,
        "seed": cfg.seed,
    }
    return ReportEnvelope("sharpness", content_digest(payload), search_extremal(cfg))


def verify_problem(pf: ProblemFile) -> list[tuple[str, Optional[bool], str]]:
    """Run every applicable inequality on ``pf``; (name, passed or None if skipped, detail)."""
    results: list[tuple[str, Optional[bool], str]] = []

    def check(name: str, fn: Callable[[], tuple[bool, str]]) -> None:
        try:
            ok, detail = fn()
        except PreconditionError as exc:
            results.append((name, None, str(exc)))
        except InvariantViolation as exc:
            results.append((name, False, str(exc)))
        else:
            results.append((name, ok, detail))

    def report_check(method: Method) -> Callable[[], tuple[bool, str]]:
        def fn():
            r = compute_bounds(pf, method)
            return r.holds(), f"{r.lower!r} <= {r.gap!r} <= {r.upper!r}"
        return fn

    def amgm():
        g = stable_gap(pf.data, pf.weights)
        return g >= 0.0, f"gap = {g!r}"

    def interval():
        lo, hi = 1.0 / (1.0 - pf.weights.min), 1.0 / pf.weights.min
        if min(pf.data) == max(pf.data):
            raise PreconditionError("constant data: ratio undefined")
        r = ratio(pf.data, pf.weights)
        tol = 1e-9 * hi
        return lo - tol <= r <= hi + tol, f"{lo!r} <= {r!r} <= {hi!r}"

    def homogeneity():
        base = theorem_bounds(pf.data, pf.weights)
        worst = 0.0
        for t in (0.5, 3.0, 1e-3, 1e3):
            r = theorem_bounds(DataVector(tuple(t * v for v in pf.data)), pf.weights)
            for u, v in ((r.gap, base.gap), (r.lower, base.lower), (r.upper, base.upper)):
                if v != 0.0:
                    worst = max(worst, abs(u / (t * v) - 1.0))
                elif u != 0.0:
                    worst = math.inf
        return worst <= 1e-10, f"max relative deviation {worst:.3g}"

    check("am-gm", amgm)
    for method in (Method.THEOREM, Method.CARTWRIGHT_FIELD, Method.REFINED_YOUNG):
        check(method.value, report_check(method))
    check("ratio-interval", interval)
    check("homogeneity", homogeneity)
    for method in (Method.WEIGHT_CHANGE, Method.VARIANCE_COMPARISON, Method.CROSS_WEIGHT):
        check(method.value, report_check(method))
    return results


def _build_parser() -> _Parser:
    p = _Parser(
        prog="amgm-bounds",
        description="Certified two-sided bounds for the weighted AM-GM gap, a refined Hölder "
        "inequality, and a numerical sharpness search.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", help="certified bounds for the AM-GM gap of a data file")
    b.add_argument("path", help="problem file (JSON or CSV), '-' for stdin")
    b.add_argument("--method", default="theorem", choices=[m.value for m in Method])
    b.add_argument("--format", choices=["json", "csv"])
    b.add_argument("--out")

    h = sub.add_parser("holder", help="refined Hölder sandwich for a function-set file")
    h.add_argument("path")
    h.add_argument("--out")

    s = sub.add_parser("sharpness", help="search for extremal gap/variance ratios")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int, help="dimension (equal weights)")
    g.add_argument("--weights", help="comma-separated weights")
    s.add_argument("--direction", choices=["max", "min"], default="max")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--starts", type=int, default=32)
    s.add_argument("--max-iters", type=int, default=2000)
    s.add_argument("--step-tol", type=float, default=1e-10)
    s.add_argument("--out")

    v = sub.add_parser("verify", help="check every applicable inequality on a data file")
    v.add_argument("path")
    v.add_argument("--format", choices=["json", "csv"])
    v.add_argument("--out")
    return p


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _sharpness_config(args) -> SearchConfig:
    try:
        if args.n is not None:
            if args.n < 2:
                raise _UsageError(f"--n must be >= 2, got {args.n}")
            weights = WeightVector.equal(args.n)
        else:
            weights = WeightVector([float(t) for t in args.weights.split(",")])
        return SearchConfig(
            weights=weights,
            n_starts=args.starts,
            max_iters=args.max_iters,
            step_tolerance=args.step_tol,
            direction=Direction(args.direction),
            seed=args.seed,
        )
    except (AmgmError, ValueError) as exc:
        raise _UsageError(f"invalid search configuration: {exc}") from exc


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "bounds":
            env = run_bounds(load_problem(args.path, args.format), args.method)
            _emit(dumps(env), args.out)
        elif args.command == "holder":
            _emit(dumps(run_holder(args.path)), args.out)
        elif args.command == "sharpness":
            _emit(dumps(run_sharpness(_sharpness_config(args))), args.out)
        else:
            results = verify_problem(load_problem(args.path, args.format))
            lines = []
            for name, ok, detail in results:
                tag = "SKIP" if ok is None else "PASS" if ok else "FAIL"
                lines.append(f"{tag} {name}: {detail}")
            _emit("\n".join(lines) + "\n", args.out)
            if any(ok is False for _, ok, _ in results):
                return EXIT_INTERNAL
    except (_UsageError, ParseError) as exc:
        print(f"amgm-bounds: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"amgm-bounds: internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except AmgmError as exc:
        print(f"amgm-bounds: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
