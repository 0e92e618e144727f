"""Command line front end.

Four subcommands emit plot-ready CSV (12 significant digits, comma
separated, comments prefixed with '#'):

    deriv              tabulate one fractional operator applied to a function
    solve-example      run the model-problem solver and report errors
    check-equivalence  compare the stationarity and canonical residual routes
    converge           refinement study across a list of grid sizes

Exit codes: 0 success / thresholds met, 1 threshold failure, 2 usage or
parameter error, 3 numeric domain error.
"""

from __future__ import annotations

import argparse
import re
import sys
from typing import Callable

import numpy as np

from .fracnum import (
    DomainError,
    Grid,
    OperatorKind,
    SampledFn,
    apply,
    build_operator,
)
from .solver import (
    ConvergenceError,
    ExampleProblem,
    convergence_study,
    equivalence_on_trial,
    exact_solution,
    solve,
)

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3

_EQUIV_GAP_LIMIT = 1e-10


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> str:
    return "%.12g" % x


# ---------------------------------------------------------------------------
# function grammar: literals, t, pow(t,c), sin(t), cos(t), exp(t),
# sums and scalar multiples
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)"
    r"|(?P<sym>[+\-*(),]))"
)

_UNARY = {"sin": np.sin, "cos": np.cos, "exp": np.exp}


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise CliError(EXIT_USAGE, f"cannot parse function at ...{text[pos:]!r}")
        pos = m.end()
        for kind in ("num", "name", "sym"):
            val = m.group(kind)
            if val is not None:
                tokens.append((kind, val))
                break
    tokens.append(("end", ""))
    return tokens


class _FnParser:
    """Recursive descent over the tiny grammar; returns a vectorized callable."""

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None, value=None):
        k, v = self.tokens[self.pos]
        if (kind is not None and k != kind) or (value is not None and v != value):
            raise CliError(EXIT_USAGE, f"unexpected token {v!r} in function expression")
        self.pos += 1
        return v

    def parse(self) -> Callable[[np.ndarray], np.ndarray]:
        terms = [self.term(self.sign())]
        while self.peek()[1] in ("+", "-"):
            terms.append(self.term(self.sign()))
        self.take("end")

        def evaluate(t: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float)
            out = np.zeros_like(t)
            for coef, basis in terms:
                out = out + coef * basis(t)
            return out

        return evaluate

    def sign(self) -> float:
        s = 1.0
        while self.peek()[1] in ("+", "-"):
            if self.take("sym") == "-":
                s = -s
        return s

    def term(self, sign: float):
        coef = sign
        basis = None
        while True:
            k, v = self.peek()
            if k == "num":
                coef *= float(self.take("num"))
            elif k == "name":
                if basis is not None:
                    raise CliError(
                        EXIT_USAGE, "products of two non-constant factors are not supported"
                    )
                basis = self.atom()
            else:
                raise CliError(EXIT_USAGE, f"expected a factor, found {v!r}")
            if self.peek()[1] == "*":
                self.take("sym", "*")
                continue
            break
        if basis is None:
            c = coef
            return c, lambda t: np.ones_like(t)
        return coef, basis

    def atom(self):
        name = self.take("name")
        if name == "t":
            return lambda t: t
        if name in _UNARY:
            fn = _UNARY[name]
            self.take("sym", "(")
            self.take("name", "t")
            self.take("sym", ")")
            return lambda t: fn(t)
        if name == "pow":
            self.take("sym", "(")
            self.take("name", "t")
            self.take("sym", ",")
            s = 1.0
            while self.peek()[1] in ("+", "-"):
                if self.take("sym") == "-":
                    s = -s
            c = s * float(self.take("num"))
            self.take("sym", ")")
            return lambda t: t**c
        raise CliError(EXIT_USAGE, f"unknown function {name!r} (use t, pow, sin, cos, exp)")


def parse_function(text: str) -> Callable[[np.ndarray], np.ndarray]:
    return _FnParser(text).parse()


def _parse_interval(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise CliError(EXIT_USAGE, f"interval must look like a:b, got {text!r}")
    try:
        a, b = float(parts[0]), float(parts[1])
    except ValueError:
        raise CliError(EXIT_USAGE, f"interval endpoints must be numbers, got {text!r}")
    if not b > a:
        raise CliError(EXIT_USAGE, f"need a < b, got {text!r}")
    return a, b


def _order_in_unit(name: str, value: float) -> float:
    if not (0.0 < value < 1.0):
        raise CliError(EXIT_USAGE, f"{name} must lie in (0, 1), got {value:g}")
    return value


def _grid_n(value: int, minimum: int) -> int:
    if value < minimum:
        raise CliError(EXIT_USAGE, f"need n >= {minimum}, got {value}")
    return value


def _emit(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _run_deriv(args) -> int:
    kind = OperatorKind(args.kind)
    _order_in_unit("--alpha", args.alpha)
    n = _grid_n(args.n, 2)
    a, b = _parse_interval(args.interval)
    fn = parse_function(args.fn)

    grid = Grid(a, b, n)
    with np.errstate(all="ignore"):
        values = np.asarray(fn(grid.nodes), dtype=float)
    if not np.isfinite(values).all():
        i = int(np.flatnonzero(~np.isfinite(values))[0])
        raise CliError(
            EXIT_DOMAIN, f"function is not finite at node t = {grid.nodes[i]:g}"
        )
    op = build_operator(kind, args.alpha, grid)
    result = apply(op, SampledFn(grid, values))

    lines = ["t,value"]
    for t, y in zip(grid.nodes, result.values):
        lines.append(f"{_fmt(t)},{_fmt(y) if np.isfinite(y) else ''}")
    _emit(lines, args.out)
    return EXIT_OK


def _example_problem(args, min_n: int) -> ExampleProblem:
    _order_in_unit("--alpha", args.alpha)
    if not (args.alpha < args.beta <= 1.0):
        raise CliError(
            EXIT_USAGE,
            f"need alpha < beta <= 1, got alpha = {args.alpha:g}, beta = {args.beta:g}",
        )
    n = _grid_n(args.n, min_n)
    return ExampleProblem(args.alpha, args.beta, Grid(0.0, 1.0, n))


def _run_solve_example(args) -> int:
    problem = _example_problem(args, 8)
    report = solve(problem)
    lines = ["t,q_numeric,q_exact,abs_err"]
    for t, qn, qe in zip(
        problem.grid.nodes, report.q_numeric.values, report.q_exact.values
    ):
        lines.append(f"{_fmt(t)},{_fmt(qn)},{_fmt(qe)},{_fmt(abs(qn - qe))}")
    lines.append(
        f"# max_err={_fmt(report.max_err)} l2_err={_fmt(report.l2_err)} "
        f"el_max={_fmt(report.el_max)} hamilton_max={_fmt(report.hamilton_max)}"
    )
    _emit(lines, args.out)
    return EXIT_OK if report.l2_err < args.l2_threshold else EXIT_THRESHOLD


def _trial_values(args, grid: Grid) -> np.ndarray:
    t = grid.nodes
    if args.trial == "exact":
        return t**args.beta
    if args.trial == "linear":
        return t.copy()
    rng = np.random.default_rng(args.seed)
    coeffs = rng.uniform(-1.0, 1.0, size=4)
    return coeffs[0] + coeffs[1] * t + coeffs[2] * t**2 + coeffs[3] * t**3


def _run_check_equivalence(args) -> int:
    problem = _example_problem(args, 8)
    trial = SampledFn(problem.grid, _trial_values(args, problem.grid))
    rep = equivalence_on_trial(args.alpha, args.beta, problem.grid, trial)
    lines = [
        "trial,defect,el_max,hamilton_max",
        f"{args.trial},{_fmt(rep.gap)},{_fmt(rep.el_max)},{_fmt(rep.hamilton_max)}",
    ]
    _emit(lines, args.out)
    return EXIT_OK if rep.gap < _EQUIV_GAP_LIMIT else EXIT_THRESHOLD


def _run_converge(args) -> int:
    try:
        n_list = [int(s) for s in args.n_list.split(",") if s.strip()]
    except ValueError:
        raise CliError(EXIT_USAGE, f"--n-list must be comma-separated integers, got {args.n_list!r}")
    if len(n_list) < 2:
        raise CliError(EXIT_USAGE, "--n-list needs at least 2 entries")
    _order_in_unit("--alpha", args.alpha)
    if not (args.alpha < args.beta <= 1.0):
        raise CliError(
            EXIT_USAGE,
            f"need alpha < beta <= 1, got alpha = {args.alpha:g}, beta = {args.beta:g}",
        )
    if any(n < 8 for n in n_list) or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise CliError(EXIT_USAGE, f"--n-list must be strictly increasing with entries >= 8, got {n_list}")

    monotone = True
    try:
        rows = convergence_study(args.alpha, args.beta, n_list)
    except ConvergenceError as exc:
        rows = exc.rows
        monotone = False

    lines = ["n,max_err,l2_err,el_max,hamilton_max"]
    for r in rows:
        lines.append(
            f"{r.n},{_fmt(r.max_err)},{_fmt(r.l2_err)},{_fmt(r.el_max)},{_fmt(r.hamilton_max)}"
        )
    _emit(lines, args.out)
    return EXIT_OK if monotone else EXIT_THRESHOLD


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracham",
        description="Fractional operator tables, the model variational solver, "
        "and equivalence/refinement checks, with CSV output.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deriv", help="tabulate one operator applied to a function")
    p.add_argument("--kind", required=True, choices=[k.value for k in OperatorKind],
                   help="operator kind")
    p.add_argument("--alpha", type=float, required=True,
                   help="operator order in (0, 1); the integral order for int-* kinds")
    p.add_argument("--fn", required=True,
                   help='function of t, e.g. "pow(t,1)", "2*sin(t) - 1"')
    p.add_argument("--interval", default="0:1", help="a:b (default 0:1)")
    p.add_argument("--n", type=int, default=64, help="number of subintervals")
    p.add_argument("--out", default=None, help="write CSV here instead of stdout")
    p.set_defaults(func=_run_deriv)

    p = sub.add_parser("solve-example", help="solve the model problem")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--l2-threshold", type=float, default=1e-2,
                   help="exit 0 when l2_err falls below this (default 1e-2)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_run_solve_example)

    p = sub.add_parser("check-equivalence",
                       help="compare stationarity and canonical residuals on a trial")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--trial", default="exact",
                   choices=["exact", "linear", "random-polynomial"])
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the random-polynomial trial")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_run_check_equivalence)

    p = sub.add_parser("converge", help="refinement study across grid sizes")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n-list", required=True, help="comma-separated grid sizes, e.g. 64,128,256")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_run_converge)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
