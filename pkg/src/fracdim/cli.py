"""Command-line interface.

Subcommands: ``dim``, ``sweep``, ``thresholds``, ``expect``, ``simulate``
and ``oracle``. Delimited data goes to ``--out`` (standard output when
absent); summary lines go to standard output when the data went to a file
and to standard error otherwise, so piped CSV stays clean.

Exit codes: 0 success, 2 validation, 3 solver failure or count overflow,
4 I/O, 5 stopping-set cap, 6 frontier cap.
"""

from __future__ import annotations

import argparse
import ast
import contextlib
import math
import operator
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import RunConfig, load_config, override
from .dimension import dimension
from .errors import (
    CountOverflow,
    FracdimError,
    FrontierTooLarge,
    InconsistentResult,
    NoConvergence,
    SetTooLarge,
    ValidationError,
)
from .simulate import (
    U64_MAX,
    default_workers,
    expected_cover_count,
    growth_rate_fit,
    stopping_set,
    walk_counts,
)
from .special import sweep_grid, two_map_sweep, two_map_thresholds
from .variational import maximize_on_surface

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_IO, EXIT_SET_CAP, EXIT_FRONTIER_CAP = 0, 2, 3, 4, 5, 6
MAX_ORACLE_MAPS = 4

_GLOBAL_DEFAULTS = {"config": None, "seed": None, "out": None, "format": "csv", "prune_zeros": False}


class UsageError(ValidationError):
    pass


def fmt(value: float) -> str:
    """At most 10 significant digits, shortest form."""
    return format(float(value), ".10g")


def fmt12(value: float) -> str:
    return format(float(value), ".12g")


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_FUNCS = {"log": math.log, "exp": math.exp, "sqrt": math.sqrt}
_NAMES = {"pi": math.pi, "e": math.e}


def real(text: str) -> float:
    """Parse a number or a small arithmetic expression such as ``10*log(3)``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
            and not node.keywords
        ):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(text)

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or expression: {text!r}") from None


def real_list(text: str) -> list[float]:
    return [real(t) for t in text.replace(";", ",").split(",") if t.strip()]


def u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v <= U64_MAX:
        raise argparse.ArgumentTypeError(f"not an unsigned 64-bit integer: {text!r}")
    return v


def _global_flags(parser: argparse.ArgumentParser):
    S = argparse.SUPPRESS
    parser.add_argument("--config", default=S, metavar="PATH", help="TOML run configuration")
    parser.add_argument("--seed", type=u64, default=S, help="base random seed (unsigned 64-bit)")
    parser.add_argument("--out", default=S, metavar="PATH", help="output file (default: standard output)")
    parser.add_argument("--format", choices=("csv", "svg"), default=S, help="output format")
    parser.add_argument(
        "--prune-zeros",
        action="store_true",
        default=S,
        help="drop zero-probability maps and renormalize before validation",
    )


def _problem_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--ratios", type=real_list, help="comma-separated contraction ratios")
    parser.add_argument("--probs", type=real_list, help="comma-separated label probabilities")
    parser.add_argument("--branching", "-M", type=int, help="tree branching factor")
    parser.add_argument("--solver-tol", type=float)
    parser.add_argument("--stopping-set-cap", type=int)
    parser.add_argument("--frontier-cap", type=int)


def _scale_flags(parser: argparse.ArgumentParser, required: bool = True):
    parser.add_argument("--n-min", type=real, required=required, help="smallest scale exponent n")
    parser.add_argument("--n-max", type=real, required=required, help="largest scale exponent n")
    parser.add_argument("--n-step", type=real, default=1.0, help="spacing of n values (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracdim", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dim", help="closed-form dimension with case and optimizer")
    _global_flags(p)
    _problem_flags(p)

    p = sub.add_parser("sweep", help="two-map dimension curve over p")
    _global_flags(p)
    p.add_argument("--r1", type=real, required=True)
    p.add_argument("--r2", type=real, required=True)
    p.add_argument("--points", type=int, default=400, help="grid points on [0.002, 0.998]")

    p = sub.add_parser("thresholds", help="two-map phase transition points")
    _global_flags(p)
    p.add_argument("--r1", type=real, required=True)
    p.add_argument("--r2", type=real, required=True)

    p = sub.add_parser("expect", help="exact expected occupied-cover sizes and growth slope")
    _global_flags(p)
    _problem_flags(p)
    _scale_flags(p)

    p = sub.add_parser("simulate", help="Monte Carlo branching walk")
    _global_flags(p)
    _problem_flags(p)
    _scale_flags(p, required=False)
    p.add_argument("--n", type=real_list, dest="n_values", help="explicit comma-separated n values")
    p.add_argument("--replicas", type=int, default=8, help="number of seeds per n")

    p = sub.add_parser("oracle", help="brute-force maximization of the variational objective")
    _global_flags(p)
    _problem_flags(p)
    p.add_argument("--grid-resolution", type=int)
    return parser


def _opt(args, name):
    return getattr(args, name, _GLOBAL_DEFAULTS[name])


def _config(args) -> RunConfig:
    path = _opt(args, "config")
    config = load_config(path) if path else RunConfig()
    return override(
        config,
        ratios=getattr(args, "ratios", None),
        probs=getattr(args, "probs", None),
        branching=getattr(args, "branching", None),
        solver_tol=getattr(args, "solver_tol", None),
        grid_resolution=getattr(args, "grid_resolution", None),
        seed=_opt(args, "seed"),
        stopping_set_cap=getattr(args, "stopping_set_cap", None),
        frontier_cap=getattr(args, "frontier_cap", None),
    )


def _scales(n_min: float, n_max: float, step: float) -> list[float]:
    if not step > 0:
        raise UsageError("--n-step must be positive")
    if n_max < n_min:
        raise UsageError("--n-max is smaller than --n-min")
    if not n_min > 0:
        raise UsageError("n values must be positive")
    count = int(math.floor((n_max - n_min) / step + 1e-9)) + 1
    return [n_min + k * step for k in range(count)]


@contextlib.contextmanager
def _data_stream(path: Optional[str]):
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yield fh


def _summary_stream(args):
    return sys.stdout if _opt(args, "out") else sys.stderr


def _require_csv(args):
    if _opt(args, "format") != "csv":
        raise UsageError(f"svg output is only available for sweep, not {args.command}")


def _report(lines, stream=None):
    stream = stream or sys.stdout
    for key, value in lines:
        print(f"{key}: {value}", file=stream)


def _write_report(args, lines):
    """Structured-text commands: the report is the data."""
    with _data_stream(_opt(args, "out")) as fh:
        _report(lines, fh)


def cmd_dim(args) -> int:
    _require_csv(args)
    config = _config(args)
    problem = config.problem(_opt(args, "prune_zeros"))
    res = dimension(problem, tol=config.solver_tol)
    lines = [
        ("case", res.case),
        ("dimension", fmt12(res.value)),
        ("s0", fmt12(res.s0)),
        ("s_tilde", fmt12(res.s_tilde)),
        ("beta", "[" + ", ".join(fmt12(b) for b in res.beta) + "]"),
    ]
    if res.t_hat is not None:
        lines.append(("t_hat", fmt12(res.t_hat)))
    _write_report(args, lines)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.points < 10:
        raise UsageError("--points must be at least 10")
    th = two_map_thresholds(args.r1, args.r2)
    rows = two_map_sweep(args.r1, args.r2, sweep_grid(args.points))
    out = _opt(args, "out")
    if _opt(args, "format") == "svg":
        if out is None:
            raise UsageError("svg output needs --out")
        from .plotting import render_sweep

        render_sweep(rows, th, out)
    else:
        with _data_stream(out) as fh:
            fh.write("p,dimension,case\n")
            for row in rows:
                fh.write(f"{fmt(row.p)},{fmt(row.value)},{row.case}\n")
    _report(
        [("s0", fmt12(th.s0)), ("p_star", fmt12(th.p_star)), ("p_star_upper", fmt12(th.p_star_upper))],
        _summary_stream(args),
    )
    return EXIT_OK


def cmd_thresholds(args) -> int:
    _require_csv(args)
    th = two_map_thresholds(args.r1, args.r2)
    upper_a, upper_b = th.upper_residuals(args.r1, args.r2)
    _write_report(
        args,
        [
            ("p_star", fmt12(th.p_star)),
            ("p_star_upper", fmt12(th.p_star_upper)),
            ("s0", fmt12(th.s0)),
            ("s_tilde_at_p_star_upper", fmt12(th.s_tilde_upper)),
            ("residual_p_star", format(th.lower_residual(args.r1, args.r2), ".3e")),
            ("residual_p_star_upper_moran", format(upper_a, ".3e")),
            ("residual_p_star_upper_log", format(upper_b, ".3e")),
        ]
    )
    return EXIT_OK


def cmd_expect(args) -> int:
    _require_csv(args)
    config = _config(args)
    problem = config.problem(_opt(args, "prune_zeros"))
    ns = _scales(args.n_min, args.n_max, args.n_step)
    cap = config.caps.stopping_set
    rows = []
    for n in ns:
        size = len(stopping_set(problem, n, cap))
        expected = expected_cover_count(problem, n, cap)
        rows.append((n, size, expected, math.log(expected) / n))
    with _data_stream(_opt(args, "out")) as fh:
        fh.write("n,gamma_n_size,expected_cover,log_expected_over_n\n")
        for n, size, expected, rate in rows:
            fh.write(f"{fmt(n)},{size},{fmt(expected)},{fmt(rate)}\n")
    lines = []
    if len(ns) >= 3:
        slope, _ = growth_rate_fit(problem, ns, cap)
        lines.append(("slope", fmt12(slope)))
    else:
        lines.append(("slope", "n/a"))
    lines.append(("dimension", fmt12(dimension(problem, tol=config.solver_tol).value)))
    _report(lines, _summary_stream(args))
    return EXIT_OK


def cmd_simulate(args) -> int:
    _require_csv(args)
    config = _config(args)
    problem = config.problem(_opt(args, "prune_zeros"))
    if args.replicas < 1:
        raise UsageError("--replicas must be at least 1")
    if args.n_values:
        ns = [float(v) for v in args.n_values]
        if any(not v > 0 for v in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
            raise UsageError("--n values must be positive and strictly increasing")
    elif args.n_min is not None and args.n_max is not None:
        ns = _scales(args.n_min, args.n_max, args.n_step)
    else:
        raise UsageError("give either --n or both --n-min and --n-max")
    seeds = [(config.seed + k) % (U64_MAX + 1) for k in range(args.replicas)]
    counts = walk_counts(problem, ns, seeds, default_workers(), config.caps.frontier)
    with _data_stream(_opt(args, "out")) as fh:
        fh.write("n,seed,stopped_count\n")
        for i, n in enumerate(ns):
            for j, seed in enumerate(seeds):
                fh.write(f"{fmt(n)},{seed},{counts[i, j]}\n")
    lines = []
    if len(ns) >= 2:
        means = np.log(counts).mean(axis=1)
        lines.append(("empirical_slope", fmt12(np.polyfit(ns, means, 1)[0])))
    else:
        lines.append(("empirical_slope", "n/a"))
    exact = "n/a"
    if len(ns) >= 3:
        try:
            exact = fmt12(growth_rate_fit(problem, ns, config.caps.stopping_set)[0])
        except SetTooLarge:
            pass
    lines.append(("exact_expectation_slope", exact))
    lines.append(("dimension", fmt12(dimension(problem, tol=config.solver_tol).value)))
    _report(lines, _summary_stream(args))
    return EXIT_OK


def cmd_oracle(args) -> int:
    _require_csv(args)
    config = _config(args)
    problem = config.problem(_opt(args, "prune_zeros"))
    if problem.n_maps > MAX_ORACLE_MAPS:
        raise UsageError(f"oracle supports at most {MAX_ORACLE_MAPS} maps, got {problem.n_maps}")
    oracle = maximize_on_surface(problem, config.grid_resolution)
    closed = dimension(problem, tol=config.solver_tol).value
    _write_report(
        args,
        [
            ("oracle", fmt12(oracle.value)),
            ("argmax", "[" + ", ".join(fmt12(v) for v in oracle.argmax) + "]"),
            ("grid_resolution", oracle.grid_resolution),
            ("dimension", fmt12(closed)),
            ("difference", format(oracle.value - closed, ".3e")),
        ]
    )
    return EXIT_OK


COMMANDS = {
    "dim": cmd_dim,
    "sweep": cmd_sweep,
    "thresholds": cmd_thresholds,
    "expect": cmd_expect,
    "simulate": cmd_simulate,
    "oracle": cmd_oracle,
}


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, SetTooLarge):
        return EXIT_SET_CAP
    if isinstance(exc, FrontierTooLarge):
        return EXIT_FRONTIER_CAP
    if isinstance(exc, (NoConvergence, InconsistentResult, CountOverflow)):
        return EXIT_SOLVER
    if isinstance(exc, (ValidationError, ValueError)):
        return EXIT_INVALID
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_SOLVER


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (FracdimError, ValueError, OSError) as exc:
        print(f"fracdim {args.command}: {exc}", file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
