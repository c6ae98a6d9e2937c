import argparse
import dataclasses
import json
import logging
import textwrap
from pathlib import Path
from typing import Any, Callable

import numpy as np
from peewee import PeeweeException
from rich.console import Console
from rich.table import Table

from l0forge import __appname__, __version__
from l0forge.bench import generate_instance, lambda_path, relative_error, run_benchmark, select_lambda, sweep_path
from l0forge.bench.reports import write_report
from l0forge.config import load_config, read_flat_config
from l0forge.db import migrate
from l0forge.exceptions import InvalidInput, L0ForgeException, OracleSizeExceeded
from l0forge.models import Config, CsInstanceSpec, Ensemble, NoiseMode, SolveOptions, StopReason, Vector
from l0forge.objectives import QuadraticObjective
from l0forge.oracle import contains_local_minimizer, enumerate_minimizers
from l0forge.problem import L0Problem
from l0forge.solvers import get_solver_class
from l0forge.utils.logs import setup_logging
from l0forge.utils.matrix_io import read_matrix_csv, read_vector_csv
from l0forge.utils.queries import get_recent_runs, record_run

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MAX_ITERS = 2
ORACLE_CLI_LIMIT = 12
BOOLEAN_STATES = {
    **dict.fromkeys(("1", "yes", "true", "on"), True),
    **dict.fromkeys(("0", "no", "false", "off"), False),
}


@dataclasses.dataclass(frozen=True)
class CommandResult:
    exit_status: int
    payload: dict[str, Any]
    # fields for the run history
    history: dict[str, Any] = dataclasses.field(default_factory=dict)


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit 1 like every other failure; exit 2 is reserved for max-iters."""

    def error(self, message: str):
        raise InvalidInput(f"{self.prog}: {message}")


def add_instance_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_argument_group("instance", "generate a compressive sensing instance or read one from CSV")
    source.add_argument("--gen", choices=[e.value for e in Ensemble], help="sensing matrix ensemble")
    source.add_argument("--n", type=int, default=2000, help="signal length")
    source.add_argument("--m", type=int, help="measurements (default n/4)")
    source.add_argument("--sparsity", type=int, help="nonzeros of the true signal (default m/32)")
    source.add_argument("--seed", type=int, default=0)
    source.add_argument("--noise-variance", type=float, default=0.02)
    source.add_argument("--noise-mode", choices=[e.value for e in NoiseMode], default=NoiseMode.VARIANCE.value)
    source.add_argument("--min-magnitude", type=float, default=0.0, help="smallest |x*_i| on the support")
    source.add_argument("--matrix", type=Path, help="CSV file with A, row-major, no header")
    source.add_argument("--rhs", type=Path, help="CSV file with b")


def add_solver_args(parser: argparse.ArgumentParser, defaults: SolveOptions) -> None:
    solver = parser.add_argument_group("solver")
    solver.add_argument("--tol", type=float, default=defaults.tol)
    solver.add_argument("--max-iters", type=int, default=defaults.max_iters)
    solver.add_argument("--mu", type=float, default=defaults.mu)
    solver.add_argument("--memory", type=int, default=defaults.vmepiht.memory, help="VMEPIHT metric pairs T")
    solver.add_argument("--omega", type=float, default=defaults.npiht.omega, help="nPIHT extrapolation weight")
    solver.add_argument("--eta", type=float, default=defaults.nmapg.eta, help="nmAPG averaging weight")
    solver.add_argument("--window", type=int, default=defaults.niapg.window, help="niAPG window q")
    solver.add_argument("--trace-level", type=int, default=defaults.trace_level)


def build_parser(config: Config) -> ArgumentParser:
    prog = __appname__
    parser = ArgumentParser(
        prog=prog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="Solvers and benchmarks for l0-regularized least squares",
        epilog=textwrap.dedent(
            f"""\
        examples:
          {prog} solve --method vmepiht --gen gaussian --n 2000 --seed 7
          {prog} solve --method piht --matrix A.csv --rhs b.csv --lambda 0.1
          {prog} bench --preset desk --out results/
          {prog} oracle-verify --n 8 --seeds 100 --method vmepiht
        """
        ),
    )
    parser.add_argument("-V", "--version", action="version", version=f"v{__version__}", help="print version and exit")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log to stderr, -vv for debug")
    parser.add_argument("--config", type=Path, help="flat key = value file mirroring the flags")
    parser.add_argument("--no-history", action="store_true", help="do not record this run")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    solve = commands.add_parser("solve", help="run one solver, print its run record as JSON")
    solve.add_argument("--method", required=True)
    solve.add_argument("--lambda", dest="lam", type=float, help="regularization weight (default: path selection)")
    add_instance_args(solve)
    add_solver_args(solve, config.solve)

    bench = commands.add_parser("bench", help="compressive sensing benchmark over the lambda path")
    bench.add_argument("--out", type=Path, required=True, help="output directory")
    bench.add_argument("--preset", default=config.default_preset, help=f"one of {', '.join(config.presets)}")
    bench.add_argument("--methods", default=",".join(config.bench.methods), help="comma separated")
    bench.add_argument("--n", help="comma separated sizes, overriding the preset")
    bench.add_argument("--seeds", type=int, help="repetitions per size, overriding the preset")
    bench.add_argument("--first-seed", type=int, default=0)
    bench.add_argument("--patience", type=int, default=config.bench.path_patience)
    bench.add_argument("--threads", type=int, default=config.bench.threads)
    add_solver_args(bench, config.solve)

    path = commands.add_parser("path", help="print the lambda path of an instance as JSON")
    path.add_argument("--count", type=int, default=config.bench.path_length)
    path.add_argument("--ratio", type=float, default=config.bench.path_ratio)
    add_instance_args(path)

    oracle = commands.add_parser("oracle-verify", help="check solver outputs against enumerated local minimizers")
    oracle.add_argument("--n", type=int, required=True)
    oracle.add_argument("--m", type=int, help="measurements (default 3n/5)")
    oracle.add_argument("--sparsity", type=int, help="nonzeros of the true signal (default n/5)")
    oracle.add_argument("--seeds", type=int, default=10, help="number of instances")
    oracle.add_argument("--first-seed", type=int, default=0)
    oracle.add_argument("--method", required=True)
    oracle.add_argument("--lambda-ratio", type=float, default=1e-2, help="lambda as a fraction of ||A^T b||_inf^2")
    oracle.add_argument("--atol", type=float, default=1e-6)
    oracle.add_argument("--tol", type=float, default=1e-12)
    oracle.add_argument("--max-iters", type=int, default=100000)
    oracle.add_argument("--mu", type=float, default=config.solve.mu)

    history = commands.add_parser("history", help="print recently recorded runs")
    history.add_argument("--limit", type=int, default=20)

    return parser


def apply_flat_config(parser: ArgumentParser, values: dict[str, str]) -> None:
    """Use a flat config file as parser defaults, so explicit flags still win."""
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    targets = [parser, *subparsers.choices.values()]
    unused = set(values)
    for target in targets:
        # keys match either the destination or the long flag, e.g. lam or lambda
        actions = {}
        for action in target._actions:
            actions[action.dest] = action
            for option in action.option_strings:
                if option.startswith("--"):
                    actions[option[2:].replace("-", "_")] = action
        defaults = {}
        for key, value in values.items():
            if key not in actions or key == "config":
                continue
            action = actions[key]
            if isinstance(action, argparse._CountAction):
                try:
                    defaults[action.dest] = int(value)
                except ValueError:
                    raise InvalidInput(f"config key {key!r} expects an integer, got {value!r}")
            elif action.nargs == 0:
                if value.lower() not in BOOLEAN_STATES:
                    raise InvalidInput(f"config key {key!r} expects a boolean, got {value!r}")
                defaults[action.dest] = BOOLEAN_STATES[value.lower()]
            else:
                # argparse runs string defaults through the action's type
                defaults[action.dest] = value
            # a default does not satisfy required=True
            action.required = False
            unused.discard(key)
        target.set_defaults(**defaults)
    unused.discard("config")
    if unused:
        raise InvalidInput(f"unknown config keys: {', '.join(sorted(unused))}")


def parse_cli_args(config: Config, argv: list[str] | None = None) -> argparse.Namespace:
    parser = build_parser(config)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    if known.config is not None:
        apply_flat_config(parser, read_flat_config(known.config))
    return parser.parse_args(argv)


def solve_options(args: argparse.Namespace, defaults: SolveOptions) -> SolveOptions:
    return dataclasses.replace(
        defaults,
        tol=args.tol,
        max_iters=args.max_iters,
        mu=args.mu,
        trace_level=getattr(args, "trace_level", defaults.trace_level),
        vmepiht=dataclasses.replace(defaults.vmepiht, memory=getattr(args, "memory", defaults.vmepiht.memory)),
        npiht=dataclasses.replace(defaults.npiht, omega=getattr(args, "omega", defaults.npiht.omega)),
        nmapg=dataclasses.replace(defaults.nmapg, eta=getattr(args, "eta", defaults.nmapg.eta)),
        niapg=dataclasses.replace(defaults.niapg, window=getattr(args, "window", defaults.niapg.window)),
    )


def load_instance(args: argparse.Namespace) -> tuple[QuadraticObjective, Vector | None]:
    if args.matrix is not None or args.rhs is not None:
        if args.matrix is None or args.rhs is None:
            raise InvalidInput("--matrix and --rhs go together")
        return QuadraticObjective(read_matrix_csv(args.matrix), read_vector_csv(args.rhs), seed=args.seed), None
    if args.gen is None:
        raise InvalidInput("give either --gen or --matrix/--rhs")

    instance = generate_instance(
        CsInstanceSpec(
            n=args.n,
            m=args.m,
            sparsity=args.sparsity,
            ensemble=Ensemble(args.gen),
            noise_variance=args.noise_variance,
            noise_mode=NoiseMode(args.noise_mode),
            min_magnitude=args.min_magnitude,
            seed=args.seed,
        )
    )
    return QuadraticObjective(instance.A, instance.b, seed=args.seed), instance.x_true


def cmd_solve(args: argparse.Namespace, config: Config) -> CommandResult:
    solver_class = get_solver_class(args.method)
    objective, x_true = load_instance(args)
    opts = solve_options(args, config.solve)

    lam = args.lam
    if lam is None:
        if x_true is None:
            raise InvalidInput("--lambda is required for instances read from files")
        path = lambda_path(objective.A, objective.b, config.bench.path_length, config.bench.path_ratio)
        points = sweep_path(objective, args.method, path, opts, x_true=x_true, patience=config.bench.path_patience)
        lam = select_lambda([(p.lam, p.rel_err) for p in points])  # type: ignore

    x, record = solver_class(L0Problem(objective, lam, opts.mu), opts).solve(objective.Atb)
    payload = {"lambda": lam, **record.to_dict(), "x": x.tolist()}
    if x_true is not None:
        payload["rel_err"] = relative_error(x, x_true)
        payload["support_match"] = bool(np.array_equal(np.flatnonzero(x), np.flatnonzero(x_true)))

    exit_status = EXIT_MAX_ITERS if record.stop_reason == StopReason.MAX_ITERS else EXIT_OK
    return CommandResult(
        exit_status,
        payload,
        history=dict(
            method=record.method,
            n=objective.dimension,
            seed=args.seed if args.gen else None,
            lam=lam,
            iterations=record.iterations,
            wall_time=record.wall_time,
            stop_reason=record.stop_reason.value,
        ),
    )


def cmd_bench(args: argparse.Namespace, config: Config) -> CommandResult:
    try:
        preset = config.presets[args.preset]
    except KeyError:
        raise InvalidInput(f"unknown preset {args.preset!r}, valid presets: {', '.join(config.presets)}")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise InvalidInput("the methods list is empty")

    if args.n:
        try:
            preset = dataclasses.replace(preset, sizes=tuple(int(n) for n in args.n.split(",")))
        except ValueError:
            raise InvalidInput(f"--n expects comma separated integers, got {args.n!r}")
    settings = dataclasses.replace(config.bench, path_patience=args.patience, threads=args.threads)
    report = run_benchmark(
        preset.specs(args.first_seed),
        methods,
        solve_options(args, config.solve),
        repeat=args.seeds if args.seeds is not None else preset.seeds,
        settings=settings,
    )
    files = write_report(report, args.out)
    return CommandResult(
        EXIT_OK,
        {"files": [str(f) for f in files], "summary": list(report.summary)},
        history=dict(method=",".join(methods), n=max(preset.sizes), seed=args.first_seed),
    )


def cmd_path(args: argparse.Namespace, config: Config) -> CommandResult:
    objective, _ = load_instance(args)
    path = lambda_path(objective.A, objective.b, args.count, args.ratio)
    return CommandResult(EXIT_OK, {"anchor": path.anchor, "lambdas": path.values.tolist()})


def cmd_oracle_verify(args: argparse.Namespace, config: Config) -> CommandResult:
    if args.n > ORACLE_CLI_LIMIT:
        raise OracleSizeExceeded(f"oracle-verify enumerates 2^n supports and is capped at n = {ORACLE_CLI_LIMIT}")
    solver_class = get_solver_class(args.method)
    if args.seeds <= 0:
        logger.warning("no seeds requested, nothing to verify")
        return CommandResult(EXIT_OK, {"passed": True, "verdicts": []}, history=dict(method=args.method, n=args.n))

    opts = dataclasses.replace(config.solve, tol=args.tol, max_iters=args.max_iters, mu=args.mu)
    m = args.m if args.m is not None else max(1, 3 * args.n // 5)
    sparsity = args.sparsity if args.sparsity is not None else max(1, args.n // 5)
    verdicts = []
    for seed in range(args.first_seed, args.first_seed + args.seeds):
        instance = generate_instance(CsInstanceSpec(n=args.n, m=m, sparsity=sparsity, seed=seed))
        objective = QuadraticObjective(instance.A, instance.b, seed=seed)
        lam = args.lambda_ratio * lambda_path(instance.A, instance.b, count=1).anchor
        prob = L0Problem(objective, lam, opts.mu)
        x, record = solver_class(prob, opts).solve(objective.Atb)
        passed = contains_local_minimizer(prob, enumerate_minimizers(prob, ORACLE_CLI_LIMIT), x, args.atol)
        verdicts.append(
            {"seed": seed, "passed": passed, "iterations": record.iterations, "stop_reason": record.stop_reason.value}
        )
        logger.info("seed %d: %s", seed, "local minimizer" if passed else "NOT a local minimizer")

    all_passed = all(v["passed"] for v in verdicts)
    return CommandResult(
        EXIT_OK if all_passed else EXIT_ERROR,
        {"passed": all_passed, "verdicts": verdicts},
        history=dict(method=args.method, n=args.n, seed=args.first_seed),
    )


def print_run_history(limit: int, console: Console) -> None:
    table = Table(title="l0forge History")
    table.add_column("Ran At", style="cyan", no_wrap=False)
    table.add_column("Command", style="magenta", no_wrap=False)
    table.add_column("Method", style="green", no_wrap=False)
    table.add_column("n", style="white", no_wrap=False, justify="right")
    table.add_column("Seed", style="white", no_wrap=False, justify="right")
    table.add_column("Iters", style="blue", no_wrap=False, justify="right")
    table.add_column("Time", style="blue", no_wrap=False, justify="right")
    table.add_column("Stop", style="cyan", no_wrap=False)
    table.add_column("Exit", style="white", no_wrap=False, justify="right")

    for run in get_recent_runs(limit):
        table.add_row(
            f"{run.ran_at:%I:%M %p %b %d, %Y}",
            run.command,  # type: ignore
            run.method or "",  # type: ignore
            "" if run.n is None else str(run.n),
            "" if run.seed is None else str(run.seed),
            "" if run.iterations is None else str(run.iterations),
            "" if run.wall_time is None else f"{run.wall_time:.3f}s",
            run.stop_reason or "",  # type: ignore
            str(run.exit_status),
        )

    console.print(table)


COMMANDS: dict[str, Callable[[argparse.Namespace, Config], CommandResult]] = {
    "solve": cmd_solve,
    "bench": cmd_bench,
    "path": cmd_path,
    "oracle-verify": cmd_oracle_verify,
}


def emit_json(payload: dict[str, Any]) -> None:
    print(json.dumps(payload))


def record_history(command: str, result: CommandResult) -> None:
    try:
        migrate()
        record_run(command, result.exit_status, **result.history)
    except PeeweeException as e:
        logger.warning("could not record run history: %s", e)


def run(argv: list[str] | None = None, console: Console | None = None) -> int:
    """Parse, dispatch and print one command; returns the process exit status."""
    console = console or Console(stderr=True)
    config = load_config()
    args = parse_cli_args(config, argv)
    setup_logging(args.verbose, console)

    if args.command == "history":
        migrate()
        print_run_history(args.limit, console)
        return EXIT_OK

    try:
        result = COMMANDS[args.command](args, config)
    except L0ForgeException:
        if not args.no_history and config.bench.history:
            record_history(args.command, CommandResult(EXIT_ERROR, {}))
        raise
    emit_json(result.payload)
    if not args.no_history and config.bench.history:
        record_history(args.command, result)
    return result.exit_status
