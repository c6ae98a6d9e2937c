import dataclasses
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np
import pandas as pd

from l0forge.bench.instances import generate_instance
from l0forge.bench.path import lambda_path, relative_error, select_lambda, select_lambda_by_sparsity, sweep_path
from l0forge.exceptions import InvalidInput, L0ForgeException
from l0forge.models import BenchReport, BenchRow, BenchSettings, CsInstance, CsInstanceSpec, Selection, SolveOptions
from l0forge.objectives import QuadraticObjective
from l0forge.solvers import get_solver_class

logger = logging.getLogger(__name__)

THREADS_ENV = "L0FORGE_THREADS"


def worker_count(configured: int = 0) -> int:
    workers = configured if configured > 0 else (os.cpu_count() or 1)
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            raise InvalidInput(f"{THREADS_ENV} must be an integer, got {cap!r}")
    return workers


def run_cell(
    instance: CsInstance,
    method: str,
    opts: SolveOptions,
    settings: BenchSettings,
    objective: QuadraticObjective | None = None,
) -> BenchRow:
    """Sweep the λ path for one (instance, method) and report the warm-started run at the selected λ*.

    Iterations and time add up every run from x0 = A^T b along the path down to λ*, which is what
    reaching λ* cost the method.
    """
    spec = instance.spec
    row = dict(method=method, n=spec.n, m=spec.rows, sparsity=spec.nonzeros, seed=spec.seed)
    try:
        if objective is None:
            objective = QuadraticObjective(instance.A, instance.b, seed=spec.seed)
        path = lambda_path(instance.A, instance.b, settings.path_length, settings.path_ratio)
        points = sweep_path(
            objective, method, path, opts, x_true=instance.x_true, patience=settings.path_patience
        )
        if settings.selection == Selection.TRUTH:
            lam = select_lambda([(p.lam, p.rel_err) for p in points])  # type: ignore
        else:
            lam = select_lambda_by_sparsity(points, spec.nonzeros)

        upto = [p.lam for p in points].index(lam) + 1
        chosen = points[upto - 1]
    except L0ForgeException as e:
        logger.warning("%s failed on n=%d seed=%d: %s", method, spec.n, spec.seed, e)
        return BenchRow(
            **row,
            lam=None,
            iterations=None,
            time_s=None,
            rel_err=None,
            support_match=None,
            stop_reason=None,
            error=str(e),
        )

    return BenchRow(
        **row,
        lam=lam,
        iterations=sum(p.iterations for p in points[:upto]),
        time_s=sum(p.wall_time for p in points[:upto]),
        rel_err=relative_error(chosen.x, instance.x_true),
        support_match=bool(np.array_equal(np.flatnonzero(chosen.x), np.flatnonzero(instance.x_true))),
        stop_reason=chosen.stop_reason,
    )


def summarize(rows: Sequence[BenchRow]) -> tuple[dict, ...]:
    frame = pd.DataFrame([dataclasses.asdict(r) for r in rows])
    frame["failed"] = frame["error"].notna()
    frame["support_match"] = frame["support_match"].astype("float")
    summary = (
        frame.groupby(["method", "n"], sort=True)
        .agg(
            runs=("seed", "size"),
            failures=("failed", "sum"),
            median_iterations=("iterations", "median"),
            median_time_s=("time_s", "median"),
            mean_rel_err=("rel_err", "mean"),
            support_match_rate=("support_match", "mean"),
        )
        .reset_index()
    )
    # through JSON so the records hold plain Python numbers
    return tuple(json.loads(summary.to_json(orient="records")))


def run_benchmark(
    specs: Sequence[CsInstanceSpec],
    methods: Sequence[str],
    opts: SolveOptions,
    repeat: int = 1,
    settings: BenchSettings = BenchSettings(),
) -> BenchReport:
    if not methods:
        raise InvalidInput("no methods to benchmark")
    if repeat < 1:
        raise InvalidInput("repeat must be at least 1")
    for method in methods:
        get_solver_class(method)

    instances = [
        generate_instance(dataclasses.replace(spec, seed=spec.seed + r)) for spec in specs for r in range(repeat)
    ]
    # one objective per instance, its Lipschitz estimate is shared by every method
    objectives = [QuadraticObjective(i.A, i.b, seed=i.spec.seed) for i in instances]
    cells = [(instance, objective, method) for instance, objective in zip(instances, objectives) for method in methods]
    workers = worker_count(settings.threads)
    logger.info("benchmark: %d cells on %d workers", len(cells), workers)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map keeps submission order, so the report does not depend on scheduling
        rows = tuple(pool.map(lambda cell: run_cell(cell[0], cell[2], opts, settings, cell[1]), cells))

    return BenchReport(rows=rows, summary=summarize(rows))
