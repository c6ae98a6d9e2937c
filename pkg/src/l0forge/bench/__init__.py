__all__ = [
    "PathPoint",
    "generate_instance",
    "lambda_path",
    "relative_error",
    "run_benchmark",
    "select_lambda",
    "select_lambda_by_sparsity",
    "sweep_path",
    "write_report",
]


from l0forge.bench.instances import generate_instance
from l0forge.bench.path import (
    PathPoint,
    lambda_path,
    relative_error,
    select_lambda,
    select_lambda_by_sparsity,
    sweep_path,
)
from l0forge.bench.reports import write_report
from l0forge.bench.runner import run_benchmark
