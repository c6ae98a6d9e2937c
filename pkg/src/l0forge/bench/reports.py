import dataclasses
import json
from pathlib import Path

import pandas as pd

from l0forge.exceptions import InvalidInput
from l0forge.models import BenchReport

CSV_COLUMNS = {
    "method": "method",
    "n": "n",
    "seed": "seed",
    "lam": "lambda",
    "iterations": "iters",
    "time_s": "time_s",
    "rel_err": "rel_err",
    "support_match": "support_match",
}
PLOT_SERIES = {"iterations": "iters", "time": "time_s", "relerr": "rel_err"}


def report_frame(report: BenchReport) -> pd.DataFrame:
    frame = pd.DataFrame([dataclasses.asdict(r) for r in report.rows])
    return frame[list(CSV_COLUMNS)].rename(columns=CSV_COLUMNS)


def write_report(report: BenchReport, out_dir: Path) -> list[Path]:
    """report.json, report.csv, summary.csv and one whitespace-delimited plot file per series and size."""
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InvalidInput(f"cannot create output directory {out_dir}: {e}")

    written = []
    json_path = out_dir / "report.json"
    with open(json_path, "w", encoding="utf-8") as f:
        json.dump(
            {"rows": [dataclasses.asdict(r) for r in report.rows], "summary": list(report.summary)},
            f,
            indent=2,
        )
    written.append(json_path)

    frame = report_frame(report)
    csv_path = out_dir / "report.csv"
    frame.to_csv(csv_path, index=False, float_format="%.10g")
    written.append(csv_path)

    summary_path = out_dir / "summary.csv"
    pd.DataFrame(list(report.summary)).to_csv(summary_path, index=False, float_format="%.10g")
    written.append(summary_path)

    methods = list(dict.fromkeys(frame["method"]))
    for n, by_size in frame.groupby("n", sort=True):
        # seed index on the x axis, one column per method
        by_size = by_size.assign(seed_index=by_size.groupby("method").cumcount())
        for name, column in PLOT_SERIES.items():
            table = by_size.pivot(index="seed_index", columns="method", values=column)[methods]
            plot_path = out_dir / f"{name}_n{n}.dat"
            table.to_csv(plot_path, sep=" ", na_rep="nan", float_format="%.10g")
            written.append(plot_path)

    return written
