"""Benchmark orchestration and CSV reporting."""
from __future__ import annotations

import csv
import io
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable

from .config import BenchCase
from .metrics import REPORT_FIELDS, evaluate
from .phantoms import make_phantom
from .solvers import run
from .speckle import speckle

CASE_FIELDS = ("label", "method", "phantom", "looks", "seed", "iterations", "best_step")
BENCH_FIELDS = CASE_FIELDS + REPORT_FIELDS + ("wall_time", "status", "error")


def fmt(value) -> str:
    """Stable CSV cell: six significant digits for floats, ``inf``/``nan`` spelled out."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.6g}"
    return str(value)


def write_csv(rows: Iterable[dict], header: tuple, out) -> None:
    """Comma separated, LF line endings, header row first."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(row.get(k)) for k in header])


def csv_text(rows: Iterable[dict], header: tuple) -> str:
    buf = io.StringIO()
    write_csv(rows, header, buf)
    return buf.getvalue()


def run_case(case: BenchCase) -> dict:
    row = {"label": case.label, "method": case.method, "phantom": case.phantom,
           "looks": case.looks, "seed": case.seed}
    start = time.perf_counter()
    try:
        clean = make_phantom(case.phantom, case.width, case.height)
        noisy, _ = speckle(clean, case.looks, case.seed)
        result = run(noisy, case.scfg, case.dcfg, reference=clean)
        report = evaluate(clean, noisy, result.restored, looks=case.looks)
        row.update(report.as_row())
        row.update(iterations=result.steps, best_step=result.best_step, status="ok")
    except Exception as exc:  # a failed case is reported in its row, not raised
        row.update(status="error", error=f"{type(exc).__name__}: {exc}")
    row["wall_time"] = time.perf_counter() - start
    return row


def run_suite(cases: list[BenchCase], jobs: int = 1) -> list[dict]:
    """Run every case; rows come back in case order whatever the worker count."""
    if jobs <= 1:
        return [run_case(c) for c in cases]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_case, cases))


def report_csv(rows: list[dict], timing: bool = True) -> str:
    header = BENCH_FIELDS if timing else tuple(f for f in BENCH_FIELDS if f != "wall_time")
    return csv_text(rows, header)


def summarize(rows: list[dict], metric: str = "dg") -> dict:
    """Median of ``metric`` over seeds for each (phantom, looks, method)."""
    groups: dict = {}
    for row in rows:
        if row.get("status") != "ok":
            continue
        groups.setdefault((row["phantom"], row["looks"], row["method"]), []).append(row[metric])
    return {key: statistics.median(vals) for key, vals in sorted(groups.items())}
