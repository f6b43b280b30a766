"""Benchmark harness: timing records over (l, L) sweeps.

Each record breaks the construction into the three steps that dominate the
cost: index enumeration, matrix assembly, kernel extraction.  The covariates
(number of classes and classes x basis dimension) are emitted so the scaling
can be fit externally.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import _backend
from .halfint import HalfInt
from .indexing import LVector
from . import mup

CSV_COLUMNS = [
    "lvec",
    "L",
    "kind",
    "n_classes",
    "n_basis",
    "t_classes_ms",
    "t_build_ms",
    "t_kernel_ms",
]


@dataclass
class BenchRecord:
    lvec: str
    L: str
    kind: str
    n_classes: int
    n_basis: int
    t_classes_ms: float
    t_build_ms: float
    t_kernel_ms: float

    def row(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]


def run_job(lvec: LVector, L: HalfInt | int, kind: str, clear_cache: bool = True) -> BenchRecord:
    """Time one basis construction end to end.

    With ``clear_cache`` the enumeration step is timed cold; threaded sweeps
    keep the cache to avoid cross-job interference (their per-step timings
    overlap anyway).
    """
    L = HalfInt.of(L)
    if clear_cache:
        mup.index_rows.cache_clear()
    tL = L.twice
    t0 = time.perf_counter()
    for tK in range(-tL - 2, tL + 3, 2):
        mup.index_rows(lvec, kind, tK)
    t1 = time.perf_counter()
    M = mup.build_mup(lvec, L, kind)
    t2 = time.perf_counter()
    vectors = mup.solve_kernel(M)
    t3 = time.perf_counter()
    n_rows = 0 if M.empty else (
        sum(M.col_rows[tK].shape[0] for tK in M.a_diag) + M.final_rows.shape[0]
    )
    return BenchRecord(
        lvec=str(lvec),
        L=str(L),
        kind=kind,
        n_classes=n_rows,
        n_basis=vectors.shape[1],
        t_classes_ms=(t1 - t0) * 1e3,
        t_build_ms=(t2 - t1) * 1e3,
        t_kernel_ms=(t3 - t2) * 1e3,
    )


def sweep_jobs(l_max: int, n_max: int) -> list[tuple[LVector, HalfInt]]:
    jobs = []
    for l in range(1, l_max + 1):
        for n in range(1, n_max + 1):
            lv = LVector.of([l] * n)
            for tL in range(0, 2 * l * n + 1, 2):
                jobs.append((lv, HalfInt(tL)))
    return jobs


def run_sweep(
    l_max: int,
    n_max: int,
    kind: str = "gepi",
    threads: int = 1,
    backend: str | None = None,
) -> list[BenchRecord]:
    """Sweep identical-l vectors; results in deterministic input order."""
    saved = _backend.impl
    if backend:
        _backend.impl = _backend.get_impl(backend)
    try:
        jobs = sweep_jobs(l_max, n_max)
        if threads <= 1:
            return [run_job(lv, L, kind) for lv, L in jobs]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [pool.submit(run_job, lv, L, kind, False) for lv, L in jobs]
            return [f.result() for f in futs]
    finally:
        _backend.impl = saved


def to_csv(records: list[BenchRecord], path=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.row())
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x)."""
    import math

    pts = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pts) < 2:
        raise ValueError("not enough points for a fit")
    n = len(pts)
    mx = sum(p[0] for p in pts) / n
    my = sum(p[1] for p in pts) / n
    num = sum((p[0] - mx) * (p[1] - my) for p in pts)
    den = sum((p[0] - mx) ** 2 for p in pts)
    return num / den
