"""Timing harness, flop accounting and roofline bounds.

Timing follows a min-of-N protocol: one untimed warm-up call, then ``N`` timed
calls on identical inputs, and the fastest one is reported. Input generation
and result checking never fall inside the timed region.
"""
from __future__ import annotations

import csv
import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .kernels import KERNELS, OPERATIONS, KernelConfig, select_nt
from .workload import BenchmarkCase, Operands, make_operands

DEFAULT_ITERATIONS = 20
BYTES_F32 = 4
BYTES_INDEX = 4  # column indices / row offsets as 32-bit on the device

CSV_FIELDS = [
    "op", "impl", "M", "K", "N", "sparsity", "nnz", "vlc", "nt", "workers",
    "iters", "min_time_s", "gflops", "ai_worst", "ai_best",
]


def flops_of(operation: str, nnz: int, n: int) -> int:
    """One multiply and one add per (nonzero, lane) for each sparse product."""
    per_product = 2 * int(nnz) * int(n)
    if operation in ("sddmm", "spmm"):
        return per_product
    if operation == "fusedmm":
        return 2 * per_product
    raise ValueError(f"unknown operation {operation!r}")


def arithmetic_intensity_bounds(m: int, k: int, n: int, nnz: int,
                                operation: str = "sddmm") -> tuple[float, float]:
    """Flops per byte with no dense-row reuse (worst) and perfect reuse (best).

    Worst case: every nonzero re-reads an ``n``-wide dense row, plus its column
    index and its value. Best case: every array crosses memory exactly once
    (two ``n``-wide dense operands, ``nnz`` indices and values, the row
    pointer). FusedMM reads two dense rows per nonzero and never stores the
    sampled values, and its best case adds ``D`` and ``E``.
    """
    flops = flops_of(operation, nnz, n)
    if operation == "fusedmm":
        worst = 2 * BYTES_F32 * n * nnz + BYTES_INDEX * nnz
        best = (BYTES_F32 * (2 * m * n + 2 * k * n) + BYTES_INDEX * (nnz + m + 1))
    else:
        worst = BYTES_F32 * n * nnz + BYTES_INDEX * nnz + BYTES_F32 * nnz
        best = BYTES_F32 * (m * n + k * n + nnz) + BYTES_INDEX * (nnz + m + 1)
    return flops / worst, flops / best


@dataclass
class BenchResult:
    case: BenchmarkCase
    operation: str
    impl: str
    config: KernelConfig
    all_times: list[float] = field(default_factory=list)
    nnz: int = 0
    flops: int = 0
    ai_worst: float = math.nan
    ai_best: float = math.nan
    status: str = "ok"

    @property
    def min_time(self) -> float:
        return min(self.all_times) if self.all_times else math.nan

    @property
    def gflops_per_s(self) -> float:
        t = self.min_time
        return self.flops / t / 1e9 if t > 0 else math.nan

    def as_row(self) -> dict:
        return {
            "op": self.operation,
            "impl": self.impl,
            "M": self.case.m,
            "K": self.case.k,
            "N": self.case.n,
            "sparsity": self.case.sparsity,
            "nnz": self.nnz,
            "vlc": self.config.vlc,
            "nt": self.config.nt,
            "workers": self.config.workers,
            "iters": len(self.all_times),
            "min_time_s": self.min_time,
            "gflops": self.gflops_per_s,
            "ai_worst": self.ai_worst,
            "ai_best": self.ai_best,
        }


def default_config(case: BenchmarkCase, operation: str, *, vlc: int = 32,
                 workers: int = 0, prefetch: bool = False) -> KernelConfig:
    """Default tuning: NT from the occupancy rule for SDDMM, one task per row otherwise."""
    nt = select_nt(case.m) if operation == "sddmm" else 1
    return KernelConfig(vlc=vlc, nt=nt, workers=workers, prefetch=prefetch)


def _call(operation: str, impl: str, ops: Operands, config: KernelConfig):
    fn = KERNELS[(operation, impl)]
    if operation == "sddmm":
        return lambda: fn(ops.pattern, ops.c, ops.b, config)
    if operation == "spmm":
        return lambda: fn(ops.a, ops.b, config)
    return lambda: fn(ops.pattern, ops.c, ops.b, ops.d, config)


def time_kernel(operation: str, case: BenchmarkCase, config: KernelConfig,
                iterations: int = DEFAULT_ITERATIONS, impl: str = "vectorized",
                operands: Operands | None = None) -> BenchResult:
    """Time one kernel on one case; returns every iteration's wall time."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if (operation, impl) not in KERNELS:
        raise ValueError(f"unknown kernel {operation}/{impl}")
    ops = operands if operands is not None else make_operands(case)
    run = _call(operation, impl, ops, config)
    run()  # warm-up: JIT specialisation and cold caches

    times = []
    for _ in range(iterations):
        t0 = time.perf_counter_ns()
        run()
        times.append((time.perf_counter_ns() - t0) * 1e-9)

    nnz = ops.pattern.nnz
    ai_worst, ai_best = arithmetic_intensity_bounds(case.m, case.k, case.n, nnz, operation)
    return BenchResult(
        case=case, operation=operation, impl=impl, config=config, all_times=times,
        nnz=nnz, flops=flops_of(operation, nnz, case.n),
        ai_worst=ai_worst, ai_best=ai_best,
    )


ConfigPolicy = Callable[[BenchmarkCase, str], KernelConfig]


def run_grid(grid: Sequence[BenchmarkCase], operations: Iterable[str] = OPERATIONS,
             config_policy: ConfigPolicy = default_config, *,
             impl: str = "vectorized", iterations: int = DEFAULT_ITERATIONS,
             progress: Callable[[BenchResult], None] | None = None) -> list[BenchResult]:
    """Benchmark every (case, operation) pair.

    Results come back grouped by operation, each group in grid order. A case
    that fails is recorded with a non-``ok`` status instead of stopping the run.
    """
    operations = list(operations)
    for op in operations:
        if op not in OPERATIONS:
            raise ValueError(f"unknown operation {op!r}")
    by_op = {op: [] for op in operations}
    for case in grid:
        try:
            ops = make_operands(case)
        except Exception as exc:  # noqa: BLE001 - recorded per case
            ops, gen_error = None, exc
        for op in operations:
            config = config_policy(case, op)
            if ops is None:
                res = BenchResult(case, op, impl, config,
                                  status=f"error: {type(gen_error).__name__}: {gen_error}")
            else:
                try:
                    res = time_kernel(op, case, config, iterations, impl, operands=ops)
                except Exception as exc:  # noqa: BLE001
                    res = BenchResult(case, op, impl, config, nnz=ops.pattern.nnz,
                                      status=f"error: {type(exc).__name__}: {exc}")
            by_op[op].append(res)
            if progress is not None:
                progress(res)
        del ops
    return [r for op in operations for r in by_op[op]]


def _rows(results, with_status):
    for r in results:
        row = r.as_row()
        if with_status:
            row["status"] = r.status
        yield row


def report_csv(results: Sequence[BenchResult], path: str | os.PathLike | None = None,
               *, with_status: bool = False, stream=None) -> None:
    """Write one CSV row per result (header always present)."""
    fields = CSV_FIELDS + (["status"] if with_status else [])
    own = stream is None
    f = open(path, "w", newline="", encoding="utf-8") if own else stream
    try:
        w = csv.DictWriter(f, fieldnames=fields, lineterminator="\r\n")
        w.writeheader()
        for row in _rows(results, with_status):
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    finally:
        if own:
            f.close()


def report_json(results: Sequence[BenchResult], path: str | os.PathLike | None = None,
                *, with_status: bool = False, stream=None) -> None:
    rows = []
    for row in _rows(results, with_status):
        rows.append({k: (None if isinstance(v, float) and math.isnan(v) else v)
                     for k, v in row.items()})
    text = json.dumps(rows, indent=1)
    if stream is not None:
        stream.write(text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
