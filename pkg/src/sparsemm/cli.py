"""Command-line entry point: ``sparsemm {generate,verify,bench,grid}``.

Exit codes: 0 success, 1 verification or I/O failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, formats, kernels, oracle, workload
from .csr import csr_to_dense
from .errors import SparseMMError

WORKERS_ENV = "SPARSEMM_WORKERS"


def parse_size(text: str) -> int:
    """Accept ``1024`` or ``1k`` (k = 1024)."""
    t = text.strip().lower()
    try:
        value = int(t[:-1]) * 1024 if t.endswith("k") else int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a size: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"size must be positive: {text!r}")
    return value


def parse_sparsity(text: str) -> float:
    try:
        value = float(text.rstrip("%")) / (100 if text.endswith("%") else 1)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}") from None
    if not 0.0 <= value < 1.0:
        raise argparse.ArgumentTypeError(f"sparsity (fraction of zeros) must be in [0, 1): {text!r}")
    return value


def parse_ops(text: str) -> list[str]:
    ops = [t.strip() for t in text.split(",") if t.strip()]
    bad = [o for o in ops if o not in kernels.OPERATIONS]
    if bad or not ops:
        raise argparse.ArgumentTypeError(
            f"operations must be a comma list drawn from {','.join(kernels.OPERATIONS)}"
        )
    return ops


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "0")
    try:
        return max(0, int(raw))
    except ValueError:
        return 0


def _add_case_args(p, m=256, k=256, n=32, sparsity=0.7):
    g = p.add_argument_group("case")
    g.add_argument("--m", type=parse_size, default=m, help=f"rows of A, C, E (default {m}; 1k = 1024)")
    g.add_argument("--k", type=parse_size, default=k, help=f"columns of A, rows of B and D (default {k})")
    g.add_argument("--n", type=parse_size, default=n, help=f"columns of the dense operands (default {n})")
    g.add_argument("--sparsity", type=parse_sparsity, default=sparsity,
                   help=f"fraction of zeros in A, e.g. 0.7 or 70%% (default {sparsity})")
    g.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: derived from M, K, N, sparsity)")


def _add_config_args(p):
    g = p.add_argument_group("kernel configuration")
    g.add_argument("--vlc", type=int, choices=kernels.VLC_CHOICES, default=kernels.DEFAULT_VLC,
                   help="nonzeros per chunk (default 32)")
    g.add_argument("--nt", type=int, choices=kernels.NT_CHOICES, default=None,
                   help="tasks per row for SDDMM (default: occupancy rule); others use 1")
    g.add_argument("--workers", type=int, default=_default_workers(),
                   help=f"worker threads, 0 = all (default from ${WORKERS_ENV}, else 0)")
    g.add_argument("--prefetch", action="store_true", help="double-buffer column-index loads")


def _case(args) -> workload.BenchmarkCase:
    if args.seed is None:
        return workload.BenchmarkCase.from_dims(args.m, args.k, args.n, args.sparsity)
    return workload.BenchmarkCase(args.m, args.k, args.n, args.sparsity, args.seed)


def _config(args, case, op) -> kernels.KernelConfig:
    if op == "sddmm":
        nt = args.nt if args.nt is not None else kernels.select_nt(case.m)
    else:
        nt = 1
    return kernels.KernelConfig(vlc=args.vlc, nt=nt, workers=args.workers, prefetch=args.prefetch)


# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    case = _case(args)
    ops = workload.make_operands(case)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "pattern_mtx": out / "pattern.mtx",
        "pattern_bin": out / "pattern.bin",
        "a_bin": out / "a.bin",
        "c": out / "c.npy",
        "b": out / "b.npy",
        "d": out / "d.npy",
    }
    formats.write_matrix_market(
        ops.pattern, paths["pattern_mtx"],
        comment=f"M={case.m} K={case.k} N={case.n} sparsity={case.sparsity} seed={case.seed}",
    )
    formats.write_raw(ops.pattern, paths["pattern_bin"])
    formats.write_raw(ops.a, paths["a_bin"])
    for name in ("c", "b", "d"):
        np.save(paths[name], getattr(ops, name), allow_pickle=False)
    print(f"nnz {ops.pattern.nnz}")
    for name, p in paths.items():
        print(f"{name} {p}")
    return 0


def _load_values(path, shape):
    path = Path(path)
    if path.suffix == ".npy":
        arr = np.load(path, allow_pickle=False)
    else:
        arr = np.fromfile(path, dtype="<f4")
    return arr.reshape(shape)


def cmd_verify(args) -> int:
    case = _case(args)
    ops = workload.make_operands(case)
    selected = args.op or list(kernels.OPERATIONS)
    impls = [args.impl] if args.impl else list(kernels.IMPLEMENTATIONS)
    if args.values and len(selected) != 1:
        print("--values needs exactly one --op", file=sys.stderr)
        return 2

    expected = {
        "sddmm": lambda: oracle.dense_sddmm_oracle(ops.c, ops.b, ops.pattern),
        "spmm": lambda: oracle.dense_spmm_oracle(csr_to_dense(ops.a), ops.b),
        "fusedmm": lambda: oracle.fused_oracle(ops.c, ops.b, ops.d, ops.pattern),
    }
    print(f"case M={case.m} K={case.k} N={case.n} sparsity={case.sparsity} "
          f"seed={case.seed} nnz={ops.pattern.nnz}")
    print(f"{'op':8s} {'impl':10s} {'against':9s} {'max_abs':>10s} {'max_rel':>10s}  worst  status")

    all_ok = True

    def report(op, impl, against, rep):
        nonlocal all_ok
        all_ok &= rep.passed
        print(f"{op:8s} {impl:10s} {against:9s} {rep.max_abs_err:10.3e} {rep.max_rel_err:10.3e}  "
              f"{rep.worst_index}  {'PASS' if rep.passed else 'FAIL'}")

    for op in selected:
        truth = expected[op]()
        config = _config(args, case, op)
        results = {}
        for impl in impls:
            results[impl] = bench._call(op, impl, ops, config)()
            report(op, impl, "oracle", oracle.compare(results[impl], truth))
            if args.out:
                Path(args.out).mkdir(parents=True, exist_ok=True)
                np.save(Path(args.out) / f"{op}_{impl}.npy", results[impl], allow_pickle=False)
        if len(results) == 2:
            report(op, "vectorized", "reference",
                   oracle.compare(results["vectorized"], results["reference"]))
        if args.values:
            try:
                got = _load_values(args.values, truth.shape)
            except (OSError, ValueError) as exc:
                print(f"cannot read {args.values}: {exc}", file=sys.stderr)
                return 1
            report(op, "file", "oracle", oracle.compare(got, truth))
    return 0 if all_ok else 1


def _emit(results, args, with_status=False):
    writer = bench.report_json if args.format == "json" else bench.report_csv
    if args.out:
        writer(results, args.out, with_status=with_status)
    else:
        writer(results, stream=sys.stdout, with_status=with_status)


def cmd_bench(args) -> int:
    case = _case(args)
    config = _config(args, case, args.op)
    result = bench.time_kernel(args.op, case, config, args.iters, impl=args.impl)
    _emit([result], args)
    return 0


def cmd_grid(args) -> int:
    grid = workload.scaled_grid(args.scale_div)

    def policy(case, op):
        return _config(args, case, op)

    def progress(r):
        if args.verbose:
            print(f"{r.operation:8s} {r.case.label:22s} {r.min_time * 1e3:9.3f} ms "
                  f"{r.gflops_per_s:8.3f} Gflop/s {r.status}", file=sys.stderr)

    results = bench.run_grid(grid, args.ops, policy, impl=args.impl,
                             iterations=args.iters, progress=progress)
    _emit(results, args, with_status=True)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsemm",
        description="CSR SDDMM / SpMM / FusedMM kernels: generate inputs, verify, benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic case to disk")
    _add_case_args(p)
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="check kernels against the dense oracles")
    _add_case_args(p)
    _add_config_args(p)
    p.add_argument("--op", action="append", choices=kernels.OPERATIONS,
                   help="restrict to one operation (repeatable; default all)")
    p.add_argument("--impl", choices=kernels.IMPLEMENTATIONS, default=None,
                   help="restrict to one implementation (default both)")
    p.add_argument("--values", default=None,
                   help="also check a result file (.npy or raw float32) for the single --op")
    p.add_argument("--out", default=None, help="directory to save each kernel result as .npy")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time one kernel on one case")
    _add_case_args(p)
    _add_config_args(p)
    p.add_argument("--op", choices=kernels.OPERATIONS, default="spmm", help="operation (default spmm)")
    p.add_argument("--impl", choices=kernels.IMPLEMENTATIONS, default="vectorized",
                   help="implementation (default vectorized)")
    p.add_argument("--iters", type=int, default=bench.DEFAULT_ITERATIONS,
                   help="timed iterations after one warm-up; the minimum is reported (default 20)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("grid", help="run the 72-case benchmark grid")
    p.add_argument("--ops", type=parse_ops, default=list(kernels.OPERATIONS),
                   help="comma list of operations (default sddmm,spmm,fusedmm)")
    p.add_argument("--scale-div", type=int, default=1,
                   help="divide M and K by this power of two, floor 64 (default 1 = full size)")
    _add_config_args(p)
    p.add_argument("--impl", choices=kernels.IMPLEMENTATIONS, default="vectorized",
                   help="implementation (default vectorized)")
    p.add_argument("--iters", type=int, default=bench.DEFAULT_ITERATIONS,
                   help="timed iterations per case (default 20)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--verbose", action="store_true", help="print per-case progress to stderr")
    p.set_defaults(func=cmd_grid)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "iters", 1) < 1:
        parser.error("--iters must be >= 1")
    if getattr(args, "workers", 0) < 0:
        parser.error("--workers must be >= 0")
    if args.command == "grid":
        try:
            workload.scaled_grid(args.scale_div)
        except ValueError as exc:
            parser.error(str(exc))
    try:
        return args.func(args)
    except SparseMMError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
