"""Command-line experiment driver.

Subcommands
-----------
sample          draw uniform trees (tree text format or JSON lines)
enumerate       list every tree for small n
stats           exact mean/variance per n (CSV row per n, or JSON lines)
coupling-check  sample or exactly enumerate the size-bias coupling
kolmogorov      empirical Kolmogorov distances of the standardized count
bound           evaluate the coupling-based Kolmogorov bound

Every output embeds the full run configuration: JSON objects carry a
"config" field, CSV and text outputs start with a "# config: {...}" line
(the CSV header row follows it).  Identical configuration and seed give
byte-identical output; results do not depend on --threads (it only sets
the kernel thread count).

Exit codes: 0 ok, 2 bad configuration, 3 guard violation, 4 internal
assertion (e.g. the rejection retry cap).  Errors are reported as a JSON
object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from fractions import Fraction

import numba
import numpy as np

from . import __version__
from .coupling import (
    coupling_bound,
    coupling_marginal_exact,
    coupling_max_abs_diff_exact,
    increment_conditional_variance,
    sample_couplings_batch,
    size_bias_law_oracle,
    tv_distance,
)
from .crossings import count_crossings_fast
from .errors import GuardError, RetryLimitError
from .exact import exact_mean, exact_variance, tree_count
from .normal import empirical_kolmogorov, rate_fit, simulate_standardized, theoretical_bound
from .rng import worker_rng
from .trees import enumerate_trees, format_tree_text, sample_uniform_tree

EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_GUARD = 3
EXIT_INTERNAL = 4


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_n_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ValueError(f"bad n list {text!r}") from exc
    if not values:
        raise ValueError("empty n list")
    return values


def _config_dict(args: argparse.Namespace) -> dict:
    skip = {"func", "out"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}
    cfg["version"] = __version__
    return cfg


class _Output:
    def __init__(self, path: str):
        self.path = path

    def __enter__(self):
        if self.path == "-":
            self.fh = sys.stdout
            self._close = False
        else:
            self.fh = open(self.path, "w", encoding="utf-8")
            self._close = True
        return self.fh

    def __exit__(self, *exc):
        if self._close:
            self.fh.close()
        return False


def _emit_json_line(fh, obj: dict) -> None:
    fh.write(json.dumps(obj) + "\n")


def cmd_sample(args) -> int:
    cfg = _config_dict(args)
    rng = worker_rng(args.seed, 0)
    with _Output(args.out) as fh:
        if args.format == "text":
            fh.write(f"# config: {json.dumps(cfg)}\n")
        for _ in range(args.samples):
            t = sample_uniform_tree(args.n, rng)
            if args.format == "json":
                _emit_json_line(fh, {
                    "config": cfg,
                    "n": t.n,
                    "edges": [[int(u), int(v)] for u, v in t.edge_array],
                    "crossings": count_crossings_fast(t),
                })
            else:
                fh.write(format_tree_text(t))
                fh.write("\n")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    cfg = _config_dict(args)
    with _Output(args.out) as fh:
        if args.format == "text":
            fh.write(f"# config: {json.dumps(cfg)}\n")
        for t in enumerate_trees(args.n):
            if args.format == "json":
                _emit_json_line(fh, {
                    "config": cfg,
                    "n": t.n,
                    "edges": [[int(u), int(v)] for u, v in t.edge_array],
                    "crossings": count_crossings_fast(t),
                })
            else:
                fh.write(format_tree_text(t))
                fh.write("\n")
    return EXIT_OK


def cmd_stats(args) -> int:
    ns = _parse_n_list(args.n_list) if args.n_list else [args.n]
    if args.n_list is None and args.n is None:
        raise ValueError("stats needs --n or --n-list")
    cfg = _config_dict(args)
    with _Output(args.out) as fh:
        if args.format == "csv":
            fh.write(f"# config: {json.dumps(cfg)}\n")
            fh.write("n,mean_num,mean_den,var_num,var_den,mean_float,var_float\n")
        for n in ns:
            mean = exact_mean(n)
            var = exact_variance(n)
            if args.format == "json":
                _emit_json_line(fh, {
                    "config": cfg,
                    "n": n,
                    "mean": _frac_str(mean),
                    "variance": _frac_str(var),
                    "mean_float": float(mean),
                    "var_float": float(var),
                    "tree_count": tree_count(n),
                })
            else:
                fh.write(
                    f"{n},{mean.numerator},{mean.denominator},"
                    f"{var.numerator},{var.denominator},{float(mean)!r},{float(var)!r}\n"
                )
    return EXIT_OK


def cmd_coupling_check(args) -> int:
    cfg = _config_dict(args)
    n = args.n
    report: dict = {"config": cfg, "n": n, "mode": args.mode,
                    "bound_4n_minus_3": coupling_bound(n)}
    if args.mode == "exact":
        law = coupling_marginal_exact(n)
        oracle = size_bias_law_oracle(n)
        iv = increment_conditional_variance(n)
        report["tv_distance_to_oracle"] = _frac_str(tv_distance(law.pmf, oracle.pmf))
        report["max_abs_diff"] = coupling_max_abs_diff_exact(n)
        report["psi_squared"] = _frac_str(iv.by_count)
        report["psi_squared_float"] = float(iv.by_count)
    else:
        batch = sample_couplings_batch(n, args.samples, args.seed, mode=args.mode)
        report["samples"] = args.samples
        report["max_abs_diff"] = batch.max_abs_diff
        if batch.retries is not None:
            draws = int(batch.retries.sum()) + args.samples
            report["acceptance_rate"] = args.samples / draws
        if 4 <= n <= 7:
            oracle = size_bias_law_oracle(n)
            values, reps = np.unique(batch.x_s, return_counts=True)
            emp = {int(k): Fraction(int(r), args.samples) for k, r in zip(values, reps)}
            report["tv_distance_to_oracle"] = float(tv_distance(emp, oracle.pmf))
    with _Output(args.out) as fh:
        _emit_json_line(fh, report)
    return EXIT_OK


def cmd_kolmogorov(args) -> int:
    ns = _parse_n_list(args.n_list)
    cfg = _config_dict(args)
    points: list[tuple[float, float]] = []
    with _Output(args.out) as fh:
        fh.write(f"# config: {json.dumps(cfg)}\n")
        fh.write("n,N,ks_distance,ks_stderr_proxy,bound_total,slope_running\n")
        for n in ns:
            summary = simulate_standardized(n, args.samples, worker_rng(args.seed, n))
            dist = empirical_kolmogorov(summary)
            points.append((float(n), dist))
            stderr_proxy = 1.3581 / (args.samples ** 0.5)  # 95% one-sample KS radius
            bound = theoretical_bound(n).total
            if len(points) >= 3:
                slope = f"{rate_fit(points)[0]!r}"
            elif len(points) == 2:
                slope = f"{float(np.polyfit(np.log([p[0] for p in points]), np.log([p[1] for p in points]), 1)[0])!r}"
            else:
                slope = ""
            fh.write(f"{n},{args.samples},{dist!r},{stderr_proxy!r},{bound!r},{slope}\n")
    return EXIT_OK


def cmd_bound(args) -> int:
    report = theoretical_bound(args.n)
    obj = {"config": _config_dict(args)}
    obj.update(asdict(report))
    with _Output(args.out) as fh:
        _emit_json_line(fh, obj)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treecross",
        description="Crossing statistics of uniform random labelled trees in convex position.",
    )
    parser.add_argument("--version", action="version", version=f"treecross {__version__} (interface v1)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, seed=True, threads=True):
        if seed:
            p.add_argument("--seed", type=int, default=0, help="64-bit master seed")
        if threads:
            p.add_argument("--threads", type=int, default=1,
                           help="kernel threads (results do not depend on this)")
        p.add_argument("--out", default="-", help="output path, '-' for stdout")

    p = sub.add_parser("sample", help="draw uniform random trees")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")
    common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("enumerate", help="list all labelled trees (small n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    common(p, seed=False)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("stats", help="exact mean and variance of the crossing count")
    p.add_argument("--n", type=int)
    p.add_argument("--n-list", dest="n_list")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    common(p, seed=False)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("coupling-check", help="validate the size-bias coupling")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("construct", "reject", "exact"), default="construct")
    p.add_argument("--samples", type=int, default=10000)
    common(p)
    p.set_defaults(func=cmd_coupling_check)

    p = sub.add_parser("kolmogorov", help="empirical Kolmogorov distances and rate fit")
    p.add_argument("--n-list", dest="n_list", required=True,
                   help="comma-separated n values, e.g. 50,100,200")
    p.add_argument("--samples", type=int, default=100000)
    common(p)
    p.set_defaults(func=cmd_kolmogorov)

    p = sub.add_parser("bound", help="evaluate the Kolmogorov bound at n")
    p.add_argument("--n", type=int, required=True)
    common(p, seed=False)
    p.set_defaults(func=cmd_bound)

    return parser


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "code": code}) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = getattr(args, "threads", None)
    if threads is not None:
        if threads < 1:
            return _fail(EXIT_BAD_CONFIG, "bad-config", "--threads must be >= 1")
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
    try:
        return args.func(args)
    except GuardError as exc:
        return _fail(EXIT_GUARD, "guard-violation", str(exc))
    except (RetryLimitError, AssertionError) as exc:
        return _fail(EXIT_INTERNAL, "internal-assertion", str(exc))
    except (ValueError, OSError) as exc:
        return _fail(EXIT_BAD_CONFIG, "bad-config", str(exc))


if __name__ == "__main__":
    sys.exit(main())
