"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 input error, 3 exhaustive-search
budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import reference
from .core import WeightedEnsemble, canonicalize, format_bucket_order, is_bucket_matrix, parse_bucket_order
from .errors import BudgetExceeded, InvalidMatrix, PreflibParseError
from .exact import DEFAULT_BUDGET, decompositions, exact_osbop_equal, space_size, space_table
from .ingest import build_matrix, load_matrix, read_preflib
from .objective import fitness, grid_fraction, utopia
from .sls import SlsConfig, sls_osbop

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
PREFLIB_SUFFIXES = (".soc", ".soi", ".toc", ".toi")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_range(text: str) -> list[int]:
    """``"3"`` -> [3]; ``"1..4"`` -> [1, 2, 3, 4]."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or lo..hi, got {text!r}") from None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


# -- input ----------------------------------------------------------------


def _add_input(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--input", type=Path, help="matrix CSV file")
    g.add_argument("--preflib", type=Path, help="PrefLib election file")
    g.add_argument("--dataset", choices=sorted(reference.SAMPLES), help="bundled sample matrix")


def load_input(args) -> tuple[np.ndarray, str]:
    try:
        if args.dataset:
            return reference.SAMPLES[args.dataset].copy(), f"dataset:{args.dataset}"
        if args.preflib:
            return build_matrix(read_preflib(args.preflib)), str(args.preflib)
        return load_matrix(args.input), str(args.input)
    except OSError as exc:
        raise InputError(f"cannot read input: {exc}") from exc
    except (InvalidMatrix, PreflibParseError, ValueError) as exc:
        raise InputError(f"invalid input: {exc}") from exc


def _ensemble_json(ens: WeightedEnsemble) -> list[dict]:
    return [{"order": format_bucket_order(o), "weight": w} for o, w in zip(ens.orders, ens.weights)]


def _ensemble_text(ens: WeightedEnsemble, exact: bool = False) -> str:
    fmt = repr if exact else (lambda w: f"{w:.4f}")
    return " + ".join(f"{fmt(w)}*{format_bucket_order(o)}" for o, w in zip(ens.orders, ens.weights))


def _emit(text: str, out) -> None:
    out.write(text if text.endswith("\n") else text + "\n")


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x) -> str:
    return "" if x is None else repr(float(x)) if isinstance(x, float) else str(x)


# -- solve ----------------------------------------------------------------


def _run_seed(job: tuple[np.ndarray, SlsConfig]) -> dict:
    c, config = job
    start = time.perf_counter()
    ens, f, trace = sls_osbop(c, config)
    ens = canonicalize(ens)
    return {
        "seed": config.seed,
        "fitness": f,
        "ensemble": ens,
        "w1": ens.weights[0],
        "degenerate": any(w <= 1e-12 for w in ens.weights) or ens.b < config.b,
        "accepted": trace.accepted,
        "evaluations": trace.evaluations,
        "seconds": time.perf_counter() - start,
        "trace": trace,
    }


def cmd_solve(args, out) -> dict:
    variant = args.variant
    b = args.b if args.b is not None else (1 if variant == "obop" else 2)
    if variant == "obop" and b != 1:
        raise UsageError("--variant obop requires --b 1")
    if b < 1:
        raise UsageError("--b must be positive")
    if args.iters < 0 or args.tune_iters < 0:
        raise UsageError("iteration counts must be nonnegative")
    seeds = [s for chunk in (args.seed or [[0]]) for s in chunk]
    c, source = load_input(args)
    start = time.perf_counter()
    configs = [
        SlsConfig(
            b=b,
            equal_weights=variant != "osbop",
            outer_iters=args.iters,
            tune_iters=args.tune_iters,
            seed=s,
        )
        for s in seeds
    ]
    jobs = [(c, cfg) for cfg in configs]
    if args.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            runs = list(pool.map(_run_seed, jobs))
    else:
        runs = [_run_seed(j) for j in jobs]
    best = min(runs, key=lambda r: r["fitness"])
    if args.trace:
        Path(args.trace).write_text(best["trace"].to_csv(), encoding="utf-8")
    report = {
        "command": "solve",
        "input": {"source": source, "n": int(c.shape[0])},
        "variant": variant,
        "b": b,
        "config": {"iters": args.iters, "tune_iters": args.tune_iters, "seeds": seeds},
        "utopia": {"u_C": utopia(c, 1).value, "u_C^b": utopia(c, b).value},
        "runs": [
            {
                "seed": r["seed"],
                "fitness": r["fitness"],
                "w1": r["w1"],
                "ensemble": _ensemble_json(r["ensemble"]),
                "degenerate": r["degenerate"],
                "accepted": r["accepted"],
                "evaluations": r["evaluations"],
                "seconds": r["seconds"],
            }
            for r in runs
        ],
        "best": {
            "seed": best["seed"],
            "fitness": best["fitness"],
            "w1": best["w1"],
            "ensemble": _ensemble_json(best["ensemble"]),
        },
        "wall_seconds": time.perf_counter() - start,
    }
    if args.out == "json":
        _emit(json.dumps(report, indent=2), out)
    elif args.out == "csv":
        rows = [
            [r["seed"], _num(r["fitness"]), _num(r["w1"]), _ensemble_text(r["ensemble"], exact=True),
             r["accepted"], r["evaluations"]]
            for r in runs
        ]
        _emit(_csv_text(["seed", "fitness", "w1", "ensemble", "accepted", "evaluations"], rows), out)
    else:
        lines = [
            f"input: {source} (n={c.shape[0]})  variant: {variant}  b={b}",
            f"u_C = {report['utopia']['u_C']:.4f}   u_C^{b} = {report['utopia']['u_C^b']:.4f}",
        ]
        for r in runs:
            lines.append(f"seed {r['seed']}: f = {r['fitness']:.4f}   {_ensemble_text(r['ensemble'])}")
        lines.append(
            f"best: seed {best['seed']}  f = {best['fitness']:.4f}  w1 = {best['w1']:.4f}  "
            f"{_ensemble_text(best['ensemble'])}"
        )
        _emit("\n".join(lines), out)
    return report


# -- exact ----------------------------------------------------------------


def cmd_exact(args, out) -> dict:
    if args.b < 1:
        raise UsageError("--b must be positive")
    c, source = load_input(args)
    start = time.perf_counter()
    res = exact_osbop_equal(c, args.b, budget=args.budget)
    report = {
        "command": "exact",
        "input": {"source": source, "n": int(c.shape[0])},
        "variant": "obop" if args.b == 1 else "osbop-e",
        "b": args.b,
        "optimum": res.optimum,
        "utopia": utopia(c, args.b).value,
        "explored": res.explored,
        "solutions": [[format_bucket_order(o) for o in sol] for sol in res.solutions],
        "wall_seconds": time.perf_counter() - start,
    }
    if args.out == "json":
        _emit(json.dumps(report, indent=2), out)
    elif args.out == "csv":
        rows = [[i, _num(res.optimum), " + ".join(sol)] for i, sol in enumerate(report["solutions"], 1)]
        _emit(_csv_text(["solution", "fitness", "orders"], rows), out)
    else:
        lines = [
            f"input: {source} (n={c.shape[0]})  b={args.b}  explored {res.explored} candidates",
            f"optimum f = {res.optimum:.4f}  (u_C^{args.b} = {report['utopia']:.4f})",
            f"{len(res.solutions)} optimal solution set(s):",
        ]
        w = f"(1/{args.b})"
        lines += ["  " + " + ".join(f"{w}*{o}" for o in sol) for sol in report["solutions"]]
        _emit("\n".join(lines), out)
    return report


# -- utopia ---------------------------------------------------------------


def cmd_utopia(args, out) -> dict:
    bs = args.b_range or [args.b or 1]
    if min(bs) < 1:
        raise UsageError("b must be positive")
    c, source = load_input(args)
    entries = []
    for b in bs:
        rep = utopia(c, b)
        if b == 1:
            decomposable = is_bucket_matrix(rep.matrix)
        else:
            try:
                decomposable = bool(decompositions(rep.matrix, b, budget=args.budget))
            except BudgetExceeded:
                decomposable = None
        entries.append(
            {
                "b": b,
                "value": rep.value,
                "matrix": rep.matrix.tolist(),
                "fractions": [[grid_fraction(x, b) for x in row] for row in rep.matrix],
                "bucket_matrix": is_bucket_matrix(rep.matrix),
                "decomposable": decomposable,
            }
        )
    report = {"command": "utopia", "input": {"source": source, "n": int(c.shape[0])}, "utopia": entries}
    if args.out == "json":
        _emit(json.dumps(report, indent=2), out)
    elif args.out == "csv":
        rows = [[e["b"], _num(e["value"]), e["bucket_matrix"], e["decomposable"]] for e in entries]
        _emit(_csv_text(["b", "value", "bucket_matrix", "decomposable"], rows), out)
    else:
        lines = [f"input: {source} (n={c.shape[0]})"]
        for e in entries:
            feas = {True: "yes", False: "no", None: "unknown (budget)"}[e["decomposable"]]
            lines.append(f"b={e['b']}: u = {e['value']:.4f}   feasible: {feas}")
            width = max(len(x) for row in e["fractions"] for x in row)
            lines += ["  " + "  ".join(x.rjust(width) for x in row) for row in e["fractions"]]
        _emit("\n".join(lines), out)
    return report


# -- space ----------------------------------------------------------------


def cmd_space(args, out) -> dict:
    ns = args.n_range
    bs = args.b_range
    if min(ns) < 1 or min(bs) < 1:
        raise UsageError("n and b must be positive")
    if args.strict:
        if bs != [1]:
            raise UsageError("--strict is only defined for b = 1")
        rows = [{"n": n, "b": 1, "count": space_size(n, 1, strict=True).count,
                 "strict_count": space_size(n, 1, strict=True).count} for n in ns]
    else:
        rows = space_table(ns, bs)
    header = ["n", "b", "count", "strict_count"]
    if args.out == "json":
        _emit(json.dumps({"command": "space", "strict": args.strict, "rows": rows}, indent=2), out)
    else:
        _emit(_csv_text(header, [[r[h] if r[h] is not None else "" for h in header] for r in rows]), out)
    return {"command": "space", "rows": rows}


# -- reproduce-tables -----------------------------------------------------


def _find_datasets(data_dir: Path | None) -> dict[str, tuple[np.ndarray, str]]:
    found: dict[str, tuple[np.ndarray, str]] = {}
    if data_dir is None:
        return {"4-2": (reference.DATASET_4_2.copy(), "bundled:4-2")}
    if not data_dir.is_dir():
        raise InputError(f"not a directory: {data_dir}")
    for path in sorted(data_dir.iterdir()):
        key = path.stem
        if key not in reference.BENCHMARK_RESULTS:
            continue
        try:
            if path.suffix in PREFLIB_SUFFIXES:
                found[key] = (build_matrix(read_preflib(path)), str(path))
            elif path.suffix == ".csv":
                found[key] = (load_matrix(path), str(path))
        except (InvalidMatrix, PreflibParseError, ValueError) as exc:
            raise InputError(f"{path}: {exc}") from exc
    return found


def _best_sls(c, b, equal, args) -> tuple[float, WeightedEnsemble]:
    runs = [
        _run_seed((c, SlsConfig(b=b, equal_weights=equal, outer_iters=args.iters,
                                tune_iters=args.tune_iters, seed=s)))
        for s in args.seeds
    ]
    best = min(runs, key=lambda r: r["fitness"])
    return best["fitness"], best["ensemble"]


def _status(expected, observed, tol, stochastic=False) -> str:
    if observed is None:
        return "skipped"
    if abs(observed - expected) <= tol:
        return "match"
    if stochastic and observed < expected:
        return "better"
    return "mismatch"


def cmd_reproduce(args, out) -> dict:
    datasets = _find_datasets(args.data_dir)
    rows = []
    for key, (c, source) in datasets.items():
        n = c.shape[0]
        ref = reference.BENCHMARK_RESULTS[key]
        if n != ref[0]:
            raise InputError(f"{source}: dataset {key} should rank {ref[0]} items, found {n}")
        observed = {"u1": utopia(c, 1).value, "u2": utopia(c, 2).value}
        for name, b, equal in (("obop", 1, True), ("osbop2e", 2, True), ("osbop2", 2, False)):
            f, ens = _best_sls(c, b, equal, args)
            observed[name] = f
            if name == "osbop2":
                observed["w1"] = ens.weights[0]
        for col, expected in zip(reference.BENCHMARK_COLUMNS[1:], ref[1:]):
            tol = 0.05 if col == "w1" else 0.005 + 1e-9
            status = "soft" if col == "w1" else _status(expected, observed[col], tol, col.startswith(("obop", "osbop")))
            rows.append([key, "benchmark", col, expected, observed[col], status])
        small = reference.SMALL_RESULTS.get(key)
        if small:
            for name, (expected, _) in small.items():
                if name == "osbop2":
                    got = observed["osbop2"]
                    status = _status(expected, got, 1e-3, stochastic=True)
                else:
                    b = 1 if name == "obop" else int(name[len("osbop")])
                    try:
                        got = exact_osbop_equal(c, b, budget=args.budget).optimum
                    except BudgetExceeded:
                        got = None
                    status = _status(expected, got, 1e-3)
                rows.append([key, "small", name, expected, got, status])
    header = ["dataset", "table", "quantity", "expected", "observed", "status"]
    if args.out == "json":
        _emit(json.dumps({"command": "reproduce-tables", "rows": [dict(zip(header, r)) for r in rows]}, indent=2), out)
    else:
        _emit(_csv_text(header, [[r[0], r[1], r[2], _num(r[3]), _num(r[4]), r[5]] for r in rows]), out)
    return {"command": "reproduce-tables", "rows": rows}


# -- check ----------------------------------------------------------------


def verify_report(report: dict, c: np.ndarray, tol: float = 1e-9) -> bool:
    """Re-evaluate every ensemble in a solve report against ``c``."""
    for run in report["runs"]:
        ens = WeightedEnsemble(
            tuple(parse_bucket_order(e["order"], c.shape[0]) for e in run["ensemble"]),
            tuple(e["weight"] for e in run["ensemble"]),
        )
        if not math.isclose(fitness(ens, c), run["fitness"], abs_tol=tol):
            return False
    return True


# -- entry point ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="osbop", description="Bucket-order consensus solvers.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="stochastic local search")
    _add_input(p)
    p.add_argument("--variant", choices=("obop", "osbop-e", "osbop"), default="osbop")
    p.add_argument("--b", type=int, default=None)
    p.add_argument("--iters", type=int, default=10_000, help="outer iterations (t1)")
    p.add_argument("--tune-iters", type=int, default=100, help="weight tuning moves (t2)")
    p.add_argument("--seed", type=parse_range, action="append",
                   help="seed or seed range lo..hi; repeatable")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trace", type=Path, help="write the best run's trace CSV here")
    p.add_argument("--out", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("exact", help="exhaustive equal-weight search")
    _add_input(p)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--out", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("utopia", help="utopian matrices and values")
    _add_input(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--b", type=int)
    g.add_argument("--b-range", type=parse_range)
    p.add_argument("--budget", type=int, default=10**6,
                   help="candidate budget for the decomposition check")
    p.add_argument("--out", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=cmd_utopia)

    p = sub.add_parser("space", help="solution-space sizes")
    p.add_argument("--n-range", type=parse_range, default=parse_range("2..10"))
    p.add_argument("--b-range", type=parse_range, default=parse_range("1..4"))
    p.add_argument("--strict", action="store_true", help="tie-free orders (b = 1 only)")
    p.add_argument("--out", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_space)

    p = sub.add_parser("reproduce-tables", help="rerun the benchmark grid and diff against published values")
    p.add_argument("--data-dir", type=Path, help="directory of <id>.soc/.soi/.toc/.toi/.csv files")
    p.add_argument("--iters", type=int, default=10_000)
    p.add_argument("--tune-iters", type=int, default=100)
    p.add_argument("--seeds", type=parse_range, default=parse_range("1..3"))
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--out", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.func(args, out)
    except UsageError as exc:
        print(f"osbop: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"osbop: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"osbop: {exc}; use 'osbop solve' (local search) instead", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
