"""Command-line interface: ``ckpca {reduce,detect,cluster,bench}``.

Every subcommand accepts ``--config FILE`` with a JSON object whose keys are
the long option names (dashes or underscores); explicit flags override it.
Exit codes: 0 success, 1 numeric/runtime failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import CHANGEPOINT_METHODS, CLUSTER_METHODS, report_dict, run_changepoint_bench, run_cluster_bench, table_rows
from .cluster import IterClusterConfig, iterative_subspace_cluster
from .detect import DetectorConfig, detect_pipeline
from .dimsel import TrrConfig
from .exceptions import BadScenario, CkpcaError, InvalidAlpha, InvalidConfig, InvalidKernel, ParseError
from .kernels import FAMILIES, KernelSpec
from .reduction import reduce
from .simdata import KINDS, Scenario

USAGE_ERRORS = (InvalidConfig, InvalidKernel, InvalidAlpha, BadScenario)


def read_matrix(path) -> tuple[np.ndarray, list[str] | None]:
    """Read a numeric CSV; a first row with any non-numeric cell is a header."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path}: no data rows")

    def numeric(cell):
        try:
            float(cell)
            return True
        except ValueError:
            return False

    header = None
    if not all(numeric(c) for c in rows[0]):
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    if not rows:
        raise ParseError(f"{path}: header but no data rows")
    width = len(header) if header else len(rows[0])
    first_line = 2 if header else 1
    data = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"{path}: row {i + first_line} has {len(row)} columns, expected {width}")
        for j, cell in enumerate(row):
            try:
                data[i, j] = float(cell)
            except ValueError:
                raise ParseError(f"{path}: row {i + first_line}, column {j + 1}: {cell!r} is not numeric") from None
    return data, header


def write_matrix(path, M, header=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        for row in np.atleast_2d(M):
            w.writerow([repr(float(v)) for v in row])


def _plain(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_plain) + "\n")


def _sibling(path, suffix: str, tag: str = "") -> Path:
    p = Path(path)
    return p.with_name(p.stem + tag + suffix)


def _kernel(args) -> KernelSpec:
    return KernelSpec(family=args.kernel, bandwidth=args.bandwidth, m=args.m)


def _trr(args) -> TrrConfig:
    return TrrConfig(tau=args.tau, c_n=args.cn)


def _detector(args) -> DetectorConfig:
    return DetectorConfig(min_size=args.min_size, n_permutations=args.permutations,
                          significance=args.alpha_sig, max_changes=args.max_changes, seed=args.seed)


def _effective(args) -> dict:
    skip = {"func", "config", "command", "scenario_name"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _spectrum_report(red) -> dict:
    return {
        "q_hat": red.q_hat,
        "eigenvalues": red.spectrum.eigenvalues.tolist(),
        "c_n": red.c_n,
        "tau": red.tau,
        "bandwidth": red.bandwidth,
        "flags": red.flags,
        "mode": red.mode,
        **red.meta,
    }


def cmd_reduce(args) -> int:
    X, _ = read_matrix(args.input)
    red = reduce(X, args.mode, kernel=_kernel(args), alpha=args.alpha, trr=_trr(args))
    out = args.output or _sibling(args.input, ".csv", "_reduced")
    write_matrix(out, red.reduced, [f"f{i + 1}" for i in range(red.q_hat)])
    write_json(args.report or _sibling(out, ".json"), {"config": _effective(args), **_spectrum_report(red)})
    return 0


def cmd_detect(args) -> int:
    X, _ = read_matrix(args.input)
    res = detect_pipeline(X, args.mode, kernel=_kernel(args), alpha=args.alpha, trr=_trr(args),
                          detector=_detector(args))
    out = args.output or _sibling(args.input, ".json", "_changes")
    report = {
        "change_points": res.change_points,
        "s_hat": res.s_hat,
        "p_values": res.p_values,
        "tests": [vars(t) for t in res.tests],
        "seed": args.seed,
        "config": _effective(args),
        "q_hat": res.reduction.q_hat if res.reduction else None,
        "reduction": _spectrum_report(res.reduction) if res.reduction else None,
    }
    write_json(out, report)
    first = (res.reduction.reduced[:, 0] if res.reduction else X[:, 0])
    marks = np.zeros(X.shape[0], dtype=int)
    marks[res.change_points] = 1
    plot = args.plot or _sibling(out, ".csv", "_plot")
    with open(plot, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "f1", "change_point"])
        for i, (v, m) in enumerate(zip(first, marks)):
            w.writerow([i, repr(float(v)), m])
    return 0


def cmd_cluster(args) -> int:
    X, _ = read_matrix(args.input)
    config = IterClusterConfig(d=args.d, max_outer_iterations=args.max_outer, ri_stop=args.ri_stop,
                               restarts=args.restarts, trr=_trr(args), seed=args.seed)
    res = iterative_subspace_cluster(X, config, _kernel(args))
    out = args.output or _sibling(args.input, ".csv", "_labels")
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label"])
        w.writerows([[int(v)] for v in res.partition.labels])
    write_json(args.report or _sibling(out, ".json"), {
        "d": res.partition.d,
        "sizes": res.partition.sizes.tolist(),
        "q_hat_per_iteration": res.q_hats,
        "outer_iterations": res.outer_iterations,
        "converged": res.converged,
        "ri_trace": res.ri_trace,
        "bandwidth": res.bandwidth,
        "config": _effective(args),
    })
    return 0


def cmd_bench(args) -> int:
    args.scenario = args.scenario or args.scenario_name
    if args.scenario is None:
        raise InvalidConfig("bench needs a scenario (positional or --scenario)")
    scenario = Scenario(kind=args.scenario, p=args.p, n=args.n, balance=args.balance, df=args.df,
                        delta=args.delta, outlier_fraction=args.outliers,
                        t_unit_variance=args.t_unit_variance)
    if args.scenario == "clustershells":
        methods = args.methods or ["ckpca", "raw"]
        config = IterClusterConfig(d=args.d, max_outer_iterations=args.max_outer, ri_stop=args.ri_stop,
                                   restarts=args.restarts, trr=_trr(args))
        reports = run_cluster_bench(scenario, methods, args.reps, args.seed, _kernel(args), config, args.jobs)
    else:
        methods = args.methods or list(CHANGEPOINT_METHODS)
        reports = run_changepoint_bench(scenario, methods, args.reps, args.seed, _kernel(args),
                                        args.alpha, _trr(args), _detector(args), args.jobs)
    out = args.output or Path(f"bench_{args.scenario}.json")
    write_json(out, {"scenario": scenario.to_dict(), "config": _effective(args), "methods": report_dict(reports)})
    rows = table_rows(reports)
    with open(args.table or _sibling(out, ".csv"), "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for row in rows:
            w.writerow({k: (f"{v:.3f}" if isinstance(v, float) else v) for k, v in row.items()})
    return 0


def _bool(text: str) -> bool:
    t = str(text).lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _add_kernel(p):
    p.add_argument("--kernel", choices=FAMILIES, default="gaussian")
    p.add_argument("--m", type=float, default=0.8, help="bandwidth multiplier")
    p.add_argument("--bandwidth", type=float, default=None, help="fixed bandwidth (overrides --m)")
    p.add_argument("--alpha", type=int, default=None, help="segment length (default floor(sqrt(n)))")
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--cn", type=float, default=None, help="TRR ridge (default from n, p)")


def _add_detector(p):
    p.add_argument("--min-size", type=int, default=30)
    p.add_argument("--permutations", type=int, default=199)
    p.add_argument("--alpha-sig", type=float, default=0.05, help="permutation test level")
    p.add_argument("--max-changes", type=int, default=None)


def _add_cluster(p):
    p.add_argument("--d", type=int, default=3, help="number of categories")
    p.add_argument("--max-outer", type=int, default=20)
    p.add_argument("--ri-stop", type=float, default=0.999)
    p.add_argument("--restarts", type=int, default=10)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ckpca", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce a CSV with CKPCA or CPCA")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--report")
    p.add_argument("--mode", choices=("ckpca", "cpca"), default="ckpca")
    _add_kernel(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("detect", help="detect change points in a CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--plot")
    p.add_argument("--mode", choices=("ckpca", "cpca", "raw", "kpca"), default="ckpca")
    _add_kernel(p)
    _add_detector(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("cluster", help="iterative subspace clustering of a CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--report")
    _add_kernel(p)
    _add_cluster(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("bench", help="Monte-Carlo benchmark on a synthetic scenario")
    p.add_argument("scenario_name", nargs="?", metavar="SCENARIO", help=f"one of {', '.join(KINDS)}")
    p.add_argument("--scenario", help="same as the positional SCENARIO")
    p.add_argument("--p", type=int, default=100)
    p.add_argument("--n", type=int, default=800)
    p.add_argument("--balance", choices=("balanced", "imbalanced"), default="balanced")
    p.add_argument("--df", type=float, default=4.0, help="t degrees of freedom for ex2")
    p.add_argument("--delta", type=float, default=2.0, help="mean jump for meanshift")
    p.add_argument("--outliers", type=float, default=0.0, help="outlier fraction per segment")
    p.add_argument("--t-unit-variance", type=_bool, default=True)
    p.add_argument("--methods", nargs="+", choices=sorted(set(CHANGEPOINT_METHODS) | set(CLUSTER_METHODS)))
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output")
    p.add_argument("--table")
    _add_kernel(p)
    _add_detector(p)
    _add_cluster(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    for action in sub.choices.values():
        action.add_argument("--config", help="JSON file with option values")
    return parser


def _apply_config(parser, argv):
    """Load ``--config`` first so its values become defaults for the flags."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    subparsers = parser._subparsers._group_actions[0].choices
    if not known.config or known.command not in subparsers:
        return parser.parse_args(argv)
    try:
        values = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.exit(2, f"ckpca: error: cannot read config {known.config}: {exc}\n")
    if not isinstance(values, dict):
        parser.exit(2, "ckpca: error: config file must hold a JSON object\n")
    sub = subparsers[known.command]
    known_dests = {a.dest for a in sub._actions}
    cleaned = {}
    for key, value in values.items():
        dest = key.replace("-", "_")
        if dest not in known_dests or dest in ("help", "config"):
            parser.exit(2, f"ckpca: error: unknown config key {key!r}\n")
        cleaned[dest] = value
    sub.set_defaults(**cleaned)
    for action in sub._actions:
        if action.dest in cleaned:
            action.required = False
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, argv)
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        print(f"ckpca: error: {exc}", file=sys.stderr)
        return 2
    except (CkpcaError, np.linalg.LinAlgError, OSError) as exc:
        print(f"ckpca: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
