"""Command-line entry point: ``mixid simulate|rank|cluster|evaluate|infer``.

Reports are JSON with a fixed key order. Exit status is 0 on success, 1
when the analysis itself fails (e.g. CLIC cannot find independent
clusters), and 2 for usage, parse and configuration errors.
"""

import argparse
import json
import logging
import sys
import time
from collections import Counter
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .causal import infer_structure
from .clic import CONVERGED_INDEPENDENT, FAILURE_MESSAGE, clic
from .dataio import read_dataset, read_labels, write_dataset, write_labels
from .embedding_rank import estimate_components
from .errors import (AlignmentError, ConfigurationError, MixIdError, ParseError,
                     ShapeError)
from .evaluate import match_and_score
from .independence import METHODS, MIN_PERMUTATIONS
from .kernel import select_bandwidths
from .simulate import simulate_confounded, simulate_direct_link

EXIT_OK, EXIT_ANALYSIS, EXIT_USAGE = 0, 1, 2
MIN_ROWS = 12
USAGE_ERRORS = (ParseError, ShapeError, ConfigurationError, AlignmentError)


@dataclass
class RunConfig:
    seed: int = 0
    alpha: float = 0.05
    c: int = 1
    max_iterations: int = 7
    rank_threshold: int = 5
    pvalue_method: str = "gamma"
    num_permutations: int = 200
    bandwidth_rule: str = "neighborhood"

    def validate(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.c < 1:
            raise ConfigurationError(f"c must be >= 1, got {self.c}")
        if self.max_iterations < 1:
            raise ConfigurationError(f"max-iter must be >= 1, got {self.max_iterations}")
        if self.rank_threshold < 1:
            raise ConfigurationError(f"threshold must be >= 1, got {self.rank_threshold}")
        if self.pvalue_method not in METHODS:
            raise ConfigurationError(f"unknown p-value method {self.pvalue_method!r}")
        if self.num_permutations < MIN_PERMUTATIONS:
            raise ConfigurationError(
                f"permutations must be >= {MIN_PERMUTATIONS}, got {self.num_permutations}")
        if self.bandwidth_rule not in ("median", "neighborhood"):
            raise ConfigurationError(f"unknown bandwidth rule {self.bandwidth_rule!r}")
        return self


class AnalysisFailure(Exception):
    """Carries a finished report whose analysis did not succeed."""

    def __init__(self, report, out):
        super().__init__(FAILURE_MESSAGE)
        self.report = report
        self.out = out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def make_report(command, config, results, warnings=(), **extra):
    report = {"command": command, "version": __version__,
              "config": asdict(config) if config is not None else {}}
    report.update(extra)
    report["results"] = results
    report["warnings"] = list(warnings)
    return report


def dump_report(report, path, elapsed):
    report = dict(report)
    report["timing"] = {"seconds": round(elapsed, 6)}
    text = json.dumps(_jsonable(report), indent=2, allow_nan=False) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(path):
    ds = read_dataset(path)
    if ds.d < 2:
        raise ShapeError(f"{path} has {ds.d} value column(s); at least 2 are required")
    if ds.n < MIN_ROWS:
        raise ShapeError(f"{path} has {ds.n} rows; at least {MIN_ROWS} are required")
    return ds


def cmd_simulate(args, config):
    if args.protocol == "confounded":
        sim = simulate_confounded(args.d, args.m, config.seed)
    else:
        sim = simulate_direct_link(args.m, config.seed)
    write_dataset(args.out, sim.data, sim.truth_labels)
    results = {"protocol": args.protocol, "path": args.out, "n": int(sim.data.shape[0]),
               "d": int(sim.data.shape[1]), "m": sim.m,
               "components": [s.to_dict() for s in sim.specs]}
    return make_report("simulate", config, results), None


def cmd_rank(args, config):
    ds = _load(args.input)
    bandwidths = select_bandwidths(ds.values, config.bandwidth_rule)
    est = estimate_components(ds.values, bandwidths)
    results = est.to_dict()
    counts = Counter(r for _, r in est.per_partition)
    results["rank_histogram"] = {str(k): counts[k] for k in sorted(counts)}
    results["bandwidths"] = bandwidths.tolist()
    results["columns"] = ds.columns
    warnings = []
    if ds.d == 2:
        warnings.append("d = 2: a single split; no vote across groupings.")
    return make_report("rank", config, results, warnings, input=args.input), args.out


def _cluster_count(args):
    if args.m is not None:
        return args.m
    try:
        with open(args.rank_report, encoding="utf-8") as fh:
            return int(json.load(fh)["results"]["majority"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"cannot read a majority rank from {args.rank_report}: {exc}")


def cmd_cluster(args, config):
    m = _cluster_count(args)
    ds = _load(args.input)
    assignment, trace = clic(ds.values, m, c=config.c, max_iterations=config.max_iterations,
                             alpha=config.alpha, seed=config.seed,
                             method=config.pvalue_method,
                             num_permutations=config.num_permutations)
    write_labels(args.labels_out, assignment.labels)
    verdicts = [None if v is None else v.to_dict() for v in assignment.verdicts]
    results = {
        "m": m,
        "status": assignment.status,
        "stop_reason": assignment.stop_reason,
        "message": assignment.message,
        "iterations": assignment.iterations,
        "labels_path": args.labels_out,
        "cluster_sizes": assignment.sizes,
        "objective_trace": trace.per_iteration,
        "iteration_log": trace.log,
        "cluster_verdicts": verdicts,
    }
    report = make_report("cluster", config, results, input=args.input)
    if assignment.status != CONVERGED_INDEPENDENT:
        report["message"] = FAILURE_MESSAGE
        raise AnalysisFailure(report, args.out)
    return report, args.out


def cmd_evaluate(args, config):
    ds = _load(args.input)
    if ds.truth is None:
        raise ShapeError(f"{args.input} has no 'truth' column to evaluate against")
    labels = read_labels(args.labels, ds.n)
    bandwidths = select_bandwidths(ds.values, config.bandwidth_rule)
    mmd = match_and_score(labels, ds.truth, ds.values, bandwidths)
    scatter = [{"cluster": k, "truth": mmd.permutation[k], "mmd2": v}
               for k, v in zip(sorted(mmd.permutation), mmd.per_cluster_mmd2)]
    results = mmd.to_dict()
    results["scatter"] = scatter
    results["bandwidths"] = bandwidths.tolist()
    return make_report("evaluate", config, results, input=args.input,
                       labels=args.labels), args.out


def cmd_infer(args, config):
    ds = _load(args.input)
    verdict = infer_structure(ds.values, threshold=config.rank_threshold,
                              alpha=config.alpha, seed=config.seed,
                              num_permutations=config.num_permutations,
                              bandwidth_rule=config.bandwidth_rule)
    warnings = []
    if verdict.reduced_confidence:
        warnings.append("d = 2: verdict carries reduced confidence.")
    return make_report("infer", config, verdict.to_dict(), warnings,
                       input=args.input), args.out


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--alpha", type=float, default=0.05)
    common.add_argument("--c", type=int, default=1, help="points relabelled jointly")
    common.add_argument("--max-iter", dest="max_iterations", type=int, default=7)
    common.add_argument("--threshold", dest="rank_threshold", type=int, default=5,
                        help="ranks below this suggest a finite confounder")
    common.add_argument("--pvalue-method", choices=METHODS, default="gamma")
    common.add_argument("--permutations", dest="num_permutations", type=int, default=200)
    common.add_argument("--bandwidth", dest="bandwidth_rule",
                        choices=("median", "neighborhood"), default="neighborhood")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="mixid", description="Identify finite mixtures of product distributions.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="write a synthetic dataset")
    p.add_argument("--protocol", choices=("confounded", "direct_link"), default="confounded")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--m", type=int, default=2,
                   help="components (confounder states for direct_link: 1 or 3)")
    p.add_argument("--out", required=True, help="CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rank", parents=[common], help="estimate the number of components")
    p.add_argument("input")
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("cluster", parents=[common], help="run CLIC")
    p.add_argument("input")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--m", type=int)
    group.add_argument("--rank-report", help="take m from a rank report")
    p.add_argument("--labels-out", required=True, help="labels CSV path")
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("evaluate", parents=[common], help="squared MMD against truth")
    p.add_argument("input", help="data CSV with a truth column")
    p.add_argument("labels", help="labels CSV")
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("infer", parents=[common], help="confounder verdict")
    p.add_argument("input")
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_infer)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    config = RunConfig(args.seed, args.alpha, args.c, args.max_iterations,
                       args.rank_threshold, args.pvalue_method, args.num_permutations,
                       args.bandwidth_rule)
    start = time.perf_counter()
    try:
        config.validate()
        report, out = args.func(args, config)
    except AnalysisFailure as exc:
        dump_report(exc.report, exc.out, time.perf_counter() - start)
        print(FAILURE_MESSAGE, file=sys.stderr)
        return EXIT_ANALYSIS
    except USAGE_ERRORS as exc:
        print(f"mixid {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"mixid {args.command}: error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    except MixIdError as exc:
        print(f"mixid {args.command}: analysis failed: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    dump_report(report, out, time.perf_counter() - start)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
