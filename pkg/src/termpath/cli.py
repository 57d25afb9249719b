"""Command-line entry point.

Subcommands: ingest-check, pathsim, train, recommend, evaluate, sweep.
Every subcommand takes ``--config <file>`` (a JSON document mirroring
ExperimentConfig) plus flag overrides.  Exit codes: 0 success, 1 usage or
config error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, NumericalError
from .experiment import (
    INIT_MODES,
    SIMILARITY_SOURCES,
    ExperimentConfig,
    _stage,
    _write_manifest,
    _write_weights,
    build_similarity,
    ingest,
    initial_weights,
    run_experiment,
)
from .io import write_matrix_market
from .network import MetaPathConfig, aggregate_pathsim
from .optim import train
from .recommend import InteractionSet, recommend_topn

_log = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the contract wants 1
    def error(self, message):
        raise ConfigError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"expected a comma-separated integer list, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"expected a comma-separated number list, got {text!r}")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags below override it")
    p.add_argument("--interactions", help="item x user Matrix Market file")
    p.add_argument("--profiles", help="item x term Matrix Market file")
    p.add_argument("--vocabulary", help="one term per line")
    p.add_argument("--depth", type=int, dest="meta_path_depth",
                   help="number of path depths to blend (n_p)")
    p.add_argument("--lambda", type=float, dest="lam", help="L2 penalty weight")
    p.add_argument("--init", choices=INIT_MODES, help="starting weights")
    p.add_argument("--step-size", type=float, dest="step_size")
    p.add_argument("--max-iters", type=int, dest="max_iters")
    p.add_argument("--rel-tol", type=float, dest="rel_tol")
    p.add_argument("--no-backtracking", action="store_const", const=False,
                   dest="backtracking", default=None)
    p.add_argument("--cutoffs", type=_int_list, help="list sizes, e.g. 5,10,15,20")
    p.add_argument("--repeats", type=int, help="LOOCV repeats")
    p.add_argument("--seed", type=int, help="root seed for all stages")
    p.add_argument("--similarity", choices=SIMILARITY_SOURCES,
                   help="which similarity feeds recommendation")
    p.add_argument("--k", type=int, dest="neighborhood",
                   help="per-item neighborhood size (default: no truncation)")
    p.add_argument("--keep-counts", action="store_const", const=False,
                   dest="binarize", default=None,
                   help="keep interaction weights instead of binarizing")
    p.add_argument("--output", dest="output_dir", help="output directory")


def _build_parser() -> _Parser:
    parser = _Parser(prog="termpath",
                     description="Learn profile term weights from interaction "
                                 "paths and evaluate top-N recommendations.")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-check", help="load the inputs and report their shape")
    _add_config_flags(p)

    p = sub.add_parser("pathsim", help="compute and write the path similarity matrix")
    _add_config_flags(p)

    p = sub.add_parser("train", help="learn weights; write weights.txt and trace.csv")
    _add_config_flags(p)

    p = sub.add_parser("recommend", help="write top-N lists for users")
    _add_config_flags(p)
    p.add_argument("--top-n", type=int, default=10, help="list size (default 10)")
    p.add_argument("--user", type=int, help="only this user (default: all)")

    p = sub.add_parser("evaluate", help="full pipeline plus LOOCV evaluation")
    _add_config_flags(p)

    p = sub.add_parser("sweep", help="grid of evaluate runs over lambda and depth")
    _add_config_flags(p)
    p.add_argument("--lambdas", type=_float_list,
                   default=[round(0.005 * i, 3) for i in range(11)],
                   help="comma-separated penalties (default 0,0.005,...,0.05)")
    p.add_argument("--depths", type=_int_list, default=[1, 2, 3],
                   help="comma-separated path depths (default 1,2,3)")
    return parser


def _resolve_config(args) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{args.config}: config must be a JSON object")
    field_names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    for name in field_names:
        value = getattr(args, name, None)
        if value is not None:
            data["lambda" if name == "lam" else name] = value
    return ExperimentConfig.from_dict(data)


def _cmd_ingest_check(cfg: ExperimentConfig, args) -> int:
    net, corpus = _stage("ingest", ingest, cfg)
    print(f"users={net.n_users} items={net.n_items} terms={corpus.n_terms}")
    n_interactions = net.item_user_weights.nnz
    print(f"interactions={n_interactions} profile_entries={corpus.local_weights.nnz}")
    return 0


def _cmd_pathsim(cfg: ExperimentConfig, args) -> int:
    t0 = time.perf_counter()
    net, _ = _stage("ingest", ingest, cfg)
    S_p = _stage("pathsim", aggregate_pathsim, net, MetaPathConfig(cfg.meta_path_depth))
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_matrix_market(out_dir / "pathsim.mtx", S_p,
                        comment=f"aggregated path similarity, depth {cfg.meta_path_depth}")
    _write_manifest(out_dir, cfg, "pathsim", time.perf_counter() - t0, ["pathsim.mtx"])
    print(f"wrote {out_dir / 'pathsim.mtx'}")
    return 0


def _cmd_train(cfg: ExperimentConfig, args) -> int:
    t0 = time.perf_counter()
    net, corpus = _stage("ingest", ingest, cfg)
    S_p = _stage("pathsim", aggregate_pathsim, net, MetaPathConfig(cfg.meta_path_depth))
    w0 = _stage("init", initial_weights, corpus, cfg)
    w, trace = _stage("train", train, corpus, S_p, w0, cfg.train_config())
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_weights(out_dir / "weights.txt", w)
    trace.write_csv(out_dir / "trace.csv")
    _write_manifest(out_dir, cfg, "train", time.perf_counter() - t0,
                    ["weights.txt", "trace.csv"])
    print(f"final objective {trace.objective[-1]!r} after {trace.iterations[-1]} "
          f"iterations ({trace.stop_reason}); wrote {out_dir / 'weights.txt'}")
    return 0


def _cmd_recommend(cfg: ExperimentConfig, args) -> int:
    t0 = time.perf_counter()
    result = build_similarity(cfg)
    interactions = InteractionSet.from_network(result.network)
    users = [args.user] if args.user is not None else range(interactions.n_users)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "recommendations.csv"
    n_cold = 0
    with open(out_path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["user", "rank", "item", "score"])
        for u in users:
            if not 0 <= u < interactions.n_users:
                raise ConfigError(f"user {u} outside 0..{interactions.n_users - 1}")
            ranked = recommend_topn(result.similarity, interactions.items_by_user[u],
                                    args.top_n, k=cfg.neighborhood)
            n_cold += ranked.cold
            for rank, (item, score) in enumerate(zip(ranked.items, ranked.scores), 1):
                out.writerow([u, rank, int(item), repr(float(score))])
    if n_cold:
        _log.warning("%d cold users got empty lists", n_cold)
    artifacts = ["recommendations.csv"]
    if result.weights is not None:
        _write_weights(out_dir / "weights.txt", result.weights)
        artifacts.append("weights.txt")
    _write_manifest(out_dir, cfg, "recommend", time.perf_counter() - t0, artifacts)
    print(f"wrote {out_path}")
    return 0


def _cmd_evaluate(cfg: ExperimentConfig, args) -> int:
    result = run_experiment(cfg, command="evaluate")
    report = result.report
    for c, n in enumerate(report.cutoffs):
        print(f"N={n} HR={report.mean_hr[c]:.4f} ARHR={report.mean_arhr[c]:.4f}")
    print(f"wrote {result.artifacts['report.json']}")
    return 0


def _cmd_sweep(cfg: ExperimentConfig, args) -> int:
    base_out = Path(cfg.output_dir)
    base_out.mkdir(parents=True, exist_ok=True)
    rows = []
    for depth in args.depths:
        for lam in args.lambdas:
            sub_dir = base_out / f"np{depth}_lambda{lam:g}"
            sub_cfg = dataclasses.replace(
                cfg, meta_path_depth=depth, lam=lam, output_dir=str(sub_dir)
            )
            result = run_experiment(sub_cfg, command="sweep")
            report = result.report
            for c, n in enumerate(report.cutoffs):
                rows.append([depth, lam, n,
                             repr(float(report.mean_hr[c])),
                             repr(float(report.mean_arhr[c]))])
            _log.info("sweep point depth=%d lambda=%g done", depth, lam)
    summary = base_out / "sweep_summary.csv"
    with open(summary, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["n_p", "lambda", "N", "mean_HR", "mean_ARHR"])
        out.writerows(rows)
    print(f"wrote {summary}")
    return 0


_COMMANDS = {
    "ingest-check": _cmd_ingest_check,
    "pathsim": _cmd_pathsim,
    "train": _cmd_train,
    "recommend": _cmd_recommend,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        cfg = _resolve_config(args)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataError, ValueError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
