"""Experiment configuration and the end-to-end pipeline.

A run goes ingest -> path similarity -> weight init -> training ->
profile similarity -> leave-one-out evaluation, then writes report.json,
report.csv, trace.csv, weights.txt and manifest.json into the output
directory.  One root seed drives everything: the random init draws with
seed+1 and evaluation split r draws with seed+100+r, so identical config
plus seed reproduces report.json byte for byte.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import platform
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .errors import ConfigError, DataError, TermpathError
from .io import read_matrix_market, read_vocabulary
from .network import BipartiteNetwork, MetaPathConfig, aggregate_pathsim
from .optim import TrainConfig, TrainTrace, train
from .profiles import (
    ProfileCorpus,
    idf_init,
    load_corpus,
    profile_similarity,
    random_init,
)
from .recommend import EvalReport, InteractionSet, evaluate

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "ingest",
    "build_similarity",
    "run_experiment",
]

_log = logging.getLogger(__name__)

INIT_MODES = ("idf", "random")
SIMILARITY_SOURCES = ("learned", "idf-baseline", "pathsim")

# seed offsets per pipeline stage
_INIT_SEED_OFFSET = 1
_EVAL_SEED_OFFSET = 100


@dataclass
class ExperimentConfig:
    """Everything a run needs; JSON key 'lambda' maps to field ``lam``."""

    interactions: str
    profiles: str
    vocabulary: str
    meta_path_depth: int = 1
    lam: float = 0.01
    init: str = "idf"
    step_size: float = 0.1
    max_iters: int = 200
    rel_tol: float = 1e-6
    backtracking: bool = True
    shrink: float = 0.5
    armijo: float = 1e-4
    cutoffs: tuple = (5, 10, 15, 20)
    repeats: int = 5
    seed: int = 0
    similarity: str = "learned"
    neighborhood: int | None = None
    binarize: bool = True
    output_dir: str = "out"

    def __post_init__(self):
        if self.meta_path_depth < 1:
            raise ConfigError("meta_path_depth must be >= 1")
        if self.init not in INIT_MODES:
            raise ConfigError(f"init must be one of {INIT_MODES}, got {self.init!r}")
        if self.similarity not in SIMILARITY_SOURCES:
            raise ConfigError(
                f"similarity must be one of {SIMILARITY_SOURCES}, got {self.similarity!r}"
            )
        self.cutoffs = tuple(int(n) for n in self.cutoffs)
        if not self.cutoffs or any(n < 1 for n in self.cutoffs):
            raise ConfigError("cutoffs must be a non-empty list of positive sizes")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.neighborhood is not None and self.neighborhood < 1:
            raise ConfigError("neighborhood must be >= 1 when given")
        try:
            self.train_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        """Strict constructor: unknown keys are rejected to catch typos."""
        fields = {f.name for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in data.items():
            name = "lam" if key == "lambda" else key
            if name not in fields:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[name] = value
        for required in ("interactions", "profiles", "vocabulary"):
            if required not in kwargs:
                raise ConfigError(f"missing required config key {required!r}")
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            key = "lambda" if f.name == "lam" else f.name
            value = getattr(self, f.name)
            out[key] = list(value) if isinstance(value, tuple) else value
        return out

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            lam=self.lam,
            step_size=self.step_size,
            max_iters=self.max_iters,
            rel_tol=self.rel_tol,
            backtracking=self.backtracking,
            shrink=self.shrink,
            armijo=self.armijo,
            seed=self.seed,
        )


@dataclass
class ExperimentResult:
    report: EvalReport | None
    trace: TrainTrace | None
    weights: np.ndarray | None
    pathsim: np.ndarray
    network: BipartiteNetwork
    corpus: ProfileCorpus
    similarity: np.ndarray
    artifacts: dict


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except TermpathError as exc:
        raise type(exc)(f"[{name}] {exc}") from exc


def ingest(cfg: ExperimentConfig) -> tuple[BipartiteNetwork, ProfileCorpus]:
    """Load and cross-check the interaction and term matrices.

    Both files must agree on the item count (rows).  Interactions are
    binarized unless the config keeps raw counts.
    """
    inter = read_matrix_market(cfg.interactions)
    net = BipartiteNetwork.from_interactions(inter, binarize=cfg.binarize)
    terms = read_matrix_market(cfg.profiles)
    if terms.shape[0] != net.n_items:
        raise DataError(
            f"item count mismatch: {cfg.interactions} has {net.n_items} items, "
            f"{cfg.profiles} has {terms.shape[0]}"
        )
    corpus = load_corpus(terms, read_vocabulary(cfg.vocabulary))
    _log.info(
        "ingested %d users, %d items, %d terms",
        net.n_users,
        net.n_items,
        corpus.n_terms,
    )
    return net, corpus


def initial_weights(corpus: ProfileCorpus, cfg: ExperimentConfig) -> np.ndarray:
    if cfg.init == "idf":
        return idf_init(corpus)
    return random_init(corpus, cfg.seed + _INIT_SEED_OFFSET)


def _similarity_for_source(cfg, corpus, S_p):
    """Similarity fed to the recommender, plus trace/weights if trained."""
    if cfg.similarity == "pathsim":
        return S_p, None, None
    if cfg.similarity == "idf-baseline":
        w = idf_init(corpus)
        return _stage("similarity", profile_similarity, corpus, w), None, w
    w0 = _stage("init", initial_weights, corpus, cfg)
    w, trace = _stage("train", train, corpus, S_p, w0, cfg.train_config())
    return _stage("similarity", profile_similarity, corpus, w), trace, w


def build_similarity(cfg: ExperimentConfig) -> ExperimentResult:
    """Pipeline up to the recommendation similarity, without evaluation."""
    net, corpus = _stage("ingest", ingest, cfg)
    S_p = _stage(
        "pathsim", aggregate_pathsim, net, MetaPathConfig(cfg.meta_path_depth)
    )
    S_rec, trace, weights = _similarity_for_source(cfg, corpus, S_p)
    return ExperimentResult(
        report=None,
        trace=trace,
        weights=weights,
        pathsim=S_p,
        network=net,
        corpus=corpus,
        similarity=S_rec,
        artifacts={},
    )


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_weights(path, w) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for value in w:
            fh.write(f"{float(value)!r}\n")


def _write_manifest(out_dir, cfg, command, wall_clock, artifacts) -> None:
    payload = {
        "command": command,
        "config": cfg.to_dict(),
        "versions": {
            "termpath": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "wall_clock_seconds": wall_clock,
        "artifacts": sorted(artifacts),
    }
    _write_json(out_dir / "manifest.json", payload)


def run_experiment(cfg: ExperimentConfig, command: str = "evaluate") -> ExperimentResult:
    """Run the full pipeline and persist every artifact.

    report.json embeds the resolved config, so together with the manifest
    any report can be reproduced from the output directory alone.
    """
    t0 = time.perf_counter()
    result = build_similarity(cfg)
    trace, weights = result.trace, result.weights
    interactions = InteractionSet.from_network(result.network)
    report = _stage(
        "evaluate",
        evaluate,
        result.similarity,
        interactions,
        cfg.cutoffs,
        cfg.repeats,
        cfg.seed + _EVAL_SEED_OFFSET,
        k=cfg.neighborhood,
    )

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = ["report.json", "report.csv", "manifest.json"]
    _write_json(out_dir / "report.json", {"config": cfg.to_dict(), **report.to_dict()})
    report.write_csv(out_dir / "report.csv")
    if trace is not None:
        trace.write_csv(out_dir / "trace.csv")
        artifacts.append("trace.csv")
    if weights is not None:
        _write_weights(out_dir / "weights.txt", weights)
        artifacts.append("weights.txt")
    _write_manifest(out_dir, cfg, command, time.perf_counter() - t0, artifacts)
    result.report = report
    result.artifacts = {name: str(out_dir / name) for name in artifacts}
    return result
