"""Learned per-term profile weights from interaction-path similarity.

The package builds item-item similarity two ways: by counting and
normalizing item->user->item round trips in an interaction network, and
by weighted-cosine comparison of item term profiles.  The per-term global
weights of the second are trained so it matches the first, and either
similarity can drive item-kNN top-N recommendation with leave-one-out
evaluation.
"""

__version__ = "0.1.0"

from .errors import ConfigError, DataError, NumericalError, TermpathError
from .network import (
    BipartiteNetwork,
    MetaPathConfig,
    aggregate_pathsim,
    commuting_matrix,
    halving_weights,
    pathsim_from_commuting,
)
from .profiles import (
    NormalizedProfiles,
    ProfileCorpus,
    idf_init,
    load_corpus,
    normalize,
    profile_similarity,
    random_init,
)
from .optim import TrainConfig, TrainTrace, gradient, objective, train
from .recommend import (
    EvalReport,
    InteractionSet,
    RankedList,
    arhr,
    evaluate,
    hit_rate,
    loocv_split,
    recommend_topn,
)
from .experiment import (
    ExperimentConfig,
    ExperimentResult,
    build_similarity,
    ingest,
    run_experiment,
)
from .datasets import two_cluster_dataset, write_dataset

__all__ = [
    "__version__",
    "TermpathError",
    "ConfigError",
    "DataError",
    "NumericalError",
    "BipartiteNetwork",
    "MetaPathConfig",
    "halving_weights",
    "commuting_matrix",
    "pathsim_from_commuting",
    "aggregate_pathsim",
    "ProfileCorpus",
    "NormalizedProfiles",
    "load_corpus",
    "idf_init",
    "random_init",
    "normalize",
    "profile_similarity",
    "TrainConfig",
    "TrainTrace",
    "objective",
    "gradient",
    "train",
    "InteractionSet",
    "RankedList",
    "EvalReport",
    "recommend_topn",
    "loocv_split",
    "hit_rate",
    "arhr",
    "evaluate",
    "ExperimentConfig",
    "ExperimentResult",
    "ingest",
    "build_similarity",
    "run_experiment",
    "two_cluster_dataset",
    "write_dataset",
]
