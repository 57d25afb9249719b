"""Item profiles as sparse term counts plus a learnable weight per term.

Two profiles are compared by the cosine under the weighted inner product
<x, y> = sum_k x_k y_k w_k, where w is a nonnegative per-term global
weight vector.  Classic tf-idf cosine is the special case w_k = idf_k^2,
which is also the standard starting point before the weights are trained.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ._util import mirror_upper
from .errors import DataError

__all__ = [
    "ProfileCorpus",
    "NormalizedProfiles",
    "load_corpus",
    "idf_init",
    "random_init",
    "normalize",
    "profile_similarity",
]

_log = logging.getLogger(__name__)


@dataclass
class ProfileCorpus:
    """Per-item local term weights (raw counts by default) and vocabulary.

    ``local_weights`` is CSR, one row per item and one column per term;
    ``doc_freq[k]`` counts the items whose profile contains term k and is
    at least 1 for corpora built through :func:`load_corpus`.
    """

    local_weights: sp.csr_matrix
    vocabulary: list[str]
    doc_freq: np.ndarray

    @property
    def n_items(self) -> int:
        return self.local_weights.shape[0]

    @property
    def n_terms(self) -> int:
        return self.local_weights.shape[1]


@dataclass
class NormalizedProfiles:
    """Rows of local weights divided by their metric norms.

    p[i, k] = local[i, k] / norm_i with norm_i^2 = sum_k local[i, k]^2 w_k.
    Rows with a zero norm stay all-zero.
    """

    p: np.ndarray
    norms: np.ndarray


def load_corpus(term_doc_matrix, vocabulary: list[str]) -> ProfileCorpus:
    """Validate a term-count matrix and prune terms absent from every item.

    Rejects dimension mismatches, duplicate vocabulary entries and
    negative counts.  Terms with zero document frequency are removed (with
    a warning listing how many); empty item profiles are permitted but
    flagged.
    """
    m = sp.csr_matrix(term_doc_matrix, dtype=np.float64)
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise DataError(f"corpus must have at least one item and one term, got {m.shape}")
    vocabulary = list(vocabulary)
    if len(vocabulary) != m.shape[1]:
        raise DataError(
            f"vocabulary has {len(vocabulary)} terms but the matrix has "
            f"{m.shape[1]} columns"
        )
    if len(set(vocabulary)) != len(vocabulary):
        counts = Counter(vocabulary)
        dupes = sorted(t for t, c in counts.items() if c > 1)
        raise DataError(f"duplicate vocabulary entries: {dupes[:5]}")
    if m.nnz and m.data.min() < 0:
        raise DataError("term weights must be nonnegative")
    m.eliminate_zeros()

    doc_freq = np.diff(m.tocsc().indptr)
    keep = doc_freq >= 1
    if not keep.all():
        dropped = [vocabulary[k] for k in np.flatnonzero(~keep)]
        _log.warning(
            "pruning %d terms absent from every item (e.g. %s)",
            len(dropped),
            dropped[:5],
        )
        m = m[:, keep].tocsr()
        vocabulary = [t for t, k in zip(vocabulary, keep) if k]
        doc_freq = doc_freq[keep]
    if m.shape[1] < 1:
        raise DataError("all terms were pruned; corpus has no usable vocabulary")

    n_empty = int(np.count_nonzero(np.diff(m.indptr) == 0))
    if n_empty:
        _log.warning("%d items have empty profiles", n_empty)
    m.sort_indices()
    return ProfileCorpus(m, vocabulary, doc_freq.astype(np.int64))


def idf_init(corpus: ProfileCorpus) -> np.ndarray:
    """Squared inverse-document-frequency starting weights.

    w_k = ln(N_items / df_k)^2.  Terms present in every item start at 0;
    training may raise them again.
    """
    idf = np.log(corpus.n_items / corpus.doc_freq.astype(np.float64))
    return idf**2


def random_init(corpus: ProfileCorpus, seed: int) -> np.ndarray:
    """Uniform starting weights in (0, 1], one per term, seeded."""
    rng = np.random.default_rng(seed)
    return 1.0 - rng.random(corpus.n_terms)


def _check_weights(corpus: ProfileCorpus, w) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (corpus.n_terms,):
        raise ValueError(
            f"expected {corpus.n_terms} global weights, got shape {w.shape}"
        )
    if (w < 0).any():
        raise ValueError("global weights must be nonnegative")
    return w


def normalize(corpus: ProfileCorpus, w) -> NormalizedProfiles:
    """Divide each profile row by its norm in the metric defined by ``w``.

    Items whose norm is zero (empty profile, or zero weight on the whole
    support) get an all-zero row; they compare as 0 to everything.
    """
    w = _check_weights(corpus, w)
    Wl = corpus.local_weights
    norms = np.sqrt(Wl.multiply(Wl) @ w)
    p = Wl.toarray()
    nz = norms > 0.0
    p[nz] /= norms[nz, None]
    p[~nz] = 0.0
    return NormalizedProfiles(p=p, norms=norms)


def _similarity_from_normalized(prof: NormalizedProfiles, w: np.ndarray) -> np.ndarray:
    S = (prof.p * w) @ prof.p.T
    S = mirror_upper(S)
    np.fill_diagonal(S, (prof.norms > 0.0).astype(np.float64))
    return S


def profile_similarity(corpus: ProfileCorpus, w) -> np.ndarray:
    """Weighted cosine similarity between every pair of item profiles.

    s_ij = sum_k p_ik p_jk w_k with p the normalized profiles; symmetric,
    entries in [0, 1], diagonal exactly 1 for items with a positive norm
    and 0 otherwise.  Invariant under positive rescaling of ``w``.
    """
    w = _check_weights(corpus, w)
    return _similarity_from_normalized(normalize(corpus, w), w)
