"""Item-item similarity from shared-user paths in a bipartite network.

Items are linked through the users that interacted with them.  Counting
weighted round trips item -> user -> item, repeated n times, gives a
path-count matrix; normalizing each count by the endpoints' self-counts
yields a similarity in [0, 1].  Similarities for depths 1..N are blended
with geometrically decaying weights so short paths dominate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ._util import mirror_upper
from .errors import DataError

__all__ = [
    "BipartiteNetwork",
    "MetaPathConfig",
    "halving_weights",
    "commuting_matrix",
    "pathsim_from_commuting",
    "aggregate_pathsim",
]

_log = logging.getLogger(__name__)


@dataclass
class BipartiteNetwork:
    """Nonnegative item-user interaction weights.

    ``item_user_weights`` is CSR with one row per item and one column per
    user.  Stored entries are strictly positive (1.0 for binary data);
    zeros are simply absent.
    """

    item_user_weights: sp.csr_matrix
    n_items: int
    n_users: int

    @classmethod
    def from_interactions(cls, matrix, binarize: bool = False) -> "BipartiteNetwork":
        """Build a network from any item x user matrix (sparse or dense).

        Explicit zero entries are dropped with a warning, negative weights
        are rejected, and ``binarize=True`` replaces every stored weight
        with 1.0.
        """
        m = sp.csr_matrix(matrix, dtype=np.float64)
        if m.shape[0] < 1 or m.shape[1] < 1:
            raise DataError(f"interaction matrix must be at least 1x1, got {m.shape}")
        if m.nnz and m.data.min() < 0:
            raise DataError("interaction weights must be nonnegative")
        n_explicit_zeros = int(np.count_nonzero(m.data == 0.0))
        if n_explicit_zeros:
            _log.warning(
                "dropping %d explicit zero interaction entries", n_explicit_zeros
            )
            m.eliminate_zeros()
        if binarize:
            m.data[:] = 1.0
        m.sort_indices()
        return cls(m, n_items=m.shape[0], n_users=m.shape[1])


def halving_weights(depth: int) -> np.ndarray:
    """Blend weights 2^(N-n) / (2^N - 1) for depths n = 1..N.

    Strictly decreasing, each weight twice the next, summing to 1, so the
    blend of per-depth similarities is a convex combination.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    n = np.arange(1, depth + 1, dtype=np.float64)
    return 2.0 ** (depth - n) / (2.0**depth - 1.0)


@dataclass
class MetaPathConfig:
    """How many path depths to blend and with which weights.

    ``alphas`` defaults to :func:`halving_weights`; a custom vector must be
    positive, one entry per depth, and sum to 1.
    """

    max_depth: int
    alphas: np.ndarray | None = None

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.alphas is None:
            self.alphas = halving_weights(self.max_depth)
        else:
            self.alphas = np.asarray(self.alphas, dtype=np.float64)
            if self.alphas.shape != (self.max_depth,):
                raise ValueError(
                    f"need {self.max_depth} blend weights, got {self.alphas.shape}"
                )
            if (self.alphas <= 0).any():
                raise ValueError("blend weights must be positive")
            if abs(float(self.alphas.sum()) - 1.0) > 1e-12:
                raise ValueError("blend weights must sum to 1")


def _dense_gram(net: BipartiteNetwork) -> np.ndarray:
    # One sparse product W W^T, then dense: its powers fill in quickly, so
    # dense BLAS beats sparse products from depth 2 on.
    W = net.item_user_weights
    return mirror_upper((W @ W.T).toarray())


def commuting_matrix(net: BipartiteNetwork, n: int) -> np.ndarray:
    """Weighted count of item->user->...->item paths with ``n`` round trips.

    Returns the dense symmetric matrix (W W^T)^n where W holds the
    item-user weights.  Entry (i, j) accumulates the product of edge
    weights along every length-2n path from item i to item j.
    """
    if n < 1:
        raise ValueError(f"path depth must be >= 1, got {n}")
    gram = _dense_gram(net)
    out = gram
    for _ in range(n - 1):
        out = out @ gram
    return mirror_upper(out)


def pathsim_from_commuting(M: np.ndarray) -> np.ndarray:
    """Normalize a symmetric nonnegative path-count matrix into [0, 1].

    s_ij = 2 M_ij / (M_ii + M_jj).  Pairs whose denominator is zero get 0,
    so an isolated item has an all-zero row, diagonal included; every item
    with a positive self-count gets an exact 1.0 on the diagonal.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"path-count matrix must be square, got {M.shape}")
    if (M < 0).any():
        raise ValueError("path counts must be nonnegative")
    if not np.allclose(M, M.T, rtol=1e-9, atol=1e-12):
        raise ValueError("path-count matrix must be symmetric")
    d = M.diagonal()
    denom = d[:, None] + d[None, :]
    positive = denom > 0.0
    S = np.where(positive, 2.0 * M / np.where(positive, denom, 1.0), 0.0)
    S = mirror_upper(S)
    np.fill_diagonal(S, (d > 0.0).astype(np.float64))
    return S


def aggregate_pathsim(net: BipartiteNetwork, cfg: MetaPathConfig) -> np.ndarray:
    """Blend per-depth path similarities with the configured weights.

    Per-depth matrices are independent (safe to compute in parallel) and
    are reduced in depth order, so the result is deterministic.  The
    output is a convex combination of matrices in [0, 1]; items with at
    least one interaction keep an exact unit diagonal, isolated items an
    all-zero row.
    """
    gram = _dense_gram(net)
    total = np.zeros_like(gram)
    M = gram
    for depth in range(1, cfg.max_depth + 1):
        if depth > 1:
            M = mirror_upper(M @ gram)
        total += cfg.alphas[depth - 1] * pathsim_from_commuting(M)
    np.fill_diagonal(total, (gram.diagonal() > 0.0).astype(np.float64))
    return total
