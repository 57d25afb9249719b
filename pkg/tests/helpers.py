"""Shared builders and independent oracles for the test suite.

The oracles deliberately avoid the library's vectorized code paths: the
gradient oracle is a double loop over item pairs straight from the
per-pair derivative, the objective oracle a literal double sum, and the
recommendation oracle a per-candidate summation.
"""

import numpy as np
import scipy.sparse as sp

from termpath import load_corpus


def random_corpus(rng, n_items=None, n_terms=None, density=0.45):
    """Random integer-count corpus; dimensions drawn if not given."""
    n_items = int(rng.integers(4, 21)) if n_items is None else n_items
    n_terms = int(rng.integers(6, 31)) if n_terms is None else n_terms
    counts = rng.integers(1, 5, size=(n_items, n_terms)).astype(float)
    counts *= rng.random((n_items, n_terms)) < density
    vocab = [f"t{k}" for k in range(n_terms)]
    return load_corpus(sp.csr_matrix(counts), vocab)


def random_interactions(rng, n_items=None, n_users=None, density=0.35):
    """Random binary item x user matrix with at least one entry."""
    n_items = int(rng.integers(2, 15)) if n_items is None else n_items
    n_users = int(rng.integers(2, 12)) if n_users is None else n_users
    mat = (rng.random((n_items, n_users)) < density).astype(float)
    if mat.sum() == 0:
        mat[rng.integers(n_items), rng.integers(n_users)] = 1.0
    return sp.csr_matrix(mat)


def random_target(rng, n_items):
    """Random symmetric matrix in [0, 1] with unit diagonal."""
    S = rng.uniform(0.0, 1.0, size=(n_items, n_items))
    S = np.triu(S, 1)
    S = S + S.T
    np.fill_diagonal(S, 1.0)
    return S


def objective_oracle(corpus, w, target, lam):
    """Literal double sum of the squared mismatch plus the penalty."""
    Wl = corpus.local_weights.toarray()
    norms = np.sqrt((Wl**2) @ w)
    total = 0.0
    n = corpus.n_items
    for i in range(n):
        for j in range(n):
            if norms[i] > 0 and norms[j] > 0:
                s = float((Wl[i] * Wl[j]) @ w) / (norms[i] * norms[j])
            else:
                s = 0.0
            total += (s - target[i, j]) ** 2
    return 0.5 * total + 0.5 * lam * float(np.sum(np.asarray(w) ** 2))


def gradient_oracle(corpus, w, target, lam):
    """Per-pair derivative summed over all (i, j), straight from the math.

    For each pair, the mismatch times
    p_i p_j - (s_ij / 2) (p_i^2 + p_j^2), with p the norm-scaled rows;
    only the inner per-term arithmetic is vectorized.
    """
    Wl = corpus.local_weights.toarray()
    w = np.asarray(w, dtype=float)
    norms = np.sqrt((Wl**2) @ w)
    safe = np.where(norms > 0, norms, 1.0)
    P = np.where(norms[:, None] > 0, Wl / safe[:, None], 0.0)
    n = corpus.n_items
    g = lam * w.copy()
    for i in range(n):
        for j in range(n):
            if norms[i] > 0 and norms[j] > 0:
                s = float((Wl[i] * Wl[j]) @ w) / (norms[i] * norms[j])
            else:
                s = 0.0
            q = s - target[i, j]
            g += q * (P[i] * P[j] - 0.5 * s * (P[i] ** 2 + P[j] ** 2))
    return g


def finite_difference_gradient(objective_fn, w, h0=1e-6):
    """Central differences with a per-coordinate step 1e-6 * max(1, |w_k|)."""
    w = np.asarray(w, dtype=float)
    g = np.zeros_like(w)
    for k in range(w.size):
        h = h0 * max(1.0, abs(w[k]))
        wp = w.copy()
        wp[k] += h
        wm = w.copy()
        wm[k] -= h
        g[k] = (objective_fn(wp) - objective_fn(wm)) / (2.0 * h)
    return g


def brute_force_scores(S, history, k=None):
    """Per-candidate summed similarity, one candidate at a time."""
    n = S.shape[0]
    history = sorted(set(history))
    allowed = {}
    if k is not None:
        for j in history:
            order = sorted(
                (i for i in range(n) if i != j), key=lambda i: (-S[j, i], i)
            )
            allowed[j] = set(order[:k])
    scores = {}
    for i in range(n):
        if i in history:
            continue
        total = 0.0
        for j in history:
            if k is None or i in allowed[j]:
                total += S[j, i]
        scores[i] = total
    return scores
