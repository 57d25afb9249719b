"""Synthetic planted datasets for tests and demos.

The two-cluster generator builds items that split into two clusters which
never share users, so the path-based similarity is block diagonal.  Each
cluster further splits into small sub-groups; a user sticks to one
sub-group plus its partner sub-group in the same cluster.  The vocabulary
mirrors that structure plus two kinds of noise:

* broad per-cluster topic terms (common, mildly informative),
* rare per-sub-group terms (the signal that resolves a user's
  neighborhood; squared-idf weighting boosts them out of the box),
* "stopword" terms present in every item (idf zeroes them, uninformed
  starting weights do not),
* per-sub-group "confuser" terms that also land, with heavy counts, on
  items of the opposite cluster.  Plain idf overweights them, which pulls
  cross-cluster items into the neighborhood of the sub-group; training
  against the path similarity prunes them.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .io import write_matrix_market, write_vocabulary
from .network import BipartiteNetwork
from .profiles import ProfileCorpus, load_corpus

__all__ = ["two_cluster_dataset", "write_dataset"]


def two_cluster_dataset(
    n_items: int = 40,
    n_terms: int = 60,
    n_users: int = 30,
    n_stopwords: int = 8,
    subgroups_per_cluster: int = 4,
    seed: int = 0,
) -> tuple[BipartiteNetwork, ProfileCorpus]:
    """Planted two-cluster instance (defaults: 40 items, 60 terms, 30 users).

    Items and users split evenly between the clusters, items further into
    ``subgroups_per_cluster`` sub-groups per cluster.  Each user interacts
    with 3..4 items of one sub-group and 2 of its partner sub-group,
    never across clusters; holding out any one item therefore always
    leaves a same-sub-group sibling in the training history.  One confuser term is reserved per sub-group;
    the remaining terms are dealt out as stopwords, a broad-topic block
    per cluster, and a rare block per sub-group.  Every term is
    guaranteed a document frequency of at least 1 so nothing gets pruned
    on load.
    """
    n_groups = 2 * subgroups_per_cluster
    if subgroups_per_cluster % 2:
        raise ValueError("subgroups_per_cluster must be even (sub-groups are paired)")
    if n_items < 2 * n_groups or n_users < n_groups:
        raise ValueError("dataset too small for the planted sub-groups")
    n_confusers = n_groups
    n_signal = n_terms - n_stopwords - n_confusers
    n_broad = max(2, round(0.3 * n_signal / 2)) * 2
    per_group = (n_signal - n_broad) // n_groups
    if per_group < 1:
        raise ValueError("not enough terms for per-sub-group vocabulary")
    rng = np.random.default_rng(seed)
    half_items = n_items // 2

    # term layout: broad cluster-0, broad cluster-1, per-sub-group blocks,
    # stopwords, one confuser per sub-group (leftovers join the stopwords)
    broad = [np.arange(n_broad // 2), np.arange(n_broad // 2, n_broad)]
    group_terms = [
        np.arange(n_broad + g * per_group, n_broad + (g + 1) * per_group)
        for g in range(n_groups)
    ]
    conf_start = n_terms - n_confusers
    stopwords = np.arange(n_broad + n_groups * per_group, conf_start)
    confuser_of = {g: conf_start + g for g in range(n_groups)}

    def item_cluster(i):
        return 0 if i < half_items else 1

    def item_group(i):
        c = item_cluster(i)
        local = i - c * half_items
        return c * subgroups_per_cluster + local * subgroups_per_cluster // half_items

    group_items = [
        np.array([i for i in range(n_items) if item_group(i) == g])
        for g in range(n_groups)
    ]

    counts = np.zeros((n_items, n_terms))
    for i in range(n_items):
        c = item_cluster(i)
        g = item_group(i)
        mask = rng.random(broad[c].size) < 0.8
        counts[i, broad[c][mask]] = rng.integers(1, 4, size=int(mask.sum()))
        own = group_terms[g]
        n_draw = int(rng.integers(max(1, own.size - 1), own.size + 1))
        chosen = rng.choice(own, size=n_draw, replace=False)
        counts[i, chosen] = rng.integers(2, 5, size=n_draw)
        counts[i, stopwords] = rng.integers(3, 9, size=stopwords.size)
        if rng.random() < 0.8:
            counts[i, confuser_of[g]] = rng.integers(6, 11)
        # the same confuser also lands on opposite-cluster items
        other = range(n_groups // 2, n_groups) if c == 0 else range(n_groups // 2)
        for og in other:
            if rng.random() < 0.2:
                counts[i, confuser_of[og]] = rng.integers(6, 11)

    # every term must appear somewhere, or the corpus loader prunes it
    for k in np.flatnonzero(counts.sum(axis=0) == 0):
        if k < n_broad // 2:
            pool = np.arange(half_items)
        elif k < n_broad:
            pool = np.arange(half_items, n_items)
        elif k < n_broad + n_groups * per_group:
            pool = group_items[(k - n_broad) // per_group]
        elif k >= conf_start:
            pool = group_items[k - conf_start]
        else:
            pool = np.arange(n_items)
        counts[rng.choice(pool), k] = 1

    # partner pairs (0,1), (2,3), ... stay inside one cluster
    interactions = np.zeros((n_items, n_users))
    for u in range(n_users):
        g = u % n_groups
        partner = g ^ 1
        n_own = int(rng.integers(3, 5))
        n_partner = 2
        chosen = set(rng.choice(group_items[g], size=n_own, replace=False).tolist())
        chosen.update(
            rng.choice(group_items[partner], size=n_partner, replace=False).tolist()
        )
        interactions[sorted(chosen), u] = 1.0

    net = BipartiteNetwork.from_interactions(sp.csr_matrix(interactions))
    width = len(str(n_terms - 1))
    vocabulary = [f"term{k:0{width}d}" for k in range(n_terms)]
    corpus = load_corpus(sp.csr_matrix(counts), vocabulary)
    return net, corpus


def write_dataset(directory, net: BipartiteNetwork, corpus: ProfileCorpus) -> dict:
    """Write interactions.mtx, profiles.mtx and vocabulary.txt; return paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "interactions": directory / "interactions.mtx",
        "profiles": directory / "profiles.mtx",
        "vocabulary": directory / "vocabulary.txt",
    }
    write_matrix_market(paths["interactions"], net.item_user_weights)
    write_matrix_market(paths["profiles"], corpus.local_weights)
    write_vocabulary(paths["vocabulary"], corpus.vocabulary)
    return {k: str(v) for k, v in paths.items()}
