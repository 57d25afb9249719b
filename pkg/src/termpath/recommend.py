"""Top-N recommendation from an item similarity matrix, with evaluation.

A user's score for a candidate item is the summed similarity between the
candidate and every item in the user's history (optionally truncated to
each history item's k nearest neighbors).  Quality is measured by
leave-one-out cross validation: hit rate and average reciprocal hit rank
at several list sizes.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .network import BipartiteNetwork

__all__ = [
    "InteractionSet",
    "RankedList",
    "EvalReport",
    "recommend_topn",
    "loocv_split",
    "hit_rate",
    "arhr",
    "evaluate",
]

_log = logging.getLogger(__name__)


@dataclass
class InteractionSet:
    """Per-user item histories as sorted index arrays."""

    items_by_user: list[np.ndarray]
    n_users: int
    n_items: int

    @classmethod
    def from_network(cls, net: BipartiteNetwork) -> "InteractionSet":
        csc = net.item_user_weights.tocsc()
        items = [
            np.sort(csc.indices[csc.indptr[u] : csc.indptr[u + 1]]).astype(np.int64)
            for u in range(net.n_users)
        ]
        return cls(items, n_users=net.n_users, n_items=net.n_items)


@dataclass
class RankedList:
    """Recommended item indices with scores, best first.

    Ordered by (score descending, item index ascending); never contains an
    item from the history it was computed for.  ``cold`` marks the empty
    list returned for a user with no history.
    """

    items: np.ndarray
    scores: np.ndarray
    cold: bool = False


def recommend_topn(S: np.ndarray, history, N: int, k: int | None = None) -> RankedList:
    """Rank the N best candidates outside ``history`` by summed similarity.

    score(i) = sum over j in history of S[i, j].  If ``k`` is given, each
    history item contributes only through its k most similar other items
    (ties broken by ascending index), the usual item-kNN truncation.
    Candidates scoring zero may pad the list, in index order, when fewer
    than N candidates score positive.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if k is not None and k < 1:
        raise ValueError("k must be >= 1 when given")
    n_items = S.shape[0]
    history = np.asarray(sorted(set(int(j) for j in history)), dtype=np.int64)
    if history.size == 0:
        _log.warning("cold user: empty history, returning no recommendations")
        empty = np.empty(0, dtype=np.int64)
        return RankedList(empty, np.empty(0, dtype=np.float64), cold=True)
    if history.min() < 0 or history.max() >= n_items:
        raise ValueError("history contains item indices outside the matrix")

    if k is None:
        scores = S[history].sum(axis=0)
    else:
        scores = np.zeros(n_items, dtype=np.float64)
        for j in history:
            row = S[j]
            order = np.argsort(-row, kind="stable")
            neighbors = order[order != j][:k]
            scores[neighbors] += row[neighbors]

    ranked = np.argsort(-scores, kind="stable")
    ranked = ranked[~np.isin(ranked, history)][:N]
    return RankedList(ranked.astype(np.int64), scores[ranked])


def loocv_split(
    interactions: InteractionSet, seed: int
) -> tuple[InteractionSet, dict[int, int]]:
    """Hold out one uniformly chosen item per user with at least two items.

    Users with fewer than two items keep their history untouched and are
    left out of the test map (they cannot be evaluated without emptying
    their training history).  The draw is deterministic for a given seed.
    """
    rng = np.random.default_rng(seed)
    train: list[np.ndarray] = []
    test: dict[int, int] = {}
    n_skipped = 0
    for u, items in enumerate(interactions.items_by_user):
        if items.size < 2:
            train.append(items.copy())
            if items.size == 1:
                n_skipped += 1
            continue
        pos = int(rng.integers(items.size))
        test[u] = int(items[pos])
        train.append(np.delete(items, pos))
    if n_skipped:
        _log.debug("%d single-item users excluded from evaluation", n_skipped)
    return (
        InteractionSet(train, interactions.n_users, interactions.n_items),
        test,
    )


def _hit_ranks(recommendations, test):
    for u, held_out in test.items():
        ranked = recommendations[u].items
        pos = np.flatnonzero(ranked == held_out)
        yield int(pos[0]) + 1 if pos.size else None


def hit_rate(recommendations: dict[int, RankedList], test: dict[int, int]) -> float:
    """Fraction of evaluated users whose held-out item made their list."""
    if not test:
        return 0.0
    hits = sum(1 for r in _hit_ranks(recommendations, test) if r is not None)
    return hits / len(test)


def arhr(recommendations: dict[int, RankedList], test: dict[int, int]) -> float:
    """Like :func:`hit_rate`, but each hit is weighted by 1 / rank."""
    if not test:
        return 0.0
    total = sum(1.0 / r for r in _hit_ranks(recommendations, test) if r is not None)
    return total / len(test)


@dataclass
class EvalReport:
    """HR and ARHR per list size and repeat, plus their means.

    ``hr``, ``arhr`` and ``hits`` are (repeats x cutoffs) arrays;
    ``evaluated_users`` counts users with at least two interactions (the
    metric denominators), ``total_users`` everybody.
    """

    cutoffs: list[int]
    repeats: int
    total_users: int
    evaluated_users: int
    hr: np.ndarray
    arhr: np.ndarray
    hits: np.ndarray

    @property
    def mean_hr(self) -> np.ndarray:
        return self.hr.mean(axis=0)

    @property
    def mean_arhr(self) -> np.ndarray:
        return self.arhr.mean(axis=0)

    def to_dict(self) -> dict:
        """JSON-ready form with per-repeat rows and per-cutoff means."""
        per_repeat = [
            {
                "repeat": r,
                "N": int(n),
                "hr": float(self.hr[r, c]),
                "arhr": float(self.arhr[r, c]),
                "hits": int(self.hits[r, c]),
            }
            for r in range(self.repeats)
            for c, n in enumerate(self.cutoffs)
        ]
        mean = [
            {
                "N": int(n),
                "hr": float(self.mean_hr[c]),
                "arhr": float(self.mean_arhr[c]),
            }
            for c, n in enumerate(self.cutoffs)
        ]
        return {
            "cutoffs": [int(n) for n in self.cutoffs],
            "repeats": self.repeats,
            "total_users": self.total_users,
            "evaluated_users": self.evaluated_users,
            "per_repeat": per_repeat,
            "mean": mean,
        }

    def write_csv(self, path) -> None:
        """Rows repeat,N,HR,ARHR; the mean rows carry repeat='mean'."""
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["repeat", "N", "HR", "ARHR"])
            for r in range(self.repeats):
                for c, n in enumerate(self.cutoffs):
                    out.writerow([r, n, repr(float(self.hr[r, c])), repr(float(self.arhr[r, c]))])
            for c, n in enumerate(self.cutoffs):
                out.writerow(
                    ["mean", n, repr(float(self.mean_hr[c])), repr(float(self.mean_arhr[c]))]
                )


def evaluate(
    S: np.ndarray,
    interactions: InteractionSet,
    cutoffs,
    repeats: int,
    seed: int,
    k: int | None = None,
) -> EvalReport:
    """Leave-one-out evaluation over several repeats and list sizes.

    Repeat r splits with ``seed + r``, recommends one list of size
    max(cutoffs) per evaluated user, and reads every cutoff off that list
    as a prefix, which makes HR and ARHR non-decreasing in N on each
    split.  Identical inputs and seed reproduce the report exactly.
    """
    cutoffs = [int(n) for n in cutoffs]
    if not cutoffs or any(n < 1 for n in cutoffs):
        raise ValueError("cutoffs must be a non-empty list of positive sizes")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    n_max = max(cutoffs)
    hr = np.zeros((repeats, len(cutoffs)))
    ar = np.zeros((repeats, len(cutoffs)))
    hits = np.zeros((repeats, len(cutoffs)), dtype=np.int64)
    evaluated = 0
    for r in range(repeats):
        train, test = loocv_split(interactions, seed + r)
        evaluated = len(test)
        ranks = []
        for u, held_out in test.items():
            ranked = recommend_topn(S, train.items_by_user[u], n_max, k=k).items
            pos = np.flatnonzero(ranked == held_out)
            ranks.append(int(pos[0]) + 1 if pos.size else None)
        for c, n in enumerate(cutoffs):
            in_list = [rk for rk in ranks if rk is not None and rk <= n]
            hits[r, c] = len(in_list)
            if test:
                hr[r, c] = len(in_list) / len(test)
                ar[r, c] = sum(1.0 / rk for rk in in_list) / len(test)
    return EvalReport(
        cutoffs=cutoffs,
        repeats=repeats,
        total_users=interactions.n_users,
        evaluated_users=evaluated,
        hr=hr,
        arhr=ar,
        hits=hits,
    )
