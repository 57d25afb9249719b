"""Objective, closed-form gradient, and the projected descent loop."""

import numpy as np
import pytest
import scipy.sparse as sp

from termpath import (
    MetaPathConfig,
    NumericalError,
    TrainConfig,
    aggregate_pathsim,
    gradient,
    idf_init,
    load_corpus,
    objective,
    profile_similarity,
    train,
    two_cluster_dataset,
)
from termpath.profiles import ProfileCorpus

from helpers import (
    finite_difference_gradient,
    gradient_oracle,
    objective_oracle,
    random_corpus,
    random_target,
)


def instance(seed):
    rng = np.random.default_rng(seed)
    corpus = random_corpus(rng)
    w = rng.uniform(0.05, 2.0, corpus.n_terms)
    target = random_target(rng, corpus.n_items)
    lam = [0.0, 0.01, 1.0][seed % 3]
    return corpus, w, target, lam


class TestObjective:
    def test_zero_at_perfect_fit(self):
        rng = np.random.default_rng(1)
        corpus = random_corpus(rng)
        w = rng.uniform(0.1, 2.0, corpus.n_terms)
        S_f = profile_similarity(corpus, w)
        assert objective(corpus, w, S_f, 0.0) == 0.0

    def test_single_discrepant_pair(self):
        corpus = load_corpus(sp.csr_matrix(np.array([[1.0, 0.0], [0.0, 1.0]])), ["a", "b"])
        w = np.array([1.0, 1.0])
        # disjoint supports: s_12 = 0; target has s_12 = 0.5 twice by symmetry
        target = np.array([[1.0, 0.5], [0.5, 1.0]])
        assert objective(corpus, w, target, 0.0) == pytest.approx(0.25, abs=1e-15)

    def test_pure_penalty(self):
        rng = np.random.default_rng(2)
        corpus = random_corpus(rng, n_terms=2)
        w = np.array([3.0, 4.0])
        S_f = profile_similarity(corpus, w)
        assert objective(corpus, w, S_f, 2.0) == pytest.approx(25.0, rel=1e-15)

    def test_matches_double_sum_oracle(self):
        for seed in range(10):
            corpus, w, target, lam = instance(seed)
            expected = objective_oracle(corpus, w, target, lam)
            assert objective(corpus, w, target, lam) == pytest.approx(
                expected, rel=1e-10
            )


class TestGradient:
    def test_zero_at_perfect_fit(self):
        rng = np.random.default_rng(3)
        corpus = random_corpus(rng)
        w = rng.uniform(0.1, 2.0, corpus.n_terms)
        S_f = profile_similarity(corpus, w)
        np.testing.assert_array_equal(gradient(corpus, w, S_f, 0.0), 0.0)

    def test_matches_elementwise_oracle(self):
        for seed in range(25):
            corpus, w, target, lam = instance(seed)
            g = gradient(corpus, w, target, lam)
            np.testing.assert_allclose(
                g, gradient_oracle(corpus, w, target, lam), rtol=1e-10, atol=1e-12
            )

    def test_matches_finite_differences(self):
        for seed in range(10):
            corpus, w, target, lam = instance(seed)
            g = gradient(corpus, w, target, lam)
            g_fd = finite_difference_gradient(
                lambda v: objective(corpus, v, target, lam), w
            )
            big = np.abs(g) > 1e-8
            np.testing.assert_allclose(g[big], g_fd[big], rtol=1e-5)
            np.testing.assert_allclose(g[~big], g_fd[~big], atol=1e-7)

    def test_regularizer_only_on_zero_corpus(self):
        # all-zero local weights: P = 0, so only the penalty gradient remains
        zero = ProfileCorpus(
            sp.csr_matrix((3, 4)), [f"t{k}" for k in range(4)], np.ones(4, dtype=np.int64)
        )
        w = np.array([0.5, 1.5, 0.0, 2.0])
        target = np.zeros((3, 3))
        for lam in (0.0, 0.3, 2.0):
            np.testing.assert_array_equal(gradient(zero, w, target, lam), lam * w)

    def test_unit_diagonals_contribute_nothing(self):
        # with both diagonals at 1, masking the diagonal changes nothing
        rng = np.random.default_rng(4)
        for _ in range(10):
            corpus = random_corpus(rng)
            nonzero_rows = np.asarray(
                corpus.local_weights.sum(axis=1)
            ).ravel() > 0
            if not nonzero_rows.all():
                continue
            w = rng.uniform(0.1, 2.0, corpus.n_terms)
            target = random_target(rng, corpus.n_items)
            masked = target.copy()
            S_f = profile_similarity(corpus, w)
            np.fill_diagonal(masked, S_f.diagonal())
            np.testing.assert_allclose(
                gradient(corpus, w, target, 0.0),
                gradient(corpus, w, masked, 0.0),
                atol=1e-12,
            )


class TestTrain:
    def test_returns_start_when_stationary(self):
        rng = np.random.default_rng(5)
        corpus = random_corpus(rng)
        w0 = rng.uniform(0.1, 2.0, corpus.n_terms)
        S_f = profile_similarity(corpus, w0)
        w, trace = train(corpus, S_f, w0, TrainConfig(lam=0.0))
        np.testing.assert_array_equal(w, w0)
        assert trace.stop_reason == "stationary"
        assert trace.iterations == [0]

    def test_monotone_objective_with_backtracking(self):
        for seed in range(10):
            corpus, w0, target, lam = instance(seed)
            w, trace = train(corpus, target, w0, TrainConfig(lam=lam, max_iters=60))
            diffs = np.diff(trace.objective)
            assert (diffs <= 0).all()
            assert (w >= 0).all()

    def test_iterates_stay_nonnegative_without_backtracking(self):
        corpus, w0, target, lam = instance(1)
        w, trace = train(
            corpus,
            target,
            w0,
            TrainConfig(lam=lam, max_iters=40, backtracking=False, step_size=0.5),
        )
        assert (w >= 0).all()

    def test_trace_parts_sum_to_objective(self):
        corpus, w0, target, lam = instance(2)
        _, trace = train(corpus, target, w0, TrainConfig(lam=lam, max_iters=30))
        for total, fit, pen in zip(trace.objective, trace.fit, trace.penalty):
            assert total == pytest.approx(fit + pen, rel=1e-9)

    def test_planted_instance_improves_ten_percent(self):
        net, corpus = two_cluster_dataset(seed=0)
        target = aggregate_pathsim(net, MetaPathConfig(1))
        w0 = idf_init(corpus)
        w, trace = train(corpus, target, w0, TrainConfig(lam=0.01, max_iters=200))
        assert trace.objective[0] == pytest.approx(
            objective(corpus, w0, target, 0.01), rel=1e-12
        )
        assert trace.objective[-1] <= 0.9 * trace.objective[0]
        assert trace.objective[-1] == pytest.approx(
            objective(corpus, w, target, 0.01), rel=1e-12
        )

    def test_rejects_negative_start(self):
        corpus, w0, target, lam = instance(3)
        with pytest.raises(ValueError):
            train(corpus, target, -w0, TrainConfig())

    def test_nonfinite_data_aborts(self):
        corpus, w0, target, lam = instance(4)
        target = target.copy()
        target[0, 0] = np.nan
        with pytest.raises(NumericalError):
            train(corpus, target, w0, TrainConfig())

    def test_trace_csv_roundtrip(self, tmp_path):
        corpus, w0, target, lam = instance(5)
        _, trace = train(corpus, target, w0, TrainConfig(lam=lam, max_iters=10))
        path = tmp_path / "trace.csv"
        trace.write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "iter,J,fit,penalty,grad_inf,step"
        assert len(lines) == len(trace.iterations) + 1
        first = lines[1].split(",")
        assert float(first[1]) == trace.objective[0]

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(lam=-0.1)
        with pytest.raises(ValueError):
            TrainConfig(step_size=0.0)
        with pytest.raises(ValueError):
            TrainConfig(shrink=1.0)
        with pytest.raises(ValueError):
            TrainConfig(max_iters=0)
