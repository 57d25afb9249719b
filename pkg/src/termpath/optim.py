"""Fit the per-term global weights so profile similarity matches a target.

The objective is half the squared Frobenius distance between the weighted
cosine similarity of the profiles and a fixed target similarity matrix,
over every item pair including the diagonal, plus an L2 penalty on the
weights.  It is minimized by projected gradient descent on the
nonnegative orthant with optional Armijo backtracking.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .profiles import ProfileCorpus, _similarity_from_normalized, normalize

__all__ = ["TrainConfig", "TrainTrace", "objective", "gradient", "train"]

_log = logging.getLogger(__name__)

# Backtracking gives up once the candidate step drops below this.
_MIN_STEP = 1e-12


@dataclass
class TrainConfig:
    """Knobs for the projected gradient descent loop.

    ``lam`` weights the L2 penalty; ``step_size`` is the step tried first
    each iteration; with ``backtracking`` the step shrinks by ``shrink``
    until the Armijo test J(w+) <= J(w) - armijo * step * |g|^2 passes.
    ``seed`` is carried for provenance (the descent itself draws no
    randomness).
    """

    lam: float = 0.01
    step_size: float = 0.1
    max_iters: int = 200
    rel_tol: float = 1e-6
    backtracking: bool = True
    shrink: float = 0.5
    armijo: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be nonnegative")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink must be in (0, 1)")
        if not 0.0 < self.armijo < 1.0:
            raise ValueError("armijo must be in (0, 1)")


@dataclass
class TrainTrace:
    """Per-iteration objective decomposition and step bookkeeping.

    Row 0 describes the starting point (step 0); each later row records
    the state after one accepted descent step.  ``objective`` equals
    ``fit + penalty`` at every row.
    """

    iterations: list[int] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)
    fit: list[float] = field(default_factory=list)
    penalty: list[float] = field(default_factory=list)
    grad_inf: list[float] = field(default_factory=list)
    step: list[float] = field(default_factory=list)
    stop_reason: str = ""

    def append(self, iteration, obj, fit, penalty, grad_inf, step):
        self.iterations.append(int(iteration))
        self.objective.append(float(obj))
        self.fit.append(float(fit))
        self.penalty.append(float(penalty))
        self.grad_inf.append(float(grad_inf))
        self.step.append(float(step))

    def __len__(self) -> int:
        return len(self.iterations)

    def write_csv(self, path) -> None:
        """Write rows with columns iter, J, fit, penalty, grad_inf, step."""
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["iter", "J", "fit", "penalty", "grad_inf", "step"])
            for row in zip(
                self.iterations,
                self.objective,
                self.fit,
                self.penalty,
                self.grad_inf,
                self.step,
            ):
                out.writerow([row[0]] + [repr(v) for v in row[1:]])


def _objective_parts(corpus, w, target, lam):
    prof = normalize(corpus, w)
    diff = _similarity_from_normalized(prof, w) - target
    fit = 0.5 * float(np.vdot(diff, diff))
    penalty = 0.5 * lam * float(w @ w)
    return fit + penalty, fit, penalty


def _check_target(corpus: ProfileCorpus, target) -> np.ndarray:
    target = np.asarray(target, dtype=np.float64)
    n = corpus.n_items
    if target.shape != (n, n):
        raise ValueError(f"target similarity must be {n}x{n}, got {target.shape}")
    return target


def objective(corpus: ProfileCorpus, w, target, lam: float) -> float:
    """Half the squared mismatch over all item pairs plus (lam/2) |w|^2.

    The sum runs over every entry of the two similarity matrices,
    diagonal included.
    """
    target = _check_target(corpus, target)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    return _objective_parts(corpus, w, target, lam)[0]


def gradient(corpus: ProfileCorpus, w, target, lam: float) -> np.ndarray:
    """Closed-form derivative of :func:`objective` in each weight.

    With P the normalized profiles, Q the entrywise mismatch S_f - target
    and R the diagonal matrix of row sums of Q * S_f (elementwise), the
    derivative is diag(P^T (Q - R) P) + lam * w.  It is evaluated as one
    matrix product followed by a column reduction; P^T (Q - R) P itself is
    never materialized.  Items with a zero norm have zero rows in P and
    contribute nothing.
    """
    target = _check_target(corpus, target)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    prof = normalize(corpus, w)
    w = np.asarray(w, dtype=np.float64)
    S_f = _similarity_from_normalized(prof, w)
    Q = S_f - target
    r_row = (Q * S_f).sum(axis=1)
    G = Q @ prof.p - r_row[:, None] * prof.p
    return np.einsum("ik,ik->k", prof.p, G) + lam * w


def train(
    corpus: ProfileCorpus, target, w0, cfg: TrainConfig
) -> tuple[np.ndarray, TrainTrace]:
    """Projected gradient descent on the nonnegative orthant.

    Each iteration moves against the gradient and clamps at zero:
    w <- max(0, w - step * g).  With backtracking the step shrinks by
    ``cfg.shrink`` until the Armijo test passes; if the floor step still
    fails the test it is taken only when it does not increase the
    objective, otherwise the loop stops.  Every iterate is exactly
    nonnegative and, with backtracking, the objective never increases.

    Returns the final weights and the iteration trace.  Raises
    :class:`NumericalError` if the objective or gradient turns non-finite,
    which usually signals pathological input scales.
    """
    target = _check_target(corpus, target)
    w = np.asarray(w0, dtype=np.float64).copy()
    if (w < 0).any():
        raise ValueError("initial weights must be nonnegative")

    trace = TrainTrace()
    J, fit, pen = _objective_parts(corpus, w, target, cfg.lam)
    if not np.isfinite(J):
        raise NumericalError(f"objective is not finite at the starting point (J={J})")

    for it in range(1, cfg.max_iters + 1):
        g = gradient(corpus, w, target, cfg.lam)
        if not np.all(np.isfinite(g)):
            raise NumericalError(f"gradient turned non-finite at iteration {it}")
        grad_inf = float(np.abs(g).max()) if g.size else 0.0
        if it == 1:
            trace.append(0, J, fit, pen, grad_inf, 0.0)
        if grad_inf == 0.0:
            trace.stop_reason = "stationary"
            break

        if cfg.backtracking:
            gsq = float(g @ g)
            step = cfg.step_size
            while True:
                w_new = np.maximum(w - step * g, 0.0)
                J_new, fit_new, pen_new = _objective_parts(
                    corpus, w_new, target, cfg.lam
                )
                if not np.isfinite(J_new):
                    raise NumericalError(
                        f"objective turned non-finite at iteration {it}"
                    )
                if J_new <= J - cfg.armijo * step * gsq:
                    break
                if step <= _MIN_STEP:
                    break
                step *= cfg.shrink
            if J_new > J:
                # Even the floor step climbs; keep the current iterate.
                trace.stop_reason = "no_descent_step"
                break
        else:
            step = cfg.step_size
            w_new = np.maximum(w - step * g, 0.0)
            J_new, fit_new, pen_new = _objective_parts(corpus, w_new, target, cfg.lam)
            if not np.isfinite(J_new):
                raise NumericalError(f"objective turned non-finite at iteration {it}")

        delta = abs(J - J_new)
        w, J, fit, pen = w_new, J_new, fit_new, pen_new
        trace.append(it, J, fit, pen, grad_inf, step)
        if J == 0.0 or delta / max(abs(J), np.finfo(float).tiny) < cfg.rel_tol:
            trace.stop_reason = "converged"
            break
    else:
        trace.stop_reason = "max_iters"

    _log.info(
        "training stopped after %d steps (%s), J=%.6g",
        max(len(trace) - 1, 0),
        trace.stop_reason,
        trace.objective[-1] if len(trace) else float("nan"),
    )
    return w, trace
