"""Exact arithmetic on categorical distributions.

Distributions are plain 1-D float64 arrays. Likelihood matrices are indexed
``A[o, s] = P(o | s)`` and transition tensors ``B[s', s, u] = P(s' | s, u)``,
so every column is a distribution. All logarithms are natural.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    ContractViolationError,
    ImpossibleEvidenceError,
    InfiniteDivergenceError,
)

TOL = 1e-9


def _simplex_columns(x: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(x)):
        raise ContractViolationError(f"{name} contains non-finite entries")
    if np.any(x < 0):
        raise ContractViolationError(f"{name} has negative entries")
    sums = x.sum(axis=0)
    if np.any(np.abs(sums - 1.0) > TOL):
        raise ContractViolationError(
            f"{name} columns must sum to 1 within {TOL:g} (worst sum {sums.flat[np.argmax(np.abs(sums - 1.0))]!r})"
        )


def as_categorical(p, name: str = "distribution") -> np.ndarray:
    """Validate and return ``p`` as a float64 probability vector."""
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ContractViolationError(f"{name} must be a non-empty 1-D vector, got shape {p.shape}")
    _simplex_columns(p, name)
    return p


def as_likelihood(A, name: str = "A") -> np.ndarray:
    """Validate an ``|O| x |S|`` likelihood matrix with normalized columns."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or 0 in A.shape:
        raise ContractViolationError(f"{name} must be a non-empty 2-D matrix, got shape {A.shape}")
    _simplex_columns(A, name)
    return A


def as_transition(B, name: str = "B") -> np.ndarray:
    """Validate an ``|S| x |S| x |U|`` transition tensor with normalized columns."""
    B = np.asarray(B, dtype=np.float64)
    if B.ndim != 3 or B.shape[0] != B.shape[1] or 0 in B.shape:
        raise ContractViolationError(f"{name} must have shape (S, S, U), got {B.shape}")
    _simplex_columns(B, name)
    return B


def xlogx(p: np.ndarray) -> np.ndarray:
    """Elementwise ``p * ln(p)`` with ``0 ln 0 = 0``."""
    p = np.asarray(p, dtype=np.float64)
    out = np.zeros_like(p)
    mask = p > 0
    out[mask] = p[mask] * np.log(p[mask])
    return out


def normalize(v) -> np.ndarray:
    """Scale a nonnegative vector to sum to one.

    Raises :class:`ImpossibleEvidenceError` when the vector has no mass or a
    negative entry, which is how a zero-probability observation shows up in a
    Bayes update.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ContractViolationError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if np.any(v < 0):
        raise ImpossibleEvidenceError("cannot normalize a vector with negative entries")
    total = v.sum()
    if not total > 0:
        raise ImpossibleEvidenceError("observation has zero probability under the prior")
    return v / total


def bayes_update(obs: int, A, prior) -> np.ndarray:
    """Posterior over states after observing ``obs``: ``A[obs] * prior``, renormalized."""
    A = np.asarray(A, dtype=np.float64)
    prior = np.asarray(prior, dtype=np.float64)
    if A.ndim != 2 or prior.shape != (A.shape[1],):
        raise ContractViolationError(
            f"prior of shape {prior.shape} does not match likelihood of shape {A.shape}"
        )
    if not 0 <= obs < A.shape[0]:
        raise ContractViolationError(f"observation {obs} out of range [0, {A.shape[0]})")
    return normalize(A[obs] * prior)


def predict_state(B_u, beliefs) -> np.ndarray:
    """Push state beliefs through one action slice ``B[:, :, u]``."""
    B_u = np.asarray(B_u, dtype=np.float64)
    beliefs = np.asarray(beliefs, dtype=np.float64)
    if B_u.ndim != 2 or B_u.shape[0] != B_u.shape[1] or beliefs.shape != (B_u.shape[1],):
        raise ContractViolationError(
            f"transition slice {B_u.shape} incompatible with beliefs {beliefs.shape}"
        )
    return B_u @ beliefs


def predict_observation(A, beliefs) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    beliefs = np.asarray(beliefs, dtype=np.float64)
    if A.ndim != 2 or beliefs.shape != (A.shape[1],):
        raise ContractViolationError(
            f"likelihood {A.shape} incompatible with beliefs {beliefs.shape}"
        )
    return A @ beliefs


def kl_divergence(p, q) -> float:
    """``KL(p || q)`` in nats, using ``0 ln 0 = 0`` on the ``p`` side."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise ContractViolationError(f"shape mismatch: {p.shape} vs {q.shape}")
    support = p > 0
    if np.any(q[support] <= 0):
        raise InfiniteDivergenceError("reference distribution is zero where p has mass")
    kl = float(np.sum(p[support] * (np.log(p[support]) - np.log(q[support]))))
    # rounding can push an exact zero slightly negative
    return max(kl, 0.0)


def column_entropy(A) -> np.ndarray:
    """Entropy of each column of a likelihood matrix, i.e. ``H[P(O | s)]`` per state."""
    return -xlogx(np.asarray(A, dtype=np.float64)).sum(axis=0)


def ambiguity(A, beliefs) -> float:
    """Expected observation entropy ``sum_s beliefs[s] * H[A[:, s]]``."""
    A = np.asarray(A, dtype=np.float64)
    beliefs = np.asarray(beliefs, dtype=np.float64)
    if A.ndim != 2 or beliefs.shape != (A.shape[1],):
        raise ContractViolationError(
            f"likelihood {A.shape} incompatible with beliefs {beliefs.shape}"
        )
    return max(float(column_entropy(A) @ beliefs), 0.0)


def expected_free_energy(beliefs, A, C) -> float:
    """Risk plus ambiguity of a predicted state distribution.

    Risk is the KL divergence between predicted observations ``A @ beliefs``
    and the preferred observation distribution ``C``; ambiguity is the
    expected entropy of the likelihood under ``beliefs``.
    """
    return kl_divergence(predict_observation(A, beliefs), C) + ambiguity(A, beliefs)
