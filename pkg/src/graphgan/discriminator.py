"""Sigmoid inner-product discriminator and its ascent step."""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .exceptions import NonFiniteUpdateError

D_CLAMP = 1e-10


@dataclass(frozen=True)
class LabeledPair:
    """``label`` is 1 for an observed edge, 0 for a generated vertex."""

    v: int
    center: int
    label: int

    def __post_init__(self):
        if self.v == self.center:
            raise ValueError("a pair needs two distinct vertices")


def d_score(v, v_c, theta_d):
    """Edge probability ``sigmoid(d_v . d_{v_c})``."""
    return float(expit(np.dot(theta_d[v], theta_d[v_c])))


def _as_arrays(pairs):
    v = np.array([p.v for p in pairs], dtype=np.int64)
    vc = np.array([p.center for p in pairs], dtype=np.int64)
    labels = np.array([p.label for p in pairs], dtype=np.int8)
    return v, vc, labels


def pair_gradient(theta_d, v, vc, labels):
    """Gradient of the labelled log-likelihood over a batch of pairs.

    Returns ``(grad, loglik)``. Only rows appearing in ``v`` or ``vc`` are
    non-zero.
    """
    x = np.einsum("ij,ij->i", theta_d[v], theta_d[vc])
    score = expit(x)
    coef = labels - score
    grad = np.zeros_like(theta_d, dtype=np.float64)
    np.add.at(grad, v, coef[:, None] * theta_d[vc])
    np.add.at(grad, vc, coef[:, None] * theta_d[v])
    clipped = np.clip(score, D_CLAMP, 1.0 - D_CLAMP)
    loglik = np.where(labels == 1, np.log(clipped), np.log(1.0 - clipped)).sum()
    return grad, float(loglik)


def log_likelihood(pairs, theta_d):
    """Sum of ``log D`` over positives and ``log(1 - D)`` over negatives."""
    v, vc, labels = _as_arrays(pairs)
    x = np.einsum("ij,ij->i", theta_d[v], theta_d[vc])
    return float(np.sum(np.where(labels == 1, -np.logaddexp(0, -x), -np.logaddexp(0, x))))


def discriminator_step(pairs, theta_d, learning_rate):
    """One batched gradient-ascent step; returns the updated table."""
    if not pairs:
        return np.array(theta_d, dtype=np.float64)
    grad, _ = pair_gradient(theta_d, *_as_arrays(pairs))
    updated = theta_d + learning_rate * grad
    if not np.all(np.isfinite(updated)):
        raise NonFiniteUpdateError("discriminator step produced non-finite parameters")
    return updated
