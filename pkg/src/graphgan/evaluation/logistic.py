"""Binary logistic regression by full-batch gradient descent."""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    losses: list = field(default_factory=list, repr=False)

    def decision_function(self, features):
        return np.asarray(features, dtype=np.float64) @ self.weights + self.bias

    def predict_proba(self, features):
        return expit(self.decision_function(features))


def bce_loss(prob, labels):
    prob = np.clip(prob, 1e-15, 1 - 1e-15)
    return float(-np.mean(labels * np.log(prob) + (1 - labels) * np.log(1 - prob)))


def train_logistic(features, labels, epochs=1000, lr=0.5):
    """Minimise mean binary cross-entropy from zero weights.

    ``model.losses[i]`` is the loss before update ``i``.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError(f"features {X.shape} and labels {y.shape} do not match")
    w = np.zeros(X.shape[1])
    b = 0.0
    losses = []
    n = X.shape[0]
    for _ in range(epochs):
        p = expit(X @ w + b)
        losses.append(bce_loss(p, y))
        err = p - y
        w -= lr * (X.T @ err) / n
        b -= lr * err.mean()
    return LogisticModel(w, b, losses)


class LogisticRegression(ClassifierMixin, BaseEstimator):
    """Estimator wrapper around :func:`train_logistic`.

    Features are z-scored with training statistics when ``standardize`` is
    set, which keeps plain gradient descent well conditioned on small
    embedding values.
    """

    def __init__(self, epochs=1000, learning_rate=0.5, standardize=True):
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.standardize = standardize

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        self.classes_, y_idx = np.unique(y, return_inverse=True)
        if len(self.classes_) != 2:
            raise ValueError(f"need exactly two classes, got {len(self.classes_)}")
        if self.standardize:
            self.mean_ = X.mean(axis=0)
            scale = X.std(axis=0)
            self.scale_ = np.where(scale > 0, scale, 1.0)
        else:
            self.mean_ = np.zeros(X.shape[1])
            self.scale_ = np.ones(X.shape[1])
        self.model_ = train_logistic((X - self.mean_) / self.scale_, y_idx,
                                     self.epochs, self.learning_rate)
        return self

    def _positive_proba(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X, dtype=np.float64)
        return self.model_.predict_proba((X - self.mean_) / self.scale_)

    def predict_proba(self, X):
        p = self._positive_proba(X)
        return np.column_stack([1 - p, p])

    def predict(self, X):
        p = self._positive_proba(X)
        return self.classes_[(p >= 0.5).astype(int)]
