"""Node classification with one-vs-rest logistic models."""

import os
import warnings

import numpy as np

from ..exceptions import GraphFormatError
from .link import holdout_count
from .logistic import LogisticRegression
from .metrics import top1_macro_f1


def load_labels(source):
    """Read ``<vertex> <class> [<class> ...]`` lines into ``{vertex: set}``."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = source.read().splitlines()
    out = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise GraphFormatError("expected a vertex and at least one class", lineno)
        out.setdefault(parts[0], set()).update(parts[1:])
    return out


def node_classification_eval(embeddings, labels, train_fraction=0.9, seed=0,
                             id_map=None, epochs=1000, learning_rate=0.5):
    """Accuracy and macro-F1 of top-1 one-vs-rest prediction.

    Parameters
    ----------
    labels : path, file-like or mapping
        Vertex to class-set mapping. Keys are vertex labels resolved via
        ``id_map`` when given, otherwise row indices.
    train_fraction : float
        Share of labelled vertices used to fit the classifiers.

    A prediction counts as correct when it is one of the vertex's classes.
    Classes without training examples are dropped with a warning.
    """
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if not isinstance(labels, dict):
        labels = load_labels(labels)
    rows, sets = [], []
    for key, classes in labels.items():
        if id_map is not None:
            if key not in id_map:
                raise KeyError(f"labelled vertex {key!r} has no embedding")
            rows.append(id_map[key])
        else:
            rows.append(int(key))
        sets.append(set(classes))
    rows = np.array(rows, dtype=np.int64)
    if rows.size and (rows.max() >= embeddings.shape[0] or rows.min() < 0):
        raise IndexError("labelled vertex outside the embedding table")
    order = np.argsort(rows, kind="stable")
    rows, sets = rows[order], [sets[i] for i in order]

    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(rows))
    n_train = holdout_count(len(rows), train_fraction)
    train_idx, test_idx = perm[:n_train], perm[n_train:]
    if test_idx.size == 0:
        raise ValueError("no vertices left for testing")

    all_classes = sorted(set().union(*sets))
    train_sets = [sets[i] for i in train_idx]
    classes = [c for c in all_classes if any(c in s for s in train_sets)]
    dropped = sorted(set(all_classes) - set(classes))
    if dropped:
        warnings.warn(f"classes without training examples excluded: {dropped}")

    X_train = embeddings[rows[train_idx]]
    X_test = embeddings[rows[test_idx]]
    scores = np.empty((len(test_idx), len(classes)))
    for j, c in enumerate(classes):
        y = np.array([c in s for s in train_sets], dtype=int)
        if y.all():
            scores[:, j] = 1.0
            continue
        clf = LogisticRegression(epochs=epochs, learning_rate=learning_rate).fit(X_train, y)
        scores[:, j] = clf.predict_proba(X_test)[:, 1]
    predicted = [classes[j] for j in np.argmax(scores, axis=1)]
    test_sets = [sets[i] for i in test_idx]
    acc = float(np.mean([p in s for p, s in zip(predicted, test_sets)]))
    return {"accuracy": acc, "macro_f1": top1_macro_f1(predicted, test_sets, classes)}
