"""Classification and ranking metrics."""

import numpy as np


def accuracy(y_true, y_pred):
    y_true = np.asarray(y_true)
    return float(np.mean(y_true == np.asarray(y_pred))) if y_true.size else 0.0


def f1_from_counts(tp, fp, fn):
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else None


def binary_macro_f1(y_true, y_pred):
    """Mean of the F1 scores of class 1 and class 0."""
    y_true = np.asarray(y_true).astype(bool)
    y_pred = np.asarray(y_pred).astype(bool)
    scores = []
    for positive in (True, False):
        t = y_true == positive
        p = y_pred == positive
        f1 = f1_from_counts(np.sum(t & p), np.sum(~t & p), np.sum(t & ~p))
        if f1 is not None:
            scores.append(f1)
    return float(np.mean(scores)) if scores else 0.0


def top1_macro_f1(predicted, label_sets, classes):
    """Macro-F1 of single predictions against label sets.

    For class ``c``: a hit when ``c`` is predicted and in the set, a false
    positive when predicted but absent, a miss when present but not
    predicted. Classes with no predictions and no occurrences are skipped.
    """
    scores = []
    for c in classes:
        tp = fp = fn = 0
        for pred, labels in zip(predicted, label_sets):
            if pred == c:
                if c in labels:
                    tp += 1
                else:
                    fp += 1
            elif c in labels:
                fn += 1
        f1 = f1_from_counts(tp, fp, fn)
        if f1 is not None:
            scores.append(f1)
    return float(np.mean(scores)) if scores else 0.0


def precision_recall_at_k(ranked, relevant, k):
    hits = len(set(ranked[:k]) & relevant)
    return hits / k, hits / len(relevant)
