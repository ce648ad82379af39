"""Downstream evaluation: link prediction, node classification,
recommendation and the distance study."""

from .distance import DistanceStudy, distance_study
from .link import LinkSplit, hadamard, link_prediction_eval, sample_non_edges, split_edges
from .logistic import LogisticModel, LogisticRegression, train_logistic
from .nodeclass import load_labels, node_classification_eval
from .recommend import RankingResult, hide_per_user, recommendation_eval

__all__ = [
    "DistanceStudy",
    "LinkSplit",
    "LogisticModel",
    "LogisticRegression",
    "RankingResult",
    "distance_study",
    "hadamard",
    "hide_per_user",
    "link_prediction_eval",
    "load_labels",
    "node_classification_eval",
    "recommendation_eval",
    "sample_non_edges",
    "split_edges",
    "train_logistic",
]
