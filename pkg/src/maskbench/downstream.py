"""Downstream mortality-prediction evaluation of imputed series.

The native classifier is pooled-feature logistic regression trained by
full-batch gradient descent: dependency-free, deterministic, and good
enough to rank imputers. Sequential/boosted classifiers participate as
external plugins through the adapter protocol instead.

ROC-AUC is the exact Mann-Whitney statistic with half credit for ties;
PR-AUC is average precision with tied scores grouped (no interpolation).
Both are computed from tie-grouped rank statistics and agree exactly with
their brute-force pairwise/step oracles.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import LabelVector, TimeSeriesTensor

POOL_STATS = ("mean", "min", "max", "last")


class DownstreamError(ValueError):
    """Unusable classification request (single class, no usable folds)."""


@dataclass(frozen=True)
class ClassifierScore:
    roc_auc: float
    pr_auc: float
    n_pos: int
    n_neg: int
    classifier_name: str
    fold_roc_auc: tuple = ()
    fold_pr_auc: tuple = ()

    def __post_init__(self):
        if self.n_pos < 1 or self.n_neg < 1:
            raise DownstreamError("both classes are required for a reported score")
        for v in (self.roc_auc, self.pr_auc):
            if not 0.0 <= v <= 1.0:
                raise DownstreamError(f"AUC {v} outside [0, 1]")


def featurize_pooled(tensor: TimeSeriesTensor) -> np.ndarray:
    """Pool each (sample, feature) series to (mean, min, max, last value).

    Column order: feature-major, statistic-minor, i.e. columns
    ``4*j .. 4*j+3`` hold (mean, min, max, last) of feature ``j``. Output
    width is exactly ``4 * n_features``.
    """
    v = tensor.values
    parts = (v.mean(axis=1), v.min(axis=1), v.max(axis=1), v[:, -1, :])
    return np.stack(parts, axis=2).reshape(tensor.n_samples, -1)


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    intercept: float
    losses: np.ndarray  # mean regularized log-loss per epoch


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def train_linear(features, labels, hyper=(0.1, 300, 1e-3)) -> LinearModel:
    """Logistic regression via full-batch gradient descent.

    ``hyper`` is (learning_rate, epochs, l2). Weights start at zero, so
    training is deterministic and zero epochs mean an uninformative model.
    The per-epoch loss curve is returned for monotonicity checks.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DownstreamError(f"bad shapes: features {X.shape}, labels {y.shape}")
    if len(np.unique(y)) < 2:
        raise DownstreamError("training labels contain a single class")
    lr, epochs, l2 = hyper
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    losses = np.empty(int(epochs))
    for e in range(int(epochs)):
        z = X @ w + b
        p = _sigmoid(z)
        # stable log-loss: log(1 + exp(-|z|)) + max(z,0) - z*y
        losses[e] = float(
            np.mean(np.log1p(np.exp(-np.abs(z))) + np.maximum(z, 0.0) - z * y)
            + 0.5 * l2 * float(w @ w)
        )
        g = p - y
        w -= lr * (X.T @ g / n + l2 * w)
        b -= lr * float(g.mean())
    return LinearModel(w, b, losses)


def predict_scores(model: LinearModel, features) -> np.ndarray:
    X = np.asarray(features, dtype=np.float64)
    return _sigmoid(X @ model.weights + model.intercept)


def _rank_stats(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise DownstreamError("scores and labels must be 1-D and aligned")
    return scores, labels


def roc_auc(scores, labels) -> float:
    """Exact Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 P(tie)."""
    scores, labels = _rank_stats(scores, labels)
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise DownstreamError("ROC-AUC requires both classes")
    order = np.argsort(scores, kind="mergesort")
    sorted_scores = scores[order]
    # average rank per tie group; ranks are 1-based
    boundaries = np.flatnonzero(np.diff(sorted_scores) != 0)
    starts = np.concatenate(([0], boundaries + 1))
    ends = np.concatenate((boundaries, [scores.size - 1]))
    avg_rank = (starts + ends) / 2.0 + 1.0
    ranks = np.empty(scores.size)
    ranks[order] = np.repeat(avg_rank, ends - starts + 1)
    pos_rank_sum = float(ranks[labels == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def pr_auc(scores, labels) -> float:
    """Average precision: sum of precision at each recall increment, with
    descending-score thresholds and tied scores grouped."""
    scores, labels = _rank_stats(scores, labels)
    n_pos = int(np.sum(labels == 1))
    if n_pos == 0:
        raise DownstreamError("PR-AUC requires at least one positive")
    order = np.argsort(-scores, kind="mergesort")
    sorted_scores = scores[order]
    sorted_pos = (labels[order] == 1).astype(np.int64)
    tp = np.cumsum(sorted_pos)
    ranks = np.arange(1, scores.size + 1)
    group_ends = np.flatnonzero(np.diff(sorted_scores) != 0)
    group_ends = np.concatenate((group_ends, [scores.size - 1]))
    ap = 0.0
    tp_prev = 0
    for g in group_ends:
        tp_g = int(tp[g])
        if tp_g > tp_prev:
            precision = tp_g / float(ranks[g])
            ap += precision * ((tp_g - tp_prev) / n_pos)
        tp_prev = tp_g
    return ap


def _standardize_fold(X_train, X_val):
    mu = X_train.mean(axis=0)
    sd = X_train.std(axis=0)
    sd = np.where(sd < 1e-8, 1.0, sd)
    return (X_train - mu) / sd, (X_val - mu) / sd


def evaluate_downstream(imputed_tensor: TimeSeriesTensor, labels: LabelVector,
                        folds, classifier: str = "native_linear",
                        hyper=(0.1, 300, 1e-3),
                        external_scorer=None) -> ClassifierScore:
    """Cross-validated mortality prediction on pooled features.

    Trains per fold on the training indices and scores the validation
    indices; folds whose validation set is single-class are skipped with a
    warning. Reports fold-mean ROC-AUC and PR-AUC.

    ``classifier="external"`` delegates scoring to ``external_scorer``, a
    callable ``(train_idx, val_idx) -> scores for val_idx``; the runner
    wires this to a subprocess through the adapter protocol, shipping the
    imputed series rather than pooled features.
    """
    if classifier not in ("native_linear", "external"):
        raise DownstreamError(f"unknown classifier {classifier!r}")
    if classifier == "external" and external_scorer is None:
        raise DownstreamError("classifier='external' requires external_scorer")
    X = featurize_pooled(imputed_tensor)
    y = labels.labels
    rocs, prs = [], []
    for fold_idx, (train_idx, val_idx) in enumerate(folds):
        y_val = y[val_idx]
        if len(np.unique(y_val)) < 2:
            warnings.warn(
                f"fold {fold_idx}: single-class validation set, skipped",
                stacklevel=2,
            )
            continue
        if classifier == "native_linear":
            X_train, X_val = _standardize_fold(X[train_idx], X[val_idx])
            model = train_linear(X_train, y[train_idx], hyper)
            scores = predict_scores(model, X_val)
        else:
            scores = np.asarray(external_scorer(train_idx, val_idx),
                                dtype=np.float64)
        rocs.append(roc_auc(scores, y_val))
        prs.append(pr_auc(scores, y_val))
    if not rocs:
        raise DownstreamError("every fold was skipped: no scoreable validation sets")
    return ClassifierScore(
        roc_auc=float(np.mean(rocs)),
        pr_auc=float(np.mean(prs)),
        n_pos=int(y.sum()),
        n_neg=int((y == 0).sum()),
        classifier_name=classifier,
        fold_roc_auc=tuple(rocs),
        fold_pr_auc=tuple(prs),
    )
