"""Mortality classifiers for classify tasks.

- ``hgb``  gradient-boosted trees (sklearn HistGradientBoosting) on pooled
  per-feature statistics: the non-sequential view of the imputed series
- ``gru``  a GRU sequence classifier: the temporal-pattern view
"""

from __future__ import annotations

import numpy as np

from .io import BridgeError


def pool_features(values):
    """(mean, min, max, last) per feature, feature-major column order."""
    parts = (values.mean(axis=1), values.min(axis=1), values.max(axis=1),
             values[:, -1, :])
    return np.stack(parts, axis=2).reshape(values.shape[0], -1)


def classify_hgb(values, train_ids, score_ids, labels, hyper, device, seed):
    from sklearn.ensemble import HistGradientBoostingClassifier

    X = pool_features(values)
    y = np.array([labels[i] for i in train_ids])
    if len(np.unique(y)) < 2:
        raise BridgeError("training labels contain a single class")
    clf = HistGradientBoostingClassifier(
        max_iter=int(hyper.get("max_iter", 200)),
        learning_rate=float(hyper.get("learning_rate", 0.1)),
        min_samples_leaf=int(hyper.get("min_samples_leaf", 5)),
        random_state=seed,
    )
    clf.fit(X[train_ids], y)
    return clf.predict_proba(X[score_ids])[:, 1]


def classify_gru(values, train_ids, score_ids, labels, hyper, device, seed):
    import torch

    torch.manual_seed(seed)
    dev = torch.device(device)
    hidden = int(hyper.get("hidden_size", 32))
    epochs = int(hyper.get("epochs", 150))
    lr = float(hyper.get("learning_rate", 1e-2))

    y = np.array([labels[i] for i in train_ids], dtype=np.float32)
    if len(np.unique(y)) < 2:
        raise BridgeError("training labels contain a single class")
    x = torch.tensor(values, dtype=torch.float32, device=dev)
    y_t = torch.tensor(y, device=dev)
    train = torch.tensor(train_ids, dtype=torch.long, device=dev)

    f = values.shape[2]
    gru = torch.nn.GRU(f, hidden, batch_first=True).to(dev)
    head = torch.nn.Linear(hidden, 1).to(dev)
    opt = torch.optim.Adam(list(gru.parameters()) + list(head.parameters()), lr=lr)
    loss_fn = torch.nn.BCEWithLogitsLoss()

    for _ in range(epochs):
        _, h = gru(x[train])
        logits = head(h[-1]).squeeze(1)
        loss = loss_fn(logits, y_t)
        opt.zero_grad()
        loss.backward()
        opt.step()

    with torch.no_grad():
        _, h = gru(x[torch.tensor(score_ids, dtype=torch.long, device=dev)])
        scores = torch.sigmoid(head(h[-1]).squeeze(1))
    return scores.cpu().double().numpy()


CLASSIFIERS = {"hgb": classify_hgb, "gru": classify_gru}


def run_classification(model_name, values, train_ids, score_ids, labels,
                       hyper, device="cpu", seed=0):
    if model_name not in CLASSIFIERS:
        raise BridgeError(
            f"unknown classifier {model_name!r}; available: {sorted(CLASSIFIERS)}"
        )
    scores = CLASSIFIERS[model_name](values, train_ids, score_ids, labels,
                                     hyper, device, seed)
    return np.clip(np.asarray(scores, dtype=np.float64), 0.0, 1.0)
