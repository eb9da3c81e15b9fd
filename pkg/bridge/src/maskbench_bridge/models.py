"""Imputation model registry.

Two models are always available:

- ``identity``  zero-fill debug stub (gaps become 0.0, the normalized mean)
- ``gru``       bidirectional GRU trained by masked self-reconstruction; a
  small reference network for protocol validation and CPU-scale benchmarks,
  not a reimplementation of any published architecture

When PyPOTS is importable, its imputation models (saits, brits, transformer,
timesnet, csdi, gpvae, usgan, mrnn) join the registry and run with the
hyperparameters passed through ``model_hyper``.
"""

from __future__ import annotations

import numpy as np

from .io import BridgeError

try:
    import pypots.imputation as _pypots_imputation

    HAVE_PYPOTS = True
except ImportError:
    _pypots_imputation = None
    HAVE_PYPOTS = False

_PYPOTS_CLASSES = {
    "saits": "SAITS",
    "brits": "BRITS",
    "transformer": "Transformer",
    "timesnet": "TimesNet",
    "csdi": "CSDI",
    "gpvae": "GPVAE",
    "usgan": "USGAN",
    "mrnn": "MRNN",
}


def available_models():
    names = ["identity", "gru"]
    if HAVE_PYPOTS:
        names += [m for m in _PYPOTS_CLASSES
                  if hasattr(_pypots_imputation, _PYPOTS_CLASSES[m])]
    return names


def impute_identity(values, observed, hyper, device, seed):
    return np.where(observed, values, 0.0)


def _torch(seed, device):
    import torch

    torch.manual_seed(seed)
    return torch, torch.device(device)


def impute_gru(values, observed, hyper, device, seed):
    """Masked self-reconstruction with a bidirectional GRU.

    Each epoch hides a fresh random subset of the visible cells and trains
    the network to recover them from the remaining context; gaps are filled
    from the final model's full-sequence reconstruction.
    """
    torch, dev = _torch(seed, device)
    hidden = int(hyper.get("hidden_size", 64))
    epochs = int(hyper.get("epochs", 120))
    lr = float(hyper.get("learning_rate", 1e-2))
    hide_frac = float(hyper.get("hide_fraction", 0.2))

    n, s, f = values.shape
    x = torch.tensor(np.where(observed, values, 0.0), dtype=torch.float32,
                     device=dev)
    m = torch.tensor(observed, dtype=torch.float32, device=dev)

    gru = torch.nn.GRU(2 * f, hidden, batch_first=True, bidirectional=True).to(dev)
    head = torch.nn.Linear(2 * hidden, f).to(dev)
    params = list(gru.parameters()) + list(head.parameters())
    opt = torch.optim.Adam(params, lr=lr)
    gen = torch.Generator(device="cpu").manual_seed(seed)

    for _ in range(epochs):
        hide = (torch.rand(m.shape, generator=gen).to(dev) < hide_frac) * (m > 0)
        m_in = m * (~hide)
        x_in = x * m_in
        out, _ = gru(torch.cat([x_in, m_in], dim=2))
        pred = head(out)
        loss = (torch.abs(pred - x) * hide).sum() / hide.sum().clamp(min=1.0)
        opt.zero_grad()
        loss.backward()
        opt.step()

    with torch.no_grad():
        out, _ = gru(torch.cat([x * m, m], dim=2))
        pred = head(out)
    return pred.cpu().double().numpy()


def impute_pypots(model_name, values, observed, hyper, device, seed):
    cls = getattr(_pypots_imputation, _PYPOTS_CLASSES[model_name])
    n, s, f = values.shape
    kwargs = {"n_steps": s, "n_features": f, **hyper}
    if device and device != "cpu":
        kwargs.setdefault("device", device)
    model = cls(**kwargs)
    dataset = {"X": np.where(observed, values, np.nan)}
    model.fit(dataset)
    result = model.predict(dataset)
    imputation = np.asarray(result["imputation"], dtype=np.float64)
    if imputation.ndim == 4:  # probabilistic models return draws
        imputation = imputation.mean(axis=1)
    return imputation


def run_imputation(model_name, values, observed, hyper, device="cpu", seed=0):
    if model_name == "identity":
        return impute_identity(values, observed, hyper, device, seed)
    if model_name == "gru":
        return impute_gru(values, observed, hyper, device, seed)
    if model_name in _PYPOTS_CLASSES:
        if not HAVE_PYPOTS:
            raise BridgeError(
                f"model {model_name!r} needs pypots, which is not installed; "
                f"available: {available_models()}"
            )
        return impute_pypots(model_name, values, observed, hyper, device, seed)
    raise BridgeError(
        f"unknown model {model_name!r}; available: {available_models()}"
    )
