"""Hot numeric kernels: numba-jitted loops with pure-NumPy fallbacks.

The backend is chosen once at import time. Setting the environment variable
``MASKBENCH_DISABLE_NUMBA=1`` (or running without numba installed) selects
the NumPy path; ``maskbench._kernels.BACKEND`` reports which one is active.

The two paths are bit-identical for ``locf_fill``, ``ar1_recurrence`` and
``followup_scan`` (copies, comparisons and identically ordered multiply-adds).
``masked_error_sums`` uses Kahan summation under numba and NumPy's pairwise
summation otherwise; the two agree far below the 1e-12 tolerance the metric
contracts require. ``benchmarks/bench_kernels.py`` times both paths.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("MASKBENCH_DISABLE_NUMBA", "0") == "1"

try:
    if _DISABLED:
        raise ImportError("numba disabled via MASKBENCH_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# NumPy implementations

def _locf_fill_np(values, observed, fallback):
    out = np.empty_like(values)
    last = np.full(values.shape[::2], fallback, dtype=values.dtype)
    for t in range(values.shape[1]):
        last = np.where(observed[:, t, :], values[:, t, :], last)
        out[:, t, :] = last
    return out


def _ar1_recurrence_np(eps, coef):
    out = np.empty_like(eps)
    out[:, 0, :] = eps[:, 0, :]
    for t in range(1, eps.shape[1]):
        out[:, t, :] = coef * out[:, t - 1, :] + eps[:, t, :]
    return out


def _masked_error_sums_np(truth, imputed, mask):
    diff = np.abs(truth - imputed)[mask]
    return float(np.sum(diff)), float(np.sum(diff * diff)), int(diff.size)


def _followup_scan_np(observed, z_abs, u, threshold, prob):
    out = observed.copy()
    for t in range(observed.shape[1] - 1):
        trigger = out[:, t, :] & (z_abs[:, t, :] > threshold) & (u[:, t, :] < prob)
        out[:, t + 1, :] |= trigger
    return out


# ---------------------------------------------------------------------------
# Numba implementations

if HAVE_NUMBA:

    @njit(cache=True)
    def _locf_fill_nb(values, observed, fallback):
        n, s, f = values.shape
        out = np.empty_like(values)
        for i in range(n):
            for k in range(f):
                last = fallback
                for t in range(s):
                    if observed[i, t, k]:
                        last = values[i, t, k]
                    out[i, t, k] = last
        return out

    @njit(cache=True)
    def _ar1_recurrence_nb(eps, coef):
        n, s, f = eps.shape
        out = np.empty_like(eps)
        for i in range(n):
            for k in range(f):
                out[i, 0, k] = eps[i, 0, k]
                for t in range(1, s):
                    out[i, t, k] = coef * out[i, t - 1, k] + eps[i, t, k]
        return out

    @njit(cache=True)
    def _masked_error_sums_nb(truth, imputed, mask):
        flat_t = truth.ravel()
        flat_i = imputed.ravel()
        flat_m = mask.ravel()
        sum_abs = 0.0
        c_abs = 0.0
        sum_sq = 0.0
        c_sq = 0.0
        count = 0
        for j in range(flat_t.shape[0]):
            if flat_m[j]:
                d = abs(flat_t[j] - flat_i[j])
                y = d - c_abs
                t1 = sum_abs + y
                c_abs = (t1 - sum_abs) - y
                sum_abs = t1
                y = d * d - c_sq
                t2 = sum_sq + y
                c_sq = (t2 - sum_sq) - y
                sum_sq = t2
                count += 1
        return sum_abs, sum_sq, count

    @njit(cache=True)
    def _followup_scan_nb(observed, z_abs, u, threshold, prob):
        n, s, f = observed.shape
        out = observed.copy()
        for i in range(n):
            for k in range(f):
                for t in range(s - 1):
                    if out[i, t, k] and z_abs[i, t, k] > threshold and u[i, t, k] < prob:
                        out[i, t + 1, k] = True
        return out

    _locf_fill = _locf_fill_nb
    _ar1_recurrence = _ar1_recurrence_nb
    _masked_error_sums = _masked_error_sums_nb
    _followup_scan = _followup_scan_nb
else:
    _locf_fill = _locf_fill_np
    _ar1_recurrence = _ar1_recurrence_np
    _masked_error_sums = _masked_error_sums_np
    _followup_scan = _followup_scan_np


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def _b8(a):
    return np.ascontiguousarray(a, dtype=np.bool_)


def locf_fill(values, observed, fallback):
    """Carry the last observed value forward along the step axis.

    Leading gaps (no prior observation) are filled with ``fallback``.
    """
    return _locf_fill(_f64(values), _b8(observed), float(fallback))


def ar1_recurrence(eps, coef):
    """x[t] = coef * x[t-1] + eps[t] along the step axis, x[0] = eps[0]."""
    return _ar1_recurrence(_f64(eps), float(coef))


def followup_scan(observed, z_abs, u, threshold, prob):
    """Chained follow-up rule: an observed abnormal cell (|z| > threshold)
    re-observes the next step of the same feature when u < prob."""
    return _followup_scan(_b8(observed), _f64(z_abs), _f64(u), float(threshold), float(prob))


def masked_error_sums(truth, imputed, mask):
    """Fused reduction: (sum |err|, sum err^2, cell count) over masked cells."""
    return _masked_error_sums(_f64(truth), _f64(imputed), _b8(mask))
