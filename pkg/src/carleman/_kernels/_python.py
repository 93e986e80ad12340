"""NumPy fallback implementations of the hot grid kernels."""

import numpy as np

BACKEND_NAME = "python"


def weighted_power_sum(absf, w, p):
    """sum_j w_j * absf_j**p over flat float64 arrays (w may be None)."""
    if p == 2.0:
        t = absf * absf
    elif p == 1.0:
        t = absf
    else:
        t = absf**p
    if w is None:
        return float(np.sum(t))
    return float(np.sum(w * t))


def weighted_power_sum_complex(f, w, p):
    """sum_j w_j |f_j|**p over a flat complex128 array (w may be None)."""
    return weighted_power_sum(np.abs(f), w, p)


def piecewise_power_values(t, e1, e2):
    """t**e1 where t <= 1, t**e2 where t >= 1, elementwise (t > 0)."""
    out = np.empty_like(t)
    lo = t <= 1.0
    out[lo] = t[lo] ** e1
    out[~lo] = t[~lo] ** e2
    return out


def abs_magnitude(parts):
    """Euclidean magnitude sqrt(sum |g_k|^2) over a list of complex arrays."""
    acc = np.zeros(parts[0].shape, dtype=np.float64)
    for g in parts:
        acc += np.abs(g) ** 2
    return np.sqrt(acc)
