"""Central finite-difference oracle shared across gradient tests.

Deliberately independent of the tape: it perturbs raw parameter arrays and
re-runs the forward closure, never consulting any analytic gradient.
"""

import numpy as np


def finite_difference(loss_fn, arrays: dict, step: float = 1e-5) -> dict:
    """d loss / d array[i] for every element of every array, by central differences."""
    grads = {}
    for name, arr in arrays.items():
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            hi = loss_fn()
            flat[i] = orig - step
            lo = loss_fn()
            flat[i] = orig
            gflat[i] = (hi - lo) / (2 * step)
        grads[name] = g
    return grads


def max_relative_error(analytic: dict, numeric: dict, floor: float = 1e-6) -> float:
    worst = 0.0
    for name in numeric:
        a = analytic[name]
        n = numeric[name]
        denom = np.maximum(np.abs(a) + np.abs(n), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
