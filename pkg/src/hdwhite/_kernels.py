"""Compiled channel sweep.

Evaluates the tuple-product dynamic program for many ``(i, j)`` channels of a
panel in one pass over time, forming each per-time term ``x[i, t] * x[j, t - lag]``
on the fly. Per channel it keeps the running prefix sums of every level plus a
ring buffer of the last ``q + 1`` of them, which is where
``prefix_{k-1}(t - q - 1)`` is read from.
"""

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numpy fallback in hdwhite.ustat
    njit = None


def _channel_levels(x, q, a_max, lag, i_idx, j_idx, out):
    T = x.shape[1]
    width = q + 1
    hist = np.zeros((a_max, width))
    prefix = np.zeros(a_max)
    for c in range(i_idx.shape[0]):
        i = i_idx[c]
        j = j_idx[c]
        hist[:, :] = 0.0
        prefix[:] = 0.0
        for t in range(T):
            slot = t % width
            s = x[i, t] * x[j, t - lag] if t >= lag else 0.0
            # hist[:, slot] still holds the prefixes at time t - q - 1
            for k in range(a_max - 1, 0, -1):
                prefix[k] += s * hist[k - 1, slot]
            if t >= q:
                prefix[0] += s
            for k in range(a_max):
                hist[k, slot] = prefix[k]
        for k in range(a_max):
            out[c, k] = prefix[k]


if njit is not None:
    channel_levels = njit(cache=True, nogil=True)(_channel_levels)
else:  # pragma: no cover
    channel_levels = None
