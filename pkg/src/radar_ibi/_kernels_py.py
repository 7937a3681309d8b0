"""Pure-Python kernels; fallback for the compiled ``_kernels`` extension.

Both modules expose the same two functions with identical semantics:

``feature_points(y) -> (index, kind, prominence)``
    Strict local extrema of ``y``. ``kind`` is +1 for maxima and -1 for
    minima; prominence is the topographic prominence (minima are measured
    on ``-y``).

``topology_scan(t, kind, amp, tau_min, tau_max, window, delta, threshold, eps)
-> (emit_index, lag)``
    Feature-sequence matching over candidate lags; see
    :func:`radar_ibi.ibi.topology_ibi`.
"""
import numpy as np


def _prominence(y, peaks):
    prom = np.empty(peaks.size)
    n = y.size
    for m, p in enumerate(peaks):
        h = y[p]
        higher_left = np.flatnonzero(y[:p] > h)
        lo = higher_left[-1] + 1 if higher_left.size else 0
        higher_right = np.flatnonzero(y[p + 1:] > h)
        hi = p + 1 + higher_right[0] if higher_right.size else n
        left_min = y[lo:p + 1].min()
        right_min = y[p:hi].min()
        prom[m] = h - max(left_min, right_min)
    return prom


def feature_points(y):
    y = np.asarray(y, dtype=np.float64)
    if y.size < 3:
        return np.empty(0, np.int64), np.empty(0, np.int8), np.empty(0)
    mid = y[1:-1]
    is_max = (mid > y[:-2]) & (mid > y[2:])
    is_min = (mid < y[:-2]) & (mid < y[2:])
    maxima = np.flatnonzero(is_max) + 1
    minima = np.flatnonzero(is_min) + 1
    idx = np.concatenate([maxima, minima])
    kind = np.concatenate([np.ones(maxima.size, np.int8), -np.ones(minima.size, np.int8)])
    prom = np.concatenate([_prominence(y, maxima), _prominence(-y, minima)])
    order = np.argsort(idx, kind="stable")
    return idx[order].astype(np.int64), kind[order], prom[order]


def _score(t, kind, amp, i, j, window, delta, eps):
    n = len(t)
    total = 0.0
    m = 0
    k = i
    while k < n and t[k] - t[i] <= window:
        m += 1
        off = t[k] - t[i]
        best = 0.0
        ll = j
        while ll < n and t[ll] - t[j] <= window:
            if kind[ll] == kind[k] and abs((t[ll] - t[j]) - off) <= delta:
                sim = 1.0 - abs(amp[k] - amp[ll]) / (abs(amp[k]) + abs(amp[ll]) + eps)
                if sim > best:
                    best = sim
            ll += 1
        total += best
        k += 1
    return total / m


def topology_scan(t, kind, amp, tau_min, tau_max, window, delta, threshold, eps):
    t = [float(v) for v in t]
    kind = [int(v) for v in kind]
    amp = [float(v) for v in amp]
    n = len(t)
    out_idx = []
    out_lag = []
    last = -np.inf
    for i in range(n):
        best_score = -1.0
        best_j = -1
        for j in range(i + 1, n):
            tau = t[j] - t[i]
            if tau > tau_max:
                break
            if tau < tau_min or kind[j] != kind[i]:
                continue
            s = _score(t, kind, amp, i, j, window, delta, eps)
            if s > best_score + 1e-12:
                best_score = s
                best_j = j
        if best_j >= 0 and best_score >= threshold and t[best_j] > last:
            out_idx.append(best_j)
            out_lag.append(t[best_j] - t[i])
            last = t[best_j]
    return np.asarray(out_idx, dtype=np.int64), np.asarray(out_lag, dtype=np.float64)
