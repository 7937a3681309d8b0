"""Interbeat-interval estimation by topological matching of feature points.

Feature points are the prominent local extrema of the enhanced waveform.
For every anchor feature, the estimator compares the local feature pattern
after it with the pattern after each later same-kind feature within the
physiological lag range, and keeps the best-matching lag as one IBI.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .signal_core import RealSeries

if os.environ.get("RADAR_IBI_PURE_PYTHON"):
    from . import _kernels_py as _k
    BACKEND = "python"
else:
    try:
        from . import _kernels as _k
        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as _k
        BACKEND = "python"

LOCAL_MAX = "local_max"
LOCAL_MIN = "local_min"


@dataclass(frozen=True)
class FeaturePoint:
    time: float
    kind: str
    amplitude: float
    prominence: float


@dataclass(frozen=True)
class IbiSeries:
    """Timestamped interbeat intervals; ``times`` in s, ``intervals`` in ms."""

    times: np.ndarray
    intervals: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=np.float64).reshape(-1)
        h = np.array(self.intervals, dtype=np.float64).reshape(-1)
        if t.shape != h.shape:
            raise InvalidInputError("times and intervals differ in length")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(h))):
            raise InvalidInputError("IBI entries must be finite")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise InvalidInputError("IBI times must be strictly increasing")
        t.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "intervals", h)

    def __len__(self):
        return self.times.size

    @classmethod
    def empty(cls) -> "IbiSeries":
        return cls(np.empty(0), np.empty(0))


@dataclass(frozen=True)
class TopologyParams:
    tau_min: float = 0.4
    tau_max: float = 1.4
    window: float = 0.3
    delta: float = 0.05
    threshold: float = 0.5
    p_min: float = 0.05


def _features(y: RealSeries, p_min: float):
    idx, kind, prom = _k.feature_points(y.samples)
    if idx.size:
        keep = prom >= p_min * prom.max()
        idx, kind, prom = idx[keep], kind[keep], prom[keep]
    return idx, kind, prom


def extract_features(y: RealSeries, p_min: float = 0.05) -> list[FeaturePoint]:
    """Strict local extrema whose prominence is at least ``p_min`` of the largest."""
    idx, kind, prom = _features(y, p_min)
    t = y.times
    return [
        FeaturePoint(float(t[i]), LOCAL_MAX if k > 0 else LOCAL_MIN, float(y.samples[i]), float(p))
        for i, k, p in zip(idx, kind, prom)
    ]


def topology_ibi(y: RealSeries, params: TopologyParams = TopologyParams()) -> IbiSeries:
    """Estimate IBIs from a harmonic-enhanced waveform.

    Each anchor feature ``i`` is paired with later same-kind features ``j``
    whose lag lies in ``[tau_min, tau_max]``. The pairing score averages,
    over the features within ``window`` after the anchor, the amplitude
    similarity of the best same-kind feature at the same offset (within
    ``delta``) after ``j``. The best lag scoring at least ``threshold`` is
    emitted at time ``t_j``; later anchors only emit at later times.
    """
    idx, kind, _ = _features(y, params.p_min)
    if idx.size < 2:
        return IbiSeries.empty()
    rel_t = idx * y.dt
    amp = y.samples[idx]
    eps = 1e-12 * float(np.max(np.abs(amp))) if amp.size else 0.0
    emit, lag = _k.topology_scan(
        rel_t, kind, amp,
        params.tau_min, params.tau_max, params.window, params.delta,
        params.threshold, eps,
    )
    return IbiSeries(y.t0 + rel_t[emit], 1000.0 * lag)


def reject_outliers(series: IbiSeries, rel_dev: float = 0.25, neighbours: int = 5) -> IbiSeries:
    """Drop entries deviating more than ``rel_dev`` from the median of the
    ``neighbours`` entries nearest in time (the entry itself included)."""
    n = len(series)
    if n == 0:
        return series
    t, h = series.times, series.intervals
    k = min(neighbours, n)
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        # stable sort breaks distance ties toward the earlier entry
        near = np.argsort(np.abs(t - t[i]), kind="stable")[:k]
        med = np.median(h[near])
        keep[i] = abs(h[i] - med) <= rel_dev * med
    return IbiSeries(t[keep], h[keep])
