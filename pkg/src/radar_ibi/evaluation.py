"""IBI accuracy metrics: correlation coefficient, RMSE and time coverage rate."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import GridMismatchError, InvalidInputError, UndefinedMetricError
from .ibi import IbiSeries
from .signal_core import RealSeries

GRID_RATE = 10.0
T0 = 0.5
TTH_MS = 50.0


@dataclass(frozen=True)
class MetricReport:
    cc: float
    cc_pearson: float
    rmse_ms: float
    tcr_percent: float
    n_segments: int
    n_covered: int

    def to_dict(self) -> dict:
        # NaN is not valid JSON; undefined metrics are emitted as null
        return {k: (None if isinstance(v, float) and math.isnan(v) else v)
                for k, v in asdict(self).items()}


def reference_ibi_from_rpeaks(rpeak_times) -> IbiSeries:
    """Intervals between successive R-peaks, stamped at the later peak."""
    r = np.asarray(rpeak_times, dtype=np.float64).reshape(-1)
    if r.size < 2:
        raise InvalidInputError(f"need at least 2 R-peaks, got {r.size}")
    if np.any(np.diff(r) <= 0):
        raise InvalidInputError("R-peak times must be strictly increasing")
    return IbiSeries(r[1:], 1000.0 * np.diff(r))


def resample_ibi(series: IbiSeries, grid_rate: float = GRID_RATE, span=None) -> RealSeries:
    """Piecewise-linear interpolation of an IBI series onto a uniform grid."""
    if len(series) == 0:
        raise InvalidInputError("cannot resample an empty IBI series")
    t, h = series.times, series.intervals
    ta, tb = (t[0], t[-1]) if span is None else span
    if ta < t[0] - 1e-12 or tb > t[-1] + 1e-12 or tb < ta:
        raise InvalidInputError(f"span [{ta}, {tb}] outside entries [{t[0]}, {t[-1]}]")
    n = int(math.floor((tb - ta) * grid_rate + 1e-9)) + 1
    grid = ta + np.arange(n) / grid_rate
    return RealSeries(np.interp(grid, t, h), 1.0 / grid_rate, float(ta))


def _pair(h: RealSeries, h0: RealSeries):
    a, b = np.asarray(h.samples), np.asarray(h0.samples)
    if a.shape != b.shape or not math.isclose(h.dt, h0.dt) or not math.isclose(h.t0, h0.t0, abs_tol=1e-9):
        raise GridMismatchError("series are not on the same grid")
    return a, b


def correlation_coefficient(h: RealSeries, h0: RealSeries) -> float:
    """Uncentred correlation ``<h0, h> / (|h0| |h|)``; no mean subtraction."""
    a, b = _pair(h, h0)
    na, nb = np.sqrt(np.sum(a * a)), np.sqrt(np.sum(b * b))
    if na == 0 or nb == 0:
        raise UndefinedMetricError("correlation undefined for an all-zero series")
    return float(np.sum(a * b) / (na * nb))


def pearson_correlation(h: RealSeries, h0: RealSeries) -> float:
    a, b = _pair(h, h0)
    a, b = a - a.mean(), b - b.mean()
    na, nb = np.sqrt(np.sum(a * a)), np.sqrt(np.sum(b * b))
    if na == 0 or nb == 0:
        raise UndefinedMetricError("Pearson correlation undefined for a constant series")
    return float(np.sum(a * b) / (na * nb))


def rmse(h: RealSeries, h0: RealSeries) -> float:
    a, b = _pair(h, h0)
    if a.size == 0:
        raise UndefinedMetricError("RMSE undefined for empty series")
    return float(np.sqrt(np.mean((a - b) ** 2)))


def tcr(estimated: IbiSeries, reference: IbiSeries, duration: float,
        t0: float = T0, tth_ms: float = TTH_MS) -> tuple[float, int, int]:
    """Time coverage rate.

    Segment ``[n*t0, (n+1)*t0)`` is covered when it holds an estimate within
    ``tth_ms`` of the linearly interpolated reference. Returns
    ``(percent, n_covered, n_segments)``.
    """
    if not t0 > 0:
        raise InvalidInputError("segment length must be positive")
    n_seg = int(math.floor(duration / t0 + 1e-9))
    if n_seg < 1:
        raise InvalidInputError(f"duration {duration} s shorter than one segment")
    if len(estimated) == 0:
        return 0.0, 0, n_seg
    t, h = estimated.times, estimated.intervals
    ref = np.interp(t, reference.times, reference.intervals)
    ok = np.abs(h - ref) <= tth_ms
    seg = np.floor(t[ok] / t0 + 1e-12).astype(np.int64)
    seg = seg[(seg >= 0) & (seg < n_seg)]
    covered = int(np.unique(seg).size)
    return 100.0 * covered / n_seg, covered, n_seg


def evaluate(estimated: IbiSeries, reference: IbiSeries, duration: float | None = None,
             grid_rate: float = GRID_RATE, t0: float = T0, tth_ms: float = TTH_MS) -> MetricReport:
    """All metrics over the overlap of the estimated and reference supports.

    ``duration`` (for TCR) defaults to the last reference timestamp.
    """
    if len(reference) == 0:
        raise InvalidInputError("empty reference series")
    if duration is None:
        duration = float(reference.times[-1])
    pct, covered, n_seg = tcr(estimated, reference, duration, t0, tth_ms)
    cc = cc_p = err = math.nan
    if len(estimated):
        ta = max(estimated.times[0], reference.times[0])
        tb = min(estimated.times[-1], reference.times[-1])
        if tb > ta:
            h = resample_ibi(estimated, grid_rate, (ta, tb))
            h0 = resample_ibi(reference, grid_rate, (ta, tb))
            cc = correlation_coefficient(h, h0)
            err = rmse(h, h0)
            try:
                cc_p = pearson_correlation(h, h0)
            except UndefinedMetricError:
                pass
    return MetricReport(cc, cc_p, err, pct, n_seg, covered)
