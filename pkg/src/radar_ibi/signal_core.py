"""Series containers, phase unwrapping, finite differences and periodograms."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, LengthError


def _check_dt(dt: float) -> float:
    dt = float(dt)
    if not np.isfinite(dt) or dt <= 0:
        raise InvalidInputError(f"sample interval must be positive, got {dt}")
    return dt


@dataclass(frozen=True)
class ComplexSeries:
    """Uniformly sampled complex series, e.g. the slow-time radar signal."""

    samples: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.complex128)
        if x.ndim != 1 or x.size < 1:
            raise InvalidInputError("samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("samples must be finite")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "dt", _check_dt(self.dt))

    def __len__(self):
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)


@dataclass(frozen=True)
class RealSeries:
    """Uniformly sampled real series.

    ``edge`` counts samples at each end that are flagged as unreliable
    (finite-difference boundary fill); :meth:`trimmed` drops them.
    """

    samples: np.ndarray
    dt: float
    t0: float = 0.0
    edge: int = field(default=0)

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.float64)
        if x.ndim != 1:
            raise InvalidInputError("samples must be a 1-D array")
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("samples must be finite")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "dt", _check_dt(self.dt))
        if self.edge < 0 or 2 * self.edge > x.size:
            raise InvalidInputError(f"edge={self.edge} invalid for length {x.size}")

    def __len__(self):
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)

    def trimmed(self) -> "RealSeries":
        """Drop the flagged boundary samples."""
        if self.edge == 0:
            return self
        e = self.edge
        return RealSeries(self.samples[e:-e], self.dt, self.t0 + e * self.dt)

    def demeaned(self) -> "RealSeries":
        return RealSeries(self.samples - self.samples.mean(), self.dt, self.t0, self.edge)


@dataclass(frozen=True)
class PowerSpectrum:
    freqs: np.ndarray
    power: np.ndarray

    @property
    def df(self) -> float:
        return float(self.freqs[1] - self.freqs[0]) if self.freqs.size > 1 else 0.0

    def peak_frequency(self, fmin: float = 0.0, fmax: float = np.inf) -> float:
        m = (self.freqs >= fmin) & (self.freqs <= fmax)
        return float(self.freqs[m][np.argmax(self.power[m])])


def unwrap_phase(wrapped: RealSeries) -> RealSeries:
    """Remove 2*pi jumps so successive differences lie in (-pi, pi].

    Each step is replaced by the congruent value nearest zero; a step of
    exactly -pi is mapped to +pi.
    """
    x = wrapped.samples
    if x.size < 2:
        return RealSeries(x.copy(), wrapped.dt, wrapped.t0, wrapped.edge)
    d = np.diff(x)
    step = np.mod(d + np.pi, 2 * np.pi) - np.pi
    step[step == -np.pi] = np.pi
    # integer wrap counts keep out exactly congruent to x (and equal when no wrap)
    wraps = np.round((step - d) / (2 * np.pi))
    out = np.empty_like(x)
    out[0] = x[0]
    out[1:] = x[1:] + 2 * np.pi * np.cumsum(wraps)
    return RealSeries(out, wrapped.dt, wrapped.t0, wrapped.edge)


# Interior central stencils and matching second-order one-sided boundary
# stencils, indexed by derivative order: (offsets, weights, divisor).
_CENTRAL = {
    1: (np.array([-1, 1]), np.array([-1.0, 1.0]), 2.0),
    2: (np.array([-1, 0, 1]), np.array([1.0, -2.0, 1.0]), 1.0),
    3: (np.array([-2, -1, 1, 2]), np.array([-1.0, 2.0, -2.0, 1.0]), 2.0),
}
_FORWARD = {
    1: (np.array([-3.0, 4.0, -1.0]), 2.0),
    2: (np.array([2.0, -5.0, 4.0, -1.0]), 1.0),
    3: (np.array([-5.0, 18.0, -24.0, 14.0, -3.0]), 2.0),
}


def _derivative(x: np.ndarray, k: int, dt: float) -> np.ndarray:
    n = x.size
    offs, w, div = _CENTRAL[k]
    half = int(offs.max())
    out = np.empty_like(x)
    acc = np.zeros(n - 2 * half, dtype=x.dtype)
    for o, c in zip(offs, w):
        acc += c * x[half + o: n - half + o]
    out[half: n - half] = acc
    fw, fdiv = _FORWARD[k]
    m = fw.size
    for i in range(half):
        out[i] = np.dot(fw, x[i: i + m]) / fdiv
        # backward stencil is the mirrored forward one with sign (-1)**k
        out[n - 1 - i] = (-1) ** k * np.dot(fw, x[n - 1 - i - np.arange(m)]) / fdiv
    out[half: n - half] /= div
    return out / dt ** k


def kth_derivative(series: ComplexSeries, k: int) -> ComplexSeries:
    """k-th time derivative (k = 1..3) by central differences.

    Boundary samples are filled by one-sided second-order stencils.
    """
    if k not in _CENTRAL:
        raise InvalidInputError(f"derivative order must be 1, 2 or 3, got {k}")
    if len(series) < 2 * k + 1:
        raise LengthError(f"need at least {2 * k + 1} samples for k={k}, got {len(series)}")
    return ComplexSeries(_derivative(series.samples, k, series.dt), series.dt, series.t0)


def real_derivative(series: RealSeries, k: int) -> RealSeries:
    """Same stencils as :func:`kth_derivative` for a real series."""
    if k not in _CENTRAL:
        raise InvalidInputError(f"derivative order must be 1, 2 or 3, got {k}")
    if len(series) < 2 * k + 1:
        raise LengthError(f"need at least {2 * k + 1} samples for k={k}, got {len(series)}")
    return RealSeries(_derivative(series.samples, k, series.dt), series.dt, series.t0)


def default_nfft(n: int) -> int:
    """Next power of two at or above ``4 * n``."""
    return 1 << int(np.ceil(np.log2(max(4 * n, 1))))


def periodogram(series, remove_mean: bool = True, nfft: int | None = None) -> PowerSpectrum:
    """Rectangular-window periodogram, ``|DFT|**2 * dt / N``.

    Real input returns bins ``0..nfft//2``; complex input returns all
    ``nfft`` bins on ascending frequencies ``k / (nfft * dt)``.
    """
    x = series.samples
    n = x.size
    nfft = default_nfft(n) if nfft is None else int(nfft)
    if nfft < n:
        raise InvalidInputError(f"nfft={nfft} shorter than series length {n}")
    if remove_mean:
        x = x - x.mean()
    if np.iscomplexobj(x):
        spec = np.fft.fft(x, nfft)
        freqs = np.arange(nfft) / (nfft * series.dt)
    else:
        spec = np.fft.rfft(x, nfft)
        freqs = np.fft.rfftfreq(nfft, series.dt)
    power = (spec.real ** 2 + spec.imag ** 2) * series.dt / n
    return PowerSpectrum(freqs, power)
