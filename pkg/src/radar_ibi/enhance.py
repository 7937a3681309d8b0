"""Heartbeat-enhanced signals built from derivatives of the complex echo."""
from __future__ import annotations

import warnings

import numpy as np

from .errors import LengthError, PhaseUndefinedWarning
from .signal_core import (
    ComplexSeries,
    RealSeries,
    kth_derivative,
    real_derivative,
    unwrap_phase,
)


def abs_kth_derivative(signal: ComplexSeries, k: int) -> RealSeries:
    """``|d^k s / dt^k|`` with the ``k`` boundary samples on each side flagged."""
    d = kth_derivative(signal, k)
    return RealSeries(np.abs(d.samples), signal.dt, signal.t0, edge=k)


def enhanced_heartbeat(signal: ComplexSeries) -> RealSeries:
    """Magnitude of the second derivative of the complex radar signal."""
    if len(signal) < 5:
        raise LengthError(f"need at least 5 samples, got {len(signal)}")
    return abs_kth_derivative(signal, 2)


def held_phase(signal: ComplexSeries) -> RealSeries:
    """Unwrapped phase, holding the previous value across zero-magnitude samples."""
    s = signal.samples
    zero = s == 0
    wrapped = np.angle(s)
    if zero.any():
        warnings.warn(
            f"{int(zero.sum())} zero-magnitude sample(s); phase held from previous sample",
            PhaseUndefinedWarning,
            stacklevel=3,
        )
        idx = np.where(zero, 0, np.arange(s.size))
        np.maximum.accumulate(idx, out=idx)
        wrapped = wrapped[idx]
        # leading zeros have no predecessor; they take phase 0
        wrapped[: np.argmax(~zero) if (~zero).any() else s.size] = 0.0
    return unwrap_phase(RealSeries(wrapped, signal.dt, signal.t0))


def variant_psi_prime_sq(signal: ComplexSeries) -> RealSeries:
    """``|s(t)| * psi'(t)**2``: the second-derivative magnitude with psi'' = 0."""
    psi = held_phase(signal)
    d1 = real_derivative(psi, 1).samples
    return RealSeries(np.abs(signal.samples) * d1 ** 2, signal.dt, signal.t0, edge=1)


def variant_psi_second(signal: ComplexSeries) -> RealSeries:
    """``|s(t) * psi''(t)|``: the second-derivative magnitude with psi' = 0."""
    psi = held_phase(signal)
    d2 = real_derivative(psi, 2).samples
    return RealSeries(np.abs(signal.samples * d2), signal.dt, signal.t0, edge=2)
