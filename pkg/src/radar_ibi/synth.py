"""Ground-truthed radar records for desk-scale testing.

Heartbeats are Gaussian pulses at the R-peak times; respiration is a
fundamental plus a 0.3-amplitude second harmonic. The echo is a unit
phasor modulated by the total displacement plus complex white noise.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import InvalidInputError, PhysiologicalRangeWarning
from .evaluation import reference_ibi_from_rpeaks
from .ibi import IbiSeries
from .radar_image import RadarCube
from .signal_core import ComplexSeries, RealSeries

SPEED_OF_LIGHT = 299_792_458.0
WAVELENGTH_MM = 3.797  # c / 79 GHz, rounded
DT = 6.87e-3

_RANGES = {
    "resp_freq": (0.1, 0.3),
    "resp_amp": (4.0, 12.0),
    "heart_amp": (0.2, 0.5),
}


@dataclass(frozen=True)
class SynthConfig:
    duration: float = 60.0
    dt: float = DT
    resp_freq: float = 0.2
    resp_amp: float = 8.0
    resp_skew: float = 0.0
    heart_mean_ibi: float = 850.0
    heart_ibi_sd: float = 40.0
    heart_amp: float = 0.35
    pulse_width: float = 0.06
    snr_db: float | None = 20.0  # None: noise-free
    wavelength: float = WAVELENGTH_MM
    seed: int = 0

    def __post_init__(self):
        if not self.dt > 0 or not self.duration > 0:
            raise InvalidInputError("dt and duration must be positive")
        if not self.wavelength > 0:
            raise InvalidInputError("wavelength must be positive")

    def range_violations(self) -> list[str]:
        out = []
        for name, (lo, hi) in _RANGES.items():
            v = getattr(self, name)
            if not lo <= v <= hi:
                out.append(f"{name}={v} outside typical range [{lo}, {hi}]")
        return out

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidInputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class SynthRecord:
    signal: ComplexSeries
    displacement_mm: RealSeries
    rpeaks_s: np.ndarray
    true_ibi: IbiSeries
    config: SynthConfig


def n_samples(duration: float, dt: float) -> int:
    return int(round(duration / dt))


def gen_rpeaks(mean_ibi: float, sd: float, duration: float, seed) -> np.ndarray:
    """R-peak times from t=0 with clipped-normal intervals (ms in, s out).

    Intervals are clipped to ``mean +/- 3 sd`` and floored at 350 ms.
    """
    if not 400 <= mean_ibi <= 1500:
        raise InvalidInputError(f"mean IBI {mean_ibi} ms outside [400, 1500]")
    if sd < 0:
        raise InvalidInputError("IBI standard deviation must be non-negative")
    rng = np.random.default_rng(seed)
    limit_ms = duration * 1000.0
    # generous upper bound on the beat count, then truncate
    count = int(math.ceil(limit_ms / max(350.0, mean_ibi - 3 * sd))) + 2
    ibis = rng.normal(mean_ibi, sd, count) if sd > 0 else np.full(count, float(mean_ibi))
    ibis = np.maximum(np.clip(ibis, mean_ibi - 3 * sd, mean_ibi + 3 * sd), 350.0)
    # accumulate in ms so integral intervals give exact times
    t_ms = np.concatenate([[0.0], np.cumsum(ibis)])
    return t_ms[t_ms <= limit_ms + 1e-9] / 1000.0


def heartbeat_displacement(rpeaks, amp_mm: float, pulse_width: float, dt: float,
                           duration: float) -> RealSeries:
    n = n_samples(duration, dt)
    t = np.arange(n) * dt
    d = np.zeros(n)
    reach = 8.0 * pulse_width
    for tk in np.asarray(rpeaks, dtype=float):
        lo = max(0, int(math.floor((tk - reach) / dt)))
        hi = min(n, int(math.ceil((tk + reach) / dt)) + 1)
        if lo >= hi:
            continue
        d[lo:hi] += amp_mm * np.exp(-((t[lo:hi] - tk) ** 2) / (2 * pulse_width ** 2))
    return RealSeries(d, dt)


def respiration_displacement(freq: float, amp_mm: float, dt: float, duration: float,
                             shape_skew: float = 0.0) -> RealSeries:
    t = np.arange(n_samples(duration, dt)) * dt
    w = 2 * np.pi * freq
    return RealSeries(amp_mm * (np.cos(w * t) + 0.3 * np.cos(2 * w * t + shape_skew)), dt)


def modulate(displacement_mm: RealSeries, wavelength_mm: float = WAVELENGTH_MM,
             snr_db: float | None = None, seed=0) -> ComplexSeries:
    """``exp(j 4 pi d / lambda)`` plus complex white noise of power ``10**(-snr/10)``."""
    s = np.exp(1j * 4 * np.pi * displacement_mm.samples / wavelength_mm)
    if snr_db is not None and math.isfinite(snr_db):
        rng = np.random.default_rng(seed)
        sigma = math.sqrt(10 ** (-snr_db / 10) / 2)
        s = s + sigma * (rng.standard_normal(s.size) + 1j * rng.standard_normal(s.size))
    return ComplexSeries(s, displacement_mm.dt, displacement_mm.t0)


def generate_record(cfg: SynthConfig) -> SynthRecord:
    """Build one record; deterministic in ``cfg`` including its seed."""
    for msg in cfg.range_violations():
        warnings.warn(msg, PhysiologicalRangeWarning, stacklevel=2)
    peak_seed, noise_seed = np.random.SeedSequence(cfg.seed).spawn(2)
    rpeaks = gen_rpeaks(cfg.heart_mean_ibi, cfg.heart_ibi_sd, cfg.duration, peak_seed)
    heart = heartbeat_displacement(rpeaks, cfg.heart_amp, cfg.pulse_width, cfg.dt, cfg.duration)
    resp = respiration_displacement(cfg.resp_freq, cfg.resp_amp, cfg.dt, cfg.duration, cfg.resp_skew)
    d = RealSeries(heart.samples + resp.samples, cfg.dt)
    signal = modulate(d, cfg.wavelength, cfg.snr_db, noise_seed)
    return SynthRecord(signal, d, rpeaks, reference_ibi_from_rpeaks(rpeaks), cfg)


def make_cube(record: SynthRecord, n_range: int = 16, n_angle: int = 9,
              target_cell: tuple[int, int] = (8, 4), clutter_level: float = 1.0,
              n_clutter: int = 4, noise_level: float = 1e-3, seed=0,
              range_start: float = 0.3, range_step: float = 0.05,
              quantize: bool = False) -> RadarCube:
    """Embed a record's signal in a range-angle-time cube.

    Constant complex clutter of magnitude ``clutter_level`` sits at
    ``n_clutter`` random cells (the target cell included when drawn), and
    every non-target cell carries complex noise of RMS ``noise_level``.
    ``quantize`` rounds samples to complex64 so the cube survives the
    float32 file format bit-exactly.
    """
    rng = np.random.default_rng(seed)
    n_frames = len(record.signal)
    r0, a0 = target_cell
    if not (0 <= r0 < n_range and 0 <= a0 < n_angle):
        raise InvalidInputError(f"target cell {target_cell} outside {n_range}x{n_angle} grid")
    data = noise_level / math.sqrt(2) * (
        rng.standard_normal((n_range, n_angle, n_frames))
        + 1j * rng.standard_normal((n_range, n_angle, n_frames))
    )
    data[r0, a0, :] = record.signal.samples
    cells = rng.choice(n_range * n_angle, size=min(n_clutter, n_range * n_angle), replace=False)
    phases = rng.uniform(-np.pi, np.pi, cells.size)
    for c, ph in zip(cells, phases):
        data[c // n_angle, c % n_angle, :] += clutter_level * np.exp(1j * ph)
    if quantize:
        data = data.astype(np.complex64).astype(np.complex128)
    range_axis = range_start + range_step * np.arange(n_range)
    angle_axis = np.linspace(-np.pi / 3, np.pi / 3, n_angle)
    return RadarCube(data, range_axis, angle_axis, record.signal.dt)
