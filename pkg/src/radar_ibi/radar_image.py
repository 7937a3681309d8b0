"""From a complex range-angle-time cube to the target's echo and displacement."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .enhance import held_phase
from .errors import GridLookupError, InvalidInputError, LengthError, NoTargetError
from .signal_core import ComplexSeries, RealSeries

RVC1_MAGIC = b"RVC1"
_HEADER = struct.Struct("<4sIIId")


def _ascending(axis, name):
    a = np.asarray(axis, dtype=np.float64).reshape(-1)
    if a.size > 1 and np.any(np.diff(a) <= 0):
        raise InvalidInputError(f"{name} axis must be strictly ascending")
    return a


@dataclass(frozen=True)
class RadarCube:
    """Complex samples indexed ``(range_bin, angle_bin, frame)``."""

    data: np.ndarray
    range_axis: np.ndarray
    angle_axis: np.ndarray
    dt: float

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.complex128)
        if d.ndim != 3:
            raise InvalidInputError("cube data must be 3-D (range, angle, frame)")
        r = _ascending(self.range_axis, "range")
        a = _ascending(self.angle_axis, "angle")
        if d.shape[:2] != (r.size, a.size):
            raise InvalidInputError(f"data shape {d.shape} does not match axes ({r.size}, {a.size})")
        if not self.dt > 0:
            raise InvalidInputError("frame interval must be positive")
        object.__setattr__(self, "data", d)
        object.__setattr__(self, "range_axis", r)
        object.__setattr__(self, "angle_axis", a)
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def n_frames(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class PowerImage:
    values: np.ndarray
    range_axis: np.ndarray
    angle_axis: np.ndarray


def remove_clutter(cube: RadarCube) -> RadarCube:
    """Subtract each cell's slow-time mean."""
    if cube.n_frames < 2:
        raise LengthError("clutter removal needs at least 2 frames")
    d = cube.data - cube.data.mean(axis=2, keepdims=True)
    return RadarCube(d, cube.range_axis, cube.angle_axis, cube.dt)


def average_power_image(cube: RadarCube) -> PowerImage:
    d = cube.data
    p = np.mean(d.real ** 2 + d.imag ** 2, axis=2)
    return PowerImage(p, cube.range_axis, cube.angle_axis)


def select_target(image: PowerImage) -> tuple[float, float]:
    """``(range, angle)`` of the strongest cell.

    Ties go to the smallest range, then the smallest angle (row-major
    argmax over ascending axes gives exactly that order).
    """
    v = image.values
    if v.size == 0:
        raise NoTargetError("empty power image")
    if not np.any(v > 0):
        raise NoTargetError("power image is identically zero")
    i, j = np.unravel_index(int(np.argmax(v)), v.shape)
    return float(image.range_axis[i]), float(image.angle_axis[j])


def _locate(axis: np.ndarray, value: float, name: str) -> int:
    hits = np.flatnonzero(np.isclose(axis, value, rtol=0.0, atol=1e-9))
    if hits.size != 1:
        raise GridLookupError(f"{name} {value} is not on the cube grid")
    return int(hits[0])


def extract_signal(cube: RadarCube, r0: float, theta0: float) -> ComplexSeries:
    i = _locate(cube.range_axis, r0, "range")
    j = _locate(cube.angle_axis, theta0, "angle")
    return ComplexSeries(cube.data[i, j, :].copy(), cube.dt)


def displacement(signal: ComplexSeries, wavelength: float) -> RealSeries:
    """``(lambda / 4 pi) * unwrap(angle(s))`` in mm, with ``wavelength`` in m.

    Zero-magnitude samples hold the previous phase and raise
    :class:`~radar_ibi.errors.PhaseUndefinedWarning`.
    """
    if not wavelength > 0:
        raise InvalidInputError("wavelength must be positive")
    psi = held_phase(signal)
    return RealSeries(psi.samples * (wavelength * 1e3 / (4 * np.pi)), signal.dt, signal.t0)


def write_rvc1(cube: RadarCube, path) -> None:
    """Write the RVC1 little-endian format; samples are stored as float32 pairs."""
    n_r, n_a, n_f = cube.data.shape
    frames = np.ascontiguousarray(np.transpose(cube.data, (2, 0, 1))).astype("<c8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(RVC1_MAGIC, n_r, n_a, n_f, cube.dt))
        fh.write(cube.range_axis.astype("<f8").tobytes())
        fh.write(cube.angle_axis.astype("<f8").tobytes())
        fh.write(frames.tobytes())


def read_rvc1(path) -> RadarCube:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise InvalidInputError("file too short for an RVC1 header")
    magic, n_r, n_a, n_f, dt = _HEADER.unpack_from(raw, 0)
    if magic != RVC1_MAGIC:
        raise InvalidInputError(f"bad magic {magic!r}, expected {RVC1_MAGIC!r}")
    off = _HEADER.size
    need = off + 8 * (n_r + n_a) + 8 * n_r * n_a * n_f
    if len(raw) != need:
        raise InvalidInputError(f"RVC1 payload is {len(raw)} bytes, expected {need}")
    r = np.frombuffer(raw, "<f8", n_r, off)
    off += 8 * n_r
    a = np.frombuffer(raw, "<f8", n_a, off)
    off += 8 * n_a
    frames = np.frombuffer(raw, "<c8", n_r * n_a * n_f, off).reshape(n_f, n_r, n_a)
    return RadarCube(np.transpose(frames, (1, 2, 0)).astype(np.complex128), r, a, dt)
