"""CSV and JSON file formats. Numeric CSV columns use 6-decimal fixed notation."""
from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .ibi import IbiSeries
from .signal_core import ComplexSeries, PowerSpectrum, RealSeries

SIGNAL_HEADER = ("time_s", "re", "im")
IBI_HEADER = ("time_s", "ibi_ms")
RPEAK_HEADER = ("rpeak_s",)
PSD_HEADER = ("freq_hz", "power")


def atomic_write_text(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _format_rows(header, columns) -> str:
    lines = [",".join(header)]
    if columns and len(columns[0]):
        stacked = np.column_stack(columns)
        lines.extend(",".join(f"{v:.6f}" for v in row) for row in stacked)
    return "\n".join(lines) + "\n"


def _read_columns(path, header) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(c.strip() for c in rows[0]) != tuple(header):
        raise InvalidInputError(f"{path}: expected header {','.join(header)}")
    body = [r for r in rows[1:] if r]
    try:
        data = np.array([[float(c) for c in r] for r in body], dtype=np.float64)
    except ValueError as exc:
        raise InvalidInputError(f"{path}: non-numeric value ({exc})") from None
    if data.size == 0:
        return np.empty((0, len(header)))
    if data.shape[1] != len(header):
        raise InvalidInputError(f"{path}: expected {len(header)} columns")
    return data


def write_signal_csv(signal: ComplexSeries, path) -> None:
    s = signal.samples
    atomic_write_text(path, _format_rows(SIGNAL_HEADER, [signal.times, s.real, s.imag]))


def read_signal_csv(path) -> ComplexSeries:
    data = _read_columns(path, SIGNAL_HEADER)
    if data.shape[0] < 2:
        raise InvalidInputError(f"{path}: need at least 2 samples")
    t = data[:, 0]
    dt = (t[-1] - t[0]) / (t.size - 1)
    # times are rounded to 6 decimals on disk; recover the nominal interval
    dt = round(dt, 9)
    return ComplexSeries(data[:, 1] + 1j * data[:, 2], dt, float(t[0]))


def write_ibi_csv(series: IbiSeries, path) -> None:
    atomic_write_text(path, _format_rows(IBI_HEADER, [series.times, series.intervals]))


def read_ibi_csv(path) -> IbiSeries:
    data = _read_columns(path, IBI_HEADER)
    return IbiSeries(data[:, 0], data[:, 1])


def write_rpeaks_csv(rpeaks, path) -> None:
    atomic_write_text(path, _format_rows(RPEAK_HEADER, [np.asarray(rpeaks, dtype=float)]))


def read_rpeaks_csv(path) -> np.ndarray:
    return _read_columns(path, RPEAK_HEADER)[:, 0]


def write_psd_csv(spectrum: PowerSpectrum, path) -> None:
    atomic_write_text(path, _format_rows(PSD_HEADER, [spectrum.freqs, spectrum.power]))


def write_real_csv(series: RealSeries, path, value_name: str = "value") -> None:
    atomic_write_text(path, _format_rows(("time_s", value_name), [series.times, series.samples]))


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(obj, path) -> None:
    atomic_write_text(path, dumps_json(obj))


def read_json(path) -> dict:
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise InvalidInputError(f"{path}: expected a JSON object")
    return obj
