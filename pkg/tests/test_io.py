import json

import numpy as np
import pytest

from radar_ibi import io
from radar_ibi.errors import InvalidInputError
from radar_ibi.ibi import IbiSeries
from radar_ibi.signal_core import ComplexSeries, PowerSpectrum, RealSeries


def test_signal_csv_round_trip(tmp_path, dt):
    s = ComplexSeries(np.exp(1j * np.linspace(0, 3, 500)), dt, t0=1.0)
    p = tmp_path / "s.csv"
    io.write_signal_csv(s, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "time_s,re,im"
    assert lines[1] == "1.000000,1.000000,0.000000"
    back = io.read_signal_csv(p)
    assert back.dt == pytest.approx(dt, abs=1e-9)
    assert back.t0 == 1.0
    np.testing.assert_allclose(back.samples, s.samples, atol=1e-6)


def test_ibi_and_rpeak_round_trip(tmp_path):
    ibi = IbiSeries([0.8, 1.65], [800.0, 850.123456])
    io.write_ibi_csv(ibi, tmp_path / "i.csv")
    assert (tmp_path / "i.csv").read_text() == "time_s,ibi_ms\n0.800000,800.000000\n1.650000,850.123456\n"
    back = io.read_ibi_csv(tmp_path / "i.csv")
    np.testing.assert_array_equal(back.intervals, ibi.intervals)
    io.write_rpeaks_csv([0.0, 0.8], tmp_path / "r.csv")
    np.testing.assert_array_equal(io.read_rpeaks_csv(tmp_path / "r.csv"), [0.0, 0.8])


def test_empty_ibi_csv(tmp_path):
    io.write_ibi_csv(IbiSeries.empty(), tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_text() == "time_s,ibi_ms\n"
    assert len(io.read_ibi_csv(tmp_path / "e.csv")) == 0


def test_psd_and_real_csv(tmp_path):
    io.write_psd_csv(PowerSpectrum(np.array([0.0, 0.5]), np.array([1.0, 2.0])), tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text() == "freq_hz,power\n0.000000,1.000000\n0.500000,2.000000\n"
    io.write_real_csv(RealSeries([3.0], 0.1), tmp_path / "v.csv", "value")
    assert (tmp_path / "v.csv").read_text().startswith("time_s,value\n")


def test_bad_header_and_values(tmp_path):
    (tmp_path / "a.csv").write_text("t,ibi\n1,2\n")
    with pytest.raises(InvalidInputError):
        io.read_ibi_csv(tmp_path / "a.csv")
    (tmp_path / "b.csv").write_text("time_s,ibi_ms\n1,abc\n")
    with pytest.raises(InvalidInputError):
        io.read_ibi_csv(tmp_path / "b.csv")


def test_json_is_canonical(tmp_path):
    io.write_json({"b": 1, "a": [1.5]}, tmp_path / "x.json")
    text = (tmp_path / "x.json").read_text()
    assert text == '{\n  "a": [\n    1.5\n  ],\n  "b": 1\n}\n'
    assert io.read_json(tmp_path / "x.json") == {"a": [1.5], "b": 1}
    with pytest.raises(ValueError):
        io.dumps_json({"x": float("nan")})
    (tmp_path / "l.json").write_text(json.dumps([1]))
    with pytest.raises(InvalidInputError):
        io.read_json(tmp_path / "l.json")


def test_atomic_write_leaves_no_temp_files(tmp_path):
    io.atomic_write_text(tmp_path / "sub" / "f.txt", "hello")
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["f.txt"]
