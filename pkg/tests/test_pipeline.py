import warnings

import numpy as np
import pytest

from radar_ibi.errors import InvalidInputError, LengthError
from radar_ibi.evaluation import evaluate
from radar_ibi.pipeline import ALL_METHODS, MethodId, RunConfig, run_ensemble, run_method
from radar_ibi.signal_core import ComplexSeries, periodogram
from radar_ibi.synth import SynthConfig, generate_record


def heart_only(seed=7, duration=60.0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return generate_record(SynthConfig(duration=duration, resp_amp=0.0, snr_db=None, seed=seed))


@pytest.fixture(scope="module")
def clean():
    return heart_only()


def test_method_matrix():
    assert [m.value for m in MethodId] == ["conv1", "conv2", "conv3", "prop1", "prop2", "prop3"]
    assert [m.vme_modes for m in MethodId] == [0, 1, 2, 0, 1, 2]
    assert [m.uses_phase for m in MethodId] == [True] * 3 + [False] * 3


def test_parse_unknown_method():
    with pytest.raises(InvalidInputError, match="prop3"):
        MethodId.parse("prop4")


def test_resolved_alpha():
    assert RunConfig(method=MethodId.CONV2).resolved_alpha() == 1e5
    assert RunConfig(method=MethodId.PROP2).resolved_alpha() == 3e4
    assert RunConfig(method=MethodId.PROP2, alpha=5.0).resolved_alpha() == 5.0


@pytest.mark.parametrize("method", list(MethodId))
def test_stage_trace(clean, method):
    run = run_method(clean.signal, RunConfig(method=method))
    stages = run.diagnostics["stages"]
    assert stages[0] == ("input:phase" if method.uses_phase else "input:abs_d2")
    assert stages[1:-2] == [f"vme:mode{i + 1}" for i in range(method.vme_modes)]
    assert stages[-2:] == ["ibi:topology", "ibi:reject_outliers"]
    if method.vme_modes:
        d = run.diagnostics
        assert len(d["modes"]) == method.vme_modes
        assert d["alpha"] == (1e5 if method.uses_phase else 3e4)
        assert 2.0 <= d["f_desired"] <= 3.4 or d["fd_fallback"]
        assert d["modes"][-1]["f_init"] == pytest.approx(d["f_desired"] * (1.5 if method.vme_modes == 2 else 1))
    # boundary samples of the derivative are trimmed for every method
    assert len(run.pre_ibi) == len(clean.signal) - 4


def test_prop1_on_clean_heartbeat(clean):
    run = run_method(clean.signal, RunConfig(method=MethodId.PROP1))
    med = np.median(clean.true_ibi.intervals)
    assert len(run.ibi) > 50
    assert np.all(np.abs(run.ibi.intervals - med) <= 15 + 3 * 40)  # beat-to-beat SD is 40 ms
    assert abs(np.median(run.ibi.intervals) - med) <= 15


def test_prop3_adds_third_harmonic_mode(clean):
    p2 = run_method(clean.signal, RunConfig(method=MethodId.PROP2))
    p3 = run_method(clean.signal, RunConfig(method=MethodId.PROP3))
    f_d = p3.diagnostics["f_desired"]

    def band_fraction(series, centre):
        p = periodogram(series)
        band = np.abs(p.freqs - centre) <= 0.15
        return p.power[band].sum() / p.power.sum()

    with3 = band_fraction(p3.pre_ibi, 1.5 * f_d)
    without = band_fraction(p2.pre_ibi, 1.5 * f_d)
    assert with3 > 0.02 and without < 0.002
    assert with3 > 20 * without


def test_too_short_signal():
    with pytest.raises(LengthError):
        run_method(ComplexSeries(np.ones(100), 6.87e-3))


def test_run_is_deterministic(clean):
    a = run_method(clean.signal, RunConfig(method=MethodId.PROP3))
    b = run_method(clean.signal, RunConfig(method=MethodId.PROP3))
    np.testing.assert_array_equal(a.ibi.intervals, b.ibi.intervals)
    assert a.diagnostics == b.diagnostics


def test_reject_toggle(clean):
    raw = run_method(clean.signal, RunConfig(method=MethodId.PROP1, reject=False))
    assert "ibi:reject_outliers" not in raw.diagnostics["stages"]
    assert raw.diagnostics["n_ibi"] == raw.diagnostics["n_ibi_raw"]


@pytest.fixture(scope="module")
def small_ensemble():
    recs = [generate_record(SynthConfig(duration=30, seed=s)) for s in range(3)]
    return recs, run_ensemble(recs, [MethodId.CONV1, MethodId.PROP1])


def test_ensemble_means_match_reports(small_ensemble):
    recs, summary = small_ensemble
    for m in ("conv1", "prop1"):
        reps = summary.reports[m]
        assert len(reps) == 3
        assert summary.tcr_percent[m] == pytest.approx(np.mean([r.tcr_percent for r in reps]))
        assert summary.cc[m] == pytest.approx(np.mean([0.0 if np.isnan(r.cc) else r.cc for r in reps]))
    # per-record reports agree with a direct evaluation
    run = run_method(recs[0].signal, RunConfig(method=MethodId.PROP1))
    direct = evaluate(run.ibi, recs[0].true_ibi, duration=30)
    assert summary.reports["prop1"][0] == direct


def test_prop1_cc_not_below_conv1(small_ensemble):
    _, summary = small_ensemble
    assert summary.cc["prop1"] >= summary.cc["conv1"]


def test_ensemble_parallel_matches_serial(small_ensemble):
    recs, serial = small_ensemble
    parallel = run_ensemble(recs, [MethodId.CONV1, MethodId.PROP1], workers=2)
    assert parallel.to_dict() == serial.to_dict()


def test_all_methods_constant():
    assert ALL_METHODS == tuple(MethodId)
