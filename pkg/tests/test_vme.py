import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from radar_ibi.errors import BandCoverageError, GridMismatchError, InvalidInputError, LengthError
from radar_ibi.signal_core import PowerSpectrum, RealSeries, periodogram
from radar_ibi.vme import (
    EPS,
    VmeConfig,
    harmonic_enhance,
    mode_update,
    select_desired_frequency,
    vme_extract,
    vme_objective,
)


def objective_oracle(u, f, w, wc, alpha):
    total = 0.0
    for uk, fk, wk in zip(u, f, w):
        d = wk - wc
        total += alpha * d * d * abs(uk) ** 2 + abs(fk - uk) ** 2 / (alpha ** 2 * d ** 4 + 1e-12)
    return total


def vertex_minimiser(f, w, wc, alpha):
    """Per-bin minimiser found numerically: fit a parabola to three
    evaluations of each real coordinate's quadratic and take its vertex."""
    d2 = (w - wc) ** 2
    a = alpha * d2
    b = alpha ** 2 * d2 ** 2 + 1e-12

    def vertex(fc):
        q = lambda x: a * x * x + (fc - x) ** 2 / b
        q1, q0, qm = q(1.0), q(0.0), q(-1.0)
        return -(q1 - qm) / (2 * (q1 - 2 * q0 + qm))

    return vertex(f.real) + 1j * vertex(f.imag)


def tones(dt, freqs, seconds=60.0, amps=None):
    t = np.arange(int(round(seconds / dt))) * dt
    amps = amps or [1.0] * len(freqs)
    x = sum(a * np.sin(2 * np.pi * f * t) for a, f in zip(amps, freqs))
    return RealSeries(x - x.mean(), dt)


def bin_ratio(out, ref, f0):
    dt = ref.dt
    fr = np.fft.rfftfreq(len(ref), dt)
    k = np.argmin(np.abs(fr - f0))
    return abs(np.fft.rfft(out.samples)[k]) ** 2 / abs(np.fft.rfft(ref.samples)[k]) ** 2


# objective

def test_objective_identity_mode():
    r = np.random.default_rng(0)
    f = r.standard_normal(16) + 1j * r.standard_normal(16)
    w = np.linspace(0, np.pi, 16)
    expect = np.sum(7.0 * (w - 0.4) ** 2 * np.abs(f) ** 2)
    assert vme_objective(f, f, w, 0.4, 7.0) == pytest.approx(expect, rel=1e-13)


def test_objective_zero_mode():
    r = np.random.default_rng(1)
    f = r.standard_normal(16) + 1j * r.standard_normal(16)
    w = np.linspace(0, np.pi, 16)
    expect = np.sum(np.abs(f) ** 2 / (49.0 * (w - 0.4) ** 4 + EPS))
    assert vme_objective(np.zeros(16), f, w, 0.4, 7.0) == pytest.approx(expect, rel=1e-13)


def test_objective_brute_force(rng):
    for _ in range(20):
        u = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        f = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        w = np.sort(rng.uniform(0, np.pi, 16))
        wc, alpha = rng.uniform(0, np.pi), 10 ** rng.uniform(0, 5)
        got = vme_objective(u, f, w, wc, alpha)
        assert got == pytest.approx(objective_oracle(u, f, w, wc, alpha), rel=1e-12)


def test_objective_grid_mismatch():
    with pytest.raises(GridMismatchError):
        vme_objective(np.zeros(4), np.zeros(5), np.zeros(4), 0.1, 1.0)


def test_mode_update_matches_numeric_minimiser(rng):
    f = rng.standard_normal(200) + 1j * rng.standard_normal(200)
    w = np.linspace(0, np.pi, 200)
    for alpha in (1.0, 3e4, 1e5):
        np.testing.assert_allclose(mode_update(f, w, 0.3, alpha), vertex_minimiser(f, w, 0.3, alpha),
                                   rtol=1e-9, atol=1e-12)


def test_mode_update_at_center_passes_input():
    f = np.array([1 + 2j, 3 - 1j])
    w = np.array([0.5, 0.5])
    np.testing.assert_allclose(mode_update(f, w, 0.5, 1e5), f)


# extraction

def test_pure_tone_fixed_point(dt):
    x = tones(dt, [2.5])
    noise = 1e-2 * np.random.default_rng(3).standard_normal(len(x))
    y = RealSeries(x.samples + noise - noise.mean(), dt)
    r = vme_extract(y, VmeConfig(alpha=3e4, f_init=2.5))
    assert bin_ratio(r.mode, x, 2.5) >= 0.99 * 0.95  # rad/sample bandwidth of alpha=3e4
    grid_bin = 1.0 / (r.omega.size * 2 * dt)
    assert abs(r.f_final - 2.5) <= 2 * grid_bin


def test_two_tone_separation(dt):
    x = tones(dt, [1.0, 2.4])
    r = vme_extract(x, VmeConfig(alpha=3e4, f_init=2.4))
    assert bin_ratio(r.mode, x, 2.4) >= 0.90
    assert bin_ratio(r.mode, x, 1.0) <= 0.05
    # oracle: the closed-form filter at the converged centre, applied directly
    direct = mode_update(r.input_spectrum, r.omega, r.omega_final, 3e4)
    np.testing.assert_allclose(r.mode_spectrum, direct, rtol=1e-12, atol=1e-12)


def test_fixed_center_is_one_shot(dt, rng):
    x = rng.standard_normal(500)
    y = RealSeries(x - x.mean(), dt)
    r = vme_extract(y, VmeConfig(alpha=3e4, f_init=2.0, update_center=False))
    assert r.iterations == 1 and r.converged
    assert r.f_final == pytest.approx(2.0)
    half = len(y) // 2
    ext = np.concatenate([y.samples[:half][::-1], y.samples, y.samples[len(y) - half:][::-1]])
    F = np.fft.rfft(ext)
    w = 2 * np.pi * np.arange(F.size) / ext.size
    u = vertex_minimiser(F, w, 2 * np.pi * 2.0 * dt, 3e4)
    expect = np.fft.irfft(u, ext.size)[half:half + len(y)]
    np.testing.assert_allclose(r.mode.samples, expect, atol=1e-9)


def test_mode_plus_residual_reconstructs(dt, rng):
    x = rng.standard_normal(300)
    y = RealSeries(x - x.mean(), dt)
    r = vme_extract(y, VmeConfig(alpha=1e4, f_init=3.0))
    np.testing.assert_allclose(r.mode.samples + r.residual.samples, y.samples, atol=1e-12)


def test_nonconvergence_is_flagged(dt):
    x = tones(dt, [1.0, 2.4])
    r = vme_extract(x, VmeConfig(alpha=3e4, f_init=2.3, max_iters=1))
    assert r.iterations == 1
    assert not r.converged


def test_config_validation(dt):
    y = RealSeries(np.zeros(100), dt)
    with pytest.raises(InvalidInputError):
        vme_extract(y, VmeConfig(alpha=-1))
    with pytest.raises(InvalidInputError):
        vme_extract(y, VmeConfig(f_init=1000.0))
    with pytest.raises(LengthError):
        vme_extract(RealSeries(np.zeros(63), dt))


@given(st.integers(0, 2**31 - 1), st.floats(2.0, 3.4), st.floats(1e2, 1e5))
def test_objective_trace_non_increasing(seed, f_init, alpha):
    x = np.random.default_rng(seed).standard_normal(256)
    r = vme_extract(RealSeries(x - x.mean(), 6.87e-3), VmeConfig(alpha=alpha, f_init=f_init))
    assert np.all(np.diff(r.objective_trace) <= 1e-12 * abs(r.objective_trace[0]))
    lo, hi = 0.5 * f_init, 1.5 * f_init
    assert lo - 1e-9 <= r.f_final <= hi + 1e-9


@given(st.integers(0, 2**31 - 1), st.floats(-100, 100).filter(lambda a: abs(a) > 1e-6))
def test_linearity_for_fixed_center(seed, a):
    x = np.random.default_rng(seed).standard_normal(128)
    x -= x.mean()
    cfg = VmeConfig(alpha=3e4, f_init=2.7, update_center=False)
    m1 = vme_extract(RealSeries(x, 6.87e-3), cfg).mode.samples
    m2 = vme_extract(RealSeries(a * x, 6.87e-3), cfg).mode.samples
    np.testing.assert_allclose(m2, a * m1, rtol=1e-9, atol=1e-12 * abs(a) * np.abs(x).max())


# f_d selection

def spectrum(fr, p):
    return PowerSpectrum(np.asarray(fr, float), np.asarray(p, float))


def test_fd_single_peak():
    fr = np.arange(0, 10, 0.01)
    p = np.exp(-((fr - 2.4) ** 2) / 0.01)
    assert select_desired_frequency(spectrum(fr, p)) == (pytest.approx(2.4), False)


def test_fd_monotone_uses_fallback():
    fr = np.arange(0, 10, 0.01)
    f_d, fallback = select_desired_frequency(spectrum(fr, np.exp(-fr)))
    assert f_d == 2.7 and fallback


def test_fd_two_peaks_takes_larger():
    fr = np.arange(0, 10, 0.01)
    p = 0.6 * np.exp(-((fr - 2.2) ** 2) / 0.01) + np.exp(-((fr - 3.0) ** 2) / 0.01)
    assert select_desired_frequency(spectrum(fr, p))[0] == pytest.approx(3.0)


def test_fd_ignores_out_of_band_and_edge_maxima():
    fr = np.arange(0, 10, 0.01)
    p = 5 * np.exp(-((fr - 1.5) ** 2) / 0.01) + np.where(fr <= 3.4, fr, 0)  # rises to the band edge
    assert select_desired_frequency(spectrum(fr, p)) == (2.7, True)


def test_fd_band_coverage():
    with pytest.raises(BandCoverageError):
        select_desired_frequency(spectrum(np.arange(0, 3, 0.01), np.ones(300)))


# harmonic enhancement

def test_harmonic_two_modes_concentrate(dt):
    x = tones(dt, [2.4, 3.6, 0.3], amps=[1.0, 0.7, 3.0])
    h = harmonic_enhance(x, 3e4, 2)
    assert h.f_desired == pytest.approx(2.4, abs=0.01)
    p = periodogram(h.signal)
    band = (np.abs(p.freqs - 2.4) < 0.15) | (np.abs(p.freqs - 3.6) < 0.15)
    assert p.power[band].sum() >= 0.9 * p.power.sum()


def test_harmonic_single_tone(dt):
    t = np.arange(int(round(60 / dt))) * dt
    x = np.cos(2 * np.pi * 2.4 * t)
    h = harmonic_enhance(RealSeries(x - x.mean(), dt), 3e4, 1)
    assert np.corrcoef(h.signal.samples, x)[0, 1] >= 0.99


def test_harmonic_single_sine_interior(dt):
    # a sine meets its mirror image with a slope kink; only the edges suffer
    x = tones(dt, [2.4])
    y = harmonic_enhance(x, 3e4, 1).signal.samples
    inner = slice(300, -300)
    assert np.corrcoef(y[inner], x.samples[inner])[0, 1] >= 0.99


def test_harmonic_fallback_on_monotone_spectrum(dt):
    # zero-mean Gaussian doublet: its spectrum peaks near 1 Hz and falls
    # monotonically through the band
    t = (np.arange(4001) - 2000) * dt
    x = RealSeries(t * np.exp(-t ** 2 / (2 * 0.15 ** 2)), dt)
    h = harmonic_enhance(x, 3e4, 1)
    assert h.used_fallback and h.f_desired == 2.7
    assert h.modes[0].f_init == 2.7


def test_harmonic_rejects_bad_mode_count(dt):
    with pytest.raises(InvalidInputError):
        harmonic_enhance(tones(dt, [2.4], seconds=5), 3e4, 3)
