import math

import numpy as np
import pytest

from core.errors import ThdWindowError
from core.evaluate import accuracy
from core.evaluate import integer_cycle_window
from core.evaluate import record_thd
from core.evaluate import rms_tracking_error
from core.evaluate import settling_time
from core.evaluate import thd
from core.simulate import WaveformRecord
from core.simulate import reference_vector

TS = 1e-4  # 200 samples per 50 Hz cycle


def _signal(cycles=4, harmonics=(), phase=0.3):
    t = np.arange(int(round(cycles / (50.0 * TS)))) * TS
    x = np.cos(2 * np.pi * 50.0 * t + phase)
    for order, amp in harmonics:
        x = x + amp * np.sin(2 * np.pi * 50.0 * order * t + 0.1 * order)
    return x


def _record(v_c, v_ref, amplitude=100.0):
    n = len(v_c)
    return WaveformRecord("syn", "mpc", TS, 50.0, amplitude,
                          np.zeros((n, 2)), np.asarray(v_c), np.zeros((n, 2)),
                          np.asarray(v_ref), np.zeros(n, dtype=np.int64))


def test_pure_sine_has_no_distortion():
    report = thd(_signal(), TS, 50.0)
    assert report.thd <= 1e-9
    assert report.fundamental_amplitude == pytest.approx(1.0, abs=1e-12)
    assert report.orders[0] == 2 and report.orders[-1] == 50


@pytest.mark.parametrize("harmonics, expected", [
    (((3, 0.05),), 0.05),
    (((5, 0.03), (7, 0.04)), 0.05),
])
def test_known_harmonic_content(harmonics, expected):
    report = thd(_signal(harmonics=harmonics), TS, 50.0)
    assert report.thd == pytest.approx(expected, abs=1e-9)
    assert report.thd_percent == pytest.approx(100.0 * expected, abs=1e-7)


def test_thd_scale_and_window_invariance():
    harm = ((5, 0.03), (11, 0.01))
    base = thd(_signal(4, harm), TS, 50.0).thd
    assert thd(37.5 * _signal(4, harm), TS, 50.0).thd == pytest.approx(base, abs=1e-12)
    assert thd(_signal(2, harm), TS, 50.0).thd == pytest.approx(base, abs=1e-9)


def test_harmonic_power_bounded_by_signal_power(rng):
    x = _signal(4, ((2, 0.2), (9, 0.1))) + 0.05 * rng.normal(size=800)
    report = thd(x, TS, 50.0)
    harmonic_power = 0.5 * (report.fundamental_amplitude ** 2 + np.sum(report.amplitudes ** 2))
    assert harmonic_power <= np.mean(x ** 2) + 1e-9


def test_full_band_reaches_harmonics_above_the_cap():
    x = _signal(harmonics=((5, 0.03), (70, 0.04)))
    capped = thd(x, TS, 50.0)
    full = thd(x, TS, 50.0, max_harmonic=None)
    assert capped.thd == pytest.approx(0.03, abs=1e-9)
    assert full.thd == pytest.approx(0.05, abs=1e-9)
    # 800 samples over 4 cycles: harmonic 99 is the last below Nyquist
    assert full.orders[-1] == 99



def test_thd_window_errors():
    with pytest.raises(ThdWindowError, match="integer"):
        thd(_signal()[:-7], TS, 50.0)
    with pytest.raises(ThdWindowError, match=">= 2"):
        thd(_signal(1), TS, 50.0)
    with pytest.raises(ThdWindowError, match="Nyquist"):
        thd(_signal(2), TS, 50.0, max_harmonic=100)
    with pytest.raises(ThdWindowError, match="fundamental"):
        thd(np.zeros(800), TS, 50.0)


@pytest.mark.parametrize("ts, expected", [
    (30e-6, (1333, 4000, 50.0)),
    (25e-6, (1600, 3200, 50.0)),
])
def test_integer_cycle_window(ts, expected):
    start, samples, f1 = integer_cycle_window(ts, 50.0)
    assert (start, samples) == expected[:2]
    assert f1 == expected[2]


def test_integer_cycle_window_falls_back_to_adjusted_fundamental():
    start, samples, f1 = integer_cycle_window(33e-6, 50.0)
    assert samples == 2424
    assert f1 == pytest.approx(4.0 / (2424 * 33e-6))
    assert abs(f1 - 50.0) < 0.05


def test_record_thd_needs_enough_steps():
    t = np.arange(400) * TS
    ref = np.stack([reference_vector(100.0, 50.0, tk) for tk in t])
    with pytest.raises(ThdWindowError, match="window needs"):
        record_thd(_record(ref, ref))


def test_record_thd_on_clean_waveform():
    t = np.arange(2000) * TS
    ref = np.stack([reference_vector(100.0, 50.0, tk) for tk in t])
    report = record_thd(_record(ref, ref))
    assert report.thd <= 1e-9
    assert report.fundamental_amplitude == pytest.approx(100.0)


def test_settling_time_examples(rng):
    t = np.arange(1000) * TS
    ref = np.stack([reference_vector(100.0, 50.0, tk) for tk in t])
    assert settling_time(_record(ref, ref)) == 0.0

    v_c = ref.copy()
    v_c[:70] = rng.uniform(-300.0, 300.0, size=(70, 2))
    v_c[69] = ref[69] + 50.0
    assert settling_time(_record(v_c, ref)) == pytest.approx(7e-3, abs=TS)

    never = ref + 20.0
    assert math.isinf(settling_time(_record(never, ref)))
    # wider band accepts the same offset
    assert settling_time(_record(never, ref), tolerance_band=0.5) == 0.0


def test_rms_tracking_error():
    t = np.arange(1000) * TS
    ref = np.stack([reference_vector(100.0, 50.0, tk) for tk in t])
    v_c = ref.copy()
    v_c[:, 0] += 3.0
    assert rms_tracking_error(_record(v_c, ref), start_cycle=2) == pytest.approx(0.03)


def test_accuracy():
    out = np.eye(7)[[0, 3, 3, 6]]
    assert accuracy(out, [0, 3, 2, 6]) == 0.75
    assert math.isnan(accuracy(np.zeros((0, 7)), []))
