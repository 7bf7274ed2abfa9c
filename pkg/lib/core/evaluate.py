# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import rfft

from core.errors import ThdWindowError


logger = logging.getLogger(__name__)


@dataclass
class ThdReport:
    fundamental_hz: float
    fundamental_amplitude: float
    thd: float
    orders: np.ndarray
    amplitudes: np.ndarray

    @property
    def thd_percent(self):
        return 100.0 * self.thd


def thd(signal, period, fundamental, max_harmonic=50, cycle_tolerance=1e-6,
        min_amplitude=1e-6):
    '''
    Total harmonic distortion of a window holding an integer number of
    fundamental cycles. Harmonic h of an m-cycle window sits on rfft bin h*m,
    so no interpolation or windowing is needed.

    max_harmonic=None sums every harmonic below Nyquist.
    '''
    x = np.asarray(signal, dtype=np.float64).reshape(-1)
    n = x.size
    if not (period > 0 and fundamental > 0):
        raise ThdWindowError("period and fundamental must be > 0")

    cycles = n * period * fundamental
    m = int(round(cycles))
    if m < 2:
        raise ThdWindowError(f"window spans {cycles:.4f} cycles, need >= 2")
    if abs(cycles - m) > cycle_tolerance:
        raise ThdWindowError(
            f"window spans {cycles:.9f} cycles, not an integer number")
    if max_harmonic is None:
        max_harmonic = (n - 1) // (2 * m)
    if max_harmonic < 2:
        raise ThdWindowError(f"max_harmonic must be >= 2, got {max_harmonic}")
    if max_harmonic * m >= n / 2:
        raise ThdWindowError(
            f"harmonic {max_harmonic} is above Nyquist for {n} samples")

    spectrum = rfft(x)
    bins = m * np.arange(1, max_harmonic + 1)
    amps = 2.0 * np.abs(spectrum[bins]) / n

    a1 = amps[0]
    if a1 < min_amplitude:
        raise ThdWindowError(f"fundamental amplitude {a1:.3g} below threshold")

    return ThdReport(
        fundamental_hz=fundamental,
        fundamental_amplitude=float(a1),
        thd=float(np.sqrt(np.sum(amps[1:] ** 2)) / a1),
        orders=np.arange(2, max_harmonic + 1),
        amplitudes=amps[1:],
    )


def integer_cycle_window(ts, freq, start_cycle=3, min_cycles=4, max_cycles=12,
                         tolerance=1e-6):
    """(start index, sample count, fundamental) of the THD window.

    Starts at cycle `start_cycle` (1-based) and takes the smallest cycle count
    in [min_cycles, max_cycles] that is a whole number of samples. If none is,
    `min_cycles` cycles are rounded to whole samples and the fundamental is
    adjusted so the window still holds exactly `min_cycles` of its periods.
    """
    samples_per_cycle = 1.0 / (freq * ts)
    start = int(round((start_cycle - 1) * samples_per_cycle))
    for cycles in range(min_cycles, max_cycles + 1):
        samples = cycles * samples_per_cycle
        if abs(samples - round(samples)) <= tolerance:
            return start, int(round(samples)), freq

    samples = int(round(min_cycles * samples_per_cycle))
    adjusted = min_cycles / (samples * ts)
    logger.info(
        f"=> no integer-sample window for ts={ts:g}, f={freq:g}; "
        f"using f={adjusted:.6f} Hz over {samples} samples")
    return start, samples, adjusted


def record_thd(record, start_cycle=3, min_cycles=4, max_cycles=12,
               max_harmonic=50, phase=0):
    """THD of one capacitor phase voltage of a closed-loop record."""
    start, samples, f1 = integer_cycle_window(
        record.ts, record.freq, start_cycle, min_cycles, max_cycles)
    if start + samples > record.n_steps:
        raise ThdWindowError(
            f"record has {record.n_steps} steps, THD window needs "
            f"{start + samples}")
    v = record.phase("v_c")[start:start + samples, phase]
    return thd(v, record.ts, f1, max_harmonic)


def settling_time(record, tolerance_band=0.05):
    """Earliest time after which the tracking error stays within
    `tolerance_band` x amplitude for a full fundamental cycle.

    math.inf when the error never settles within the record.
    """
    err = record.tracking_error()
    threshold = tolerance_band * record.vref_amplitude
    window = int(round(1.0 / (record.freq * record.ts)))
    if window < 1 or err.size < window:
        return math.inf

    bad = np.concatenate([[0], np.cumsum(err > threshold)])
    settled = (bad[window:] - bad[:-window]) == 0
    hits = np.flatnonzero(settled)
    if hits.size == 0:
        return math.inf
    return float(hits[0] * record.ts)


def rms_tracking_error(record, start_cycle=3):
    """RMS of |v_c - v_ref| after `start_cycle`, relative to the amplitude."""
    start = int(round((start_cycle - 1) / (record.freq * record.ts)))
    err = record.tracking_error()[start:]
    if err.size == 0:
        return math.nan
    return float(np.sqrt(np.mean(err ** 2)) / record.vref_amplitude)


def accuracy(output, target):
    '''Fraction of rows whose argmax matches the target class.'''
    output = np.asarray(output)
    target = np.asarray(target).reshape(-1)
    if target.size == 0:
        return math.nan
    pred = np.argmax(output, axis=1)
    return float(np.mean(pred == target))
