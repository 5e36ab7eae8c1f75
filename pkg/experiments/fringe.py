"""
Oscillation frequency of a uniformly sampled fringe.
"""
import logging
import math

import numpy as np
from django.core.exceptions import ValidationError
from scipy.optimize import curve_fit

logger = logging.getLogger(__name__)

FLAT_TOLERANCE = 1e-9


def _sinusoid(t, amplitude, frequency, phase, offset):
    return amplitude * np.cos(2 * np.pi * frequency * t + phase) + offset


def fft_peak(times, values):
    """Dominant nonzero frequency (Hz) from the FFT peak with parabolic interpolation."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape or times.size < 4:
        raise ValidationError("a fringe needs at least four (time, value) samples")
    steps = np.diff(times)
    step = float(np.mean(steps))
    if step <= 0 or np.max(np.abs(steps - step)) > 1e-6 * step:
        raise ValidationError("fringe samples must be uniformly spaced in time")
    spectrum = np.abs(np.fft.rfft(values - values.mean()))
    frequencies = np.fft.rfftfreq(values.size, step)
    k = int(np.argmax(spectrum[1:])) + 1
    shift = 0.0
    if 1 <= k < spectrum.size - 1:
        left, centre, right = spectrum[k - 1], spectrum[k], spectrum[k + 1]
        denominator = left - 2 * centre + right
        if denominator != 0:
            shift = 0.5 * (left - right) / denominator
    return float((k + shift) * frequencies[1])


def fringe_frequency(times, values):
    """
    Fringe frequency in Hz; 0.0 for a flat trace.

    The FFT estimate seeds a least-squares sinusoid fit, which resolves the
    frequency well below the 1/span FFT bin width.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.size and np.ptp(values) < FLAT_TOLERANCE:
        return 0.0
    guess = fft_peak(times, values)
    amplitude = (values.max() - values.min()) / 2
    centred = times - times[0]
    phase = math.atan2(
        -np.dot(values - values.mean(), np.sin(2 * np.pi * guess * centred)),
        np.dot(values - values.mean(), np.cos(2 * np.pi * guess * centred)),
    )
    try:
        params, _ = curve_fit(
            _sinusoid, centred * 1e9, values,
            p0=[amplitude, guess * 1e-9, phase, values.mean()],
            maxfev=10_000,
        )
    except RuntimeError:
        logger.warning("sinusoid fit did not converge; using the FFT estimate %.6g Hz", guess)
        return guess
    frequency = abs(params[1]) * 1e9
    logger.debug("fringe: FFT %.6g Hz, fitted %.6g Hz", guess, frequency)
    return float(frequency)
