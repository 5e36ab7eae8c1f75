"""
Rabi calibration from the prep-pulse widths at which the initialization map
shows the qubit excited (maxima) or in the ground state (minima).

Model: P(e)(tau1) = sin^2(pi * (tau1 - t0) / (2 * pi_duration)), so
consecutive extrema sit pi_duration apart, maxima at odd multiples and
minima at even multiples past t0.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.core.exceptions import ValidationError
from scipy.optimize import least_squares

logger = logging.getLogger(__name__)

EXCITED_ANCHORS_S = (1.7e-9, 3.5e-9, 5.3e-9)
GROUND_ANCHORS_S = (2.6e-9, 4.4e-9)


@dataclass(frozen=True)
class RabiCalibration:
    pi_duration: float
    time_offset: float = 0.0
    rms_residual: float = 0.0

    def __post_init__(self):
        if not self.pi_duration > 0:
            raise ValidationError(f"pi_duration must be positive, got {self.pi_duration!r}")
        if not self.time_offset >= 0:
            raise ValidationError(f"time_offset must be >= 0, got {self.time_offset!r}")

    @property
    def rabi_omega(self):
        return math.pi / self.pi_duration

    def prep_angle(self, prep_width):
        """Rotation produced by a prep pulse of nominal width ``prep_width``."""
        return self.rabi_omega * max(prep_width - self.time_offset, 0.0)

    def p_excited(self, prep_width):
        return math.sin(self.prep_angle(prep_width) / 2) ** 2


def _extremum_orders(excited_anchors, ground_anchors):
    anchors = sorted([(t, True) for t in excited_anchors] + [(t, False) for t in ground_anchors])
    if len(anchors) < 2:
        raise ValidationError("calibration needs at least two anchors")
    for (t_a, excited_a), (t_b, excited_b) in zip(anchors, anchors[1:]):
        if excited_a == excited_b:
            kind = 'excited' if excited_a else 'ground'
            raise ValidationError(
                f"anchors must alternate between excited and ground; "
                f"{t_a * 1e9:.4g} ns and {t_b * 1e9:.4g} ns are both {kind}"
            )
        if t_b <= t_a:
            raise ValidationError("anchors must be distinct")
    first_order = 1 if anchors[0][1] else 0
    times = np.array([t for t, _ in anchors])
    orders = first_order + np.arange(len(anchors))
    return times, orders


def calibrate_rabi(excited_anchors, ground_anchors):
    """
    Fit pi_duration and t0 to the anchor widths.

    Args:
        excited_anchors: prep widths (s) where the qubit was found excited
        ground_anchors: prep widths (s) where the qubit was found in the ground state

    Returns:
        RabiCalibration with the least-squares pi_duration and time offset.

    Raises:
        ValidationError: fewer than two anchors, non-alternating anchors,
            or a fit placing t0 before zero.
    """
    times, orders = _extremum_orders(list(excited_anchors), list(ground_anchors))
    spacing = float(np.mean(np.diff(times)))
    start = [spacing, max(float(times[0] - orders[0] * spacing), 0.0)]

    # work in ns so both parameters are O(1)
    fit = least_squares(
        lambda params: params[1] + orders * params[0] - times * 1e9,
        x0=[start[0] * 1e9, start[1] * 1e9],
    )
    pi_duration, time_offset = fit.x[0] * 1e-9, fit.x[1] * 1e-9
    if abs(time_offset) < 1e-15:
        time_offset = 0.0
    if time_offset < 0:
        raise ValidationError(
            f"anchors imply a negative time offset ({time_offset * 1e9:.4g} ns); "
            "check that the first anchor is the first extremum"
        )
    rms = float(np.sqrt(np.mean(fit.fun ** 2))) * 1e-9
    logger.debug("rabi calibration: pi = %.4g ns, t0 = %.4g ns, rms %.3g ns",
                 pi_duration * 1e9, time_offset * 1e9, rms * 1e9)
    return RabiCalibration(pi_duration, time_offset, rms)


def default_calibration():
    return calibrate_rabi(EXCITED_ANCHORS_S, GROUND_ANCHORS_S)
