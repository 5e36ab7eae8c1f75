"""
Measurement-conditioned state preparation.

The readout pulse latches a High/Low amplitude that shifts the qubit by
delta_high/delta_low. With the drive tuned to one of the two shifted
frequencies, free evolution during the readout window is a z rotation on
one branch only (selective Ramsey), while resonant x rotations act on both.
Interleaving three rotations with selective quarter-turn waits prepares

    ground detected:  cos(theta1/2)|g> + i sin(theta1/2)|e>
    excited detected: cos(theta2/2)|g> + i sin(theta2/2) e^{i phi}|e>

from any input state. theta1 = theta2 = pi initializes to |e>.
"""
import cmath
import logging
import math
from dataclasses import dataclass

from django.core.exceptions import ValidationError
from django.db import models

from dynamics.propagators import RotatingFrameParams, rwa_propagator
from qubit.core import PureState, apply, rot_x
from readout.jba import Outcome, project

from .device import DeviceParams
from .schedule import DriveConvention, ScheduleBuilder

logger = logging.getLogger(__name__)


class DetectedBranch(models.TextChoices):
    GROUND_DETECTED = 'ground', 'Ground detected'
    EXCITED_DETECTED = 'excited', 'Excited detected'

    @classmethod
    def from_outcome(cls, outcome):
        return cls.EXCITED_DETECTED if outcome == Outcome.HIGH else cls.GROUND_DETECTED


@dataclass(frozen=True)
class FeedbackSpec:
    theta1: float
    theta2: float
    phi: float
    delta_omega: float
    drive_convention: DriveConvention = DriveConvention.RESONANT_WITH_LOW

    def __post_init__(self):
        for name in ('theta1', 'theta2', 'phi', 'delta_omega'):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        if self.delta_omega == 0:
            raise ValidationError("delta_omega must be nonzero")

    @classmethod
    def for_device(cls, theta1, theta2, phi, device: DeviceParams, **kwargs):
        return cls(theta1, theta2, phi, device.jba.delta_omega, **kwargs)

    @property
    def quarter_turn(self):
        """tau_{pi/2}: selective wait for a quarter Ramsey turn."""
        return (math.pi / 2) / self.delta_omega

    @property
    def phase_wait(self):
        return self.phi / self.delta_omega


def build_arbitrary_prep(spec: FeedbackSpec, device: DeviceParams):
    """
    ReadoutOn, latch wait tau_jba, R(pi/2), T(tau_{pi/2}), R(theta1 - theta2),
    T(tau_{pi/2}), R(theta2 - pi/2), T(phi / delta_omega), ReadoutOff.

    Zero-angle rotations and a zero phase wait are omitted.
    """
    if spec.phi < 0:
        raise ValidationError(f"phi must be >= 0, got {spec.phi!r}")
    if spec.delta_omega < 0:
        raise ValidationError("delta_omega must be positive to time the selective waits")
    if not math.isclose(spec.delta_omega, device.jba.delta_omega, rel_tol=1e-9):
        logger.warning(
            "spec delta_omega %.6g rad/s differs from the device shift difference %.6g rad/s; "
            "the closed-form prediction will not hold",
            spec.delta_omega, device.jba.delta_omega,
        )
    return (
        ScheduleBuilder(device, spec.drive_convention)
        .readout_on()
        .wait(device.tau_jba)
        .rotate(math.pi / 2)
        .wait(spec.quarter_turn, selective=True)
        .rotate(spec.theta1 - spec.theta2, skip_zero=True)
        .wait(spec.quarter_turn, selective=True)
        .rotate(spec.theta2 - math.pi / 2, skip_zero=True)
        .wait(spec.phase_wait, selective=True, skip_zero=True)
        .readout_off()
        .build()
    )


def build_initialization(device: DeviceParams, drive_convention=DriveConvention.RESONANT_WITH_LOW):
    spec = FeedbackSpec.for_device(math.pi, math.pi, 0.0, device, drive_convention=drive_convention)
    return build_arbitrary_prep(spec, device)


def build_selective_ramsey(prep_angle, gap, device: DeviceParams,
                           drive_convention=DriveConvention.RESONANT_WITH_LOW):
    """
    Prep rotation, readout on, latch wait, R(pi/2), selective wait ``gap``,
    R(pi/2), readout off, then a second readout with measure.
    """
    return (
        ScheduleBuilder(device, drive_convention)
        .rotate(prep_angle, skip_zero=True)
        .readout_on()
        .wait(device.tau_jba)
        .rotate(math.pi / 2)
        .wait(gap, selective=True)
        .rotate(math.pi / 2)
        .readout_off()
        .readout_on()
        .measure()
        .build()
    )


def build_ramsey_probe(prep_angle, gap, device: DeviceParams,
                       drive_convention=DriveConvention.RESONANT_WITH_LOW):
    """Ramsey during readout: prep_angle pi latches High, 2*pi latches Low."""
    return build_selective_ramsey(prep_angle, gap, device, drive_convention)


def build_initialization_demo(prep_width, gap, device: DeviceParams, time_offset=0.0,
                              drive_convention=DriveConvention.RESONANT_WITH_LOW):
    """
    Initialization demo cell: a prep pulse of nominal width ``prep_width``,
    of which the first ``time_offset`` produces no rotation, then the
    selective Ramsey pair separated by ``gap``.
    """
    prep_angle = device.rabi_omega * max(prep_width - time_offset, 0.0)
    return build_selective_ramsey(prep_angle, gap, device, drive_convention)


def predict_final(branch, spec: FeedbackSpec):
    """Closed-form final state of build_arbitrary_prep on ``branch`` (up to global phase)."""
    c1, s1 = math.cos(spec.theta1 / 2), math.sin(spec.theta1 / 2)
    c2, s2 = math.cos(spec.theta2 / 2), math.sin(spec.theta2 / 2)
    phase = cmath.exp(1j * spec.phi)
    if spec.drive_convention == DriveConvention.RESONANT_WITH_LOW:
        if branch == DetectedBranch.GROUND_DETECTED:
            return PureState(c1, 1j * s1)
        return PureState(c2, 1j * s2 * phase)
    # Drive tuned to the High state: the same gate products conjugated by sigma_x.
    if branch == DetectedBranch.EXCITED_DETECTED:
        return PureState(1j * s1, c1)
    return PureState(1j * s2 * phase, c2)


def two_qubit_feedforward(control: PureState, target_spec: FeedbackSpec, device: DeviceParams, rng):
    """
    Route the control qubit's readout to a second qubit.

    The target starts in |g> and is driven at its High-shifted frequency for
    a nominal rotation of theta2: resonant (exact rot_x) when the control
    latches High, detuned by -delta_omega otherwise. Product-state model.
    """
    record = project(control, device.jba, rng)
    target = PureState.basis('g')
    angle = target_spec.theta2
    if record.outcome == Outcome.HIGH:
        gate = rot_x(angle)
    else:
        gate = rwa_propagator(RotatingFrameParams(
            detuning=-target_spec.delta_omega,
            rabi_omega=device.rabi_omega,
            duration=device.rotation_duration(angle),
            drive_phase=0.0 if angle >= 0 else math.pi,
        ))
    logger.debug("feed-forward: control latched %s", record.outcome)
    return record, apply(gate, target)
