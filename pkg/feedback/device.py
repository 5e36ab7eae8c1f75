"""
Device constants shared by the protocol, the DSL and the harness, plus the
unit-suffixed key/value overrides used by config files and ``set``
statements.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from django.conf import settings
from django.core.exceptions import ValidationError

from readout.jba import JbaParams, load_shift_curve

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class DeviceParams:
    """Angular frequencies in rad/s, times in seconds."""
    omega_qubit: float = TWO_PI * 3.4e9
    qubit_gap: float = TWO_PI * 3.3e9
    rabi_omega: float = math.pi / 0.9e-9
    jba: JbaParams = field(default_factory=JbaParams)
    t1: Optional[float] = None
    t2: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.rabi_omega) and self.rabi_omega > 0):
            raise ValidationError(f"rabi_omega must be positive, got {self.rabi_omega!r}")
        if self.omega_qubit < 0 or self.qubit_gap < 0:
            raise ValidationError("qubit frequencies must be nonnegative")
        for name in ('t1', 't2'):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValidationError(f"{name} must be positive when given, got {value!r}")
        if self.t1 is not None and self.t2 is not None and self.t2 > 2 * self.t1:
            raise ValidationError(f"t2 ({self.t2!r}) cannot exceed 2 * t1 ({2 * self.t1!r})")

    @property
    def pi_duration(self):
        return math.pi / self.rabi_omega

    @property
    def tau_jba(self):
        return self.jba.tau_jba

    def rotation_duration(self, angle):
        return abs(angle) / self.rabi_omega

    def with_delta_omega(self, delta_omega):
        """Copy whose High-state shift sits delta_omega above the Low-state shift."""
        return replace(self, jba=replace(self.jba, delta_high=self.jba.delta_low + delta_omega))


def default_device():
    """DeviceParams from the FEEDBACK_LAB settings block."""
    conf = getattr(settings, 'FEEDBACK_LAB', {})
    jba = JbaParams(
        f_jba=conf.get('F_JBA_HZ', 6.5e9),
        q_factor=conf.get('Q_JBA', 45.5),
        delta_high=TWO_PI * conf.get('DELTA_HIGH_HZ', 150e6),
        delta_low=TWO_PI * conf.get('DELTA_LOW_HZ', 0.0),
    )
    return DeviceParams(
        omega_qubit=TWO_PI * conf.get('OMEGA_QUBIT_HZ', 3.4e9),
        qubit_gap=TWO_PI * conf.get('QUBIT_GAP_HZ', 3.3e9),
        rabi_omega=math.pi / conf.get('PI_DURATION_S', 0.9e-9),
        jba=jba,
    )


def initialization_device():
    """Default device retuned so that pi / delta_omega is the 5.5 ns Ramsey rotation time."""
    conf = getattr(settings, 'FEEDBACK_LAB', {})
    return default_device().with_delta_omega(TWO_PI * conf.get('INIT_DELTA_OMEGA_HZ', 1 / 11e-9))


# key -> (scale to SI/angular units, target)
_GHZ = TWO_PI * 1e9
_MHZ = TWO_PI * 1e6

DEVICE_KEYS = {
    'omega_qubit_ghz': (_GHZ, 'omega_qubit'),
    'qubit_gap_ghz': (_GHZ, 'qubit_gap'),
    'rabi_mhz': (_MHZ, 'rabi_omega'),
    'pi_duration_ns': (1e-9, 'pi_duration'),
    't1_us': (1e-6, 't1'),
    't2_us': (1e-6, 't2'),
    'f_jba_ghz': (1e9, 'jba.f_jba'),
    'q_factor': (1.0, 'jba.q_factor'),
    'delta_high_mhz': (_MHZ, 'jba.delta_high'),
    'delta_low_mhz': (_MHZ, 'jba.delta_low'),
    'delta_omega_mhz': (_MHZ, 'delta_omega'),
    'projection_error': (1.0, 'jba.projection_error'),
    'assignment_error': (1.0, 'jba.assignment_error'),
    'shift_curve': (None, 'jba.shift_curve'),
}


def apply_overrides(device, mapping):
    """
    Return ``device`` with unit-suffixed overrides applied.

    ``delta_omega_mhz`` is applied last, relative to the final Low-state
    shift. Unknown keys raise ValidationError.
    """
    unknown = sorted(set(mapping) - set(DEVICE_KEYS))
    if unknown:
        raise ValidationError(f"unknown device key(s): {', '.join(unknown)}")
    top, jba = {}, {}
    delta_omega = None
    for key, value in mapping.items():
        scale, target = DEVICE_KEYS[key]
        if target == 'jba.shift_curve':
            jba['shift_curve'] = load_shift_curve(value)
            continue
        try:
            number = float(value) * scale
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{key} expects a number, got {value!r}") from exc
        if target == 'delta_omega':
            delta_omega = number
        elif target == 'pi_duration':
            if number <= 0:
                raise ValidationError("pi_duration_ns must be positive")
            top['rabi_omega'] = math.pi / number
        elif target.startswith('jba.'):
            jba[target[4:]] = number
        else:
            top[target] = number
    updated = replace(device, jba=replace(device.jba, **jba), **top)
    if delta_omega is not None:
        updated = updated.with_delta_omega(delta_omega)
    logger.debug("device overrides applied: %s", sorted(mapping))
    return updated
