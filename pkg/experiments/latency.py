"""
Feedback latency budget: on-chip conditional control versus a room
temperature loop through cables and a classical controller.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

from django.conf import settings
from django.core.exceptions import ValidationError
from django.db import models

logger = logging.getLogger(__name__)


class LatencyMode(models.TextChoices):
    ON_CHIP = 'on_chip', 'On-chip'
    OFF_CHIP = 'off_chip', 'Off-chip'


def _default_cable_rate():
    return getattr(settings, 'FEEDBACK_LAB', {}).get('CABLE_DELAY_S_PER_M', 5e-9)


@dataclass(frozen=True)
class LatencyModel:
    mode: LatencyMode = LatencyMode.ON_CHIP
    cable_length: float = 20.0
    cable_delay_rate: float = 5e-9
    processing_delay: float = 0.0
    tau_jba: float = 7e-9
    tau_pi: float = 5.5e-9

    def __post_init__(self):
        object.__setattr__(self, 'mode', LatencyMode(self.mode))
        for name in ('cable_length', 'cable_delay_rate', 'processing_delay', 'tau_jba', 'tau_pi'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(f"{name} must be finite and >= 0, got {value!r}")

    @classmethod
    def for_device(cls, device, mode=LatencyMode.ON_CHIP, **kwargs):
        """Latch time and Ramsey rotation time pi / delta_omega taken from ``device``."""
        kwargs.setdefault('cable_delay_rate', _default_cable_rate())
        return cls(
            mode=mode,
            tau_jba=device.tau_jba,
            tau_pi=math.pi / abs(device.jba.delta_omega),
            **kwargs,
        )


@dataclass(frozen=True)
class LatencyBudget:
    mode: LatencyMode
    components: Tuple[Tuple[str, float], ...]

    @property
    def total(self):
        return sum(delay for _, delay in self.components)

    def component(self, name):
        return dict(self.components)[name]


def latency_budget(m: LatencyModel):
    components = []
    if m.mode == LatencyMode.OFF_CHIP:
        components.append(('cable', m.cable_length * m.cable_delay_rate))
        components.append(('processing', m.processing_delay))
    components.append(('bifurcation', m.tau_jba))
    components.append(('ramsey_rotation', m.tau_pi))
    budget = LatencyBudget(m.mode, tuple(components))
    logger.debug("%s latency total %.4g ns", m.mode, budget.total * 1e9)
    return budget


def speedup(on_chip: LatencyBudget, off_chip: LatencyBudget):
    return off_chip.total / on_chip.total
