"""
Coarse-grained T1/T2 decoherence applied between schedule segments.

Amplitude damping toward |g> with probability 1 - exp(-t/T1), followed by
pure dephasing chosen so the total coherence decay is exp(-t/T2).
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.core.exceptions import ValidationError

from qubit.core import IDENTITY, SIGMA_Z, DensityMatrix, PureState
from qubit.exceptions import InvalidArgument

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecoherenceParams:
    t1: Optional[float] = None
    t2: Optional[float] = None

    def __post_init__(self):
        for name in ('t1', 't2'):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValidationError(f"{name} must be positive when given, got {value!r}")
        if self.t1 is not None and self.t2 is not None and self.t2 > 2 * self.t1:
            raise ValidationError(f"t2 ({self.t2!r}) cannot exceed 2 * t1 ({2 * self.t1!r})")

    @classmethod
    def from_device(cls, device):
        return cls(device.t1, device.t2)

    @property
    def active(self):
        return self.t1 is not None or self.t2 is not None

    @property
    def dephasing_rate(self):
        """Pure-dephasing rate 1/T2 - 1/(2 T1), zero when T2 is absent."""
        if self.t2 is None:
            return 0.0
        relaxation = 0.0 if self.t1 is None else 1 / (2 * self.t1)
        return max(1 / self.t2 - relaxation, 0.0)


def kraus_operators(duration, noise: DecoherenceParams):
    if not (math.isfinite(duration) and duration >= 0):
        raise InvalidArgument(f"duration must be finite and >= 0, got {duration!r}")
    operators = []
    gamma = 0.0 if noise.t1 is None else 1.0 - math.exp(-duration / noise.t1)
    damping = [
        np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex),
        np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex),
    ]
    lam = math.exp(-duration * noise.dephasing_rate)
    dephasing = [math.sqrt((1 + lam) / 2) * IDENTITY, math.sqrt((1 - lam) / 2) * SIGMA_Z]
    for d in dephasing:
        for a in damping:
            operators.append(d @ a)
    return operators


def apply_decoherence(rho, duration, noise: DecoherenceParams):
    """Evolve ``rho`` (DensityMatrix or PureState) through ``duration`` of idle decoherence."""
    if isinstance(rho, PureState):
        rho = DensityMatrix.from_pure(rho)
    if not noise.active:
        return rho
    matrix = sum(k @ rho.rho @ k.conj().T for k in kraus_operators(duration, noise))
    return DensityMatrix((matrix + matrix.conj().T) / 2)


def decoherence_channel(noise: DecoherenceParams):
    """``channel(state, duration)`` for the schedule executor, or None when noiseless."""
    if not noise.active:
        return None

    def channel(state, duration):
        return apply_decoherence(state, duration, noise)
    return channel
