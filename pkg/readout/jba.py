"""
Phenomenological Josephson-bifurcation-amplifier readout.

The amplifier is a latched classifier: tau_jba after the readout pulse is
switched on it settles into a High or Low amplitude state, projecting the
qubit (QND) and shifting the qubit energy by delta_high or delta_low until
the pulse is switched off. Bifurcation dynamics are not simulated.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple, Optional, Tuple

import numpy as np
from django.core.exceptions import ImproperlyConfigured, ValidationError
from django.db import models

from qubit.core import PureState

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
BUNDLED_SHIFT_CURVE = Path(__file__).resolve().parent / 'data' / 'shift_curve.txt'


class Outcome(models.TextChoices):
    HIGH = 'high', 'High amplitude (excited detected)'
    LOW = 'low', 'Low amplitude (ground detected)'

    def flipped(self):
        return Outcome.LOW if self == Outcome.HIGH else Outcome.HIGH


@dataclass(frozen=True)
class JbaParams:
    """Readout channel configuration. Shifts are angular (rad/s)."""
    f_jba: float = 6.5e9
    q_factor: float = 45.5
    delta_high: float = TWO_PI * 150e6
    delta_low: float = 0.0
    projection_error: float = 0.0
    assignment_error: float = 0.0
    shift_curve: Optional[Tuple[Tuple[float, float], ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.f_jba > 0 and self.q_factor > 0):
            raise ValidationError("f_jba and q_factor must be positive")
        for name in ('projection_error', 'assignment_error'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {value!r}")
        if not (math.isfinite(self.delta_high) and math.isfinite(self.delta_low)):
            raise ValidationError("Stark shifts must be finite")
        if self.shift_curve is not None:
            curve = tuple((float(h), float(s)) for h, s in self.shift_curve)
            heights = [h for h, _ in curve]
            shifts = [s for _, s in curve]
            if len(curve) < 2:
                raise ValidationError("shift_curve needs at least two points")
            if any(b <= a for a, b in zip(heights, heights[1:])):
                raise ValidationError("shift_curve heights must be strictly increasing")
            if any(b < a for a, b in zip(shifts, shifts[1:])):
                raise ValidationError("shift_curve must be nondecreasing")
            object.__setattr__(self, 'shift_curve', curve)

    @property
    def tau_jba(self):
        """Bifurcation (latch) time Q / f."""
        return self.q_factor / self.f_jba

    @property
    def delta_omega(self):
        """Shift difference between the two latched states."""
        return self.delta_high - self.delta_low

    def compensated(self):
        """Copy with the Low-state shift cancelled (delta_low = 0)."""
        return replace(self, delta_low=0.0)

    def with_amplitudes(self, high_height, low_height):
        """Copy whose shifts are read off the height table for the two latched amplitudes."""
        return replace(
            self,
            delta_high=shift_from_height(high_height, self),
            delta_low=shift_from_height(low_height, self),
        )


class RandomSource:
    """
    Reproducible draw stream: identical (seed, stream_index) pairs give
    identical sequences, distinct stream indices give independent streams.
    """

    def __init__(self, seed, stream_index=0):
        self.seed = int(seed)
        self.stream_index = int(stream_index)
        self.generator = np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_index,))
        )

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, stream_index={self.stream_index})"

    def uniform(self):
        return float(self.generator.random())


@dataclass(frozen=True)
class MeasurementRecord:
    outcome: Outcome
    latch_time: float
    stark_shift: float
    post_state: PureState


class LatchBranch(NamedTuple):
    """One (reported outcome, post-measurement state) pair and its probability."""
    probability: float
    outcome: Outcome
    post_state: PureState


def _p_excited(state):
    return min(max(float(state.p_excited), 0.0), 1.0)


def _reported(true_high, assignment_flip):
    outcome = Outcome.HIGH if true_high else Outcome.LOW
    return outcome.flipped() if assignment_flip else outcome


def outcome_distribution(state, p: JbaParams):
    """
    Enumerate the latch branches for ``state``.

    The true projection follows the Born rule; the post-measurement state is
    flipped with probability projection_error, and independently the
    reported (latched) outcome is flipped with probability assignment_error.
    """
    p_e = _p_excited(state)
    excited, ground = PureState.basis('e'), PureState.basis('g')
    weights = {}
    for true_high, p_true in ((True, p_e), (False, 1.0 - p_e)):
        for post_flip, p_post in ((False, 1.0 - p.projection_error), (True, p.projection_error)):
            for report_flip, p_report in ((False, 1.0 - p.assignment_error), (True, p.assignment_error)):
                post_excited = true_high != post_flip
                key = (_reported(true_high, report_flip), post_excited)
                weights[key] = weights.get(key, 0.0) + p_true * p_post * p_report
    return [
        LatchBranch(weight, outcome, excited if post_excited else ground)
        for (outcome, post_excited), weight in sorted(weights.items())
        if weight > 0.0
    ]


def stark_shift_during_readout(outcome, p: JbaParams):
    return p.delta_high if outcome == Outcome.HIGH else p.delta_low


def project(s, p: JbaParams, rng: RandomSource):
    """
    QND projection of ``s`` (PureState or DensityMatrix).

    Always consumes three uniforms in the same order (Born draw, projection
    flip, assignment flip) so record sequences depend only on the stream.
    """
    born, post_draw, report_draw = rng.uniform(), rng.uniform(), rng.uniform()
    true_high = born < _p_excited(s)
    post_excited = true_high != (post_draw < p.projection_error)
    reported = _reported(true_high, report_draw < p.assignment_error)
    post_state = PureState.basis('e' if post_excited else 'g')
    logger.debug("latched %s (post-state %s) on %r", reported, 'e' if post_excited else 'g', rng)
    return MeasurementRecord(
        outcome=reported,
        latch_time=p.tau_jba,
        stark_shift=stark_shift_during_readout(reported, p),
        post_state=post_state,
    )


def shift_from_height(height, p: JbaParams):
    """Piecewise-linear lookup of the readout-height -> shift table."""
    if p.shift_curve is None:
        raise ImproperlyConfigured("no readout-height shift table is configured")
    heights = np.array([h for h, _ in p.shift_curve])
    shifts = np.array([s for _, s in p.shift_curve])
    if not heights[0] <= height <= heights[-1]:
        raise ImproperlyConfigured(
            f"readout height {height!r} is outside the table range [{heights[0]}, {heights[-1]}]"
        )
    return float(np.interp(height, heights, shifts))


def load_shift_curve(path=BUNDLED_SHIFT_CURVE):
    """
    Read a two-column ``height shift_MHz`` table ('#' comments) and return
    (height, shift in rad/s) pairs.
    """
    curve = []
    with open(path, encoding='utf-8') as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            parts = line.replace(',', ' ').split()
            if len(parts) != 2:
                raise ImproperlyConfigured(f"{path}:{line_number}: expected 'height shift_MHz'")
            try:
                height, shift_mhz = float(parts[0]), float(parts[1])
            except ValueError as exc:
                raise ImproperlyConfigured(f"{path}:{line_number}: {exc}") from exc
            curve.append((height, TWO_PI * shift_mhz * 1e6))
    return tuple(curve)
