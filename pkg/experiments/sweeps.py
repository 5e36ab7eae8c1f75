"""
Deterministic Monte Carlo sweeps over schedule parameters.

Each grid cell runs the exact latch-branch executor once to get P(High) for
its schedule, then draws the shot count from one binomial on its own random
stream (seed, cell index). Results therefore do not depend on execution
order or on the number of worker threads.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from django.db import models

from feedback.protocol import build_initialization_demo, build_ramsey_probe
from feedback.simulate import PulseMode, high_probability, run_branches
from qubit.core import PureState
from readout.jba import RandomSource

from .calibration import RabiCalibration
from .decoherence import DecoherenceParams, decoherence_channel

logger = logging.getLogger(__name__)

GRID_TOL = 1e-9


class PrepPulse(models.TextChoices):
    PI_PULSE = 'pi', 'Pi pulse (latches High)'
    TWO_PI_PULSE = 'two_pi', 'Two-pi pulse (latches Low)'

    @property
    def turns(self):
        return 1 if self == PrepPulse.PI_PULSE else 2


@dataclass(frozen=True)
class SweepAxis:
    """One swept time in seconds, inclusive of ``stop`` when it falls on the grid."""
    name: str
    start: float
    stop: float
    step: float

    def __post_init__(self):
        for field_name in ('start', 'stop', 'step'):
            if not math.isfinite(getattr(self, field_name)):
                raise ValidationError(f"{self.name}.{field_name} must be finite")
        if self.start < 0:
            raise ValidationError(f"{self.name} must start at a nonnegative time, got {self.start!r}")
        if not self.step > 0:
            raise ValidationError(f"{self.name} step must be positive, got {self.step!r}")
        if self.start > self.stop:
            raise ValidationError(f"{self.name} start ({self.start!r}) exceeds stop ({self.stop!r})")

    @classmethod
    def single(cls, name, value):
        return cls(name, value, value, 1.0)

    @property
    def values(self):
        count = int(math.floor((self.stop - self.start) / self.step + GRID_TOL)) + 1
        return self.start + self.step * np.arange(count)


@dataclass(frozen=True)
class SweepSpec:
    axis1: SweepAxis
    axis2: Optional[SweepAxis] = None
    shots_per_point: int = 1000
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.shots_per_point, bool) or int(self.shots_per_point) != self.shots_per_point:
            raise ValidationError("shots_per_point must be an integer")
        if self.shots_per_point < 1:
            raise ValidationError(f"shots_per_point must be positive, got {self.shots_per_point!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError(f"seed must fit in 64 bits, got {self.seed!r}")


@dataclass(frozen=True)
class GridResult:
    """
    ``p_excited[i, j]`` belongs to ``axes[0][i]`` (tau1) and ``axes[1][j]`` (tau2).
    ``exact`` holds the branch-enumerated probabilities the shots were drawn from.
    """
    axes: Tuple[np.ndarray, np.ndarray]
    p_excited: np.ndarray
    shots: int
    exact: Optional[np.ndarray] = None

    def __post_init__(self):
        expected = (len(self.axes[0]), len(self.axes[1]))
        if self.p_excited.shape != expected:
            raise ValidationError(f"p_excited shape {self.p_excited.shape} does not match axes {expected}")
        if np.any(self.p_excited < 0) or np.any(self.p_excited > 1):
            raise ValidationError("p_excited entries must lie in [0, 1]")

    def column(self, tau2):
        j = int(np.argmin(np.abs(self.axes[1] - tau2)))
        return self.p_excited[:, j]

    def row(self, tau1):
        i = int(np.argmin(np.abs(self.axes[0] - tau1)))
        return self.p_excited[i, :]


def default_workers():
    return int(getattr(settings, 'FEEDBACK_LAB', {}).get('WORKERS', 1))


def run_grid(schedule_for, tau1_values, tau2_values, shots, seed, initial=None,
             pulse_mode=PulseMode.INSTANTANEOUS, channel=None, workers=1):
    """
    Evaluate ``schedule_for(tau1, tau2)`` on every grid cell.

    Cells are numbered row-major; cell k draws its shots from
    RandomSource(seed, k), so any worker count yields the same grid.
    """
    initial = initial if initial is not None else PureState.basis('g')
    tau1_values = np.asarray(tau1_values, dtype=float)
    tau2_values = np.asarray(tau2_values, dtype=float)
    columns = len(tau2_values)
    cells = [(i, j) for i in range(len(tau1_values)) for j in range(columns)]

    def evaluate(cell):
        i, j = cell
        schedule = schedule_for(float(tau1_values[i]), float(tau2_values[j]))
        p_high = high_probability(run_branches(schedule, initial, pulse_mode, channel))
        p_high = min(max(p_high, 0.0), 1.0)
        draw = RandomSource(seed, i * columns + j).generator.binomial(shots, p_high)
        if j == columns - 1:
            logger.debug("row %d (tau1 = %.4g ns) done", i, tau1_values[i] * 1e9)
        return p_high, int(draw)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(evaluate, cells))
    else:
        outcomes = [evaluate(cell) for cell in cells]

    shape = (len(tau1_values), columns)
    exact = np.array([p for p, _ in outcomes], dtype=float).reshape(shape)
    counts = np.array([k for _, k in outcomes], dtype=float).reshape(shape)
    return GridResult((tau1_values, tau2_values), counts / shots, shots, exact)


def ramsey_during_readout(prep, gap_sweep: SweepSpec, device, workers=1,
                          pulse_mode=PulseMode.INSTANTANEOUS):
    """
    Ramsey fringe taken while the readout is latched.

    A pi prep latches High, a 2*pi prep latches Low; readout errors are
    switched off so each trace follows one branch. The tau1 coordinate of
    the result is the prep pulse width.
    """
    prep = PrepPulse(prep)
    quiet = replace(device, jba=replace(device.jba, projection_error=0.0, assignment_error=0.0))
    prep_angle = prep.turns * math.pi
    prep_width = quiet.rotation_duration(prep_angle)
    logger.info("ramsey during readout: %s prep, %d gaps", prep.label, len(gap_sweep.axis1.values))
    return run_grid(
        lambda _, gap: build_ramsey_probe(prep_angle, gap, quiet),
        [prep_width], gap_sweep.axis1.values,
        gap_sweep.shots_per_point, gap_sweep.seed,
        pulse_mode=pulse_mode, workers=workers,
    )


def initialization_map(sweep: SweepSpec, device, cal: RabiCalibration,
                       noise: DecoherenceParams = DecoherenceParams(),
                       pulse_mode=PulseMode.INSTANTANEOUS, workers=1):
    """P(e) over prep width tau1 (axis1) and Ramsey gap tau2 (axis2)."""
    if sweep.axis2 is None:
        raise ValidationError("initialization_map needs a tau2 axis")
    # the calibration decides what rotation a nominal prep width produces
    calibrated = replace(device, rabi_omega=cal.rabi_omega)
    tau1_values, tau2_values = sweep.axis1.values, sweep.axis2.values
    logger.info("initialization map: %d x %d cells, %d shots each",
                len(tau1_values), len(tau2_values), sweep.shots_per_point)
    return run_grid(
        lambda tau1, tau2: build_initialization_demo(tau1, tau2, calibrated, cal.time_offset),
        tau1_values, tau2_values,
        sweep.shots_per_point, sweep.seed,
        pulse_mode=pulse_mode, channel=decoherence_channel(noise), workers=workers,
    )


def convergence_columns(grid: GridResult, threshold=0.99):
    """tau2 values whose minimum P(e) over tau1 exceeds ``threshold``."""
    minima = grid.p_excited.min(axis=0)
    return [float(tau2) for tau2, low in zip(grid.axes[1], minima) if low > threshold]


def predicted_convergence_gaps(delta_omega, count=3):
    """Gaps (2k + 1) * pi / delta_omega where the excited branch returns to |e>."""
    return [(2 * k + 1) * math.pi / abs(delta_omega) for k in range(count)]
