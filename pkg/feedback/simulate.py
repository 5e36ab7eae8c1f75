"""
Schedule executor.

A validated PulseSchedule is compiled into a time-ordered list of steps
(latch, rotation, readout off, measure). Between steps the qubit evolves in
the frame of the drive, detuned by the current Stark shift minus the shift
the drive is tuned to. The latch of each readout window happens tau_jba
after ReadoutOn; how a latch is resolved (sampled or enumerated) is left to
the caller.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from django.db import models

from dynamics.propagators import RotatingFrameParams, rwa_propagator
from qubit.core import DensityMatrix, PureState, apply, apply_density, phase_z, rot_x
from readout.jba import (
    MeasurementRecord, Outcome, RandomSource, outcome_distribution, project, stark_shift_during_readout,
)

from .schedule import TIME_EPS, PulseKind, PulseSchedule

logger = logging.getLogger(__name__)


class PulseMode(models.TextChoices):
    INSTANTANEOUS = 'instantaneous', 'Instantaneous rotations'
    FINITE = 'finite', 'Finite-duration rotations'


_LATCH = 'latch'
_ROTATE = 'rotate'
_RELEASE = 'release'
_MEASURE = 'measure'


@dataclass(frozen=True)
class _Step:
    time: float
    index: int
    action: str
    window: int
    event: object = None


@dataclass(frozen=True)
class ShotResult:
    """One execution path: latch records per readout window, measure results, final state."""
    records: Tuple[MeasurementRecord, ...]
    measurements: Tuple[MeasurementRecord, ...]
    final_state: object
    probability: float = 1.0

    @property
    def record(self):
        """The first measure result, or the first latch when the schedule never measures."""
        if self.measurements:
            return self.measurements[0]
        return self.records[0] if self.records else None


def _window_of(schedule, index):
    for number, window in enumerate(schedule.windows):
        if window.on_index < index and (window.off_index is None or index < window.off_index):
            return number
    return -1


def _compile(schedule: PulseSchedule):
    steps = []
    for number, window in enumerate(schedule.windows):
        # the latch sorts ahead of anything starting at the same instant
        steps.append(_Step(window.latch_time - TIME_EPS, window.on_index, _LATCH, number))
        if window.off_index is not None:
            steps.append(_Step(window.off_time, window.off_index, _RELEASE, number))
    for index, event in enumerate(schedule.events):
        if event.kind == PulseKind.X_ROTATION:
            steps.append(_Step(event.start, index, _ROTATE, _window_of(schedule, index), event))
        elif event.kind == PulseKind.MEASURE:
            steps.append(_Step(event.start, index, _MEASURE, _window_of(schedule, index), event))
    steps.sort(key=lambda step: (step.time, step.index))
    horizon = max([schedule.end] + [w.latch_time for w in schedule.windows])
    return steps, horizon


class _Timeline:

    def __init__(self, schedule, pulse_mode, channel):
        self.schedule = schedule
        self.pulse_mode = PulseMode(pulse_mode)
        self.channel = channel
        self.offset = schedule.drive_offset()
        self.steps, self.horizon = _compile(schedule)

    def _unitary(self, state, u):
        return apply_density(u, state) if isinstance(state, DensityMatrix) else apply(u, state)

    def _evolve(self, state, start, stop, shift, drive):
        """Advance from ``start`` to ``stop``; ``drive`` is (end, phase) of the pulse in progress or None."""
        detuning = shift - self.offset
        clock = start
        while clock < stop:
            driven = drive is not None and clock < drive[0]
            boundary = min(stop, drive[0]) if driven else stop
            piece = boundary - clock
            if driven:
                if self.pulse_mode == PulseMode.FINITE:
                    state = self._unitary(state, rwa_propagator(RotatingFrameParams(
                        detuning, self.schedule.device.rabi_omega, piece, drive[1],
                    )))
            else:
                state = self._unitary(state, phase_z(piece, detuning))
            if self.channel is not None:
                state = self.channel(state, piece)
            clock = boundary
        return state

    def run(self, state, resolve):
        """
        Execute from ``state``. ``resolve(state)`` returns the weighted
        latch outcomes as (probability, MeasurementRecord) pairs; every
        returned pair is followed to the end.
        """
        if self.channel is not None and isinstance(state, PureState):
            state = DensityMatrix.from_pure(state)
        results = []
        self._run_from(0, state, 0.0, 0.0, None, (), {}, 1.0, resolve, results)
        return results

    def _run_from(self, position, state, clock, shift, drive, records, measured, weight, resolve, results):
        steps = self.steps
        while position < len(steps):
            step = steps[position]
            target = max(step.time, clock)
            state = self._evolve(state, clock, target, shift, drive)
            clock = target
            position += 1

            if step.action == _LATCH:
                for probability, record in resolve(state):
                    post = record.post_state
                    if isinstance(state, DensityMatrix):
                        post = DensityMatrix.from_pure(post)
                    self._run_from(
                        position, post, clock, record.stark_shift, drive, records + (record,),
                        measured, weight * probability, resolve, results,
                    )
                return
            if step.action == _RELEASE:
                shift = 0.0
            elif step.action == _MEASURE:
                measured = {**measured, step.index: step.window}
            else:
                angle = step.event.angle
                phase = 0.0 if angle >= 0 else math.pi
                if self.pulse_mode == PulseMode.INSTANTANEOUS:
                    state = self._unitary(state, rot_x(angle))
                drive = (step.event.end, phase)

        state = self._evolve(state, clock, self.horizon, shift, drive)
        measurements = tuple(records[window] for _, window in sorted(measured.items()))
        results.append(ShotResult(records, measurements, state, weight))


def _sampler(device, rng):
    def resolve(state):
        return [(1.0, project(state, device.jba, rng))]
    return resolve


def _enumerator(device):
    def resolve(state):
        return [
            (branch.probability, MeasurementRecord(
                outcome=branch.outcome,
                latch_time=device.jba.tau_jba,
                stark_shift=stark_shift_during_readout(branch.outcome, device.jba),
                post_state=branch.post_state,
            ))
            for branch in outcome_distribution(state, device.jba)
        ]
    return resolve


def execute(schedule: PulseSchedule, initial, rng: RandomSource,
            pulse_mode=PulseMode.INSTANTANEOUS, channel: Optional[Callable] = None):
    """One sampled shot as a ShotResult."""
    (result,) = _Timeline(schedule, pulse_mode, channel).run(initial, _sampler(schedule.device, rng))
    return result


def simulate_schedule(schedule: PulseSchedule, initial, rng: RandomSource,
                      pulse_mode=PulseMode.INSTANTANEOUS, channel: Optional[Callable] = None):
    """
    Run one shot and return (record, final state).

    ``channel(state, duration)`` is applied after every evolution segment
    when given; the state is then carried as a DensityMatrix.
    """
    result = execute(schedule, initial, rng, pulse_mode, channel)
    return result.record, result.final_state


def run_shots(schedule: PulseSchedule, initial, shots, seed,
              pulse_mode=PulseMode.INSTANTANEOUS, channel: Optional[Callable] = None):
    """``shots`` independent shots; shot k draws from stream k of ``seed``."""
    timeline = _Timeline(schedule, pulse_mode, channel)
    results = []
    for shot in range(shots):
        (result,) = timeline.run(initial, _sampler(schedule.device, RandomSource(seed, shot)))
        results.append(result)
    logger.debug("ran %d shots of a %d-event schedule", shots, len(schedule.events))
    return results


def run_branches(schedule: PulseSchedule, initial,
                 pulse_mode=PulseMode.INSTANTANEOUS, channel: Optional[Callable] = None):
    """Every latch path with its probability; probabilities sum to one."""
    results = _Timeline(schedule, pulse_mode, channel).run(initial, _enumerator(schedule.device))
    logger.debug("enumerated %d latch paths", len(results))
    return results


def high_probability(results):
    """Probability that the first measure (or latch) reports High."""
    total = sum(r.probability for r in results)
    high = sum(r.probability for r in results if r.record is not None and r.record.outcome == Outcome.HIGH)
    return high / total if total else 0.0
