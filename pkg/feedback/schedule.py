"""
Timed pulse schedules: the executable program of a feedback experiment.

Times are edge-to-edge: a Wait is the gap between the end of one event and
the start of the next. Validity is checked before any simulation.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from django.core.exceptions import ValidationError
from django.db import models

from .device import DeviceParams

logger = logging.getLogger(__name__)

TIME_EPS = 1e-15


class PulseKind(models.TextChoices):
    X_ROTATION = 'x_rotation', 'X rotation'
    WAIT = 'wait', 'Wait'
    READOUT_ON = 'readout_on', 'Readout on'
    READOUT_OFF = 'readout_off', 'Readout off'
    MEASURE = 'measure', 'Measure'


class DriveConvention(models.TextChoices):
    RESONANT_WITH_LOW = 'resonant_with_low', 'Drive resonant when ground is detected'
    RESONANT_WITH_HIGH = 'resonant_with_high', 'Drive resonant when excited is detected'


class ScheduleError(ValidationError):
    """A schedule invariant violation, naming the offending event indices."""

    def __init__(self, message, event_indices=()):
        super().__init__(message)
        self.event_indices = tuple(event_indices)


@dataclass(frozen=True)
class PulseEvent:
    kind: PulseKind
    start: float
    duration: float = 0.0
    angle: Optional[float] = None
    selective: bool = False

    @property
    def end(self):
        return self.start + self.duration

    def describe(self):
        if self.kind == PulseKind.X_ROTATION:
            return f"X({math.degrees(self.angle):.6g} deg) at {self.start * 1e9:.6g} ns"
        if self.kind == PulseKind.WAIT:
            return f"wait {self.duration * 1e9:.6g} ns at {self.start * 1e9:.6g} ns"
        return f"{self.kind.label.lower()} at {self.start * 1e9:.6g} ns"


@dataclass(frozen=True)
class ReadoutWindow:
    on_index: int
    on_time: float
    latch_time: float
    off_index: Optional[int] = None
    off_time: float = math.inf

    def contains(self, start, end):
        return start >= self.on_time - TIME_EPS and end <= self.off_time + TIME_EPS


@dataclass(frozen=True)
class PulseSchedule:
    events: Tuple[PulseEvent, ...]
    device: DeviceParams
    drive_convention: DriveConvention = DriveConvention.RESONANT_WITH_LOW
    windows: Tuple[ReadoutWindow, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'events', tuple(self.events))
        object.__setattr__(self, 'windows', validate(self.events, self.device))

    @property
    def end(self):
        return max((event.end for event in self.events), default=0.0)

    def drive_offset(self):
        """Stark shift the drive is tuned to, relative to the bare qubit."""
        if self.drive_convention == DriveConvention.RESONANT_WITH_HIGH:
            return self.device.jba.delta_high
        return self.device.jba.delta_low

    def rotations(self):
        return [e for e in self.events if e.kind == PulseKind.X_ROTATION]


def _check_event(index, event, device):
    if not (math.isfinite(event.start) and event.start >= 0):
        raise ScheduleError(f"event {index} starts at {event.start!r}; start must be >= 0", [index])
    if not (math.isfinite(event.duration) and event.duration >= 0):
        raise ScheduleError(f"event {index} has negative duration {event.duration!r}", [index])
    if event.kind == PulseKind.X_ROTATION:
        if event.angle is None or not math.isfinite(event.angle):
            raise ScheduleError(f"rotation {index} needs a finite angle", [index])
        expected = device.rotation_duration(event.angle)
        if abs(event.duration - expected) > max(TIME_EPS, 1e-9 * expected):
            raise ScheduleError(
                f"rotation {index} lasts {event.duration!r} s but angle/Omega is {expected!r} s", [index]
            )
    elif event.kind != PulseKind.WAIT and event.duration != 0:
        raise ScheduleError(f"{event.kind.label} event {index} must have zero duration", [index])


def validate(events, device: DeviceParams):
    """
    Check every schedule invariant and return the readout windows.

    Raises ScheduleError for: unsorted events, overlapping rotations,
    unbalanced readout on/off, a window shorter than the latch time, a
    rotation straddling a latch instant, a selective wait outside a window,
    and a measure outside a window.
    """
    tau = device.tau_jba
    windows = []
    open_window = None
    last_rotation = None

    for index, event in enumerate(events):
        _check_event(index, event, device)
        if index and event.start < events[index - 1].start - TIME_EPS:
            raise ScheduleError(f"event {index} starts before event {index - 1}", [index - 1, index])

        if event.kind == PulseKind.X_ROTATION:
            if last_rotation is not None and events[last_rotation].end > event.start + TIME_EPS:
                raise ScheduleError(
                    f"rotations {last_rotation} and {index} overlap", [last_rotation, index]
                )
            last_rotation = index
        elif event.kind == PulseKind.READOUT_ON:
            if open_window is not None:
                raise ScheduleError(
                    f"readout turned on at event {index} while already on since event {open_window.on_index}",
                    [open_window.on_index, index],
                )
            open_window = ReadoutWindow(index, event.start, event.start + tau)
        elif event.kind == PulseKind.READOUT_OFF:
            if open_window is None:
                raise ScheduleError(f"readout turned off at event {index} without being on", [index])
            if event.start < open_window.latch_time - TIME_EPS:
                raise ScheduleError(
                    f"readout window {open_window.on_index}..{index} is shorter than the "
                    f"latch time {tau * 1e9:.4g} ns",
                    [open_window.on_index, index],
                )
            windows.append(ReadoutWindow(
                open_window.on_index, open_window.on_time, open_window.latch_time, index, event.start,
            ))
            open_window = None
        elif event.kind == PulseKind.MEASURE and open_window is None:
            raise ScheduleError(f"measure at event {index} is outside a readout window", [index])
    if open_window is not None:
        windows.append(open_window)

    for index, event in enumerate(events):
        if event.kind == PulseKind.X_ROTATION:
            for window in windows:
                if event.start < window.latch_time - TIME_EPS and event.end > window.latch_time + TIME_EPS:
                    raise ScheduleError(
                        f"rotation {index} straddles the latch of the readout window opened at "
                        f"event {window.on_index}",
                        [window.on_index, index],
                    )
        elif event.kind == PulseKind.WAIT and event.selective:
            if not any(window.contains(event.start, event.end) for window in windows):
                raise ScheduleError(f"selective wait {index} lies outside every readout window", [index])

    return tuple(windows)


class ScheduleBuilder:
    """Sequential accumulator: each event starts where the previous one ended."""

    def __init__(self, device: DeviceParams, drive_convention=DriveConvention.RESONANT_WITH_LOW):
        self.device = device
        self.drive_convention = drive_convention
        self.events = []
        self.clock = 0.0

    def _append(self, event):
        self.events.append(event)
        self.clock = max(self.clock, event.end)
        return self

    def rotate(self, angle, at=None, skip_zero=False):
        if skip_zero and angle == 0:
            return self
        start = self.clock if at is None else at
        return self._append(PulseEvent(
            PulseKind.X_ROTATION, start, self.device.rotation_duration(angle), angle=angle,
        ))

    def rotate_for(self, duration, at=None):
        """Rotation given by its length; the angle follows from the Rabi rate."""
        return self.rotate(self.device.rabi_omega * duration, at=at)

    def wait(self, duration, selective=False, skip_zero=False):
        if skip_zero and duration == 0:
            return self
        return self._append(PulseEvent(PulseKind.WAIT, self.clock, duration, selective=selective))

    def readout_on(self):
        return self._append(PulseEvent(PulseKind.READOUT_ON, self.clock))

    def readout_off(self):
        return self._append(PulseEvent(PulseKind.READOUT_OFF, self.clock))

    def measure(self):
        return self._append(PulseEvent(PulseKind.MEASURE, self.clock))

    def build(self):
        schedule = PulseSchedule(tuple(self.events), self.device, self.drive_convention)
        logger.debug("built schedule with %d events ending at %.4g ns", len(schedule.events), schedule.end * 1e9)
        return schedule
