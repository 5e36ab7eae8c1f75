"""
Lowering of a parsed sequence to a validated PulseSchedule.

Start times accumulate edge to edge; ``pulse ... at`` places a rotation at
an absolute time. Device overrides from ``set`` statements are applied
first. Every failure is reported at the statement that caused it.
"""
import logging

from django.core.exceptions import ValidationError

from feedback.device import DEVICE_KEYS, apply_overrides
from feedback.schedule import DriveConvention, PulseEvent, PulseKind, PulseSchedule, ScheduleError

from .errors import ParseError
from .parser import MeasureStmt, PulseStmt, ReadoutStmt, SequenceDoc, WaitStmt, parse

logger = logging.getLogger(__name__)


def _error_at(position, message):
    return ParseError(position[0], position[1], message)


def _first_message(error):
    return error.messages[0] if error.messages else str(error)


def lower_overrides(doc: SequenceDoc, device):
    """Apply ``set`` statements; returns (device, drive convention)."""
    convention = DriveConvention.RESONANT_WITH_LOW
    device_keys = {}
    for key, value in doc.device_overrides.items():
        position = doc.override_positions.get(key, (1, 1))
        if key == 'drive_convention':
            if value not in DriveConvention.values:
                raise _error_at(position, f"drive_convention must be one of {', '.join(DriveConvention.values)}")
            convention = DriveConvention(value)
        elif key == 'shift_curve':
            raise _error_at(position, "shift_curve can only be given in a config file")
        elif key not in DEVICE_KEYS:
            raise _error_at(position, f"unknown device key {key}")
        elif isinstance(value, str):
            raise _error_at(position, f"{key} expects a number, got {value}")
        else:
            device_keys[key] = value
    try:
        device = apply_overrides(device, device_keys)
    except ValidationError as exc:
        culprit = next(iter(device_keys), None)
        for key in device_keys:
            try:
                apply_overrides(device, {key: device_keys[key]})
            except ValidationError:
                culprit = key
                break
        raise _error_at(doc.override_positions.get(culprit, (1, 1)), _first_message(exc)) from exc
    return device, convention


def _event(stmt, clock, device):
    if isinstance(stmt, PulseStmt):
        angle = stmt.angle if stmt.duration is None else device.rabi_omega * stmt.duration
        start = clock if stmt.at is None else stmt.at
        return PulseEvent(PulseKind.X_ROTATION, start, device.rotation_duration(angle), angle=angle)
    if isinstance(stmt, WaitStmt):
        return PulseEvent(PulseKind.WAIT, clock, stmt.duration, selective=stmt.selective)
    if isinstance(stmt, ReadoutStmt):
        return PulseEvent(PulseKind.READOUT_ON if stmt.on else PulseKind.READOUT_OFF, clock)
    if isinstance(stmt, MeasureStmt):
        return PulseEvent(PulseKind.MEASURE, clock)
    raise TypeError(f"not a sequence statement: {stmt!r}")


def lower(doc: SequenceDoc, device):
    """PulseSchedule for ``doc`` on ``device`` (after the doc's own overrides)."""
    device, convention = lower_overrides(doc, device)
    clock = 0.0
    placed = []
    for stmt in doc.statements:
        event = _event(stmt, clock, device)
        placed.append((event, stmt.position))
        clock = max(clock, event.end)
    # stable: statements keep their order at equal start times
    placed.sort(key=lambda pair: pair[0].start)
    events = [event for event, _ in placed]
    positions = [position for _, position in placed]
    try:
        schedule = PulseSchedule(tuple(events), device, convention)
    except ScheduleError as exc:
        cited = [positions[i] for i in exc.event_indices]
        message = _first_message(exc)
        if len(cited) > 1:
            message += " (statements at " + ", ".join(f"{line}:{column}" for line, column in cited) + ")"
        raise _error_at(cited[-1] if cited else (1, 1), message) from exc
    logger.debug("lowered %d statements to a schedule ending at %.4g ns", len(events), schedule.end * 1e9)
    return schedule


def lower_source(source, device):
    return lower(parse(source), device)
