"""
Canonical text form of a SequenceDoc: settings first, then one statement
per line, times in ns and angles in degrees with 6 significant digits.
"""
import math

from django.core.exceptions import ValidationError

from feedback.schedule import TIME_EPS, DriveConvention, PulseKind

from .parser import MeasureStmt, PulseStmt, ReadoutStmt, SequenceDoc, WaitStmt


def _ns(seconds):
    return f"{seconds * 1e9:.6g}ns"


def _deg(radians):
    return f"{radians * 180 / math.pi:.6g}deg"


def _value(value):
    return value if isinstance(value, str) else repr(float(value))


def serialize_statement(stmt):
    if isinstance(stmt, PulseStmt):
        text = f"pulse {stmt.axis} " + (f"for {_ns(stmt.duration)}" if stmt.duration is not None else _deg(stmt.angle))
        if stmt.at is not None:
            text += f" at {_ns(stmt.at)}"
        return text
    if isinstance(stmt, WaitStmt):
        return f"wait {_ns(stmt.duration)}" + (" selective" if stmt.selective else "")
    if isinstance(stmt, ReadoutStmt):
        return "readout on" if stmt.on else "readout off"
    if isinstance(stmt, MeasureStmt):
        return "measure"
    raise TypeError(f"not a sequence statement: {stmt!r}")


def serialize(doc: SequenceDoc):
    lines = [f"set {key} = {_value(value)}" for key, value in doc.device_overrides.items()]
    lines.extend(serialize_statement(stmt) for stmt in doc.statements)
    return ''.join(line + '\n' for line in lines)


def from_schedule(schedule):
    """
    SequenceDoc that lowers back to ``schedule`` (to 6 significant digits).

    Gaps in the timeline become plain waits; a rotation starting before the
    running clock gets an explicit ``at``.
    """
    overrides = {}
    if schedule.drive_convention != DriveConvention.RESONANT_WITH_LOW:
        overrides['drive_convention'] = str(schedule.drive_convention)
    statements = []
    clock = 0.0
    for index, event in enumerate(schedule.events):
        if event.kind == PulseKind.X_ROTATION and event.start < clock - TIME_EPS:
            statements.append(PulseStmt('x', angle=event.angle, at=event.start))
            clock = max(clock, event.end)
            continue
        if event.start < clock - TIME_EPS:
            raise ValidationError(f"event {index} ({event.describe()}) starts inside an earlier pulse")
        if event.start > clock + TIME_EPS:
            statements.append(WaitStmt(event.start - clock))
        if event.kind == PulseKind.X_ROTATION:
            statements.append(PulseStmt('x', angle=event.angle))
        elif event.kind == PulseKind.WAIT:
            statements.append(WaitStmt(event.duration, event.selective))
        elif event.kind == PulseKind.MEASURE:
            statements.append(MeasureStmt())
        else:
            statements.append(ReadoutStmt(event.kind == PulseKind.READOUT_ON))
        clock = max(clock, event.end)
    return SequenceDoc(overrides, tuple(statements))
