"""
Recursive-descent parser for the pulse sequence language.

    sequence := (setting | stmt)*
    setting  := "set" identifier "=" (number [unit] | identifier)
    stmt     := "pulse" "x" (angle | "for" time) ["at" time]
              | "wait" time ["selective"]
              | "readout" ("on" | "off")
              | "measure"
    angle    := number ["deg" | "rad"]        (bare numbers are radians)
    time     := number ("ns" | "us" | "s")

One statement per line. Angles are stored in radians and times in seconds.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

from .errors import ParseError
from .lexer import IDENTIFIER, KEYWORD, NUMBER, PUNCTUATION, UNIT, tokenize

logger = logging.getLogger(__name__)

# time units are first brought to nanoseconds so ``2us`` and ``2000ns`` parse to the same float
TIME_TO_NS = {'ns': 1.0, 'us': 1e3, 's': 1e9}
ANGLE_UNITS = ('deg', 'rad')
FREQUENCY_SUFFIXES = {'MHz': '_mhz', 'GHz': '_ghz'}


def ns_to_seconds(value_ns):
    return value_ns * 1e-9


def deg_to_radians(value_deg):
    return value_deg * math.pi / 180


@dataclass(frozen=True)
class PulseStmt:
    axis: str = 'x'
    angle: Optional[float] = None
    duration: Optional[float] = None
    at: Optional[float] = None
    position: Tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class WaitStmt:
    duration: float
    selective: bool = False
    position: Tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class ReadoutStmt:
    on: bool
    position: Tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class MeasureStmt:
    position: Tuple[int, int] = field(default=(0, 0), compare=False)


Statement = Union[PulseStmt, WaitStmt, ReadoutStmt, MeasureStmt]


@dataclass(frozen=True)
class SequenceDoc:
    device_overrides: Dict[str, Union[float, str]] = field(default_factory=dict)
    statements: Tuple[Statement, ...] = ()
    override_positions: Dict[str, Tuple[int, int]] = field(default_factory=dict, compare=False)


class _Parser:

    def __init__(self, source):
        self.tokens = tokenize(source)
        self.index = 0
        lines = source.splitlines() or ['']
        self.end_position = (len(lines), len(lines[-1]) + 1)

    @property
    def token(self):
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def found(self, kind, lexeme=None):
        token = self.token
        return token is not None and token.kind == kind and (lexeme is None or token.lexeme == lexeme)

    def error(self, message, expected=()):
        line, column = self.token.position if self.token else self.end_position
        raise ParseError(line, column, message, expected)

    def consume(self, kind, lexemes=None):
        """Take the current token if it has ``kind`` and, when given, one of ``lexemes``."""
        token = self.token
        if token is not None and token.kind == kind and (lexemes is None or token.lexeme in lexemes):
            self.index += 1
            return token
        expected = [f"'{lexeme}'" for lexeme in lexemes] if lexemes else [kind]
        got = str(token) if token else 'end of input'
        self.error(f"unexpected {got}", expected)

    def end_of_statement(self, line):
        if self.token is not None and self.token.line == line:
            self.error(f"unexpected {self.token} after a complete statement", ['end of line'])

    def number(self):
        token = self.consume(NUMBER)
        return float(token.lexeme), token

    def time(self, what):
        value, token = self.number()
        unit = self.consume(UNIT, TIME_TO_NS)
        if value < 0:
            raise ParseError(token.line, token.column, f"negative {what} {token.lexeme}{unit.lexeme}")
        return ns_to_seconds(value * TIME_TO_NS[unit.lexeme])

    def angle(self):
        value, _ = self.number()
        if self.found(UNIT) and self.token.lexeme in ANGLE_UNITS:
            unit = self.consume(UNIT).lexeme
            return deg_to_radians(value) if unit == 'deg' else value
        if self.found(UNIT):
            self.error(f"{self.token.lexeme} is not an angle unit", [f"'{u}'" for u in ANGLE_UNITS])
        return value

    def sequence(self):
        overrides, positions, statements = {}, {}, []
        while self.token is not None:
            start = self.token
            if self.found(KEYWORD, 'set'):
                key, value = self.setting()
                if key in overrides:
                    raise ParseError(start.line, start.column, f"{key} is set twice")
                overrides[key] = value
                positions[key] = start.position
            else:
                statements.append(self.statement())
            self.end_of_statement(start.line)
        return SequenceDoc(overrides, tuple(statements), positions)

    def setting(self):
        self.consume(KEYWORD, ['set'])
        key = self.consume(IDENTIFIER).lexeme
        self.consume(PUNCTUATION, ['='])
        if self.found(IDENTIFIER):
            return key, self.consume(IDENTIFIER).lexeme
        if not self.found(NUMBER):
            self.error("a setting needs a number or a name", [NUMBER, IDENTIFIER])
        value, _ = self.number()
        if self.found(UNIT):
            unit = self.token
            suffix = FREQUENCY_SUFFIXES.get(unit.lexeme)
            if suffix is None or not key.endswith(suffix):
                self.error(f"unit {unit.lexeme} does not match the unit suffix of {key}")
            self.consume(UNIT)
        return key, value

    def statement(self):
        token = self.token
        if not self.found(KEYWORD):
            self.error(f"unexpected {token}", ["'pulse'", "'wait'", "'readout'", "'measure'", "'set'"])
        keyword = token.lexeme
        if keyword == 'pulse':
            return self.pulse()
        if keyword == 'wait':
            self.consume(KEYWORD, ['wait'])
            duration = self.time('duration')
            selective = self.found(KEYWORD, 'selective')
            if selective:
                self.consume(KEYWORD, ['selective'])
            return WaitStmt(duration, selective, token.position)
        if keyword == 'readout':
            self.consume(KEYWORD, ['readout'])
            state = self.consume(KEYWORD, ['on', 'off']).lexeme
            return ReadoutStmt(state == 'on', token.position)
        if keyword == 'measure':
            self.consume(KEYWORD, ['measure'])
            return MeasureStmt(token.position)
        self.error(f"unexpected {token}", ["'pulse'", "'wait'", "'readout'", "'measure'", "'set'"])

    def pulse(self):
        token = self.consume(KEYWORD, ['pulse'])
        axis = self.consume(KEYWORD, ['x']).lexeme
        angle = duration = at = None
        if self.found(KEYWORD, 'for'):
            self.consume(KEYWORD, ['for'])
            duration = self.time('pulse length')
        else:
            angle = self.angle()
        if self.found(KEYWORD, 'at'):
            self.consume(KEYWORD, ['at'])
            at = self.time('start time')
        return PulseStmt(axis, angle, duration, at, token.position)


def parse(source):
    """Parse ``source`` into a SequenceDoc or raise the first ParseError."""
    doc = _Parser(source).sequence()
    logger.debug("parsed %d statements, %d settings", len(doc.statements), len(doc.device_overrides))
    return doc


def _single_value(text, rule):
    parser = _Parser(text)
    value = rule(parser)
    if parser.token is not None:
        parser.error(f"unexpected {parser.token}", ['end of value'])
    return value


def parse_angle(text):
    """A lone angle literal (``90deg``, ``1.5708``) in radians."""
    return _single_value(text, _Parser.angle)


def parse_time(text):
    """A lone nonnegative time literal (``5.5ns``) in seconds."""
    return _single_value(text, lambda parser: parser.time('time'))
