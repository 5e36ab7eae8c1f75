"""
Tokenizer for ``.seq`` pulse sequence files.

Numbers take decimal or exponent notation with an optional sign and may be
followed directly by a unit (``5.5ns``). '#' starts a comment running to
the end of the line.
"""
import re
from dataclasses import dataclass

from .errors import ParseError

KEYWORDS = frozenset({
    'pulse', 'wait', 'readout', 'measure', 'set', 'on', 'off', 'x', 'at', 'for', 'selective',
})
UNITS = frozenset({'ns', 'us', 's', 'MHz', 'GHz', 'deg', 'rad'})

KEYWORD = 'keyword'
NUMBER = 'number'
UNIT = 'unit'
IDENTIFIER = 'identifier'
PUNCTUATION = 'punctuation'

_SPECS = [
    ('number', r'[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?'),
    ('word', r'[A-Za-z_][A-Za-z0-9_]*'),
    ('punctuation', r'='),
    ('comment', r'#.*'),
    ('whitespace', r'[ \t\r\f]+'),
]
_PATTERN = re.compile('|'.join('(?P<%s>%s)' % pair for pair in _SPECS))


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    line: int
    column: int

    @property
    def position(self):
        return self.line, self.column

    def __str__(self):
        return f"{self.kind} {self.lexeme!r}"


def _classify(word):
    if word in KEYWORDS:
        return KEYWORD
    if word in UNITS:
        return UNIT
    return IDENTIFIER


def tokenize(source):
    """Split ``source`` into tokens; raise ParseError at the first character no token starts with."""
    tokens = []
    for line_number, line in enumerate(source.splitlines(), start=1):
        pos = 0
        while pos < len(line):
            match = _PATTERN.match(line, pos)
            if not match:
                raise ParseError(line_number, pos + 1, f"unexpected character {line[pos]!r}")
            kind, lexeme = match.lastgroup, match.group()
            if kind == 'word':
                tokens.append(Token(_classify(lexeme), lexeme, line_number, pos + 1))
            elif kind in (NUMBER, PUNCTUATION):
                tokens.append(Token(kind, lexeme, line_number, pos + 1))
            pos = match.end()
    return tokens
