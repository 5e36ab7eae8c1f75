class ParseError(Exception):
    """A positioned diagnostic from tokenizing, parsing or lowering a sequence."""

    def __init__(self, line, column, message, expected=()):
        self.line = line
        self.column = column
        self.message = message
        self.expected = list(expected)
        super().__init__(str(self))

    @property
    def position(self):
        return self.line, self.column

    def __str__(self):
        text = f"{self.line}:{self.column}: {self.message}"
        if self.expected:
            text += f" (expected {', '.join(self.expected)})"
        return text

    def located(self, path):
        """``path:line:col: message`` for command-line diagnostics."""
        return f"{path}:{self}"
