"""Shared exception types."""


class InvariantViolation(RuntimeError):
    """A structural fact that should hold for every valid input failed.

    Raised when a verification step (a commutator that must be trivial, a
    dichotomy that must produce a case, a stabilization re-check) does not
    come out as predicted.  Seeing this exception means a representation bug,
    not a bad input.
    """


class ParseError(ValueError):
    """Malformed textual input; carries a best-effort location."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where = f" ({where})"
        super().__init__(f"{message}{where}")
