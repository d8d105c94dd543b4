class BKError(Exception):
    """Base class for every error raised by bkfix."""


class ModelParseError(BKError):
    """Malformed model document (not JSON, wrong types, unknown keys)."""

    def __init__(self, message, line=None, column=None, path=None):
        self.line = line
        self.column = column
        self.path = path
        where = []
        if line is not None:
            where.append(f"line {line} column {column}")
        if path:
            where.append(path)
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class ValidationError(BKError):
    """Well-formed document whose contents break a structural invariant."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class SortMismatch(BKError):
    pass


class StateOutOfRange(BKError, IndexError):
    pass


class UnknownName(BKError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class FormulaSyntaxError(BKError):
    def __init__(self, message, pos):
        self.pos = pos
        super().__init__(f"{message} at position {pos}")


class SortError(BKError):
    """Formula cannot be given a unique, consistent sort."""


class AmbiguousSort(SortError):
    pass


class PreconditionError(BKError):
    """An operation's hypothesis does not hold on the given input.

    Distinct from a verification failure: the claim being checked simply
    does not apply here.
    """


class InvariantViolation(BKError):
    """A theorem-backed invariant failed. Always indicates a bug."""


class CapExceeded(BKError):
    def __init__(self, message, sequence=None):
        self.sequence = sequence
        super().__init__(message)
