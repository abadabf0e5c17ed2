"""Exception hierarchy shared by every socnet module."""


class SocnetError(Exception):
    """Base class for all errors raised by socnet."""


class ValidationError(SocnetError, ValueError):
    pass


class NodeNotFound(SocnetError, KeyError):
    def __init__(self, label):
        super().__init__(label)
        self.label = label

    def __str__(self):
        return f"unknown node: {self.label!r}"


class FormatError(SocnetError, ValueError):
    """Malformed input file. Carries the 1-based line and column name when known."""

    def __init__(self, message, path=None, line=None, column=None):
        parts = [message]
        if path is not None:
            parts.append(f"file={path}")
        if line is not None:
            parts.append(f"line={line}")
        if column is not None:
            parts.append(f"column={column!r}")
        super().__init__(" ".join(parts) if len(parts) > 1 else message)
        self.path = path
        self.line = line
        self.column = column


class ConvergenceError(SocnetError):
    """Power iteration did not converge; keeps the last iterate for inspection."""

    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(f"{message} (residual={residual})")
        self.last_iterate = last_iterate
        self.residual = residual


class ModelError(SocnetError):
    pass


class BudgetCapExceeded(SocnetError):
    def __init__(self, required, cap):
        super().__init__(
            f"brute-force search needs {required} evaluations, above the cap of {cap}"
        )
        self.required = required
        self.cap = cap
