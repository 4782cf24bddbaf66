"""Exception types shared across the package."""


class WorkbenchError(Exception):
    """Base class for all errors raised by dualadmit."""


class SignatureError(WorkbenchError):
    pass


class EvaluationError(WorkbenchError):
    """Unknown variable or operation during term evaluation."""


class BudgetExceeded(WorkbenchError):
    """A configured size or search budget would be exceeded.

    ``count`` carries the refused quantity when it is known.
    """

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


class VarietyError(WorkbenchError):
    """An algebra is not a member of the variety it claims to belong to."""


class DualityError(WorkbenchError):
    """Duality machinery misuse, or an internal invariant violation."""


class FormatError(WorkbenchError):
    """Malformed JSON input for an algebra or a space."""


class ClauseSyntaxError(WorkbenchError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        self.reason = message
        super().__init__(f"column {pos + 1}: {message}")
