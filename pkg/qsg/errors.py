# errors.py


class QsgError(Exception):
    """Base class for every error raised by the toolkit."""
    pass


class InputError(QsgError):
    """Malformed input: bad arity, out-of-range index, division by zero."""
    pass


class PreconditionError(QsgError):
    pass


class BudgetExceeded(QsgError):
    pass


class ResampleExhausted(QsgError):
    pass
