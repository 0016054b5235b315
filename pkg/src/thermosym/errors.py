"""Exception types shared across the toolkit."""


class ThermosymError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(ThermosymError, ValueError):
    """An object violates one of its construction invariants."""


class RangeError(ThermosymError, ValueError):
    """A numeric argument is outside its admissible range.

    Carries the offending parameter name and the open or closed range so
    callers (and the command line front end) can report exactly what was
    wrong and what would have been accepted.
    """

    def __init__(self, param, value, low, high, detail=""):
        self.param = param
        self.value = value
        self.low = low
        self.high = high
        msg = f"{param}={value!r} outside admissible range ({low!r}, {high!r})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class HorizonError(ThermosymError, ValueError):
    """Not enough of a sequence is available for the requested analysis."""


class DegenerateProductError(ThermosymError, ArithmeticError):
    """A nonnegative matrix product developed an all-zero row or column."""


class OracleScaleError(ThermosymError, ValueError):
    """Brute-force enumeration was requested beyond its size cap."""
