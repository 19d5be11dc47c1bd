"""Exception types shared across the toolkit."""


class MonogenicError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(MonogenicError):
    """A parameter or input violated a documented precondition."""


class ZeroNormError(ValidationError):
    """An element with (near-)zero norm was passed where an inverse or a
    direction is required."""


class NegativeScaleError(ValidationError):
    """Scale parameter outside its admissible range."""


class ImageTooSmallError(ValidationError):
    """Image smaller than the operator's stencil."""


class BadThresholdsError(ValidationError):
    """Hysteresis thresholds with low >= high."""


class OriginSingularityError(ValidationError):
    """Closed-form kernel evaluated at its singular point."""


class NonRealOutputError(MonogenicError):
    """A spectral filter produced significant imaginary energy.

    All multipliers used here map real fields to real fields; tripping this
    indicates a broken conjugate symmetry, not a user error.
    """


class UnreadableInputError(MonogenicError):
    """Input file missing or not parseable."""


class UnsupportedFormatError(MonogenicError):
    """Image format outside the supported set (binary PGM, PNG gray/RGB)."""
