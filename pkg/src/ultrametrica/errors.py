"""Exception hierarchy shared by all modules."""


class UltrametricaError(Exception):
    """Base class for all library errors."""


class ProfileMismatchError(UltrametricaError):
    """Operands live over different radius profiles."""


class InputValidationError(UltrametricaError):
    """Malformed input data (bad JSON, bad exponents, bad profile)."""


class DenominatorCapError(UltrametricaError):
    """An exponent denominator exceeded p**max_denom_log."""


class FloorTooCoarseError(UltrametricaError):
    """The norm-precision floor is too coarse to decide the question."""


class LeadingTermTieError(UltrametricaError):
    """Several terms tie for the maximal norm (rational-radius profiles)."""


class InvariantViolationError(UltrametricaError):
    """An internal invariant failed (e.g. a tie under a free profile)."""


class WindowError(UltrametricaError):
    """A required open norm window is empty or unsatisfiable."""


class DepthError(UltrametricaError):
    """A well-order index exceeds the built schedule depth."""


class OracleError(UltrametricaError):
    """The adapted-element oracle failed for a required exponent."""
