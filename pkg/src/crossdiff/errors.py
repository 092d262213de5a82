"""Exception and warning types shared across the package."""


class CrossDiffError(Exception):
    """Base class for all crossdiff errors."""


class LengthMismatch(CrossDiffError, ValueError):
    """Array length or shape does not match the target grid."""


class NonFiniteValue(CrossDiffError, ValueError):
    """Input data contains NaN or infinity."""


class IndexOutOfGhostRange(CrossDiffError, IndexError):
    """Index lies beyond the single ghost layer around the grid."""


class UnknownPreset(CrossDiffError, ValueError):
    """Preset name is not recognized."""


class NonPositiveCutoff(CrossDiffError, ValueError):
    """Cutoff threshold must be a positive finite number."""


class NotPositiveDefinite(CrossDiffError, ValueError):
    """Matrix fails the uniform ellipticity requirement."""


class NonFiniteState(CrossDiffError, ArithmeticError):
    """Solver state overflowed or became NaN (instability)."""


class UnsupportedCombination(CrossDiffError, ValueError):
    """Requested invariance check is provably false for this setup."""


class DegenerateInput(CrossDiffError, ValueError):
    """Input has no structure to measure (already at its mean)."""


class DegenerateReference(CrossDiffError, ValueError):
    """Reference image has zero variance."""


class StabilityWarning(UserWarning):
    """Configured time step exceeds the estimated stable bound."""


class PresetLabelWarning(UserWarning):
    """Published preset coefficients disagree with their discriminant label."""
