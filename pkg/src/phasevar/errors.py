"""Exception types raised by the solvers and the table loader."""


class PhaseVarError(Exception):
    """Base class for all errors raised by this package."""


class TableFormatError(PhaseVarError, ValueError):
    """An h-table file is malformed; the message names the offending line."""


class MissingTailError(PhaseVarError, ValueError):
    """A tabulated scheme has no declared large-m power-law tail."""


class SolverError(PhaseVarError, RuntimeError):
    """An eigensolver or multiplier search failed to converge."""


class ResourceLimitError(PhaseVarError, RuntimeError):
    """A basis cutoff grew past the configured hard maximum."""


class BoundaryContaminationError(PhaseVarError, RuntimeError):
    """Too much eigenfunction mass sits on a clipped grid boundary."""


class PrecisionError(PhaseVarError, RuntimeError):
    """Roundoff destroyed the accuracy of an amplitude recursion."""


class ConfigError(PhaseVarError, ValueError):
    """Invalid command-line or config-file input."""
