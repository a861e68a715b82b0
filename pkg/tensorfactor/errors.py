"""Exceptions raised by tensorfactor.

Every exception derives from TensorFactorError, and additionally from the builtin exception that best describes it,
so callers may catch either the package-wide base class or the usual ValueError / RuntimeError / KeyError.
"""


class TensorFactorError(Exception):
    """Base class for all errors raised by tensorfactor."""


class TensorShapeError(TensorFactorError, ValueError):
    """A mode index, dimension vector, or array size is inconsistent."""


class RankError(TensorFactorError, ValueError):
    """A requested rank exceeds the dimension available for it."""


class NonFiniteError(TensorFactorError, ValueError):
    """An input to a decomposition contains NaN or inf entries."""


class NotSymmetricError(TensorFactorError, ValueError):
    """A gram matrix is not symmetric, or is materially indefinite."""


class LagError(TensorFactorError, ValueError):
    """A lag count is not in the valid range 1 <= h0 < T."""


class DegenerateMomentError(TensorFactorError, RuntimeError):
    """Every singular value of a moment matrix is numerically zero, so no loading directions can be read off."""


class UnknownPresetError(TensorFactorError, KeyError):
    """A method preset or simulation setting name is not known."""

    def __str__(self) -> str:
        """Render without the quoting KeyError adds.

        Returns:
            str: The plain message.
        """
        return str(self.args[0]) if self.args else ""


class ConfigError(TensorFactorError, ValueError):
    """An experiment config or tensor container file is malformed."""


class EmptyRecordsError(TensorFactorError, ValueError):
    """A summary was requested over an empty set of run records."""
