"""Exception hierarchy.

Every error raised on purpose by the package derives from `OpstructError` so
that callers (and the CLI exit-code mapping) can tell them apart from bugs.
"""

from __future__ import annotations


class OpstructError(Exception):
    """Base class for all package errors."""


class InputError(OpstructError):
    """Bad user input. The CLI maps these to exit code 2."""


class ParseError(InputError):
    def __init__(self, message: str, locus: str = ""):
        self.locus = locus
        super().__init__(f"{locus}: {message}" if locus else message)


class UndefinedSequenceIndex(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class NumericalError(OpstructError):
    pass


class NotHermitian(NumericalError):
    pass


class NotPSD(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class InteriorEmpty(OpstructError):
    pass


class Inconsistent(OpstructError):
    """An estimate contradicts declared spectral data."""


class VerificationError(OpstructError):
    """A premise or structural invariant failed. The CLI maps these to exit 1."""


class NotPositive(VerificationError):
    pass


class NoEssentialPoint(VerificationError):
    pass


class RankAmbiguity(VerificationError):
    pass


class NotQuasinormal(VerificationError):
    pass


class NotHyponormal(VerificationError):
    pass


class EssentialAmbiguity(VerificationError):
    pass


class BlockLeak(VerificationError):
    def __init__(self, message: str, norm: float):
        self.norm = norm
        super().__init__(f"{message} (leak norm {norm:.3e})")


class NotInvertible(VerificationError):
    pass


class AlphaZero(VerificationError):
    pass


class PremiseFailed(VerificationError):
    pass


class SpectrumUndeclared(InputError):
    pass


class RecipeInfeasible(InputError):
    pass
