from __future__ import annotations


class MorseigError(RuntimeError):
    """
    Base class for failures of the numerical machinery (as opposed to plain argument errors,
    which are `ValueError`s).
    """


class EigensolverError(MorseigError):
    pass


class NotSelfAdjointError(MorseigError, ValueError):
    pass


class NotIsometryError(MorseigError, ValueError):
    pass


class ProjectorContinuationError(MorseigError):
    """
    The eigenvalue group used to continue an isometry is no longer separated from the rest
    of the spectrum.
    """


class NoConvergence(MorseigError):
    def __init__(self, what: str, iterations: int, residual: float):
        super().__init__(
            f"{what}: no convergence after {iterations} iterations (residual {residual:.3g})"
        )
        self.what = what
        self.iterations = iterations
        self.residual = residual


class NotTransverseError(MorseigError):
    pass


class FamilySpecError(MorseigError, ValueError):
    pass


class UnknownFamilyError(MorseigError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown family"


class DomainError(MorseigError, ValueError):
    """
    An operation was called outside its domain (wrong manifold type, dimension, field).
    """
