"""Exception tree for the lab. Everything raised on purpose derives from LabError."""


class LabError(Exception):
    """Base class; the CLI turns any of these into exit code 1."""


class DimensionMismatchError(LabError):
    pass


class NonFiniteError(LabError):
    pass


class SingularMatrixError(LabError):
    """Pivot or singular value below the working-precision threshold."""


class ConvergenceError(LabError):
    """An iterative kernel stopped without meeting its residual target."""

    def __init__(self, msg, residual=float("nan")):
        super().__init__(msg)
        self.residual = residual


class PreconditionError(LabError):
    """Arguments are valid but an assumption (normality, invertibility) fails."""


class BranchCutError(LabError):
    """Principal logarithm requested for an eigenvalue on the negative real axis."""


class AmbiguousSpectrumError(LabError):
    """An eigenvalue sits on the boundary of a spectral region."""


class TwoScaleViolationError(LabError):
    """Compression window larger than half the ambient dimension."""


class ScheduleError(LabError):
    pass


class UnknownScenarioError(LabError):
    pass
