"""Exception types raised across the package."""


class AglerError(Exception):
    """Base class for domain failures (CLI exit code 1)."""


class DimensionError(AglerError, ValueError):
    """Arguments disagree on the number of variables or vector length."""


class NotPSDError(AglerError, ValueError):
    def __init__(self, eigenvalue: float, threshold: float):
        self.eigenvalue = eigenvalue
        self.threshold = threshold
        super().__init__(
            f"not PSD: eigenvalue {eigenvalue:.3e} below -{threshold:.3e}"
        )


class NotIsometricError(AglerError, ValueError):
    """The polarized sums-of-squares identity fails, so no isometry exists."""


class DegenerateInputError(AglerError, ValueError):
    pass


class SingularityError(AglerError, ArithmeticError):
    """A matrix that must be inverted is numerically singular."""


class FaceNotFactorableError(AglerError, ValueError):
    pass


class UnsupportedDegreeError(AglerError, ValueError):
    pass
