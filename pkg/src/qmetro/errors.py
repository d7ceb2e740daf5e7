"""Exception hierarchy shared by every qmetro module."""


class QmetroError(Exception):
    """Base class for all qmetro failures."""


class ShapeError(QmetroError, ValueError):
    """Array dimensions do not match what an operation needs."""


class NotHermitianError(QmetroError, ValueError):
    pass


class NotDensityMatrixError(QmetroError, ValueError):
    pass


class IncompletePovmError(QmetroError, ValueError):
    pass


class NumericalError(QmetroError, ArithmeticError):
    """A computation produced a result that violates its own contract."""


class SingularFisherError(NumericalError):
    """An outcome has vanishing probability but non-vanishing slope.

    The classical Fisher information diverges at such a point.
    """


class LpError(NumericalError):
    """The linear program was infeasible, unbounded or malformed."""


class ScenarioError(QmetroError, ValueError):
    """A scenario file is missing a field or has an invalid value."""
