"""Exception hierarchy shared by every module of the package.

Errors split into two families that the CLI maps to distinct exit codes:
``DomainError`` (the input is outside what the theory covers, e.g. a
degenerate Hessian) and ``UndecidableAtOrder`` (the truncation order is too
low to decide a branch).
"""


class AffSurfError(Exception):
    """Base class for all package errors."""


class DomainError(AffSurfError):
    """Input lies outside the domain of an operation."""


# scalar
class DivisionByZero(DomainError, ZeroDivisionError):
    pass


class TowerDepthExceeded(DomainError):
    pass


class NotInField(DomainError):
    """A requested root does not exist in the current exact field."""


class ScalarParseError(DomainError, ValueError):
    pass


# series
class OrderMismatch(DomainError, ValueError):
    pass


class ConstantTermNonzero(DomainError, ValueError):
    pass


class SeriesFormatError(DomainError, ValueError):
    pass


# expr
class ExprSyntaxError(DomainError, SyntaxError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownFunction(DomainError):
    pass


class NotAnalyticAtOrigin(DomainError):
    pass


class PoleAtOrigin(DomainError):
    pass


class NotExactlyEvaluable(DomainError):
    """A transcendental constant appeared while expanding in exact mode."""


# regraph / normal form
class SingularMatrix(DomainError):
    pass


class NotPrenormalized(DomainError):
    pass


class DegenerateHessian(DomainError):
    """Hessian rank < 2 at the basepoint (parabolic surfaces are not covered)."""


class BadPosition(DomainError):
    pass


class NonGenericPoint(DomainError):
    """A relative invariant vanishes at the point without vanishing identically."""


class UndecidableAtOrder(AffSurfError):
    """A branch decision needs jet coefficients beyond the available order."""


class DenominatorZero(DomainError):
    pass


# jets / recurrence / homogeneity / symmetry
class NotDependent(DomainError):
    pass


class UnsupportedBranch(DomainError):
    pass


class InconsistentSystem(DomainError):
    pass


class AmbiguousMatch(DomainError):
    def __init__(self, matches):
        super().__init__(f"ambiguous model match: {matches}")
        self.matches = matches


class NoMatch(DomainError):
    pass


class DegenerateFrame(DomainError):
    pass
