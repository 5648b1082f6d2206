"""Exception hierarchy shared by all modules."""


class FincspError(Exception):
    """Base class for every error raised by this package."""


class ParseError(FincspError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SignatureMismatch(FincspError):
    pass


class DuplicateSymbol(FincspError):
    pass


class BadTable(FincspError):
    pass


class NotClosed(FincspError):
    def __init__(self, symbol, args):
        self.symbol = symbol
        self.arguments = tuple(args)
        super().__init__(f"{symbol}{self.arguments} leaves the subset")


class NotACongruence(FincspError):
    def __init__(self, symbol, left, right):
        self.symbol = symbol
        self.left = tuple(left)
        self.right = tuple(right)
        super().__init__(
            f"{symbol} maps related tuples {self.left} and {self.right} to unrelated values"
        )


class UnknownSymbol(FincspError):
    pass


class ArityMismatch(FincspError):
    pass


class BudgetExceeded(FincspError):
    pass


class TraceTooLarge(FincspError):
    pass


class NotFound(FincspError):
    pass


class PreconditionViolated(FincspError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class TargetNotSemilattice(FincspError):
    pass


class TargetNotGroup(FincspError):
    pass


class InvalidCertificate(FincspError):
    pass


class NotSimple(FincspError):
    pass


class WrongSize(FincspError):
    pass


class WrongDomain(FincspError):
    pass


class SpecInvalid(FincspError):
    pass


class CompatibilityIdentitiesNotEnforced(FincspError):
    pass


class ShapeMismatch(FincspError):
    pass
