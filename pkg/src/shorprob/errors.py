"""Exception types shared across the package."""


class ShorProbError(Exception):
    """Base class for all errors raised by shorprob."""


class InvalidInput(ShorProbError, ValueError):
    pass


class NotAUnit(ShorProbError, ValueError):
    """Raised when an order is requested for a residue not coprime to N."""

    def __init__(self, a: int, n: int, g: int):
        super().__init__(f"{a} is not a unit modulo {n} (gcd = {g})")
        self.a = a
        self.n = n
        self.gcd = g


class UnsupportedCase(ShorProbError, ValueError):
    pass


class ResourceLimit(ShorProbError):
    pass
