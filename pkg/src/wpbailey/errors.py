"""Exception types shared by the exact and numeric backends."""


class SingularSeries(ZeroDivisionError):
    """Raised when inverting a series that is zero through its window."""


class PoleDetected(SingularSeries):
    """A denominator factor vanishes exactly for the chosen parameters."""

    def __init__(self, factor, context=""):
        self.factor = factor
        msg = f"denominator factor {factor} vanishes"
        if context:
            msg = f"{msg} ({context})"
        super().__init__(msg)


class PoleProximity(ArithmeticError):
    """A numeric denominator factor is closer to zero than ``pole_tol``."""

    def __init__(self, factor, distance):
        self.factor = factor
        self.distance = distance
        super().__init__(f"factor {factor} is within {distance:.3g} of zero")


class NonConvergent(ArithmeticError):
    """An infinite sum did not settle within ``max_terms`` terms."""


class WindowExceedsOrder(IndexError):
    """Requested coefficients lie at or beyond the truncation order."""


class UnknownPair(KeyError):
    pass


class UnknownIdentity(KeyError):
    pass


class UnknownSeries(KeyError):
    pass
