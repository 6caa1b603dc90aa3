"""Exception hierarchy and resource limits shared by all modules."""

from dataclasses import dataclass


class SolvArithError(Exception):
    """Base class for every error raised by solvarith."""


class ResourceError(SolvArithError):
    """A configurable cap was exceeded or the input is outside the supported regime."""


class UnsupportedDegree(ResourceError):
    pass


class FactorIncomplete(ResourceError):
    pass


class FactorizationCapExceeded(ResourceError):
    pass


class OrderCapExceeded(ResourceError):
    pass


class OrbitCapExceeded(ResourceError):
    pass


class ResourceExhausted(ResourceError):
    pass


class NotAUnit(SolvArithError):
    pass


class NonIntegralGrowth(SolvArithError):
    pass


class NotSolvable(SolvArithError):
    pass


class SplitVerificationFailed(SolvArithError):
    pass


class NotNilpotent(SolvArithError):
    pass


class NotUnipotent(SolvArithError):
    pass


class BadPrime(SolvArithError):
    pass


class NotIntegral(SolvArithError):
    pass


class ParseError(SolvArithError):
    pass


@dataclass(frozen=True)
class Limits:
    """Caps for the expensive searches.  Exceeding one raises a ResourceError."""

    order_cap: int = 10**6
    orbit_cap: int = 10**6
    trial_division_bound: int = 10**6
    pell_period_cap: int = 10**5
    power_search_cap: int = 10**5
    prime: int | None = None


DEFAULT_LIMITS = Limits()
