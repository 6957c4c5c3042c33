"""Domain errors with machine-readable codes.

Every failure mode that callers are expected to branch on gets its own
subclass of TorusDynError.  The ``code`` attribute is stable and is what
the CLI (exit status 3) and the HTTP service (422 body) report.
"""

from __future__ import annotations


class TorusDynError(Exception):
    """Base class for domain errors.  ``code`` is stable across releases."""

    code = "DomainError"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class NonVanishingViolation(TorusDynError):
    code = "NonVanishingViolation"


class AliasingSuspected(TorusDynError):
    code = "AliasingSuspected"


class NonzeroWinding(TorusDynError):
    code = "NonzeroWinding"


class NonzeroMean(TorusDynError):
    code = "NonzeroMean"


class SmallDivisorBreakdown(TorusDynError):
    code = "SmallDivisorBreakdown"


class VanishingLambda(TorusDynError):
    code = "VanishingLambda"


class ShapeMismatch(TorusDynError):
    code = "ShapeMismatch"


class NotInvariant(TorusDynError):
    code = "NotInvariant"


class DerivativeVanishesOnCurve(TorusDynError):
    code = "DerivativeVanishesOnCurve"


class NonInvertibleFiber(TorusDynError):
    code = "NonInvertibleFiber"


class NoConvergence(TorusDynError):
    code = "NoConvergence"


class NonContinuousCriticalSet(TorusDynError):
    code = "NonContinuousCriticalSet"


class PositiveLyapunov(TorusDynError):
    code = "PositiveLyapunov"


class KoenigsStall(TorusDynError):
    code = "KoenigsStall"


class OutsideTube(TorusDynError):
    code = "OutsideTube"


class NewtonFail(TorusDynError):
    code = "NewtonFail"


class OutOfDisk(TorusDynError):
    code = "OutOfDisk"


class LoopLeavesDomain(TorusDynError):
    code = "LoopLeavesDomain"


class LeftHyperbolicRegion(TorusDynError):
    code = "LeftHyperbolicRegion"


class EmptySet(TorusDynError):
    code = "EmptySet"


class BadDescriptor(TorusDynError):
    code = "BadDescriptor"
