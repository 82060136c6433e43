"""
Exception hierarchy for pwrot.

Every error a library operation can raise on valid-but-unsuitable input derives
from PwrotError, so callers (and the CLI) can separate domain failures from
programming errors.
"""
from __future__ import annotations

from typing import Any, List, Optional


class PwrotError(Exception):
    """Base class for all pwrot domain errors."""


class DegenerateMapError(PwrotError):
    """C0 == C1 or alpha is a multiple of 2*pi."""


class PrecisionExhaustedError(PwrotError):
    """A decimal continued fraction ran out of trustworthy digits."""

    def __init__(self, message: str, trusted_depth: int, partial: Any = None):
        super().__init__(message)
        self.trusted_depth = trusted_depth
        self.partial = partial


class NotFoundWithinDepthError(PwrotError):
    """No convergent in the table satisfies the selection inequality."""


class RationalAngleError(PwrotError):
    """Operation needs an irrational rotation number."""


class BijectiveMapError(PwrotError):
    """Operation needs a non-bijective map (|delta| above tolerance)."""


class UnsupportedAngleError(PwrotError):
    """Angle outside the supported family (odd q, q <= 2, irrational...)."""


class PreconditionViolatedError(PwrotError):
    """Input outside the region where an estimate is stated."""


class ResonantLengthError(PwrotError):
    """exp(i*n*alpha) == 1 for the word length n."""


class WeightExhaustedError(PwrotError):
    """Perturbation too large: the guaranteed island weight is not positive."""

    def __init__(self, message: str, w_eps: float):
        super().__init__(message)
        self.w_eps = w_eps


class InsideCoreError(PwrotError):
    """Point inside B(0, q*|||T|||) where the cone partition does not apply."""


class NonConvergentError(PwrotError):
    """Translation labels along a probe segment are not ordered as expected."""


class WrongSignError(PwrotError):
    """Operation is only meaningful for the other sign of delta."""


class CertificateFailedError(PwrotError):
    """A divergence or attraction certificate found offending samples."""

    def __init__(self, message: str, report: Any = None, offending: Optional[List[int]] = None):
        super().__init__(message)
        self.report = report
        self.offending = offending or []
