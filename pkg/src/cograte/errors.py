"""Exception types raised across the package.

Every error is a subclass of :class:`CograteError` so callers can catch the
whole family at once (the CLI maps them onto exit codes).
"""


class CograteError(Exception):
    """Base class for all cograte errors."""


class ParseError(CograteError):
    """Channel spec document is malformed (bad JSON, wrong types)."""


class DimensionMismatch(CograteError):
    """Matrix shapes are inconsistent with the antenna counts."""


class NonPositivePower(CograteError):
    """A power budget is zero, negative or non-finite."""


class InvalidAlpha(CograteError):
    """Scaling parameter alpha is not a finite positive number."""


class NonPositiveDefinite(CograteError):
    """A matrix required to be positive definite has an eigenvalue <= tol."""


class SingularNoise(CograteError):
    """Noise covariance passed to the Monte-Carlo estimator is singular."""


class SingularSigmaZ(CograteError):
    """Coupled noise covariance lost strict positive definiteness."""


class InfeasibleAllocation(CograteError):
    """An allocation violates a PSD or trace constraint; the message names it."""


class SolverDiverged(CograteError):
    """An optimizer produced non-finite iterates (bad settings, never silent)."""


class BracketUnbounded(CograteError):
    """The scalar minimizer kept touching the bracket edge after widening."""


class OracleTooLarge(CograteError):
    """Brute-force oracle requested on a problem with too many free scalars."""


class ZeroChannel(CograteError):
    """Water-filling requested on an all-zero channel matrix."""


class UnsupportedMu(CograteError):
    """Operation requires mu >= 1 (broadcast-side checks)."""
