"""Exception hierarchy for the osserman package.

Every error derives from :class:`OssermanError` and optionally carries the
name of the pipeline stage that raised it, so callers (notably the CLI) can
report where a computation broke down.
"""


class OssermanError(Exception):
    """Base class for all package errors."""

    def __init__(self, message: str, *, stage: str | None = None):
        super().__init__(message)
        self.stage = stage


# --- numeric kernel -------------------------------------------------------

class NonSymmetric(OssermanError):
    """A matrix expected to be symmetric is not, beyond tolerance."""


class NonFinite(OssermanError):
    """NaN or Inf encountered where finite data is required."""


class AmbiguousClustering(OssermanError):
    """Eigenvalue clusters too close to separate at the requested tolerance."""


# --- shapes and domains ---------------------------------------------------

class ShapeMismatch(OssermanError):
    """Array has the wrong shape or length for the requested structure."""


class DimensionMismatch(OssermanError):
    """Operands live in different dimensions."""


class NotUnit(OssermanError):
    """A unit vector was required."""


class InvalidTensor(OssermanError):
    """Curvature-tensor symmetry validation failed."""


# --- Clifford systems -----------------------------------------------------

class ExceedsRadonBound(OssermanError):
    """Requested more anticommuting generators than the Radon number allows."""


class InvalidSystem(OssermanError):
    """Clifford system data violates its construction constraints."""


# --- recovery pipeline ----------------------------------------------------

class TieBreakNeeded(OssermanError):
    """Two Jacobi eigenvalues share the maximal multiplicity."""


class SpectrumMismatch(OssermanError):
    """Observed Jacobi spectrum disagrees with the expected eigenvalue table."""


class AlignmentFailed(OssermanError):
    """No gauge makes two Jacobi factors satisfy the cross-term identity."""


class GenericityExhausted(OssermanError):
    """Could not draw a basis passing the generic-position rank checks."""


class FrameInconsistent(OssermanError):
    """Assembled factor frame fails its pairwise consistency identities."""


class UnstableSubspace(OssermanError):
    """Sampled eigenspaces that should coincide do not."""


class GaugeFailed(OssermanError):
    """No admissible gauge normalizes the quadratic form at the chosen point."""


class PeelInconsistent(OssermanError):
    """Removing one eigenvalue block did not produce the expected remainder."""


class HypothesesViolated(OssermanError):
    """Input violates the dimension hypotheses required by the recovery."""


class ObstructionDetected(OssermanError):
    """Recovery forced past its hypotheses hit a persistent stage failure."""


class RecoveryFailed(OssermanError):
    """Recovery pipeline failure not covered by a more specific error."""
