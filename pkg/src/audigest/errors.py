"""Exception types shared across the toolkit."""


class AudigestError(Exception):
    """Base class for all toolkit errors."""


class DecodeError(AudigestError):
    """Audio file could not be read or uses an unsupported encoding."""


class DegenerateModelError(AudigestError):
    """A Gaussian model could not be estimated (singular covariance)."""


class IllConditionedError(AudigestError):
    """Covariance too ill-conditioned for a trustworthy divergence."""


class ConvergenceError(AudigestError):
    """An iterative solver failed to converge or hit a degenerate chain."""


class SummarizeError(AudigestError):
    """A summarization stage failed; message names the stage."""
