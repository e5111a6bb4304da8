"""Exception hierarchy shared across the package."""

import numpy as np


class GgmIdError(Exception):
    """Base class for every error raised by ggmid."""


class InvalidIndex(GgmIdError, IndexError):
    pass


class InvalidConditioningSet(GgmIdError, ValueError):
    """A queried node also appears in the conditioning set."""


class SingularConditioningSet(GgmIdError, np.linalg.LinAlgError):
    """The conditioning block is singular or too ill-conditioned to invert."""


class NotPositiveDefinite(GgmIdError, np.linalg.LinAlgError):
    pass


class InsufficientSamples(GgmIdError, ValueError):
    """The conditioning set is at least as large as the sample count."""


class InvalidSpec(GgmIdError, ValueError):
    """A model specification is inconsistent with its family."""
