"""Exception types shared across the package."""


class WiretapHelpError(Exception):
    """Base class for all package errors."""


class ConfigError(WiretapHelpError):
    """Invalid run configuration (bad key, missing field, unparsable value)."""


class InfiniteCapacityError(WiretapHelpError):
    """A link capacity is requested for a zero-variance noise (capacity diverges)."""


class UnsupportedHelpError(WiretapHelpError):
    """The (channel, help) combination is outside the supported case table."""


class SingularCovarianceError(WiretapHelpError):
    """|r| = 1 makes the receiver/eavesdropper noise covariance singular."""


class PowerViolationError(WiretapHelpError):
    """A simulated block exceeded the average power budget beyond tolerance."""


class GridResolutionError(WiretapHelpError):
    """A discretization grid is too coarse: the refinement check did not stabilize."""


class CodebookSizeError(WiretapHelpError):
    """Requested codebook exceeds the desk-scale size guard."""
