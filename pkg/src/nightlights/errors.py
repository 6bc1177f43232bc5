"""Exception types shared across the toolkit.

The command line maps any :class:`NightlightsError` to exit code 1; usage
errors (bad flags) exit 2 via argparse.
"""


class NightlightsError(Exception):
    """Base class for domain errors raised by this package."""


class GridFormatError(NightlightsError):
    """Malformed grid text; the message names the offending line."""


class DimensionMismatchError(NightlightsError):
    """Rasters, masks or vectors of incompatible shape were mixed."""


class DegenerateDataError(NightlightsError):
    """Too few samples, or zero variance, for a requested fit."""
