"""Exception hierarchy shared across the package.

Every error raised deliberately by this package derives from
:class:`EventLensError`, so callers (and the CLI) can distinguish
data/model failures from programming errors.
"""

from __future__ import annotations


class EventLensError(Exception):
    """Base class for all errors raised by eventlens."""


class ProviderError(EventLensError):
    """The remote quote provider is unreachable or returned an error payload."""


class CacheError(EventLensError):
    """A cache file could not be written."""


class DataFormatError(EventLensError):
    """A payload or CSV document does not match the expected wire format."""


class BarInvariantError(DataFormatError):
    """A daily bar violates OHLC ordering or positivity rules."""


class PanelError(EventLensError):
    """Panel construction, slicing, or column lookup failed."""


class StatsError(EventLensError):
    """Correlation inputs are too short, mismatched, or constant."""


class FitError(EventLensError):
    """The regression design is unusable or prediction inputs are missing."""


class MetricError(EventLensError):
    """Error-metric inputs are empty, mismatched, or contain zero denominators."""


class ConfigError(EventLensError):
    """A configuration document or scenario setup is inconsistent."""
