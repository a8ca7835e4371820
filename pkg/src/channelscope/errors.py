"""Exception types shared across the package.

The CLI maps these onto process exit codes; see ``channelscope.cli``.
"""


class ChannelscopeError(Exception):
    """Base class for all package errors."""


class DomainError(ChannelscopeError, ValueError):
    """An argument is outside its documented domain."""


class ConfigError(ChannelscopeError):
    """A run configuration is invalid (unknown keys, bad values, bad paths)."""


class RenderError(ChannelscopeError):
    """Mark geometry cannot be rendered inside the canvas."""


class ManifestError(ChannelscopeError):
    """A stimulus manifest is missing, malformed, or inconsistent."""


class BackendError(ChannelscopeError):
    """An embedding backend failed or returned an invalid response."""


class CacheError(ChannelscopeError):
    """An embedding cache entry is unreadable or corrupt."""


class DegenerateSweepError(ChannelscopeError):
    """A sweep produced embeddings with (near-)zero total variance.

    Raised instead of reporting a score: zero variance means a broken
    backend or an all-identical stimulus set, and a silent 0.0 or 1.0
    would poison channel rankings.
    """


class UnsupportedDesignError(ChannelscopeError):
    """The requested experiment design is not supported (e.g. factorial Area)."""
