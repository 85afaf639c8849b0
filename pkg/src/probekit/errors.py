"""Exception types shared across the pipeline."""


class ProbekitError(Exception):
    """Base class for all pipeline errors."""


class IngestError(ProbekitError):
    """Fatal problem reading or validating seed input files."""


class ConfigError(ProbekitError):
    """Invalid configuration, pattern file, or scenario file."""


class SchemaError(ProbekitError):
    """A line-delimited record file violates its schema."""


class StageError(ProbekitError):
    """A pipeline stage cannot run (missing inputs, bad state)."""


class InsufficientKeywordsError(ProbekitError):
    """Not enough keywords available to sample a query of the requested size."""
