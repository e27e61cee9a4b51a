"""Exception hierarchy.

Every error carries the process exit code the CLI should use for it:
1 usage/configuration, 2 data, 3 provider, 4 internal.
"""

from __future__ import annotations


class TmcleanError(Exception):
    exit_code = 4


class ConfigError(TmcleanError):
    exit_code = 1


class DataError(TmcleanError):
    exit_code = 2


class ProviderError(TmcleanError):
    exit_code = 3


# -- ingestion ---------------------------------------------------------------


class RowError(DataError):
    """A data error tied to one line of an input file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedRow(RowError):
    pass


class EmptySegment(RowError):
    pass


class BadLabel(RowError):
    pass


class XmlError(DataError):
    pass


class MissingVariant(RowError):
    pass


class DegenerateSplit(DataError):
    pass


# -- metrics -----------------------------------------------------------------


class BothEmpty(DataError, ValueError):
    pass


class EmptyReference(DataError, ValueError):
    pass


class EmptyTarget(DataError, ValueError):
    pass


# -- providers ---------------------------------------------------------------


class ProviderUnavailable(ProviderError):
    pass


class UnsupportedPair(ProviderError):
    pass


class ProviderTimeout(ProviderError):
    pass


class UnsupportedLanguage(ProviderError):
    pass


class DuplicateFineTag(DataError):
    pass


class UnknownUniversalTag(DataError):
    pass


class FeatureExtractionError(TmcleanError):
    """A feature could not be computed for one unit.

    Wraps the underlying error and keeps its exit code.
    """

    def __init__(self, unit_id: str, feature: str, cause: Exception):
        self.unit_id = unit_id
        self.feature = feature
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 4)
        super().__init__(f"unit {unit_id!r}, feature {feature!r}: {cause}")


# -- classifiers / evaluation ------------------------------------------------


class SingleClass(DataError):
    pass


class SchemaMismatch(DataError):
    pass


class LengthMismatch(DataError, ValueError):
    pass


class ModelFileError(DataError):
    pass


class VersionMismatch(ModelFileError):
    pass


class CorruptModel(ModelFileError):
    pass


class TaskMismatch(DataError):
    pass
