"""Exception hierarchy shared by the library and the CLI.

The CLI maps exception classes to exit codes: 2 for malformed inputs,
3 for data problems (single-class labels, missing regions, too few
samples), 4 for model-file problems.
"""


class DefakeHopError(Exception):
    exit_code = 1


class InputError(DefakeHopError):
    """Malformed manifest/config/arguments or unreadable input files."""

    exit_code = 2


class DataError(DefakeHopError):
    """The inputs parse but cannot be trained/evaluated on."""

    exit_code = 3


class ModelError(DefakeHopError):
    """Model container problems: bad magic, version, checksum, truncation."""

    exit_code = 4


class DimensionError(DataError):
    """Array shape incompatible with the requested operation."""


class InsufficientDataError(DataError):
    """Fewer samples than the operation requires."""


class UndefinedMetricError(DataError):
    """Metric undefined for the given inputs (e.g. single-class AUC)."""
