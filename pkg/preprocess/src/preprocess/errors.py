class PreprocessError(Exception):
    exit_code = 1


class InputError(PreprocessError):
    """Unreadable or malformed inputs."""

    exit_code = 2


class DataError(PreprocessError):
    """Inputs readable but unusable (e.g. no face found in any frame)."""

    exit_code = 3
