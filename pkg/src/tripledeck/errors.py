"""Exception types shared across the package."""


class TripleDeckError(Exception):
    """Base class."""


class ConfigurationError(TripleDeckError, ValueError):
    """Invalid grid, parameters or configuration file."""


class BlowUpError(TripleDeckError):
    """Non-finite values appeared in the state."""


class RadiusExhaustedError(TripleDeckError):
    """The analyticity radius reached zero."""


class CorruptCheckpointError(TripleDeckError):
    """Checkpoint magic, length or CRC did not validate."""


class CertificationError(TripleDeckError):
    """No admissible certified time horizon exists for the given data."""
