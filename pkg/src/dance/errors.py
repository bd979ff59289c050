"""Exception types shared across the engine."""


class DanceError(Exception):
    """Base class for all engine errors."""


class FormatError(DanceError):
    """A binary artifact is malformed (bad magic, truncated payload, ...)."""


class UnsupportedDtype(DanceError):
    """A tensor file declares a dtype code this engine does not support."""


class IoError(DanceError):
    """A referenced file or directory is missing or unreadable."""


class ValidationError(DanceError):
    """Loaded data violates a structural invariant."""


class ConfigError(DanceError):
    """Invalid configuration or hyperparameter value."""


class InputTooShort(DanceError):
    """An input has fewer elements than the operation requires."""


class DegenerateSequence(DanceError):
    """A pose sequence cannot be normalized (zero bounding-box diagonal)."""


class EmptyConceptSet(DanceError):
    """Concept filtering removed every candidate."""
