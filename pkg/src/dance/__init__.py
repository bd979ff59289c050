"""Disentangled concept-bottleneck engine for explainable video action recognition."""

from .concepts import ConceptSpace
from .errors import (
    ConfigError,
    DanceError,
    DegenerateSequence,
    EmptyConceptSet,
    FormatError,
    InputTooShort,
    IoError,
    UnsupportedDtype,
    ValidationError,
)
from .manifest import DatasetManifest, PoseSequence, VideoRecord, load_manifest
from .model import DanceModel
from .tensorio import read_tensor, write_tensor

__all__ = [
    "ConceptSpace",
    "ConfigError",
    "DanceError",
    "DanceModel",
    "DatasetManifest",
    "DegenerateSequence",
    "EmptyConceptSet",
    "FormatError",
    "InputTooShort",
    "IoError",
    "PoseSequence",
    "UnsupportedDtype",
    "ValidationError",
    "VideoRecord",
    "load_manifest",
    "read_tensor",
    "write_tensor",
]

__version__ = "0.1.0"
