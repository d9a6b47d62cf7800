"""Exception types shared across the toolkit."""


class ObkitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(ObkitError):
    """Malformed input document (scene file, manifest, scribble doc, ...)."""


class DimensionMismatchError(ObkitError):
    """Rasters that must share dimensions do not."""


class NotThinError(ObkitError):
    """A binary map expected to be thin contains a 2x2 all-ones block."""


class DegenerateTriangleError(ObkitError):
    """Mesh face with zero area."""


class InvalidCameraError(ObkitError):
    """Camera parameters violate the pinhole invariants."""


class MissingInputError(ObkitError):
    """A predictor was invoked without a required input channel."""


class ExternalFailureError(ObkitError):
    """External predictor process failed, timed out, or wrote bad output."""


class MissingFileError(ObkitError):
    """A manifest references a file that does not exist."""


class ChecksumMismatchError(ObkitError):
    """A manifest checksum does not match the file on disk."""


class NoPairsError(ObkitError):
    """Import found no image/mask pairs."""


class EmptyDatasetError(ObkitError):
    """Evaluation invoked on an empty collection of PR curves."""


class IOErrorWithPath(ObkitError):
    """I/O failure carrying the offending path."""

    def __init__(self, path, message: str):
        super().__init__(f"{message}: {path}")
        self.path = path
