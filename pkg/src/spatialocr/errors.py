"""Exception hierarchy shared by every stage of the pipeline."""


class SpatialOcrError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(SpatialOcrError, ValueError):
    """A parameter is outside its documented domain."""


class EmptyGlyphError(SpatialOcrError, ValueError):
    """The glyph raster contains no on-pixels."""


class PnmFormatError(SpatialOcrError, ValueError):
    """A PNM stream is malformed or uses an unsupported variant."""


class CorpusError(SpatialOcrError):
    """A manifest or one of its samples could not be loaded.

    ``problems`` holds one human-readable diagnostic per failing sample.
    """

    def __init__(self, message, problems=()):
        super().__init__(message)
        self.problems = list(problems)


class TrainingError(SpatialOcrError):
    """Training failed; ``pair`` names the offending class pair if known."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class ModelFormatError(SpatialOcrError, ValueError):
    """A model file could not be parsed.

    ``offset`` is the byte offset at which parsing stopped, when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class VersionMismatchError(ModelFormatError):
    """The document declares a format version this build cannot read."""
