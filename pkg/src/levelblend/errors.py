"""Exception types raised across the toolkit."""


class LevelBlendError(Exception):
    """Base class for all toolkit errors."""


class LevelFormatError(LevelBlendError):
    """Level text is empty or has ragged rows."""


class VocabularyError(LevelBlendError):
    """A tile character is not part of the game's vocabulary."""

    def __init__(self, char: str, row: int, col: int, game: str, source: str | None = None):
        self.char = char
        self.row = row
        self.col = col
        self.game = game
        self.source = source
        where = f"{source}: " if source else ""
        super().__init__(
            f"{where}unknown tile {char!r} for {game} at line {row + 1}, column {col + 1}"
        )


class ExtractionError(LevelBlendError):
    """Level dimensions do not tile into the game's segment size."""


class AnnotationError(LevelBlendError):
    """Malformed corpus, annotation sidecar, or level container entry."""


class ShapeError(LevelBlendError):
    """Array, segment, or label dimensions disagree with a model or net."""


class TrainingError(LevelBlendError):
    """Training could not proceed (empty corpus, non-finite loss)."""
