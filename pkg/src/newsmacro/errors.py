"""Exception types shared across the package."""


class NewsmacroError(Exception):
    """Base class for all errors raised by this package."""


class MalformedRow(NewsmacroError):
    """A record line has the wrong number of columns."""

    def __init__(self, message: str, column: int | None = None,
                 byte_offset: int | None = None):
        super().__init__(message)
        self.column = column
        self.byte_offset = byte_offset


class MalformedField(NewsmacroError):
    """A column violates its sub-format grammar."""

    def __init__(self, message: str, column: int | None = None,
                 byte_offset: int | None = None):
        super().__init__(message)
        self.column = column
        self.byte_offset = byte_offset


class DegenerateTraining(NewsmacroError):
    """Training data does not contain both classes."""


class InsufficientData(NewsmacroError):
    """Too few observations for the requested estimation."""


class MissingPrediction(NewsmacroError):
    """A keyword-passing record has no relevance prediction."""


class DuplicateRecordId(NewsmacroError):
    """A prediction file lists the same record id twice."""


class MalformedPredictionFile(NewsmacroError):
    """A prediction file violates the `record_id,probability` contract."""


class EmptyMonth(NewsmacroError):
    """Monthly aggregation was asked to summarise zero records."""


class InsufficientHistory(NewsmacroError):
    """Fewer months than the panel construction needs."""


class MissingMonth(NewsmacroError):
    """A monthly series has a gap inside the requested range."""


class NonNumeric(NewsmacroError):
    """A numeric CSV cell could not be parsed as a finite number."""


class SingularDesign(NewsmacroError):
    """A regression design matrix is rank deficient."""


class RankDeficiency(NewsmacroError):
    """PLS ran out of signal before extracting the requested components."""


class ZeroVarianceLoss(NewsmacroError):
    """All loss differentials are identical; the DM statistic is undefined."""


class DomainError(NewsmacroError):
    """An input lies outside its mathematically valid domain."""


class UnknownEmotion(NewsmacroError):
    """An emotion label is not one of the seven recognised groups."""


class DuplicateScore(NewsmacroError):
    """An emotion map lists the same score name twice."""


class DimensionMismatch(NewsmacroError):
    """Vector/matrix shapes do not agree."""


class MissingArtifact(NewsmacroError):
    """A pipeline stage needs an artifact that has not been produced."""

    def __init__(self, path):
        super().__init__(f"missing artifact: {path}")
        self.path = str(path)


class OutputDirLocked(NewsmacroError):
    """Another run owns the output directory."""
