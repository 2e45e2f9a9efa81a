"""Exception types shared across the toolkit."""


class VerselexError(Exception):
    """Base class for all toolkit errors."""


class ParseError(VerselexError):
    """A corpus/annotation/verdict file failed to parse.

    Carries the offending path and 1-based line number so the CLI can
    point the user at the exact row.
    """

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class DuplicateKeyError(ParseError):
    """Two rows claim the same (translation, verse) or (verse, position) slot."""


class ValidationError(VerselexError):
    """A parsed value violates a domain invariant (bad enum, noun without morphology)."""


class ClassificationError(VerselexError):
    """Script-structure detection was asked to classify without any extractions."""


class SynthSpecError(VerselexError):
    """A synthetic-corpus spec is internally inconsistent."""


class ReportError(VerselexError):
    """An evaluation report was requested on an empty verdict set."""


class ConfigError(VerselexError):
    """A CLI/config value is missing, unreadable, or out of range."""
