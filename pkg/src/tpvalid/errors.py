"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class TpError(Exception):
    """Base class for every error raised by this package."""


class ParseError(TpError):
    """Malformed input text (purpose DSL or test-case table)."""

    def __init__(self, message: str, line: int = 0, col: int = 0, expected: tuple[str, ...] = ()):
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        where = f"{line}:{col}: " if line else ""
        hint = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{message}{hint}")


class SemanticError(TpError):
    """Input is syntactically fine but violates a structural rule."""


class CycleError(TpError, ValueError):
    """Order edges would close a cycle."""


class ConsistencyError(TpError):
    """Internal guard: a constructed pomset broke an invariant it must satisfy."""


class VerdictConflictError(SemanticError):
    """Two behaviours share a complete observable trace but disagree on the verdict."""


class NotInLanguage(TpError, KeyError):
    """A trace is not a member of the observable language."""

    def __str__(self) -> str:
        return Exception.__str__(self)


class AmbiguityError(TpError):
    """A trace is a linearization of more than one observable pomset."""


class ResourceLimitError(TpError):
    """An enumeration exceeded its configured cap."""


class TestCaseError(ParseError):
    __test__ = False


class DuplicateEntryError(TestCaseError):
    pass


class EntryAfterVerdictError(TestCaseError):
    pass


class NotWellFormed(SemanticError):
    """Operation requires a well-formed test purpose."""


class PreconditionError(TpError):
    pass
