"""Exception hierarchy shared by every stage."""

from __future__ import annotations


class SentmicError(Exception):
    """Base class. ``stage`` is filled in by the pipeline when it re-raises."""

    stage: str | None = None

    def __str__(self) -> str:
        msg = super().__str__()
        if self.stage:
            return f"[{self.stage}] {msg}"
        return msg


class EmptyInput(SentmicError):
    pass


class MalformedRow(SentmicError):
    def __init__(self, line: int, reason: str = "", source: str | None = None):
        self.line = line
        self.reason = reason
        self.source = source
        where = f"{source}:{line}" if source else f"line {line}"
        super().__init__(f"malformed row at {where}: {reason}" if reason else f"malformed row at {where}")


class InvariantViolation(SentmicError):
    def __init__(self, date, which: str, source: str | None = None, line: int | None = None):
        self.date = date
        self.which = which
        where = f"{source}:{line}: " if source and line else (f"{source}: " if source else "")
        super().__init__(f"{where}{date}: {which}")


class DegenerateRange(SentmicError):
    pass


class InsufficientOverlap(SentmicError):
    pass


class BadProbabilityRow(SentmicError):
    def __init__(self, line: int, reason: str = "", source: str | None = None):
        self.line = line
        where = f"{source}:{line}" if source else f"line {line}"
        super().__init__(f"bad probability row at {where}: {reason}")


class DuplicatePostId(SentmicError):
    def __init__(self, post_id: str, source: str | None = None):
        self.post_id = post_id
        super().__init__(f"duplicate post_id {post_id!r}" + (f" in {source}" if source else ""))


class EmptyLexicon(SentmicError):
    pass


class LengthMismatch(SentmicError):
    pass


class DegenerateAxis(SentmicError):
    pass


class TooLarge(SentmicError):
    pass


class IoFailure(SentmicError):
    def __init__(self, path, reason: str = ""):
        self.path = path
        super().__init__(f"I/O failure on {path}: {reason}")


class ConfigError(SentmicError):
    pass


class InvalidPoints(SentmicError, ValueError):
    pass


class MissingScore(SentmicError):
    def __init__(self, post_id: str):
        self.post_id = post_id
        super().__init__(f"no probabilities for post_id {post_id!r}")
