"""Exception hierarchy shared across the package.

The split matters for the CLI exit codes: input problems (bad files,
unparseable content) map to exit 1, violated structural invariants to
exit 2, anything unexpected to exit 3.
"""


class LaughlineError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(LaughlineError):
    """Irrecoverably malformed input file (subtitles, JSON-lines)."""


class SchemaError(LaughlineError):
    """A serialized document violates the unified show schema.

    The message names the offending path, e.g. ``timeline[3].laugh_events[0].confidence``.
    """


class StructuralError(LaughlineError):
    """A precondition or invariant of an operation does not hold
    (overlapping blocks, unsorted events, degenerate spans, ...)."""
