"""Exception hierarchy shared by all pcadyn modules."""


class PcaError(Exception):
    """Base class for every error raised by pcadyn."""


class ArityError(PcaError, ValueError):
    pass


class DegreeCapExceeded(PcaError):
    pass


class ZeroDivisorError(PcaError, ZeroDivisionError):
    pass


class NotHomogeneousError(PcaError, ValueError):
    pass


class MixedDegreeError(PcaError, ValueError):
    pass


class DegenerateMapError(PcaError):
    """The map has a common projective zero or is otherwise degenerate.

    ``witness`` holds a point where every component vanishes, when known.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PcaRefused(PcaError):
    """A supplied component list does not certify post-critical algebraicity.

    This is a refusal, never a claim that the map is not PCA: the list may
    merely be incomplete.  ``reason`` is one of ``"uncovered-critical"``,
    ``"unmapped-component"``, ``"ambiguous-image"`` or ``"invalid-component"``.
    """

    def __init__(self, reason, message, subject=None):
        super().__init__(message)
        self.reason = reason
        self.subject = subject


class EliminationError(PcaError):
    pass


class SolverError(PcaError):
    pass


class NotFixedError(PcaError, ValueError):
    pass


class TangentSplitError(PcaError):
    pass


class BranchError(PcaError):
    """Newton-Puiseux failure; ``prefix`` carries the unresolved expansion."""

    def __init__(self, message, prefix=None):
        super().__init__(message)
        self.prefix = prefix


class NotInvariantError(PcaError):
    pass


class RelationPreconditionError(PcaError):
    pass


class LiftError(PcaError):
    pass


class SpecParseError(PcaError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc += ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column
        self.bare_message = message
