"""
Errors raised by `sdi_lab`.

Every error carries a human readable `message` and optional JSON-serializable `data`,
and declares the exit code the command line front end uses for it.
"""
from typing import Any

from sdi_lab import json_tools

__all__ = (
    "SDILabError",
    "DimensionMismatchError",
    "IndexOutOfRangeError",
    "DomainError",
    "InvalidScenarioError",
    "ZeroClickProbability",
    "EnumerationTooLarge",
    "SolverStall",
    "SearchSpaceTooLarge",
    "EmptyCell",
    "ParseError",
)


class SDILabError(Exception):
    """
    Main error for `sdi_lab`.

    Arguments:
        message -- Error message.
        data -- Addition JSON-serializeable data.
    """

    exit_code: int = 3

    def __init__(self, message: str, data: Any = None) -> None:
        super().__init__(message)
        self.message = message
        self.data = data

    def __str__(self) -> str:
        if self.data is not None:
            return f"{self.message} data={json_tools.dumps(self.data)}"
        return self.message


class DimensionMismatchError(SDILabError):
    """
    Tables or boxes with incompatible alphabet sizes were combined.
    """


class IndexOutOfRangeError(SDILabError):
    """
    An alphabet index is outside of `0..n-1`.
    """


class DomainError(SDILabError):
    """
    A scalar argument is outside of its domain, e.g. a probability above 1.
    """


class InvalidScenarioError(SDILabError):
    """
    A box or model violates its stochasticity invariants.
    """


class ZeroClickProbability(SDILabError):
    """
    Post-selection denominator is zero for some input cell.
    """


class EnumerationTooLarge(SDILabError):
    """
    Deterministic strategy enumeration exceeds the configured cap.
    """

    exit_code = 4


class SolverStall(SDILabError):
    """
    Simplex iteration cap exceeded.
    """


class SearchSpaceTooLarge(SDILabError):
    """
    Efficiency assignment search exceeds the configured limits.
    """

    exit_code = 4


class EmptyCell(SDILabError):
    """
    An `(a, b)` cell of an event log has no clicked rounds.
    """

    exit_code = 4


class ParseError(SDILabError):
    """
    Input file cannot be parsed.

    Arguments:
        message -- Error message.
        line -- 1-based line number, if known.
        field -- Dotted path of the offending field, if known.
    """

    exit_code = 2

    def __init__(self, message: str, line: int = 0, field: str = "") -> None:
        data = {}
        if line:
            data["line"] = line
        if field:
            data["field"] = field
        super().__init__(message, data or None)
        self.line = line
        self.field = field
