"""
Verdicts, criteria and modes.
"""
import enum
from typing import Set

__all__ = (
    "ViolationKind",
    "MembershipVerdict",
    "LinearProgramStatus",
    "SuccessCriterion",
    "SearchMode",
    "CheckStatus",
    "DichotomyBranch",
    "AuditVerdict",
)


class _ValuesMixin:
    @classmethod
    def values(cls) -> Set[str]:
        return {i.value for i in cls}  # type: ignore


class ViolationKind(_ValuesMixin, enum.Enum):
    """
    Kinds of `ConditionalDistribution` invariant violations.

    Attributes:
        NEGATIVE -- An entry is below zero.
        NORMALIZATION -- An `(a, b)` slice does not sum to one.
    """

    NEGATIVE = "negative"
    NORMALIZATION = "normalization"


class MembershipVerdict(_ValuesMixin, enum.Enum):
    """
    Result of a classical membership decision.

    Attributes:
        FEASIBLE -- Distribution lies in the convex hull of deterministic strategies.
        INFEASIBLE -- A separating witness exists.
    """

    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


class LinearProgramStatus(_ValuesMixin, enum.Enum):
    """
    Termination status of `SimplexSolver`.
    """

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class SuccessCriterion(_ValuesMixin, enum.Enum):
    """
    Random access code figure of merit.

    Attributes:
        WORST_CASE -- Minimum success probability over all `(a, b)`.
        AVERAGE -- Uniform mean success probability over all `(a, b)`.
    """

    WORST_CASE = "worst_case"
    AVERAGE = "average"


class SearchMode(_ValuesMixin, enum.Enum):
    """
    Efficiency assignment search mode.

    Attributes:
        VERTEX -- Every efficiency is 0 or 1.
        GRID -- Every efficiency is one of five evenly spaced levels.
    """

    VERTEX = "vertex"
    GRID = "grid"


class CheckStatus(_ValuesMixin, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"


class DichotomyBranch(_ValuesMixin, enum.Enum):
    """
    Which alternative of the two-dimensional click dichotomy a scenario satisfies.

    Attributes:
        MESSAGE_INDEPENDENT_OF_INPUT -- `P(A|a)` does not depend on `a`.
        CLICK_INDEPENDENT_OF_MESSAGE -- `Q(B!=NC|A,b)` does not depend on `A`.
    """

    MESSAGE_INDEPENDENT_OF_INPUT = "message_independent_of_input"
    CLICK_INDEPENDENT_OF_MESSAGE = "click_independent_of_message"


class AuditVerdict(_ValuesMixin, enum.Enum):
    """
    Overall verdict of `Auditor.audit`.
    """

    DL_ROBUST_NONCLASSICAL = "certified non-classical (DL-robust)"
    CLASSICALLY_EXPLAINABLE = "classically explainable"
    NONCLASSICAL_NOT_DL_ROBUST = (
        "non-classical, but click probability depends on Alice's input: no DL robustness"
    )
    OUT_OF_SCOPE_DIMENSION = (
        "DL robustness is only established for d=2: no robustness claim at this dimension"
    )
    MEMBERSHIP_UNDECIDED = "classical membership undecided: enumeration exceeds cap"
