"""
Finite alphabets, probability tables and validation primitives.

Every conditional distribution in `sdi_lab` is a `(n_B, n_a, n_b)` array indexed as
`entries[B, a, b] = P(B|a,b)`. Every click table is a `(n_a, n_b)` array indexed as
`entries[a, b] = Q(B!=NC|a,b)`.
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from sdi_lab.enums import ViolationKind
from sdi_lab.errors import DimensionMismatchError, DomainError
from sdi_lab.lab_types import FloatArray

__all__ = (
    "DEFAULT_TOLERANCE",
    "ScenarioDims",
    "ConditionalDistribution",
    "ClickTable",
    "Violation",
    "validate_distribution",
    "total_variation_distance",
    "frozen_array",
)

DEFAULT_TOLERANCE = 1e-9


def frozen_array(values: Any, shape: Optional[Tuple[int, ...]] = None) -> FloatArray:
    """
    Copy `values` into a read-only float array.

    Arguments:
        values -- Array-like input.
        shape -- Expected shape, checked when given.

    Raises:
        DimensionMismatchError -- If shape does not match.
    """
    result = np.array(values, dtype=float)
    if shape is not None and result.shape != tuple(shape):
        raise DimensionMismatchError(
            f"Expected array of shape {tuple(shape)}, got {result.shape}",
            {"expected": list(shape), "actual": list(result.shape)},
        )
    result.setflags(write=False)
    return result


@dataclass(frozen=True)
class ScenarioDims:
    """
    Alphabet sizes of a prepare-and-measure scenario.

    Arguments:
        n_a -- Number of Alice inputs.
        n_b -- Number of Bob inputs.
        n_A -- Message alphabet size, the dimension `d` of a classical message.
        n_B -- Number of Bob outputs.
    """

    n_a: int
    n_b: int
    n_A: int
    n_B: int

    def __post_init__(self) -> None:
        for name in ("n_a", "n_b", "n_A", "n_B"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise DomainError(f"ScenarioDims.{name} must be a positive integer, got {value}")

    @property
    def distribution_shape(self) -> Tuple[int, int, int]:
        return (self.n_B, self.n_a, self.n_b)

    @property
    def click_shape(self) -> Tuple[int, int]:
        return (self.n_a, self.n_b)

    def with_message_dim(self, n_A: int) -> "ScenarioDims":
        return ScenarioDims(self.n_a, self.n_b, n_A, self.n_B)

    def same_observables(self, other: "ScenarioDims") -> bool:
        """
        Whether two dims agree on every alphabet the parties observe.
        Message size is internal to the boxes and is ignored.
        """
        return (self.n_a, self.n_b, self.n_B) == (other.n_a, other.n_b, other.n_B)

    def as_dict(self) -> Dict[str, int]:
        return {"n_a": self.n_a, "n_b": self.n_b, "n_A": self.n_A, "n_B": self.n_B}


@dataclass(frozen=True)
class ConditionalDistribution:
    """
    Table `P(B|a,b)`.

    Construction only checks the shape, use `validate_distribution` to check
    positivity and normalization.

    Arguments:
        dims -- Scenario alphabets.
        entries -- Array of shape `(n_B, n_a, n_b)`.
    """

    dims: ScenarioDims
    entries: FloatArray

    def __post_init__(self) -> None:
        entries = frozen_array(self.entries, self.dims.distribution_shape)
        object.__setattr__(self, "entries", entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConditionalDistribution):
            return NotImplemented
        return self.dims == other.dims and bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash((self.dims, self.entries.tobytes()))

    @classmethod
    def uniform(cls, dims: ScenarioDims) -> "ConditionalDistribution":
        return cls(dims, np.full(dims.distribution_shape, 1.0 / dims.n_B))

    def probability(self, B: int, a: int, b: int) -> float:
        return float(self.entries[B, a, b])

    def as_dict(self) -> Dict[str, Any]:
        return {"dims": self.dims.as_dict(), "entries": self.entries.tolist()}


@dataclass(frozen=True)
class ClickTable:
    """
    Table `Q(B!=NC|a,b)` of click probabilities given the inputs.

    Arguments:
        dims -- Scenario alphabets.
        entries -- Array of shape `(n_a, n_b)`.
    """

    dims: ScenarioDims
    entries: FloatArray

    def __post_init__(self) -> None:
        entries = frozen_array(self.entries, self.dims.click_shape)
        if np.any(entries < -DEFAULT_TOLERANCE) or np.any(entries > 1 + DEFAULT_TOLERANCE):
            raise DomainError("Click probabilities must be in [0, 1]", entries.tolist())
        object.__setattr__(self, "entries", entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClickTable):
            return NotImplemented
        return self.dims == other.dims and bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash((self.dims, self.entries.tobytes()))

    @classmethod
    def ones(cls, dims: ScenarioDims) -> "ClickTable":
        return cls(dims, np.ones(dims.click_shape))

    def as_dict(self) -> Dict[str, Any]:
        return {"dims": self.dims.as_dict(), "entries": self.entries.tolist()}


@dataclass(frozen=True)
class Violation:
    """
    One invariant violation found by `validate_distribution`.

    Arguments:
        kind -- Violation kind.
        a -- Alice input of the offending slice.
        b -- Bob input of the offending slice.
        magnitude -- How far the value is from the allowed range.
        B -- Offending outcome for negativity violations.
    """

    kind: ViolationKind
    a: int
    b: int
    magnitude: float
    B: Optional[int] = None

    def __str__(self) -> str:
        if self.kind is ViolationKind.NEGATIVE:
            return f"P(B={self.B}|a={self.a},b={self.b}) is negative by {self.magnitude:.3g}"
        return f"slice a={self.a},b={self.b} is off normalization by {self.magnitude:.3g}"


def validate_distribution(
    table: ConditionalDistribution, tol: float = DEFAULT_TOLERANCE
) -> List[Violation]:
    """
    Check positivity and normalization of `table`. Never raises.

    ```python
    validate_distribution(ConditionalDistribution.uniform(dims))  # []
    ```

    Arguments:
        table -- Distribution to check.
        tol -- Allowed deviation.

    Returns:
        A list of violations, empty if every invariant holds.
    """
    result: List[Violation] = []
    entries = table.entries
    for B, a, b in zip(*np.nonzero(entries < -tol)):
        result.append(
            Violation(ViolationKind.NEGATIVE, int(a), int(b), float(-entries[B, a, b]), int(B))
        )

    deviations = np.abs(entries.sum(axis=0) - 1.0)
    for a, b in zip(*np.nonzero(deviations > tol)):
        result.append(
            Violation(ViolationKind.NORMALIZATION, int(a), int(b), float(deviations[a, b]))
        )

    return result


def total_variation_distance(p: ConditionalDistribution, q: ConditionalDistribution) -> float:
    """
    Worst-cell total variation distance `max_{a,b} 1/2 sum_B |p - q|`.

    Arguments:
        p -- First distribution.
        q -- Second distribution.

    Raises:
        DimensionMismatchError -- If observable alphabets differ.
    """
    if not p.dims.same_observables(q.dims):
        raise DimensionMismatchError(
            "Cannot compare distributions over different alphabets",
            {"p": p.dims.as_dict(), "q": q.dims.as_dict()},
        )
    return float(np.max(0.5 * np.abs(p.entries - q.entries).sum(axis=0)))
