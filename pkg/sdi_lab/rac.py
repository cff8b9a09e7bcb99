"""
Random access codes: task definition, figures of merit, classical optima and the
entropy bound.

An `n -> m` code gives Alice `n` bits packed little-endian into `a`, so bit `b` is
`(a >> b) & 1`. Bob must output that bit on request `b`.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from sdi_lab.classical_model import DeterministicStrategyPair, StrategyEnumeration
from sdi_lab.core import ConditionalDistribution, ScenarioDims
from sdi_lab.enums import SuccessCriterion
from sdi_lab.errors import DimensionMismatchError, DomainError, EnumerationTooLarge, ParseError
from sdi_lab.lab_types import Cell, CriterionStr, FloatArray, IntArray
from sdi_lab.lazy_logger import LazyLogger
from sdi_lab.simplex import SimplexSolver
from sdi_lab.utils import digits

__all__ = (
    "RACSpec",
    "SuccessReport",
    "ClassicalOptimum",
    "ClassicalOptimizer",
    "rac_dims",
    "success_table",
    "success_report",
    "brute_force_classical_optimum",
    "factorized_worst_case_search",
    "binary_entropy",
    "nayak_upper_bound",
)


@dataclass(frozen=True)
class RACSpec:
    """
    `n -> log2(message_dim)` random access code.

    ```python
    RACSpec.parse("3:log6")  # RACSpec(n=3, message_dim=6)
    RACSpec(2, 2).dims  # ScenarioDims(n_a=4, n_b=2, n_A=2, n_B=2)
    ```

    Arguments:
        n -- Number of Alice bits.
        message_dim -- Message alphabet size `d`.
    """

    n: int
    message_dim: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.message_dim < 1:
            raise DomainError(f"Invalid code {self.n}:{self.message_dim}")

    @property
    def m(self) -> float:
        return math.log2(self.message_dim)

    @property
    def dims(self) -> ScenarioDims:
        return ScenarioDims(2 ** self.n, self.n, self.message_dim, 2)

    @property
    def label(self) -> str:
        if self.message_dim & (self.message_dim - 1) == 0:
            return f"{self.n}->{int(self.m)}"
        return f"{self.n}->log{self.message_dim}"

    def target(self, a: int, b: int) -> int:
        return (a >> b) & 1

    def target_table(self) -> IntArray:
        """
        `f(a, b)` as an `(n_a, n_b)` array.
        """
        return digits(np.arange(2 ** self.n), 2, self.n)

    @classmethod
    def parse(cls, notation: str) -> "RACSpec":
        """
        Parse `n:m` with an integer `m` bits or `n:logK` for a `K`-valued message.

        Raises:
            ParseError -- If notation is malformed.
        """
        n_text, _, m_text = notation.strip().partition(":")
        try:
            n = int(n_text)
            if m_text.startswith("log"):
                return cls(n, int(m_text[3:]))
            return cls(n, 2 ** int(m_text))
        except (ValueError, DomainError) as e:
            raise ParseError(f"Invalid RAC notation {notation!r}: {e}", field="spec") from e

    def as_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "message_dim": self.message_dim, "label": self.label}


def rac_dims(spec: RACSpec) -> ScenarioDims:
    return spec.dims


@dataclass(frozen=True)
class SuccessReport:
    """
    Worst-case and average success of a distribution on a code.

    Arguments:
        worst_case -- `min_{a,b} P(B=a_b|a,b)`.
        average -- Uniform mean of the same entries.
        argmin -- Lexicographically first `(a, b)` attaining the worst case.
    """

    worst_case: float
    average: float
    argmin: Cell

    def as_dict(self) -> Dict[str, Any]:
        return {"worst_case": self.worst_case, "average": self.average, "argmin": list(self.argmin)}


def success_table(p: ConditionalDistribution, spec: RACSpec) -> FloatArray:
    """
    `P(B=a_b|a,b)` as an `(n_a, n_b)` array.

    Raises:
        DimensionMismatchError -- If `p` does not fit the code.
    """
    if not p.dims.same_observables(spec.dims):
        raise DimensionMismatchError(
            f"Distribution does not fit a {spec.label} code",
            {"dims": p.dims.as_dict(), "expected": spec.dims.as_dict()},
        )
    targets = spec.target_table()
    return np.take_along_axis(p.entries, targets[None], axis=0)[0]


def success_report(p: ConditionalDistribution, spec: RACSpec) -> SuccessReport:
    table = success_table(p, spec)
    flat_index = int(np.argmin(table))
    a, b = divmod(flat_index, table.shape[1])
    return SuccessReport(float(table.min()), float(table.mean()), (a, b))


@dataclass(frozen=True, eq=False)
class ClassicalOptimum:
    """
    Classical optima of a code at message dimension `d`.

    Arguments:
        spec -- Code.
        d -- Message dimension.
        criterion -- Figure of merit.
        vertex_value -- Best deterministic pair.
        optimal_pairs -- Every deterministic pair attaining `vertex_value`.
        hull_value -- Best convex mixture of pairs, shared randomness allowed.
        factorized_value -- Best model found without shared randomness, a lower bound.
    """

    spec: RACSpec
    d: int
    criterion: SuccessCriterion
    vertex_value: float
    optimal_pairs: Tuple[DeterministicStrategyPair, ...]
    hull_value: float
    factorized_value: Optional[float] = None

    @property
    def value(self) -> float:
        return self.vertex_value

    def as_dict(self, max_pairs: int = 16) -> Dict[str, Any]:
        return {
            "spec": self.spec.as_dict(),
            "d": self.d,
            "criterion": self.criterion.value,
            "vertex_value": self.vertex_value,
            "hull_value": self.hull_value,
            "factorized_value": self.factorized_value,
            "optimal_pair_count": len(self.optimal_pairs),
            "optimal_pairs": [pair.as_dict() for pair in self.optimal_pairs[:max_pairs]],
        }


class ClassicalOptimizer(LazyLogger):
    """
    Brute-force classical optima of random access codes.

    Arguments:
        enumeration_cap -- Maximum number of deterministic pairs or grid decoders.
        solver -- `SimplexSolver` instance.
        logger -- `logging.Logger` instance.
    """

    ENUMERATION_CAP = 10 ** 7
    DECODER_LEVELS: Tuple[float, ...] = (0.0, 0.5, 1.0)
    VALUE_TOLERANCE = 1e-12

    def __init__(
        self,
        enumeration_cap: Optional[int] = None,
        solver: Optional[SimplexSolver] = None,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self._lazy_logger = logger
        self.enumeration_cap = enumeration_cap or self.ENUMERATION_CAP
        self.solver = solver or SimplexSolver(logger=logger)

    @staticmethod
    def _score(success: FloatArray, criterion: SuccessCriterion) -> FloatArray:
        if criterion is SuccessCriterion.WORST_CASE:
            return success.min(axis=(-2, -1))
        return success.mean(axis=(-2, -1))

    def hull_value(self, success: FloatArray, criterion: SuccessCriterion) -> float:
        """
        Maximize the criterion over convex mixtures of success tables.

        Arguments:
            success -- Array `[k, a, b]` of vertex success tables.
            criterion -- Figure of merit.
        """
        tables = np.unique(success.reshape(success.shape[0], -1), axis=0)
        count, cells = tables.shape
        if criterion is SuccessCriterion.AVERAGE:
            result = self.solver.minimize(
                -tables.mean(axis=1), np.ones((1, count)), np.ones(1)
            )
            return float(-result.objective)

        # variables: weights, level t, one slack per cell
        A_eq = np.zeros((cells + 1, count + 1 + cells))
        A_eq[:cells, :count] = tables.T
        A_eq[:cells, count] = -1.0
        A_eq[:cells, count + 1 :] = -np.eye(cells)
        A_eq[cells, :count] = 1.0
        b_eq = np.zeros(cells + 1)
        b_eq[cells] = 1.0
        c = np.zeros(count + 1 + cells)
        c[count] = -1.0
        result = self.solver.minimize(c, A_eq, b_eq)
        self._logger.debug(f"Hull program over {count} tables: {result.status.value}")
        return float(-result.objective)

    def optimum(
        self,
        spec: RACSpec,
        d: int,
        criterion: SuccessCriterion = SuccessCriterion.WORST_CASE,
        factorized: bool = True,
    ) -> ClassicalOptimum:
        """
        Vertex, hull and factorized optima of `spec` at dimension `d`.

        Raises:
            EnumerationTooLarge -- If pairs or grid decoders exceed the cap.
        """
        enumeration = StrategyEnumeration(spec.dims, d, self.enumeration_cap)
        success = (enumeration.outputs() == spec.target_table()[None]).astype(float)
        scores = self._score(success, criterion)
        vertex_value = float(scores.max())
        optimal = np.flatnonzero(scores >= vertex_value - self.VALUE_TOLERANCE)
        self._logger.debug(
            f"{spec.label} at d={d}: {enumeration.count} pairs, {optimal.size} optimal"
        )

        hull_value = self.hull_value(success, criterion)
        factorized_value: Optional[float] = None
        if factorized:
            if criterion is SuccessCriterion.AVERAGE:
                factorized_value = vertex_value
            else:
                factorized_value = self.factorized_worst_case(spec, d)

        return ClassicalOptimum(
            spec=spec,
            d=d,
            criterion=criterion,
            vertex_value=vertex_value,
            optimal_pairs=tuple(enumeration.pair(index) for index in optimal),
            hull_value=hull_value,
            factorized_value=factorized_value,
        )

    @staticmethod
    def _best_binary_encoder(success: FloatArray) -> FloatArray:
        # success[..., A, b] for A in {0, 1}; encoder x = P(A=0|a)
        slopes = success[..., 0, :] - success[..., 1, :]
        intercepts = success[..., 1, :]
        candidates = [np.zeros(slopes.shape[:-1]), np.ones(slopes.shape[:-1])]
        for b, other in itertools.combinations(range(slopes.shape[-1]), 2):
            denominator = slopes[..., b] - slopes[..., other]
            with np.errstate(divide="ignore", invalid="ignore"):
                crossing = (intercepts[..., other] - intercepts[..., b]) / denominator
            valid = (np.abs(denominator) > 1e-15) & (crossing >= 0.0) & (crossing <= 1.0)
            candidates.append(np.where(valid, crossing, 0.0))

        points = np.stack(candidates)[..., None]
        values = (intercepts[None] + slopes[None] * points).min(axis=-1)
        return values.max(axis=0)

    def _best_encoder(self, success: FloatArray) -> float:
        # success[A, b]; maximize min_b sum_A x_A success[A, b] over the simplex
        d, n_b = success.shape
        A_eq = np.zeros((n_b + 1, d + 1 + n_b))
        A_eq[:n_b, :d] = success.T
        A_eq[:n_b, d] = -1.0
        A_eq[:n_b, d + 1 :] = -np.eye(n_b)
        A_eq[n_b, :d] = 1.0
        b_eq = np.zeros(n_b + 1)
        b_eq[n_b] = 1.0
        c = np.zeros(d + 1 + n_b)
        c[d] = -1.0
        return float(-self.solver.minimize(c, A_eq, b_eq).objective)

    def factorized_worst_case(
        self, spec: RACSpec, d: int, levels: Optional[Sequence[float]] = None
    ) -> float:
        """
        Lower bound on the worst-case success without shared randomness.

        Decoders `P(B=1|A,b)` range over a grid, encoder rows are optimized
        exactly per input for each decoder.

        Raises:
            EnumerationTooLarge -- If the decoder grid exceeds the cap.
        """
        grid_levels = np.asarray(self.DECODER_LEVELS if levels is None else levels, dtype=float)
        width = d * spec.n
        count = len(grid_levels) ** width
        if count * spec.dims.n_a > self.enumeration_cap:
            raise EnumerationTooLarge(
                f"{count} grid decoders exceed the cap of {self.enumeration_cap}",
                {"decoders": count, "cap": self.enumeration_cap},
            )

        ones = grid_levels[digits(np.arange(count), len(grid_levels), width, little_endian=False)]
        ones = ones.reshape(count, d, spec.n)
        targets = spec.target_table()
        # success[g, a, A, b] = P(B=a_b|A,b)
        success = np.where(
            targets[None, :, None, :] == 1, ones[:, None, :, :], 1.0 - ones[:, None, :, :]
        )

        if d == 1:
            per_input = success[:, :, 0, :].min(axis=-1)
        elif d == 2:
            per_input = self._best_binary_encoder(success)
        else:
            per_input = np.array(
                [
                    [self._best_encoder(success[g, a]) for a in range(success.shape[1])]
                    for g in range(count)
                ]
            )
        return float(per_input.min(axis=1).max())


def brute_force_classical_optimum(
    spec: RACSpec,
    d: int,
    criterion: Union[SuccessCriterion, CriterionStr] = SuccessCriterion.WORST_CASE,
    factorized: bool = True,
) -> ClassicalOptimum:
    """
    Shortcut for `ClassicalOptimizer().optimum(spec, d, criterion)`.

    ```python
    optimum = brute_force_classical_optimum(RACSpec(2, 2), 2, "average")
    optimum.vertex_value  # 0.75
    ```
    """
    optimizer = ClassicalOptimizer()
    return optimizer.optimum(spec, d, SuccessCriterion(criterion), factorized=factorized)


def factorized_worst_case_search(spec: RACSpec, d: int) -> float:
    return ClassicalOptimizer().factorized_worst_case(spec, d)


def binary_entropy(x: float) -> float:
    """
    Shannon binary entropy in bits, `0 log 0 = 0`.

    Raises:
        DomainError -- If `x` is outside `[0, 1]`.
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"Binary entropy is defined on [0, 1], got {x}")
    if x in (0.0, 1.0):
        return 0.0
    return float(-x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x))


def nayak_upper_bound(n: float, m: float) -> float:
    """
    Largest worst-case success allowed by `(1 - h(p)) n <= m`.

    Bisects `h(p) = 1 - m/n` on `[1/2, 1]` until the interval stops shrinking.

    ```python
    nayak_upper_bound(3, math.log2(6))  # 0.98093...
    ```

    Raises:
        DomainError -- If `n` or `m` is not positive.
    """
    if n <= 0 or m <= 0:
        raise DomainError(f"Bound needs positive n and m, got n={n}, m={m}")
    if m >= n:
        return 1.0

    target = 1.0 - m / n
    low, high = 0.5, 1.0
    while True:
        middle = (low + high) / 2.0
        if middle in (low, high):
            break
        if binary_entropy(middle) > target:
            low = middle
        else:
            high = middle

    return min((low, high), key=lambda p: abs(binary_entropy(p) - target))
