"""
Certification from the parties' point of view.

The parties see post-selected statistics and click frequencies. They can check
that clicks do not depend on Alice's input and test classical membership. The
click condition on the hidden message is only available in diagnostics mode,
when the full scenario is known.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np

from sdi_lab.classical_model import ClassicalMembership, MembershipResult
from sdi_lab.core import ClickTable, ConditionalDistribution, ScenarioDims
from sdi_lab.enums import AuditVerdict, CheckStatus, DichotomyBranch
from sdi_lab.errors import EmptyCell, EnumerationTooLarge, IndexOutOfRangeError
from sdi_lab.lab_types import FloatArray, IntArray
from sdi_lab.lazy_logger import LazyLogger
from sdi_lab.scenario import DLScenario, effective_preparation, message_click_table
from sdi_lab.sentinel import NO_CLICK, SentinelValue

__all__ = (
    "EventLog",
    "CellCounts",
    "ConditionCheck",
    "AuditReport",
    "Auditor",
    "sample_event_log",
    "cell_counts",
    "estimate_from_log",
    "check_prop2_condition",
    "check_prop1_condition",
    "prop2_dichotomy",
    "estimated_tolerance",
    "audit",
)

Outcome = Union[int, SentinelValue]

_NC_CODE = -1


@dataclass(frozen=True, eq=False)
class EventLog:
    """
    Recorded rounds `(a, b, outcome)`, where outcome is `B` or `NO_CLICK`.

    ```python
    log = EventLog.from_rounds([(0, 1, 1), (1, 0, NO_CLICK)])
    list(log)  # [(0, 1, 1), (1, 0, NO_CLICK)]
    ```
    """

    a: IntArray
    b: IntArray
    outcome: IntArray

    def __post_init__(self) -> None:
        for name in ("a", "b", "outcome"):
            values = np.array(getattr(self, name), dtype=np.int64).ravel()
            values.setflags(write=False)
            object.__setattr__(self, name, values)
        if not self.a.shape == self.b.shape == self.outcome.shape:
            raise IndexOutOfRangeError("Event log columns have different lengths")
        if np.any(self.a < 0) or np.any(self.b < 0) or np.any(self.outcome < _NC_CODE):
            raise IndexOutOfRangeError("Event log has negative indices")

    @classmethod
    def from_rounds(cls, rounds: Iterable[Tuple[int, int, Outcome]]) -> "EventLog":
        a: List[int] = []
        b: List[int] = []
        outcome: List[int] = []
        for round_a, round_b, round_outcome in rounds:
            a.append(round_a)
            b.append(round_b)
            outcome.append(_NC_CODE if round_outcome is NO_CLICK else int(round_outcome))
        return cls(np.array(a), np.array(b), np.array(outcome))

    def __len__(self) -> int:
        return int(self.a.shape[0])

    def __iter__(self) -> Iterator[Tuple[int, int, Outcome]]:
        for a, b, outcome in zip(self.a, self.b, self.outcome):
            yield int(a), int(b), NO_CLICK if outcome == _NC_CODE else int(outcome)

    @property
    def clicked(self) -> np.ndarray:
        return self.outcome != _NC_CODE

    def infer_dims(self, d: int) -> ScenarioDims:
        """
        Smallest alphabets covering every recorded index, with message size `d`.
        """
        n_a = int(self.a.max()) + 1 if len(self) else 1
        n_b = int(self.b.max()) + 1 if len(self) else 1
        n_B = max(int(self.outcome.max()) + 1, 1) if len(self) else 1
        return ScenarioDims(n_a, n_b, d, n_B)


def _sample_categorical(rng: np.random.Generator, probabilities: FloatArray) -> IntArray:
    # one draw per row
    cumulative = probabilities.cumsum(axis=1)
    draws = rng.random(probabilities.shape[0])[:, None]
    return np.minimum((draws >= cumulative).sum(axis=1), probabilities.shape[1] - 1)


def sample_event_log(
    s: DLScenario, rounds: int, rng: np.random.Generator, alice_clicks: bool = True
) -> EventLog:
    """
    Exact Monte-Carlo sampling of a scenario with uniform inputs.

    A round is logged as `NO_CLICK` when Bob's detector does not click, or when
    `alice_clicks` is set and Alice's box rejects the round.

    Arguments:
        s -- Scenario.
        rounds -- Number of rounds.
        rng -- Random generator.
        alice_clicks -- Apply Alice's efficiencies.
    """
    dims = s.dims
    a = rng.integers(dims.n_a, size=rounds)
    b = rng.integers(dims.n_b, size=rounds)

    j = rng.choice(s.prep.strategy_count, size=rounds, p=s.prep.priors)
    alice_ok = rng.random(rounds) < s.prep.efficiencies[j, a]
    A = _sample_categorical(rng, s.prep.encoders[j, a])

    i = rng.choice(s.meas.strategy_count, size=rounds, p=s.meas.priors)
    bob_ok = rng.random(rounds) < s.meas.efficiencies[i, A, b]
    B = _sample_categorical(rng, s.meas.decoders[i, A, b])

    clicked = bob_ok & alice_ok if alice_clicks else bob_ok
    return EventLog(a, b, np.where(clicked, B, _NC_CODE))


@dataclass(frozen=True, eq=False)
class CellCounts:
    """
    Per-cell counters of an event log.

    Arguments:
        rounds -- `[a, b]` number of rounds.
        clicks -- `[a, b]` number of clicked rounds.
        outcomes -- `[B, a, b]` number of clicked rounds with outcome `B`.
    """

    rounds: IntArray
    clicks: IntArray
    outcomes: IntArray


def cell_counts(log: EventLog, dims: ScenarioDims) -> CellCounts:
    """
    Count rounds per cell in one pass.

    Raises:
        IndexOutOfRangeError -- If a round does not fit `dims`.
    """
    if len(log) and (
        log.a.max() >= dims.n_a or log.b.max() >= dims.n_b or log.outcome.max() >= dims.n_B
    ):
        raise IndexOutOfRangeError(
            "Event log has indices outside the scenario alphabets", dims.as_dict()
        )
    rounds = np.zeros(dims.click_shape, dtype=np.int64)
    np.add.at(rounds, (log.a, log.b), 1)
    clicked = log.clicked
    outcomes = np.zeros(dims.distribution_shape, dtype=np.int64)
    np.add.at(outcomes, (log.outcome[clicked], log.a[clicked], log.b[clicked]), 1)
    return CellCounts(rounds, outcomes.sum(axis=0), outcomes)


def estimate_from_log(
    log: EventLog, dims: ScenarioDims
) -> Tuple[ConditionalDistribution, ClickTable]:
    """
    Post-selected frequencies and click rates.

    Raises:
        EmptyCell -- If some `(a, b)` cell has no click.
    """
    counts = cell_counts(log, dims)
    empty = np.argwhere(counts.clicks == 0)
    if empty.size:
        a, b = (int(index) for index in empty[0])
        raise EmptyCell(f"No clicked round for a={a}, b={b}", {"a": a, "b": b})
    distribution = ConditionalDistribution(dims, counts.outcomes / counts.clicks[None])
    clicks = ClickTable(dims, counts.clicks / counts.rounds)
    return distribution, clicks


@dataclass(frozen=True)
class ConditionCheck:
    """
    Outcome of a click-independence check.

    Arguments:
        status -- `PASS` or `FAIL`.
        deviation -- Largest spread of click probabilities within one setting `b`.
        tolerance -- Allowed spread.
    """

    status: CheckStatus
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    def as_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
        }


def _spread_check(table: FloatArray, tol: float) -> ConditionCheck:
    # table[x, b]; spread over x for each b
    deviation = float(np.max(table.max(axis=0) - table.min(axis=0)))
    status = CheckStatus.PASS if deviation <= tol else CheckStatus.FAIL
    return ConditionCheck(status, deviation, tol)


def check_prop2_condition(q: ClickTable, tol: float = 1e-6) -> ConditionCheck:
    """
    Whether `Q(B!=NC|a,b)` is independent of `a` for every `b`.
    """
    return _spread_check(q.entries, tol)


def check_prop1_condition(s: DLScenario, tol: float = 1e-6) -> ConditionCheck:
    """
    Whether `Q(B!=NC|A,b)` is independent of the message `A` for every `b`.
    Needs the full scenario.
    """
    return _spread_check(message_click_table(s), tol)


def prop2_dichotomy(s: DLScenario, tol: float = 1e-6) -> Optional[DichotomyBranch]:
    """
    Which alternative explains an input-independent click rate.

    Returns:
        `MESSAGE_INDEPENDENT_OF_INPUT` if Alice's effective encoder ignores `a`,
        `CLICK_INDEPENDENT_OF_MESSAGE` if Bob's clicks ignore `A`, `None` otherwise.
    """
    encoder = effective_preparation(s.prep).encoders[0]
    if float(np.max(encoder.max(axis=0) - encoder.min(axis=0))) <= tol:
        return DichotomyBranch.MESSAGE_INDEPENDENT_OF_INPUT
    if check_prop1_condition(s, tol).passed:
        return DichotomyBranch.CLICK_INDEPENDENT_OF_MESSAGE
    return None


def estimated_tolerance(
    q: ClickTable, rounds: IntArray, standard_errors: float = 3.0, floor: float = 1e-6
) -> float:
    """
    Statistical allowance for comparing estimated click rates within one setting.

    The spread of two independent cell estimates has a standard error of at most
    `sqrt(2)` times the largest cell standard error `sqrt(Q (1 - Q) / rounds)`.
    """
    counts = np.maximum(np.asarray(rounds, dtype=float), 1.0)
    errors = np.sqrt(q.entries * (1.0 - q.entries) / counts)
    return max(floor, float(standard_errors * np.sqrt(2.0) * errors.max()))


@dataclass(frozen=True, eq=False)
class AuditReport:
    """
    Result of `Auditor.audit`.

    Arguments:
        d -- Tested message dimension.
        distribution -- Post-selected statistics.
        clicks -- Click rates per `(a, b)`.
        prop2_condition -- Input independence of clicks.
        membership -- Classical membership at dimension `d`, `None` if undecided.
        verdict -- Overall verdict.
        membership_note -- Why membership is undecided.
        prop1_condition -- Message independence of clicks, diagnostics mode only.
    """

    d: int
    distribution: ConditionalDistribution
    clicks: ClickTable
    prop2_condition: ConditionCheck
    membership: Optional[MembershipResult]
    verdict: AuditVerdict
    membership_note: str = ""
    prop1_condition: Optional[ConditionCheck] = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "distribution": self.distribution.as_dict(),
            "clicks": self.clicks.as_dict(),
            "prop2_condition": self.prop2_condition.as_dict(),
            "membership": None if self.membership is None else self.membership.as_dict(),
            "membership_note": self.membership_note,
            "prop1_condition": (
                None if self.prop1_condition is None else self.prop1_condition.as_dict()
            ),
            "verdict": self.verdict.value,
        }


class Auditor(LazyLogger):
    """
    Combine the click condition and classical membership into a verdict.

    Robustness against detection loss is only claimed for a two-dimensional
    message with input-independent click rates.

    ```python
    auditor = Auditor()
    report = auditor.audit(quantum_statistics(qrac2_protocol()), ClickTable.ones(dims), d=2)
    report.verdict  # AuditVerdict.DL_ROBUST_NONCLASSICAL
    ```

    Arguments:
        membership -- `ClassicalMembership` instance.
        logger -- `logging.Logger` instance.
    """

    CONDITION_TOLERANCE = 1e-6
    STANDARD_ERRORS = 3
    ROBUST_DIMENSION = 2

    def __init__(
        self,
        membership: Optional[ClassicalMembership] = None,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self._lazy_logger = logger
        self.membership = membership or ClassicalMembership(logger=logger)

    def _verdict(
        self, d: int, membership: Optional[MembershipResult], condition: ConditionCheck
    ) -> AuditVerdict:
        if membership is not None and membership.is_feasible:
            return AuditVerdict.CLASSICALLY_EXPLAINABLE
        if d != self.ROBUST_DIMENSION:
            return AuditVerdict.OUT_OF_SCOPE_DIMENSION
        if membership is None:
            return AuditVerdict.MEMBERSHIP_UNDECIDED
        if not condition.passed:
            return AuditVerdict.NONCLASSICAL_NOT_DL_ROBUST
        return AuditVerdict.DL_ROBUST_NONCLASSICAL

    def audit(
        self,
        p: ConditionalDistribution,
        q: ClickTable,
        d: int,
        tol: Optional[float] = None,
        scenario: Optional[DLScenario] = None,
    ) -> AuditReport:
        """
        Audit observed statistics.

        Arguments:
            p -- Post-selected statistics.
            q -- Click rates.
            d -- Message dimension.
            tol -- Click condition tolerance.
            scenario -- Full scenario, enables the message click check.

        Raises:
            SolverStall -- If the membership program stalls.
        """
        tol = self.CONDITION_TOLERANCE if tol is None else tol
        condition = check_prop2_condition(q, tol)
        self._logger.debug(
            f"Click condition {condition.status.value}, spread {condition.deviation:.3g}"
        )

        membership: Optional[MembershipResult] = None
        note = ""
        try:
            membership = self.membership.decide(p, d)
        except EnumerationTooLarge as e:
            note = e.message
            self._logger.warning(f"Membership undecided: {note}")

        prop1 = None if scenario is None else check_prop1_condition(scenario, tol)
        verdict = self._verdict(d, membership, condition)
        self._logger.info(f"Audit verdict at d={d}: {verdict.value}")
        return AuditReport(
            d=d,
            distribution=p,
            clicks=q,
            prop2_condition=condition,
            membership=membership,
            verdict=verdict,
            membership_note=note,
            prop1_condition=prop1,
        )

    def audit_log(
        self,
        log: EventLog,
        d: int,
        dims: Optional[ScenarioDims] = None,
        tol: Optional[float] = None,
    ) -> AuditReport:
        """
        Audit an event log. Without an explicit `tol` the click tolerance is
        estimated from the per-cell round counts.

        Raises:
            EmptyCell -- If some cell has no click.
        """
        dims = dims or log.infer_dims(d)
        p, q = estimate_from_log(log, dims)
        if tol is None:
            tol = estimated_tolerance(
                q, cell_counts(log, dims).rounds, self.STANDARD_ERRORS, self.CONDITION_TOLERANCE
            )
        return self.audit(p, q, d, tol)


def audit(
    p: ConditionalDistribution, q: ClickTable, d: int, tol: float = Auditor.CONDITION_TOLERANCE
) -> AuditReport:
    return Auditor().audit(p, q, d, tol)
