"""
Detection-loophole attacks on random access codes.

An attack keeps encoders and decoders fixed and chooses Bob's efficiencies
`eta_i(A,b)` so that post-selection raises the observed success.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from sdi_lab.enums import CheckStatus, SearchMode
from sdi_lab.errors import (
    IndexOutOfRangeError,
    InvalidScenarioError,
    SearchSpaceTooLarge,
    ZeroClickProbability,
)
from sdi_lab.lab_types import FloatArray, SearchModeStr
from sdi_lab.lazy_logger import LazyLogger
from sdi_lab.rac import RACSpec, success_report, success_table
from sdi_lab.report_table import ReportTable
from sdi_lab.scenario import (
    DLScenario,
    MeasurementBox,
    PreparationBox,
    effective_preparation,
    simulate_dl,
    simulate_ideal,
)
from sdi_lab.utils import chunk_ranges, digits, pluralize

__all__ = (
    "AttackScenario",
    "SearchResult",
    "EfficiencySearch",
    "VerificationReport",
    "attack_3tolog6",
    "filter_strategy",
    "filter_success",
    "analytic_bound",
    "dl_worst_case_search",
    "random_premise_scenario",
    "verify_proposition3",
)


@dataclass(frozen=True, eq=False)
class AttackScenario:
    """
    Scenario evaluated on a random access code.

    Raises:
        InvalidScenarioError -- If the scenario alphabets do not fit the code.
    """

    base: DLScenario
    spec: RACSpec
    description: str = ""

    def __post_init__(self) -> None:
        if not self.base.dims.same_observables(self.spec.dims):
            raise InvalidScenarioError(
                f"Scenario does not fit a {self.spec.label} code",
                {"dims": self.base.dims.as_dict(), "expected": self.spec.dims.as_dict()},
            )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "base": self.base.as_dict(),
            "spec": self.spec.as_dict(),
            "description": self.description,
        }


def attack_3tolog6() -> AttackScenario:
    """
    Alice sends one of her three bits, picked uniformly, together with its position.
    Bob clicks only when the position matches his setting and outputs the bit.

    The message packs the bit `A0` and the position `A1` as `A = A0 + 2 * A1`.
    """
    spec = RACSpec(3, 6)
    dims = spec.dims
    encoder = np.zeros((dims.n_a, dims.n_A))
    for a in range(dims.n_a):
        for position in range(3):
            encoder[a, spec.target(a, position) + 2 * position] += 1.0 / 3.0

    decoder = np.zeros((dims.n_A, dims.n_b, dims.n_B))
    efficiency = np.zeros((dims.n_A, dims.n_b))
    for A in range(dims.n_A):
        bit, position = A % 2, A // 2
        decoder[A, :, bit] = 1.0
        efficiency[A, position] = 1.0

    base = DLScenario(
        PreparationBox.single(dims, encoder),
        MeasurementBox.single(dims, decoder, efficiency),
    )
    return AttackScenario(base, spec, "3->log6 position attack")


def filter_strategy(base: DLScenario, i0: int, A0: int) -> DLScenario:
    """
    Loss-free scenario where Bob runs strategy `i0` on message `A0` and outputs a
    uniform guess on every other message.

    Raises:
        IndexOutOfRangeError -- If `i0` or `A0` is out of range.
    """
    if not 0 <= i0 < base.meas.strategy_count:
        raise IndexOutOfRangeError(f"i0={i0} is out of range 0..{base.meas.strategy_count - 1}")
    if not 0 <= A0 < base.dims.n_A:
        raise IndexOutOfRangeError(f"A0={A0} is out of range 0..{base.dims.n_A - 1}")

    dims = base.dims
    decoder = np.full((dims.n_A, dims.n_b, dims.n_B), 1.0 / dims.n_B)
    decoder[A0] = base.meas.decoders[i0, A0]
    return DLScenario(
        PreparationBox.single(dims, base.prep.mixture()),
        MeasurementBox.single(dims, decoder),
    )


def filter_success(base: DLScenario, spec: RACSpec, i0: int, A0: int) -> FloatArray:
    """
    Closed form of the filter strategy success,
    `(P_i0(f|A0,b) - 1/2) P(A0|a) + 1/2` for every `(a, b)`.
    """
    targets = spec.target_table()
    decoder_success = base.meas.decoders[i0, A0, np.arange(spec.n)[None, :], targets]
    return (decoder_success - 0.5) * base.prep.mixture()[:, A0, None] + 0.5


def analytic_bound(attack: AttackScenario) -> FloatArray:
    """
    Entrywise upper bound on post-selected success, `max_{A,i} P_i(f(a,b)|A,b)`.

    Returns:
        Array of shape `(n_a, n_b)`. Its minimum bounds the worst-case success of
        every efficiency assignment.
    """
    targets = attack.spec.target_table()
    # decoders[i, A, b, B] -> best[b, B]
    best = attack.base.meas.decoders.max(axis=(0, 1))
    return best[np.arange(attack.spec.n)[None, :], targets]


@dataclass(frozen=True, eq=False)
class SearchResult:
    """
    Best efficiency assignment found by `EfficiencySearch`.

    Arguments:
        value -- Worst-case post-selected success of the assignment.
        efficiencies -- Bob efficiencies `[i, A, b]`.
        mode -- Search mode.
        evaluated -- Number of assignments evaluated.
        discarded -- Number of assignments with a zero click probability.
    """

    value: float
    efficiencies: FloatArray
    mode: SearchMode
    evaluated: int
    discarded: int

    def as_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "efficiencies": self.efficiencies.tolist(),
            "mode": self.mode.value,
            "evaluated": self.evaluated,
            "discarded": self.discarded,
        }


class EfficiencySearch(LazyLogger):
    """
    Maximize worst-case post-selected success over Bob's efficiencies.

    Success on setting `b` depends only on `eta_i(A,b)` for that `b`, so each setting
    is searched independently and the worst case is the minimum of the per-setting
    optima. Alice's clicks are folded into her encoder first.

    ```python
    search = EfficiencySearch()
    result = search.search(attack_3tolog6(), SearchMode.VERTEX)
    result.value  # 1.0
    ```

    Arguments:
        logger -- `logging.Logger` instance.
    """

    VERTEX_MAX_VARIABLES = 24
    GRID_LEVELS: Tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
    MAX_ASSIGNMENTS = 2 ** 24
    CHUNK_SIZE = 2 ** 14

    def __init__(self, logger: Optional[logging.Logger] = None) -> None:
        self._lazy_logger = logger

    def _levels(self, attack: AttackScenario, mode: SearchMode) -> np.ndarray:
        meas = attack.base.meas
        variables = meas.strategy_count * attack.base.dims.n_A
        if mode is SearchMode.VERTEX:
            total = variables * attack.base.dims.n_b
            if total > self.VERTEX_MAX_VARIABLES:
                raise SearchSpaceTooLarge(
                    f"{total} efficiency variables exceed the vertex limit"
                    f" of {self.VERTEX_MAX_VARIABLES}",
                    {"variables": total, "limit": self.VERTEX_MAX_VARIABLES},
                )
            return np.array([0.0, 1.0])

        levels = np.asarray(self.GRID_LEVELS, dtype=float)
        if len(levels) ** variables > self.MAX_ASSIGNMENTS:
            raise SearchSpaceTooLarge(
                f"{len(levels)}^{variables} grid assignments per setting exceed"
                f" {self.MAX_ASSIGNMENTS}",
                {"variables": variables, "limit": self.MAX_ASSIGNMENTS},
            )
        return levels

    def _search_setting(
        self, weights: FloatArray, clicks: FloatArray, levels: np.ndarray
    ) -> Tuple[float, FloatArray, int]:
        # weights[k, a] = p_i P_i(f|A,b) P(A|a), clicks[k, a] = p_i P(A|a), k = (i, A)
        variables = weights.shape[0]
        total = len(levels) ** variables
        best_value = -np.inf
        best_assignment = np.ones(variables)
        discarded = 0
        for start, stop in chunk_ranges(total, self.CHUNK_SIZE):
            assignments = levels[
                digits(np.arange(start, stop), len(levels), variables, little_endian=False)
            ]
            numerators = assignments @ weights
            denominators = assignments @ clicks
            valid = np.all(denominators > 0.0, axis=1)
            discarded += int(np.count_nonzero(~valid))
            ratios = numerators / np.where(denominators > 0.0, denominators, 1.0)
            values = np.where(valid, ratios.min(axis=1), -np.inf)
            index = int(np.argmax(values))
            if values[index] > best_value:
                best_value = float(values[index])
                best_assignment = assignments[index]

        return best_value, best_assignment, discarded

    def search(self, attack: AttackScenario, mode: SearchMode = SearchMode.VERTEX) -> SearchResult:
        """
        Run the search.

        Arguments:
            attack -- Scenario and code. Its own efficiencies are ignored.
            mode -- Vertex or grid assignments.

        Returns:
            The best assignment found, a lower bound on the supremum.

        Raises:
            SearchSpaceTooLarge -- If the assignment count exceeds the limits.
        """
        levels = self._levels(attack, mode)
        dims = attack.base.dims
        meas = attack.base.meas
        encoder = effective_preparation(attack.base.prep).encoders[0]
        targets = attack.spec.target_table()

        value = np.inf
        efficiencies = np.ones((meas.strategy_count, dims.n_A, dims.n_b))
        evaluated = 0
        discarded = 0
        for b in range(dims.n_b):
            # hit[i, A, a] = P_i(f(a,b)|A,b)
            hit = meas.decoders[:, :, b, :][:, :, targets[:, b]]
            weights = meas.priors[:, None, None] * hit * encoder.T[None]
            clicks = meas.priors[:, None, None] * np.broadcast_to(encoder.T[None], hit.shape)
            setting_value, assignment, setting_discarded = self._search_setting(
                weights.reshape(-1, dims.n_a), clicks.reshape(-1, dims.n_a), levels
            )
            evaluated += len(levels) ** weights.shape[0]
            discarded += setting_discarded
            efficiencies[:, :, b] = assignment.reshape(meas.strategy_count, dims.n_A)
            value = min(value, setting_value)

        self._logger.debug(
            f"{mode.value} search: {evaluated} {pluralize(evaluated, 'assignment')},"
            f" {discarded} discarded, best worst case {value:.6f}"
        )
        return SearchResult(float(value), efficiencies, mode, evaluated, discarded)


def dl_worst_case_search(
    attack: AttackScenario, mode: SearchModeStr = "vertex"
) -> SearchResult:
    return EfficiencySearch().search(attack, SearchMode(mode))


def random_premise_scenario(
    rng: np.random.Generator, mirrored_pairs: int = 1, alice_strategies: int = 2
) -> AttackScenario:
    """
    Random 2->1 scenario whose loss-free worst-case success is exactly 1/2.

    One bit `k` is sent with a bias that Bob decodes with balanced strategies, so
    its success is at least 1/2. The other bit is decoded by mirrored strategy
    pairs with equal priors that average to a fair coin.

    Arguments:
        rng -- Random generator.
        mirrored_pairs -- Number of mirrored Bob strategy pairs.
        alice_strategies -- Number of Alice strategies.
    """
    spec = RACSpec(2, 2)
    dims = spec.dims
    k = int(rng.integers(2))
    other = 1 - k
    signs = np.where(spec.target_table()[:, k] == 0, 1.0, -1.0)

    biases = rng.uniform(0.0, 0.5, size=alice_strategies)
    encoders = np.empty((alice_strategies, dims.n_a, dims.n_A))
    encoders[:, :, 0] = 0.5 + signs[None, :] * biases[:, None]
    encoders[:, :, 1] = 1.0 - encoders[:, :, 0]
    prep = PreparationBox(
        dims,
        rng.dirichlet(np.ones(alice_strategies)),
        encoders,
        rng.uniform(0.1, 1.0, size=(alice_strategies, dims.n_a)),
    )

    strategies = 2 * mirrored_pairs
    zero_outcome = np.empty((strategies, dims.n_A, dims.n_b))
    alphas = rng.uniform(0.0, 0.5, size=strategies)
    zero_outcome[:, 0, k] = 0.5 + alphas
    zero_outcome[:, 1, k] = 0.5 - alphas
    mirrored = rng.uniform(0.0, 1.0, size=(mirrored_pairs, dims.n_A))
    zero_outcome[0::2, :, other] = mirrored
    zero_outcome[1::2, :, other] = 1.0 - mirrored
    decoders = np.stack([zero_outcome, 1.0 - zero_outcome], axis=-1)

    pair_priors = rng.dirichlet(np.ones(mirrored_pairs))
    meas = MeasurementBox(
        dims,
        np.repeat(pair_priors / 2.0, 2),
        decoders,
        rng.uniform(0.1, 1.0, size=(strategies, dims.n_A, dims.n_b)),
    )
    return AttackScenario(DLScenario(prep, meas), spec, f"random premise, informative bit {k}")


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """
    Per-instance verdicts of `verify_proposition3`.
    """

    table: ReportTable

    @property
    def passed(self) -> bool:
        return not self.table.count("status", CheckStatus.FAIL.value)

    @property
    def checked_count(self) -> int:
        return len(self.table) - self.table.count("status", CheckStatus.SKIPPED.value)

    def as_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "instances": self.table.as_records()}


def verify_proposition3(
    instances: Iterable[AttackScenario],
    tol: float = 1e-9,
    modes: Tuple[SearchMode, ...] = (SearchMode.VERTEX, SearchMode.GRID),
    search: Optional[EfficiencySearch] = None,
) -> VerificationReport:
    """
    Check that no efficiency assignment lifts a worst case of exactly 1/2.

    Instances whose loss-free worst case is not 1/2, or for which every search
    mode hits its size limit, are skipped with a note. For
    the others every search mode must stay at or below `1/2 + tol`, and the
    simulated success of the instance itself must respect `analytic_bound`.
    Never raises for search limits, they are reported.
    """
    search = search or EfficiencySearch()
    table = ReportTable()
    for index, attack in enumerate(instances):
        record: Dict[str, Any] = {"instance": index, "description": attack.description}
        premise = success_report(simulate_ideal(attack.base), attack.spec).worst_case
        record["premise_worst_case"] = premise
        if abs(premise - 0.5) > tol:
            record["status"] = CheckStatus.SKIPPED.value
            record["note"] = "premise violated: worst case is not 1/2"
            table.add_record(record)
            continue

        bound = analytic_bound(attack)
        notes: List[str] = []
        passed = True
        searched = 0
        try:
            own = success_table(simulate_dl(attack.base), attack.spec)
            if np.any(own > bound + tol):
                passed = False
                notes.append("analytic bound violated")
        except ZeroClickProbability as e:
            notes.append(e.message)

        for mode in modes:
            try:
                result = search.search(attack, mode)
            except SearchSpaceTooLarge as e:
                notes.append(f"{mode.value} skipped: {e.message}")
                continue
            searched += 1
            record[f"{mode.value}_value"] = result.value
            if result.value > 0.5 + tol:
                passed = False
                notes.append(f"{mode.value} search exceeds 1/2")
            if result.value > float(bound.min()) + tol:
                passed = False
                notes.append(f"{mode.value} search exceeds the analytic bound")

        record["analytic_bound"] = float(bound.min())
        if not passed:
            record["status"] = CheckStatus.FAIL.value
        elif not searched:
            record["status"] = CheckStatus.SKIPPED.value
        else:
            record["status"] = CheckStatus.PASS.value
        record["note"] = "; ".join(notes)
        table.add_record(record)

    return VerificationReport(table.normalize())
