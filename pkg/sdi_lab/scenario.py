"""
Preparation and measurement black boxes, and the statistics they produce.

Alice's box holds strategies `j` with priors `q_j`, encoders `P_j(A|a)` and click
efficiencies `eta_j(a)`. Bob's box holds strategies `i` with priors `p_i`, decoders
`P_i(B|A,b)` and click efficiencies `eta_i(A,b)`. Rounds in which a detector does
not click are removed analytically, so `NC` is never part of the `B` alphabet.

Array layouts:

- `PreparationBox.encoders[j, a, A]`, `PreparationBox.efficiencies[j, a]`
- `MeasurementBox.decoders[i, A, b, B]`, `MeasurementBox.efficiencies[i, A, b]`
"""
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional

import numpy as np

from sdi_lab.core import (
    DEFAULT_TOLERANCE,
    ClickTable,
    ConditionalDistribution,
    ScenarioDims,
    frozen_array,
)
from sdi_lab.errors import (
    DimensionMismatchError,
    IndexOutOfRangeError,
    InvalidScenarioError,
    ZeroClickProbability,
)
from sdi_lab.lab_types import FloatArray

__all__ = (
    "PreparationBox",
    "MeasurementBox",
    "DLScenario",
    "simulate_ideal",
    "simulate_dl_full",
    "simulate_dl",
    "effective_preparation",
    "click_given_message",
    "click_given_inputs",
    "message_click_table",
    "click_table",
    "without_detection_loss",
    "relabel_efficiencies",
    "random_scenario",
)


def _check_priors(priors: FloatArray, owner: str) -> None:
    if np.any(priors < -DEFAULT_TOLERANCE) or abs(priors.sum() - 1.0) > DEFAULT_TOLERANCE:
        raise InvalidScenarioError(f"{owner} priors must be a probability vector", priors.tolist())


def _check_stochastic(matrix: FloatArray, owner: str) -> None:
    if np.any(matrix < -DEFAULT_TOLERANCE):
        raise InvalidScenarioError(f"{owner} has negative entries")
    deviation = np.abs(matrix.sum(axis=-1) - 1.0)
    if np.any(deviation > DEFAULT_TOLERANCE):
        raise InvalidScenarioError(
            f"{owner} is not normalized", {"max_deviation": float(deviation.max())}
        )


def _check_efficiencies(efficiencies: FloatArray, owner: str) -> None:
    if np.any(efficiencies < 0.0) or np.any(efficiencies > 1.0):
        raise InvalidScenarioError(f"{owner} efficiencies must be in [0, 1]")


@dataclass(frozen=True, eq=False)
class PreparationBox:
    """
    Alice's black box.

    Arguments:
        dims -- Scenario alphabets.
        priors -- Strategy distribution `q_j`, shape `(J,)`.
        encoders -- `P_j(A|a)`, shape `(J, n_a, n_A)`.
        efficiencies -- `eta_j(a)`, shape `(J, n_a)`. Defaults to all ones.
    """

    dims: ScenarioDims
    priors: FloatArray
    encoders: FloatArray
    efficiencies: Optional[FloatArray] = None

    def __post_init__(self) -> None:
        priors = frozen_array(self.priors)
        if priors.ndim != 1:
            raise DimensionMismatchError("Alice priors must be a vector")
        count = priors.shape[0]
        encoders = frozen_array(self.encoders, (count, self.dims.n_a, self.dims.n_A))
        efficiencies = self.efficiencies
        if efficiencies is None:
            efficiencies = np.ones((count, self.dims.n_a))
        efficiencies = frozen_array(efficiencies, (count, self.dims.n_a))

        _check_priors(priors, "Alice")
        _check_stochastic(encoders, "Alice encoder")
        _check_efficiencies(efficiencies, "Alice")
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "encoders", encoders)
        object.__setattr__(self, "efficiencies", efficiencies)

    @classmethod
    def single(
        cls, dims: ScenarioDims, encoder: Any, efficiency: Optional[Any] = None
    ) -> "PreparationBox":
        """
        Create a box with one deterministic-prior strategy.
        """
        return cls(
            dims,
            np.ones(1),
            np.asarray(encoder, dtype=float)[None],
            None if efficiency is None else np.asarray(efficiency, dtype=float)[None],
        )

    @property
    def strategy_count(self) -> int:
        return int(self.priors.shape[0])

    def mixture(self) -> FloatArray:
        """
        Encoder `P(A|a) = sum_j q_j P_j(A|a)` that ignores Alice's clicks.
        """
        return np.einsum("j,jaA->aA", self.priors, self.encoders)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "strategies": [
                {"q": float(q), "encoder": encoder.tolist(), "eta_a": eta.tolist()}
                for q, encoder, eta in zip(self.priors, self.encoders, self.efficiencies)
            ]
        }


@dataclass(frozen=True, eq=False)
class MeasurementBox:
    """
    Bob's black box.

    Arguments:
        dims -- Scenario alphabets.
        priors -- Strategy distribution `p_i`, shape `(I,)`.
        decoders -- `P_i(B|A,b)`, shape `(I, n_A, n_b, n_B)`.
        efficiencies -- `eta_i(A,b)`, shape `(I, n_A, n_b)`. Defaults to all ones.
    """

    dims: ScenarioDims
    priors: FloatArray
    decoders: FloatArray
    efficiencies: Optional[FloatArray] = None

    def __post_init__(self) -> None:
        priors = frozen_array(self.priors)
        if priors.ndim != 1:
            raise DimensionMismatchError("Bob priors must be a vector")
        count = priors.shape[0]
        dims = self.dims
        decoders = frozen_array(self.decoders, (count, dims.n_A, dims.n_b, dims.n_B))
        efficiencies = self.efficiencies
        if efficiencies is None:
            efficiencies = np.ones((count, dims.n_A, dims.n_b))
        efficiencies = frozen_array(efficiencies, (count, dims.n_A, dims.n_b))

        _check_priors(priors, "Bob")
        _check_stochastic(decoders, "Bob decoder")
        _check_efficiencies(efficiencies, "Bob")
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "decoders", decoders)
        object.__setattr__(self, "efficiencies", efficiencies)

    @classmethod
    def single(
        cls, dims: ScenarioDims, decoder: Any, efficiency: Optional[Any] = None
    ) -> "MeasurementBox":
        return cls(
            dims,
            np.ones(1),
            np.asarray(decoder, dtype=float)[None],
            None if efficiency is None else np.asarray(efficiency, dtype=float)[None],
        )

    @property
    def strategy_count(self) -> int:
        return int(self.priors.shape[0])

    def mixture(self) -> FloatArray:
        """
        Decoder `P(B|A,b) = sum_i p_i P_i(B|A,b)` that ignores Bob's clicks.
        """
        return np.einsum("i,iAbB->AbB", self.priors, self.decoders)

    def click_rates(self) -> FloatArray:
        """
        Click probabilities `Q(B!=NC|A,b) = sum_i p_i eta_i(A,b)`, shape `(n_A, n_b)`.
        """
        return np.einsum("i,iAb->Ab", self.priors, self.efficiencies)

    def weighted_mixture(self) -> FloatArray:
        # sum_i p_i eta_i(A,b) P_i(B|A,b), shape (A, b, B)
        return np.einsum("i,iAb,iAbB->AbB", self.priors, self.efficiencies, self.decoders)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "strategies": [
                {"p": float(p), "decoder": decoder.tolist(), "eta": eta.tolist()}
                for p, decoder, eta in zip(self.priors, self.decoders, self.efficiencies)
            ]
        }


@dataclass(frozen=True, eq=False)
class DLScenario:
    """
    Both black boxes of a prepare-and-measure round.

    Positivity of the post-selection denominators is not checked on construction,
    operations that divide by it raise `ZeroClickProbability`.

    Arguments:
        prep -- Alice's box.
        meas -- Bob's box.
    """

    prep: PreparationBox
    meas: MeasurementBox

    def __post_init__(self) -> None:
        if self.prep.dims != self.meas.dims:
            raise DimensionMismatchError(
                "Preparation and measurement boxes have different alphabets",
                {"prep": self.prep.dims.as_dict(), "meas": self.meas.dims.as_dict()},
            )

    @property
    def dims(self) -> ScenarioDims:
        return self.prep.dims

    def as_dict(self) -> Dict[str, Any]:
        return {
            "dims": self.dims.as_dict(),
            "prep": self.prep.as_dict(),
            "meas": self.meas.as_dict(),
        }


def _post_select(
    dims: ScenarioDims, encoder: FloatArray, meas: MeasurementBox
) -> ConditionalDistribution:
    numerator = np.einsum("aA,AbB->Bab", encoder, meas.weighted_mixture())
    denominator = np.einsum("aA,Ab->ab", encoder, meas.click_rates())
    zero_cells = np.argwhere(denominator <= 0.0)
    if zero_cells.size:
        a, b = (int(i) for i in zero_cells[0])
        raise ZeroClickProbability(
            f"Click probability is zero for a={a}, b={b}", {"a": a, "b": b}
        )
    return ConditionalDistribution(dims, numerator / denominator[None])


def simulate_ideal(s: DLScenario) -> ConditionalDistribution:
    """
    Statistics without post-selection, `P(B|a,b) = sum p_i q_j P_i(B|A,b) P_j(A|a)`.
    Efficiencies are ignored.

    Arguments:
        s -- Scenario.

    Returns:
        Normalized distribution.
    """
    entries = np.einsum("aA,AbB->Bab", s.prep.mixture(), s.meas.mixture())
    return ConditionalDistribution(s.dims, entries)


def simulate_dl_full(s: DLScenario) -> ConditionalDistribution:
    """
    Post-selected statistics with both Alice's and Bob's efficiencies.

    Arguments:
        s -- Scenario.

    Raises:
        ZeroClickProbability -- If no round of some `(a, b)` cell survives.
    """
    alice_weighted = np.einsum("j,ja,jaA->aA", s.prep.priors, s.prep.efficiencies, s.prep.encoders)
    return _post_select(s.dims, alice_weighted, s.meas)


def simulate_dl(s: DLScenario) -> ConditionalDistribution:
    """
    Post-selected statistics with Bob's efficiencies only, Alice preparing the
    mixture `P(A|a) = sum_j q_j P_j(A|a)`.

    Arguments:
        s -- Scenario.

    Raises:
        ZeroClickProbability -- If no round of some `(a, b)` cell survives.
    """
    return _post_select(s.dims, s.prep.mixture(), s.meas)


def effective_preparation(prep: PreparationBox) -> PreparationBox:
    """
    Fold Alice's clicks into a single always-clicking strategy,
    `P'(A|a) = sum_j q_j eta_j(a) P_j(A|a) / sum_j q_j eta_j(a)`.

    ```python
    prep = PreparationBox(dims, [0.75, 0.25], [[[1, 0]], [[0, 1]]], [[1 / 3], [1]])
    effective_preparation(prep).encoders[0]  # [[0.5, 0.5]]
    ```

    Arguments:
        prep -- Alice's box.

    Raises:
        ZeroClickProbability -- If Alice never clicks for some input `a`.
    """
    weights = prep.priors[:, None] * prep.efficiencies
    totals = weights.sum(axis=0)
    zero_inputs = np.flatnonzero(totals <= 0.0)
    if zero_inputs.size:
        a = int(zero_inputs[0])
        raise ZeroClickProbability(f"Alice never clicks for a={a}", {"a": a})

    encoder = np.einsum("ja,jaA->aA", weights, prep.encoders) / totals[:, None]
    encoder = encoder / encoder.sum(axis=1, keepdims=True)
    return PreparationBox.single(prep.dims, encoder)


def _check_index(name: str, value: int, size: int) -> None:
    if not 0 <= value < size:
        raise IndexOutOfRangeError(f"{name}={value} is out of range 0..{size - 1}")


def click_given_message(s: DLScenario, A: int, b: int) -> float:
    """
    Bob's click probability `Q(B!=NC|A,b) = sum_i p_i eta_i(A,b)`.
    """
    _check_index("A", A, s.dims.n_A)
    _check_index("b", b, s.dims.n_b)
    return float(s.meas.click_rates()[A, b])


def click_given_inputs(s: DLScenario, a: int, b: int) -> float:
    """
    Observable click probability `Q(B!=NC|a,b) = sum_{i,A} p_i eta_i(A,b) P(A|a)`.
    """
    _check_index("a", a, s.dims.n_a)
    _check_index("b", b, s.dims.n_b)
    return float(click_table(s).entries[a, b])


def message_click_table(s: DLScenario) -> FloatArray:
    """
    All `Q(B!=NC|A,b)` as an `(n_A, n_b)` array.
    """
    return s.meas.click_rates()


def click_table(s: DLScenario) -> ClickTable:
    """
    All `Q(B!=NC|a,b)` as a `ClickTable`. Equals the `simulate_dl` denominator.
    """
    entries = np.einsum("aA,Ab->ab", s.prep.mixture(), s.meas.click_rates())
    return ClickTable(s.dims, np.clip(entries, 0.0, 1.0))


def relabel_efficiencies(
    s: DLScenario,
    bob_efficiencies: Optional[Any] = None,
    alice_efficiencies: Optional[Any] = None,
) -> DLScenario:
    """
    Copy of `s` with replaced efficiency tensors. `None` keeps the current values.
    """
    prep, meas = s.prep, s.meas
    if alice_efficiencies is not None:
        prep = replace(prep, efficiencies=np.asarray(alice_efficiencies, dtype=float))
    if bob_efficiencies is not None:
        meas = replace(meas, efficiencies=np.asarray(bob_efficiencies, dtype=float))
    return DLScenario(prep, meas)


def without_detection_loss(s: DLScenario) -> DLScenario:
    """
    The same boxes with every detector always clicking.
    """
    return relabel_efficiencies(
        s, np.ones_like(s.meas.efficiencies), np.ones_like(s.prep.efficiencies)
    )


def random_scenario(
    rng: np.random.Generator,
    dims: ScenarioDims,
    alice_strategies: int = 2,
    bob_strategies: int = 2,
    message_independent_clicks: bool = False,
    alice_clicks: bool = True,
) -> DLScenario:
    """
    Sample a scenario with Dirichlet encoders and decoders and uniform efficiencies
    in `[0.1, 1]`.

    Arguments:
        rng -- Random generator.
        dims -- Scenario alphabets.
        alice_strategies -- Number of Alice strategies.
        bob_strategies -- Number of Bob strategies.
        message_independent_clicks -- Make `eta_i(A,b)` independent of `A`.
        alice_clicks -- Sample Alice efficiencies, otherwise all ones.
    """
    q = rng.dirichlet(np.ones(alice_strategies))
    p = rng.dirichlet(np.ones(bob_strategies))
    encoders = rng.dirichlet(np.ones(dims.n_A), size=(alice_strategies, dims.n_a))
    decoders = rng.dirichlet(np.ones(dims.n_B), size=(bob_strategies, dims.n_A, dims.n_b))
    alice_eta = (
        rng.uniform(0.1, 1.0, size=(alice_strategies, dims.n_a))
        if alice_clicks
        else np.ones((alice_strategies, dims.n_a))
    )
    if message_independent_clicks:
        per_b = rng.uniform(0.1, 1.0, size=(bob_strategies, 1, dims.n_b))
        bob_eta = np.repeat(per_b, dims.n_A, axis=1)
    else:
        bob_eta = rng.uniform(0.1, 1.0, size=(bob_strategies, dims.n_A, dims.n_b))

    return DLScenario(
        PreparationBox(dims, q, encoders, alice_eta),
        MeasurementBox(dims, p, decoders, bob_eta),
    )
