"""
Classical d-dimensional models and the membership decision.

A classical model sends a d-valued message: `P(B|a,b) = sum_A P(B|A,b) P(A|a)`.
Membership is decided against the convex hull of deterministic strategy pairs,
which is the set of classical models with shared randomness. An infeasible
verdict therefore also rules out every model without shared randomness.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from sdi_lab.core import ConditionalDistribution, ScenarioDims, frozen_array
from sdi_lab.enums import MembershipVerdict
from sdi_lab.errors import (
    DimensionMismatchError,
    DomainError,
    EnumerationTooLarge,
    InvalidScenarioError,
    ZeroClickProbability,
)
from sdi_lab.lab_types import FloatArray, IntArray
from sdi_lab.lazy_logger import LazyLogger
from sdi_lab.scenario import DLScenario, message_click_table
from sdi_lab.simplex import SimplexSolver
from sdi_lab.utils import digits

__all__ = (
    "ClassicalModel",
    "DeterministicStrategyPair",
    "Witness",
    "MembershipResult",
    "StrategyEnumeration",
    "ClassicalMembership",
    "enumerate_deterministic_pairs",
    "strategy_distribution",
    "classical_membership",
    "check_witness",
    "membership_from_pairs",
    "model_to_distribution",
    "model_from_dl_scenario",
)


@dataclass(frozen=True, eq=False)
class ClassicalModel:
    """
    Stochastic encoder `P(A|a)` and decoder `P(B|A,b)` through a d-valued message.

    Arguments:
        d -- Message dimension.
        encoder -- Array `[a, A]`.
        decoder -- Array `[A, b, B]`.

    Raises:
        InvalidScenarioError -- If a factor is not stochastic.
    """

    d: int
    encoder: FloatArray
    decoder: FloatArray

    def __post_init__(self) -> None:
        encoder = frozen_array(self.encoder)
        decoder = frozen_array(self.decoder)
        if encoder.ndim != 2 or encoder.shape[1] != self.d:
            raise DimensionMismatchError(f"Encoder must have shape (n_a, {self.d})")
        if decoder.ndim != 3 or decoder.shape[0] != self.d:
            raise DimensionMismatchError(f"Decoder must have shape ({self.d}, n_b, n_B)")
        for name, matrix in (("encoder", encoder), ("decoder", decoder)):
            if np.any(matrix < -1e-9) or np.any(np.abs(matrix.sum(axis=-1) - 1.0) > 1e-9):
                raise InvalidScenarioError(f"Classical model {name} is not stochastic")
        object.__setattr__(self, "encoder", encoder)
        object.__setattr__(self, "decoder", decoder)

    def as_dict(self) -> Dict[str, Any]:
        return {"d": self.d, "encoder": self.encoder.tolist(), "decoder": self.decoder.tolist()}


@dataclass(frozen=True)
class DeterministicStrategyPair:
    """
    Deterministic encoder `a -> A` and decoder `(A, b) -> B`.

    Arguments:
        encoder -- `encoder[a]` is the message sent for input `a`.
        decoder -- `decoder[A][b]` is the outcome for message `A` and setting `b`.
    """

    encoder: Tuple[int, ...]
    decoder: Tuple[Tuple[int, ...], ...]

    @property
    def d(self) -> int:
        return len(self.decoder)

    def output(self, a: int, b: int) -> int:
        return self.decoder[self.encoder[a]][b]

    def as_dict(self) -> Dict[str, Any]:
        return {"encoder": list(self.encoder), "decoder": [list(row) for row in self.decoder]}


@dataclass(frozen=True, eq=False)
class Witness:
    """
    Separating hyperplane `sum c(B,a,b) P(B|a,b) <= bound` valid for every
    classical model of the tested dimension.
    """

    coefficients: FloatArray
    bound: float

    def value(self, p: ConditionalDistribution) -> float:
        return float(np.sum(self.coefficients * p.entries))

    def violation(self, p: ConditionalDistribution) -> float:
        return self.value(p) - self.bound

    def as_dict(self) -> Dict[str, Any]:
        return {"coefficients": np.asarray(self.coefficients).tolist(), "bound": self.bound}


@dataclass(frozen=True, eq=False)
class MembershipResult:
    """
    Certificate of a membership decision.

    Feasible results carry convex weights over deterministic pairs, infeasible
    results carry a `Witness`.

    Arguments:
        verdict -- Decision.
        d -- Tested message dimension.
        dims -- Alphabets of the tested distribution.
        residual -- L1 residual of the best reconstruction.
        weights -- `(pair, weight)` tuples for feasible results.
        witness -- Separating hyperplane for infeasible results.
    """

    verdict: MembershipVerdict
    d: int
    dims: ScenarioDims
    residual: float
    weights: Tuple[Tuple[DeterministicStrategyPair, float], ...] = ()
    witness: Optional[Witness] = None

    @property
    def is_feasible(self) -> bool:
        return self.verdict is MembershipVerdict.FEASIBLE

    def reconstruct(self) -> ConditionalDistribution:
        """
        Recompose the distribution from the certificate weights.

        Raises:
            DomainError -- If the result is infeasible.
        """
        if not self.is_feasible:
            raise DomainError("Only feasible results can be reconstructed")
        entries = np.zeros(self.dims.distribution_shape)
        for pair, weight in self.weights:
            entries += weight * strategy_distribution(pair, self.dims).entries
        return ConditionalDistribution(self.dims, entries)

    def as_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "verdict": self.verdict.value,
            "d": self.d,
            "residual": self.residual,
        }
        if self.is_feasible:
            result["weights"] = [
                {"pair": pair.as_dict(), "weight": weight} for pair, weight in self.weights
            ]
        if self.witness is not None:
            result["witness"] = self.witness.as_dict()
        return result


class StrategyEnumeration:
    """
    Vectorized table of all deterministic pairs of a scenario.

    Pair index `k` enumerates encoders in the outer and decoders in the inner
    position, each as a lexicographically ordered tuple.

    Arguments:
        dims -- Observable alphabets, `n_A` is ignored.
        d -- Message dimension.
        cap -- Maximum number of pairs.

    Raises:
        EnumerationTooLarge -- If the pair count exceeds `cap`.
    """

    def __init__(self, dims: ScenarioDims, d: int, cap: int) -> None:
        if d < 1:
            raise DomainError(f"Message dimension must be positive, got {d}")
        self.dims = dims.with_message_dim(d)
        self.d = d
        self.encoder_count = d ** dims.n_a
        self.decoder_count = dims.n_B ** (d * dims.n_b)
        self.count = self.encoder_count * self.decoder_count
        if self.count > cap:
            raise EnumerationTooLarge(
                f"{self.count} deterministic pairs exceed the cap of {cap}",
                {"pairs": self.count, "cap": cap, "d": d, "dims": dims.as_dict()},
            )

    def encoders(self) -> IntArray:
        return digits(np.arange(self.encoder_count), self.d, self.dims.n_a, little_endian=False)

    def decoders(self) -> IntArray:
        width = self.d * self.dims.n_b
        flat = digits(np.arange(self.decoder_count), self.dims.n_B, width, little_endian=False)
        return flat.reshape(-1, self.d, self.dims.n_b)

    def pair(self, index: int) -> DeterministicStrategyPair:
        encoder_index, decoder_index = divmod(int(index), self.decoder_count)
        encoder = digits(encoder_index, self.d, self.dims.n_a, little_endian=False)
        decoder = digits(
            decoder_index, self.dims.n_B, self.d * self.dims.n_b, little_endian=False
        ).reshape(self.d, self.dims.n_b)
        return DeterministicStrategyPair(
            tuple(int(A) for A in encoder), tuple(tuple(int(B) for B in row) for row in decoder)
        )

    def outputs(self) -> IntArray:
        """
        Outcome table of every pair, shape `(count, n_a, n_b)`.
        """
        encoders = self.encoders()
        decoders = self.decoders().astype(np.int16)
        n_b = self.dims.n_b
        table = decoders[
            np.arange(self.decoder_count)[None, :, None, None],
            encoders[:, None, :, None],
            np.arange(n_b)[None, None, None, :],
        ]
        return table.reshape(self.count, self.dims.n_a, n_b)

    def distinct_outputs(self) -> Tuple[IntArray, IntArray]:
        """
        Outcome tables with duplicates removed.

        Returns:
            Tuple of first pair indices in enumeration order and their outcome tables.
        """
        outputs = self.outputs()
        flat = outputs.reshape(self.count, -1)
        _, first = np.unique(flat, axis=0, return_index=True)
        first = np.sort(first)
        return first, outputs[first]


def enumerate_deterministic_pairs(
    dims: ScenarioDims, d: int, cap: int = 10 ** 7
) -> List[DeterministicStrategyPair]:
    """
    All deterministic pairs at dimension `d`, encoders outer, decoders inner.

    ```python
    len(enumerate_deterministic_pairs(ScenarioDims(4, 2, 2, 2), d=2))  # 256
    ```

    Raises:
        EnumerationTooLarge -- If `d^n_a * n_B^(d*n_b)` exceeds `cap`.
    """
    enumeration = StrategyEnumeration(dims, d, cap)
    return [enumeration.pair(index) for index in range(enumeration.count)]


def strategy_distribution(
    pair: DeterministicStrategyPair, dims: ScenarioDims
) -> ConditionalDistribution:
    """
    0/1 table `P(B|a,b) = [B = decoder(encoder(a), b)]`.
    """
    if len(pair.encoder) != dims.n_a or any(len(row) != dims.n_b for row in pair.decoder):
        raise DimensionMismatchError("Strategy pair does not match scenario alphabets")
    entries = np.zeros(dims.distribution_shape)
    for a, A in enumerate(pair.encoder):
        for b, B in enumerate(pair.decoder[A]):
            entries[B, a, b] = 1.0
    return ConditionalDistribution(dims, entries)


def _one_hot(outputs: IntArray, n_B: int) -> FloatArray:
    # (K, n_a, n_b) outcome codes to (K, n_B, n_a, n_b) tables
    return (outputs[:, None, :, :] == np.arange(n_B)[None, :, None, None]).astype(float)


class ClassicalMembership(LazyLogger):
    """
    Decide whether a distribution admits a classical d-dimensional model.

    The decision is a phase one simplex run over convex weights of distinct
    deterministic tables. Feasible results carry the weights, infeasible results
    carry the phase one dual as a separating witness.

    ```python
    membership = ClassicalMembership()
    result = membership.decide(p, d=2)
    result.verdict  # MembershipVerdict.INFEASIBLE
    ```

    Arguments:
        enumeration_cap -- Maximum number of deterministic pairs.
        solver -- `SimplexSolver` instance.
        logger -- `logging.Logger` instance.
    """

    ENUMERATION_CAP = 10 ** 7
    FEASIBILITY_TOLERANCE = 1e-7
    WEIGHT_CUTOFF = 1e-12

    def __init__(
        self,
        enumeration_cap: Optional[int] = None,
        solver: Optional[SimplexSolver] = None,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self._lazy_logger = logger
        self.enumeration_cap = enumeration_cap or self.ENUMERATION_CAP
        self.solver = solver or SimplexSolver(logger=logger)

    def enumeration(self, dims: ScenarioDims, d: int) -> StrategyEnumeration:
        return StrategyEnumeration(dims, d, self.enumeration_cap)

    def decide(
        self, p: ConditionalDistribution, d: int, tol: Optional[float] = None
    ) -> MembershipResult:
        """
        Run the membership program.

        Arguments:
            p -- Distribution to test.
            d -- Message dimension.
            tol -- Maximum L1 residual accepted as feasible.

        Raises:
            EnumerationTooLarge -- If there are too many deterministic pairs.
            SolverStall -- If the simplex iteration cap is hit.
        """
        tol = self.FEASIBILITY_TOLERANCE if tol is None else tol
        enumeration = self.enumeration(p.dims, d)
        indices, outputs = enumeration.distinct_outputs()
        tables = _one_hot(outputs, p.dims.n_B).reshape(len(indices), -1)
        self._logger.debug(
            f"Membership at d={d}: {enumeration.count} pairs, {len(indices)} distinct tables"
        )

        A_eq = np.vstack([tables.T, np.ones((1, len(indices)))])
        b_eq = np.concatenate([p.entries.ravel(), [1.0]])
        program = self.solver.find_feasible(A_eq, b_eq)
        residual = program.infeasibility

        if residual <= tol:
            weights = program.x
            kept = np.flatnonzero(weights > self.WEIGHT_CUTOFF)
            total = weights[kept].sum()
            pairs = tuple(
                (enumeration.pair(indices[k]), float(weights[k] / total)) for k in kept
            )
            self._logger.debug(f"Feasible with {len(pairs)} pairs, residual {residual:.3g}")
            return MembershipResult(
                MembershipVerdict.FEASIBLE, d, p.dims, residual, weights=pairs
            )

        duals = program.duals
        coefficients = duals[:-1]
        # tightest bound that holds on every vertex
        bound = max(float(-duals[-1]), float(np.max(tables @ coefficients)))
        witness = Witness(frozen_array(coefficients.reshape(p.dims.distribution_shape)), bound)
        self._logger.debug(f"Infeasible, witness violation {residual:.3g}")
        return MembershipResult(MembershipVerdict.INFEASIBLE, d, p.dims, residual, witness=witness)

    def check_witness(
        self, result: MembershipResult, p: ConditionalDistribution, margin: float = 1e-7
    ) -> bool:
        """
        Independently re-check a certificate.

        Feasible results must reconstruct `p` within `margin` in total variation.
        Infeasible witnesses must hold within `1e-9` on every deterministic pair and
        be violated by at least `margin` on `p`.
        """
        if result.is_feasible:
            reconstructed = result.reconstruct().entries
            return bool(np.max(0.5 * np.abs(reconstructed - p.entries).sum(axis=0)) <= margin)

        if result.witness is None:
            return False
        _, outputs = self.enumeration(p.dims, result.d).distinct_outputs()
        tables = _one_hot(outputs, p.dims.n_B)
        values = np.einsum("kBab,Bab->k", tables, result.witness.coefficients)
        pairs_hold = bool(np.max(values) - result.witness.bound <= 1e-9)
        return pairs_hold and result.witness.violation(p) >= margin


def classical_membership(
    p: ConditionalDistribution, d: int, tol: float = ClassicalMembership.FEASIBILITY_TOLERANCE
) -> MembershipResult:
    """
    Shortcut for `ClassicalMembership().decide(p, d, tol)`.
    """
    return ClassicalMembership().decide(p, d, tol)


def check_witness(result: MembershipResult, p: ConditionalDistribution) -> bool:
    """
    Shortcut for `ClassicalMembership().check_witness(result, p)`.
    """
    return ClassicalMembership().check_witness(result, p)


def membership_from_pairs(result: MembershipResult) -> ConditionalDistribution:
    """
    Distribution of a feasible certificate, `sum_k w_k P_k(B|a,b)`.

    Raises:
        DomainError -- If the result is infeasible.
    """
    return result.reconstruct()


def model_to_distribution(m: ClassicalModel, dims: ScenarioDims) -> ConditionalDistribution:
    """
    Compose `P(B|a,b) = sum_A P(B|A,b) P(A|a)`.

    Raises:
        DimensionMismatchError -- If the model does not fit `dims`.
    """
    if m.encoder.shape[0] != dims.n_a or m.decoder.shape[1:] != (dims.n_b, dims.n_B):
        raise DimensionMismatchError(
            "Classical model does not match scenario alphabets",
            {"dims": dims.as_dict(), "encoder": m.encoder.shape, "decoder": m.decoder.shape},
        )
    return ConditionalDistribution(dims, np.einsum("aA,AbB->Bab", m.encoder, m.decoder))


def model_from_dl_scenario(s: DLScenario, tol: float = 1e-9) -> ClassicalModel:
    """
    Classical model reproducing `simulate_dl(s)` when Bob's click probability
    does not depend on the message.

    The decoder is the post-selected mixture
    `P(B|A,b) = sum_i p_i eta_i(A,b) P_i(B|A,b) / Q(b)`, the encoder is Alice's mixture.

    Raises:
        InvalidScenarioError -- If `Q(B!=NC|A,b)` depends on `A` beyond `tol`.
        ZeroClickProbability -- If Bob never clicks for some `b`.
    """
    clicks = message_click_table(s)
    spread = clicks.max(axis=0) - clicks.min(axis=0)
    if np.any(spread > tol):
        raise InvalidScenarioError(
            "Click probability depends on the message",
            {"max_deviation": float(spread.max())},
        )
    per_b = clicks.mean(axis=0)
    zero_inputs = np.flatnonzero(per_b <= 0.0)
    if zero_inputs.size:
        b = int(zero_inputs[0])
        raise ZeroClickProbability(f"Bob never clicks for b={b}", {"b": b})

    decoder = s.meas.weighted_mixture() / per_b[None, :, None]
    decoder = decoder / decoder.sum(axis=-1, keepdims=True)
    return ClassicalModel(s.dims.n_A, s.prep.mixture(), decoder)
