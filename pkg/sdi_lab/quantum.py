"""
Qubit messages in the Bloch representation.

A state is a Bloch vector `r` with `|r| <= 1`, a binary projective measurement is a
unit axis `n`, and outcome `0` is the `+n` effect: `P(0) = (1 + r.n) / 2`.
"""
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Tuple

import numpy as np

from sdi_lab.core import ConditionalDistribution, ScenarioDims, frozen_array
from sdi_lab.errors import DimensionMismatchError, DomainError, IndexOutOfRangeError
from sdi_lab.lab_types import FloatArray
from sdi_lab.utils import digits

__all__ = (
    "QRAC2_SUCCESS",
    "QRAC3_SUCCESS",
    "QRAC_COLLAPSE_N",
    "QubitState",
    "BinaryQubitMeasurement",
    "QuantumPrepareMeasure",
    "born_probability",
    "qrac2_protocol",
    "qrac3_protocol",
    "quantum_statistics",
    "eta_mixed_success",
    "eta_mixed_statistics",
    "rotate_protocol",
    "random_rotation",
)

QRAC2_SUCCESS = (1.0 + 1.0 / np.sqrt(2.0)) / 2.0
QRAC3_SUCCESS = (1.0 + 1.0 / np.sqrt(3.0)) / 2.0

# n->1 qubit codes with n above this have worst case success 1/2
QRAC_COLLAPSE_N = 3

NORM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class QubitState:
    """
    Qubit density operator as a Bloch vector.

    Raises:
        DomainError -- If the vector lies outside the Bloch ball.
    """

    bloch: FloatArray

    def __post_init__(self) -> None:
        bloch = frozen_array(self.bloch, (3,))
        if np.linalg.norm(bloch) > 1.0 + NORM_TOLERANCE:
            raise DomainError("Bloch vector is outside the unit ball", bloch.tolist())
        object.__setattr__(self, "bloch", bloch)

    @classmethod
    def maximally_mixed(cls) -> "QubitState":
        return cls(np.zeros(3))

    @property
    def is_pure(self) -> bool:
        return abs(np.linalg.norm(self.bloch) - 1.0) <= NORM_TOLERANCE

    def as_list(self) -> Any:
        return self.bloch.tolist()


@dataclass(frozen=True, eq=False)
class BinaryQubitMeasurement:
    """
    Projective two-outcome measurement along a unit axis.

    Raises:
        DomainError -- If the axis is not a unit vector.
    """

    axis: FloatArray

    def __post_init__(self) -> None:
        axis = frozen_array(self.axis, (3,))
        if abs(np.linalg.norm(axis) - 1.0) > NORM_TOLERANCE:
            raise DomainError("Measurement axis must be a unit vector", axis.tolist())
        object.__setattr__(self, "axis", axis)

    def as_list(self) -> Any:
        return self.axis.tolist()


@dataclass(frozen=True, eq=False)
class QuantumPrepareMeasure:
    """
    Qubit prepare-and-measure protocol: one state per Alice input, one measurement
    per Bob input.
    """

    states: Tuple[QubitState, ...]
    measurements: Tuple[BinaryQubitMeasurement, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "measurements", tuple(self.measurements))
        if not self.states or not self.measurements:
            raise DimensionMismatchError("Protocol needs at least one state and one measurement")

    @property
    def dims(self) -> ScenarioDims:
        return ScenarioDims(len(self.states), len(self.measurements), 2, 2)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "states": [state.as_list() for state in self.states],
            "measurements": [measurement.as_list() for measurement in self.measurements],
        }


def born_probability(state: QubitState, meas: BinaryQubitMeasurement, outcome: int) -> float:
    """
    Born rule `(1 + (-1)^outcome r.n) / 2`.

    ```python
    born_probability(QubitState.maximally_mixed(), BinaryQubitMeasurement([0, 0, 1]), 0)  # 0.5
    ```

    Raises:
        IndexOutOfRangeError -- If `outcome` is not a bit.
    """
    if outcome not in (0, 1):
        raise IndexOutOfRangeError(f"Outcome must be 0 or 1, got {outcome}")
    sign = 1.0 if outcome == 0 else -1.0
    return float((1.0 + sign * np.dot(state.bloch, meas.axis)) / 2.0)


def _cube_protocol(n: int, axes: Iterable[Iterable[float]]) -> QuantumPrepareMeasure:
    # bit b of a picks the sign of component b
    signs = 1.0 - 2.0 * digits(np.arange(2 ** n), 2, n)
    axes_array = np.asarray(list(axes), dtype=float)
    components = signs @ axes_array / np.sqrt(n)
    return QuantumPrepareMeasure(
        tuple(QubitState(row) for row in components),
        tuple(BinaryQubitMeasurement(axis) for axis in axes_array),
    )


def qrac2_protocol() -> QuantumPrepareMeasure:
    """
    2->1 code: states `((-1)^a0, 0, (-1)^a1) / sqrt(2)`, setting `b=0` measures
    along x and `b=1` along z. Every success entry equals `QRAC2_SUCCESS`.
    """
    return _cube_protocol(2, [(1.0, 0.0, 0.0), (0.0, 0.0, 1.0)])


def qrac3_protocol() -> QuantumPrepareMeasure:
    """
    3->1 code: cube vertex states `((-1)^a0, (-1)^a1, (-1)^a2) / sqrt(3)` measured
    along x, y, z. Every success entry equals `QRAC3_SUCCESS`.
    """
    return _cube_protocol(3, np.eye(3))


def quantum_statistics(q: QuantumPrepareMeasure) -> ConditionalDistribution:
    """
    `P(B|a,b)` from the Born rule for every state and measurement.
    """
    blochs = np.stack([state.bloch for state in q.states])
    axes = np.stack([measurement.axis for measurement in q.measurements])
    overlaps = blochs @ axes.T
    entries = np.stack([(1.0 + overlaps) / 2.0, (1.0 - overlaps) / 2.0])
    return ConditionalDistribution(q.dims, entries)


def _check_unit_interval(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must be in [0, 1], got {value}")


def eta_mixed_success(q_value: float, eta: float) -> float:
    """
    Success when Bob guesses uniformly on a no-click: `eta * q + (1 - eta) / 2`.

    Raises:
        DomainError -- If an argument is outside `[0, 1]`.
    """
    _check_unit_interval("q_value", q_value)
    _check_unit_interval("eta", eta)
    return eta * q_value + (1.0 - eta) / 2.0


def eta_mixed_statistics(p: ConditionalDistribution, eta: float) -> ConditionalDistribution:
    """
    Statistics when Bob outputs a uniform `B` on a no-click,
    `P'(B|a,b) = eta P(B|a,b) + (1 - eta) / n_B`.

    Raises:
        DomainError -- If `eta` is outside `[0, 1]`.
    """
    _check_unit_interval("eta", eta)
    return ConditionalDistribution(p.dims, eta * p.entries + (1.0 - eta) / p.dims.n_B)


def rotate_protocol(q: QuantumPrepareMeasure, rotation: FloatArray) -> QuantumPrepareMeasure:
    """
    Apply one rotation to every state and measurement axis.

    Raises:
        DomainError -- If `rotation` is not a proper rotation matrix.
    """
    matrix = frozen_array(rotation, (3, 3))
    if not np.allclose(matrix @ matrix.T, np.eye(3), atol=1e-9) or np.linalg.det(matrix) < 0:
        raise DomainError("Rotation must be a special orthogonal 3x3 matrix")
    states = tuple(QubitState(matrix @ state.bloch) for state in q.states)
    axes = matrix @ np.stack([measurement.axis for measurement in q.measurements]).T
    # renormalize axes drifting past the unit norm tolerance
    axes = axes / np.linalg.norm(axes, axis=0, keepdims=True)
    return QuantumPrepareMeasure(states, tuple(BinaryQubitMeasurement(axis) for axis in axes.T))


def random_rotation(rng: np.random.Generator) -> FloatArray:
    """
    Haar random rotation from the QR decomposition of a Gaussian matrix.
    """
    orthogonal, upper = np.linalg.qr(rng.normal(size=(3, 3)))
    orthogonal = orthogonal * np.sign(np.diag(upper))
    if np.linalg.det(orthogonal) < 0:
        orthogonal[:, 0] = -orthogonal[:, 0]
    return orthogonal
