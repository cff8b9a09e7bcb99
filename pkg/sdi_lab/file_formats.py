"""
Input and report files.

Scenario file, JSON:

```json
{
    "dims": {"n_a": 2, "n_b": 1, "n_A": 2, "n_B": 2},
    "spec": "2:1",
    "prep": {"strategies": [{"q": 1.0, "encoder": [[1, 0], [0, 1]], "eta_a": [1, 1]}]},
    "meas": {"strategies": [{"p": 1.0, "decoder": [[[1, 0]], [[0, 1]]], "eta": [[1], [1]]}]},
    "quantum": {"states": [[0, 0, 1], [0, 0, -1]], "measurements": [[0, 0, 1]]}
}
```

`spec`, `eta_a`, `eta` and `quantum` are optional. A file with only a `quantum`
block describes a qubit protocol.

Distribution file, JSON: `{"dims": {...}, "entries": [B][a][b], "clicks": [a][b]}`
with optional `clicks` and `spec`.

Event log, text: one round per line, `a b outcome`, outcome an integer or `NC`.
Blank lines and lines starting with `#` are skipped.
"""
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np

from sdi_lab.audit import EventLog
from sdi_lab.core import ClickTable, ConditionalDistribution, ScenarioDims
from sdi_lab.errors import ParseError
from sdi_lab.json_tools import dumps, loads
from sdi_lab.lab_types import FloatArray, JSONDict, PathType
from sdi_lab.quantum import BinaryQubitMeasurement, QuantumPrepareMeasure, QubitState
from sdi_lab.rac import RACSpec
from sdi_lab.scenario import DLScenario, MeasurementBox, PreparationBox
from sdi_lab.sentinel import NO_CLICK
from sdi_lab.utils import PathItem, format_path, get_nested_item

__all__ = (
    "ScenarioFile",
    "StatisticsFile",
    "load_json",
    "parse_scenario",
    "read_scenario",
    "write_scenario",
    "parse_distribution",
    "read_distribution",
    "parse_event_log",
    "read_event_log",
    "format_event_log",
    "read_statistics",
    "read_input",
    "write_report",
)

_T = TypeVar("_T")


@dataclass(frozen=True, eq=False)
class ScenarioFile:
    """
    Parsed scenario file.
    """

    scenario: Optional[DLScenario] = None
    quantum: Optional[QuantumPrepareMeasure] = None
    spec: Optional[RACSpec] = None

    def as_dict(self) -> JSONDict:
        result: JSONDict = {}
        if self.scenario is not None:
            result.update(self.scenario.as_dict())
        if self.quantum is not None:
            result["quantum"] = self.quantum.as_dict()
        if self.spec is not None:
            result["spec"] = f"{self.spec.n}:log{self.spec.message_dim}"
        return result


@dataclass(frozen=True, eq=False)
class StatisticsFile:
    """
    Observed statistics from a distribution file or an event log.
    """

    distribution: Optional[ConditionalDistribution] = None
    clicks: Optional[ClickTable] = None
    spec: Optional[RACSpec] = None
    log: Optional[EventLog] = None


def _read_text(path: PathType) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise ParseError(f"Cannot read {path}: {e.strerror}") from e


def load_json(text: str) -> JSONDict:
    """
    Parse JSON text into a dict.

    Raises:
        ParseError -- On invalid JSON, with the line number.
    """
    try:
        data = loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Invalid JSON: {e.msg}", line=e.lineno) from e
    if not isinstance(data, dict):
        raise ParseError("Top level must be an object", line=1)
    return data


def _required(data: JSONDict, path: Sequence[PathItem]) -> Any:
    try:
        return get_nested_item(data, path, raise_errors=True)
    except KeyError as e:
        raise ParseError("Missing field", field=format_path(path)) from e


def _array(data: JSONDict, path: Sequence[PathItem], ndim: int) -> FloatArray:
    value = _required(data, path)
    try:
        result = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise ParseError(f"Malformed matrix: {e}", field=format_path(path)) from e
    if result.ndim != ndim:
        raise ParseError(
            f"Expected a {ndim}-dimensional array, got {result.ndim} dimensions",
            field=format_path(path),
        )
    return result


def _integer(data: JSONDict, path: Sequence[PathItem]) -> int:
    value = _required(data, path)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParseError(f"Expected an integer, got {value!r}", field=format_path(path))
    return value


def _dims(data: JSONDict) -> ScenarioDims:
    names = ("n_a", "n_b", "n_A", "n_B")
    return ScenarioDims(*(_integer(data, ["dims", name]) for name in names))


def _spec(data: JSONDict) -> Optional[RACSpec]:
    if "spec" not in data:
        return None
    return RACSpec.parse(str(data["spec"]))


def _strategies(data: JSONDict, box: str) -> List[JSONDict]:
    strategies = _required(data, [box, "strategies"])
    if not isinstance(strategies, list) or not strategies:
        raise ParseError("Expected a non-empty list", field=format_path([box, "strategies"]))
    return strategies


def _box_arrays(
    data: JSONDict, box: str, prior: str, table: str, eta: str, ndim: int
) -> Tuple[FloatArray, FloatArray, Optional[FloatArray]]:
    priors: List[float] = []
    tables: List[FloatArray] = []
    etas: List[FloatArray] = []
    strategies = _strategies(data, box)
    for index in range(len(strategies)):
        base: List[PathItem] = [box, "strategies", index]
        priors.append(float(_array(data, [*base, prior], 0)))
        tables.append(_array(data, [*base, table], ndim))
        if eta in strategies[index]:
            etas.append(_array(data, [*base, eta], ndim - 1))

    if etas and len(etas) != len(tables):
        raise ParseError("Efficiencies must be given for every strategy or none", field=box)
    try:
        stacked = np.stack(tables)
        stacked_eta = np.stack(etas) if etas else None
    except ValueError as e:
        raise ParseError(f"Strategies have different shapes: {e}", field=box) from e
    return np.array(priors), stacked, stacked_eta


def _quantum(data: JSONDict) -> Optional[QuantumPrepareMeasure]:
    if "quantum" not in data:
        return None
    states = _array(data, ["quantum", "states"], 2)
    axes = _array(data, ["quantum", "measurements"], 2)
    if states.shape[1] != 3 or axes.shape[1] != 3:
        raise ParseError("Bloch vectors must have three components", field="quantum")
    return QuantumPrepareMeasure(
        tuple(QubitState(row) for row in states),
        tuple(BinaryQubitMeasurement(row) for row in axes),
    )


def parse_scenario(data: JSONDict) -> ScenarioFile:
    """
    Build a scenario from parsed JSON.

    Raises:
        ParseError -- On missing or malformed fields.
        InvalidScenarioError -- If boxes are not stochastic.
        DimensionMismatchError -- If arrays do not match `dims`.
    """
    quantum = _quantum(data)
    spec = _spec(data)
    if "prep" not in data and "meas" not in data:
        if quantum is None:
            raise ParseError("Scenario needs boxes or a quantum block", field="prep")
        return ScenarioFile(quantum=quantum, spec=spec)

    dims = _dims(data)
    q, encoders, alice_eta = _box_arrays(data, "prep", "q", "encoder", "eta_a", 2)
    p, decoders, bob_eta = _box_arrays(data, "meas", "p", "decoder", "eta", 3)
    scenario = DLScenario(
        PreparationBox(dims, q, encoders, alice_eta),
        MeasurementBox(dims, p, decoders, bob_eta),
    )
    return ScenarioFile(scenario=scenario, quantum=quantum, spec=spec)


def _field_line(text: str, field: str) -> int:
    """
    Best-effort line number of a dotted field path in JSON text.
    """
    position = 0
    skip = 0
    for key, index in re.findall(r"(\w+)|\[(\d+)\]", field):
        if index:
            skip = int(index)
            continue
        for _ in range(skip + 1):
            found = text.find(f'"{key}"', position)
            if found < 0:
                return 0
            position = found + 1
        skip = 0
    return text.count("\n", 0, position) + 1


def _parse_text(text: str, parser: Callable[[JSONDict], _T]) -> _T:
    try:
        return parser(load_json(text))
    except ParseError as e:
        if e.field and not e.line:
            line = _field_line(text, e.field)
            raise ParseError(e.message, line=line, field=e.field) from e
        raise


def read_scenario(path: PathType) -> ScenarioFile:
    return _parse_text(_read_text(path), parse_scenario)


def write_scenario(
    path: PathType,
    scenario: Optional[DLScenario] = None,
    quantum: Optional[QuantumPrepareMeasure] = None,
    spec: Optional[RACSpec] = None,
) -> None:
    data = ScenarioFile(scenario, quantum, spec).as_dict()
    Path(path).write_text(dumps(data, indent=2) + "\n")


def parse_distribution(data: JSONDict) -> StatisticsFile:
    """
    Build statistics from a parsed distribution file.

    Raises:
        ParseError -- On missing or malformed fields.
    """
    dims = _dims(data)
    distribution = ConditionalDistribution(dims, _array(data, ["entries"], 3))
    clicks = ClickTable(dims, _array(data, ["clicks"], 2)) if "clicks" in data else None
    return StatisticsFile(distribution, clicks, _spec(data))


def read_distribution(path: PathType) -> StatisticsFile:
    return _parse_text(_read_text(path), parse_distribution)


def parse_event_log(text: str) -> EventLog:
    """
    Parse the line-oriented event log.

    ```python
    parse_event_log("0 1 1\\n1 0 NC\\n")  # two rounds, the second one without a click
    ```

    Raises:
        ParseError -- On a malformed line, with its number and field.
    """
    rounds: List[Tuple[int, int, Any]] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 3:
            raise ParseError(
                f"Expected 'a b outcome', got {len(parts)} fields", line=line_number
            )
        values: List[Any] = []
        for name, part in zip(("a", "b", "outcome"), parts):
            if name == "outcome" and part == str(NO_CLICK):
                values.append(NO_CLICK)
                continue
            try:
                value = int(part)
            except ValueError as e:
                raise ParseError(
                    f"Expected an integer, got {part!r}", line=line_number, field=name
                ) from e
            if value < 0:
                raise ParseError(f"Negative index {value}", line=line_number, field=name)
            values.append(value)
        rounds.append((values[0], values[1], values[2]))
    return EventLog.from_rounds(rounds)


def read_event_log(path: PathType) -> EventLog:
    return parse_event_log(_read_text(path))


def format_event_log(log: EventLog) -> str:
    return "".join(f"{a} {b} {outcome}\n" for a, b, outcome in log)


def read_statistics(path: PathType) -> StatisticsFile:
    """
    Read a distribution file or an event log, told apart by the first character.

    Event logs are returned as they are, estimate them with `audit.estimate_from_log`.
    """
    text = _read_text(path)
    if text.lstrip().startswith("{"):
        return _parse_text(text, parse_distribution)
    return StatisticsFile(log=parse_event_log(text))


def read_input(path: PathType) -> Union[ScenarioFile, StatisticsFile]:
    """
    Read any input file: a scenario, a distribution or an event log.

    JSON documents with `prep`, `meas` or `quantum` blocks are scenarios.
    """
    text = _read_text(path)
    if not text.lstrip().startswith("{"):
        return StatisticsFile(log=parse_event_log(text))
    if any(key in load_json(text) for key in ("prep", "meas", "quantum")):
        return _parse_text(text, parse_scenario)
    return _parse_text(text, parse_distribution)


def write_report(data: Dict[str, Any], path: Optional[PathType] = None) -> str:
    """
    Render a report as sorted JSON and write it to `path` or stdout.

    Returns:
        The rendered report.
    """
    text = dumps(data, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text
