"""
JSON encoding for reports, error payloads and input files.

Keys are sorted by default, so equal reports render to byte-identical text.
"""
import enum
import json
from typing import Any, Type

import numpy as np

from sdi_lab.sentinel import SentinelValue


class SafeJSONEncoder(json.JSONEncoder):
    """
    Encoder that accepts anything a report or an error payload may hold.

    numpy arrays become nested lists and numpy scalars become Python numbers.
    Sets are sorted, enums are written by value and sentinels by name.
    Exceptions keep their class name, any other object falls back to `repr`.

    ```python
    dumps({"verdict": MembershipVerdict.FEASIBLE, "entries": np.eye(2)})
    # '{"entries": [[1.0, 0.0], [0.0, 1.0]], "verdict": "feasible"}'
    ```
    """

    def default(self, o: Any) -> Any:  # pylint:disable=method-hidden
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.integer, np.floating, np.bool_)):
            return o.item()
        if isinstance(o, (set, frozenset)):
            return sorted(o)
        if isinstance(o, enum.Enum):
            return o.value
        if isinstance(o, SentinelValue):
            return str(o)
        if isinstance(o, BaseException):
            return f"{o.__class__.__name__}('{o}')"
        return repr(o)


def dumps(
    data: Any,
    sort_keys: bool = True,
    cls: Type[json.JSONEncoder] = SafeJSONEncoder,
    **kwargs: Any,
) -> str:
    """
    `json.dumps` with `SafeJSONEncoder` and sorted keys.

    Arguments:
        data -- Report data.
        sort_keys -- Sort dictionary keys.
        cls -- Encoder class.
        kwargs -- Passed to `json.dumps`, for example `indent`.
    """
    return json.dumps(data, sort_keys=sort_keys, cls=cls, **kwargs)


def loads(data: str, **kwargs: Any) -> Any:
    return json.loads(data, **kwargs)
