"""
Type aliases shared across `sdi_lab`.
"""
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np
from typing_extensions import Literal

FloatArray = np.ndarray
IntArray = np.ndarray
Cell = Tuple[int, int]
JSONDict = Dict[str, Any]
PathType = Union[str, Path]
SearchModeStr = Literal["vertex", "grid"]
CriterionStr = Literal["worst_case", "average"]

__all__ = (
    "FloatArray",
    "IntArray",
    "Cell",
    "JSONDict",
    "PathType",
    "SearchModeStr",
    "CriterionStr",
)
