"""
Column-oriented table of check records, the backing store of the acceptance
and verification reports.
"""
from collections import Counter
from typing import Any, Dict, Iterator, List, Optional, Type, TypeVar

from sdi_lab.errors import SDILabError
from sdi_lab.sentinel import SentinelValue

_R = TypeVar("_R", bound="ReportTable")

__all__ = ("ReportTable", "ReportTableError")


class ReportTableError(SDILabError):
    """
    Malformed `ReportTable` input.
    """


class ReportTable(dict):
    """
    Dict of columns. Records may have different keys, gaps hold `NOT_SET`.

    ```python
    table = ReportTable().add_record(
        {"item": 1, "status": "PASS"},
        {"item": 2, "status": "SKIPPED", "note": "premise violated"},
    )
    table["note"]  # [NOT_SET, 'premise violated']
    table.count("status", "PASS")  # 1
    table.as_records()[0]  # {'item': 1, 'status': 'PASS', 'note': None}
    ```

    Arguments:
        columns -- Initial columns, lists of equal or unequal length.
    """

    NOT_SET = SentinelValue("NOT_SET")
    NOT_SET_RESOLVED_VALUE: Any = None

    def __init__(self, columns: Optional[Dict[str, List[Any]]] = None) -> None:
        super().__init__()
        if columns is None:
            return
        if not isinstance(columns, dict):
            raise ReportTableError(f"Columns must be a dict, got {columns!r}")
        for key, values in columns.items():
            if not isinstance(values, list):
                raise ReportTableError(f"Column {key} must be a list, got {values!r}")
            self[key] = list(values)

    def __bool__(self) -> bool:
        return len(self) > 0

    def __len__(self) -> int:
        return self.max_length

    @property
    def max_length(self) -> int:
        return max((len(column) for column in self.values()), default=0)

    @property
    def min_length(self) -> int:
        return min((len(column) for column in self.values()), default=0)

    def is_normalized(self) -> bool:
        return self.min_length == self.max_length

    def normalize(self: _R) -> _R:
        """
        Pad short columns with `NOT_SET`.
        """
        length = self.max_length
        for column in self.values():
            column.extend([self.NOT_SET] * (length - len(column)))
        return self

    def add_record(self: _R, *records: Dict[str, Any]) -> _R:
        """
        Append records. New columns are back-filled with `NOT_SET`.

        Raises:
            ReportTableError -- If a record is not a dict.
        """
        for record in records:
            if not isinstance(record, dict):
                raise ReportTableError(f"Records must be dicts, got {record!r}")
            index = self.normalize().max_length
            for key, value in record.items():
                self.setdefault(key, [self.NOT_SET] * index).append(value)
            self.normalize()
        return self

    def _resolve(self, value: Any) -> Any:
        return self.NOT_SET_RESOLVED_VALUE if value is self.NOT_SET else value

    def get_column(self, name: str) -> List[Any]:
        """
        Column values with `NOT_SET` resolved, empty if the column is missing.
        """
        return [self._resolve(value) for value in self.get(name, [])]

    def get_record(self, index: int) -> Dict[str, Any]:
        """
        Raises:
            ReportTableError -- If the table is ragged or `index` is out of range.
        """
        if not self.is_normalized():
            raise ReportTableError("Table is ragged, call `normalize` first")
        if not 0 <= index < self.max_length:
            raise ReportTableError(f"No record {index} in a table of {self.max_length}")
        return {key: self._resolve(column[index]) for key, column in self.items()}

    def get_records(self) -> Iterator[Dict[str, Any]]:
        for index in range(self.max_length):
            yield self.get_record(index)

    def as_records(self) -> List[Dict[str, Any]]:
        return list(self.get_records())

    def counts(self, name: str) -> Dict[Any, int]:
        """
        Number of records per value of column `name`.

        ```python
        table.counts("status")  # {'PASS': 8, 'SKIPPED': 2}
        ```
        """
        return dict(Counter(self.get_column(name)))

    def count(self, name: str, value: Any) -> int:
        return self.counts(name).get(value, 0)

    @classmethod
    def from_records(cls: Type[_R], records: List[Dict[str, Any]]) -> _R:
        return cls().add_record(*records)
