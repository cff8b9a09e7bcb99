import numpy as np
import pytest

from sdi_lab.utils import chunk_ranges, digits, format_path, get_nested_item, pluralize


class TestUtils:
    @staticmethod
    def test_chunk_ranges() -> None:
        assert list(chunk_ranges(5, size=2)) == [(0, 2), (2, 4), (4, 5)]
        assert list(chunk_ranges(0, size=2)) == []
        assert list(chunk_ranges(4, size=4)) == [(0, 4)]

        generator = chunk_ranges(3, size=2)
        assert next(generator) == (0, 2)
        assert next(generator) == (2, 3)
        with pytest.raises(StopIteration):
            next(generator)

        with pytest.raises(ValueError):
            list(chunk_ranges(3, size=0))

    @staticmethod
    def test_digits() -> None:
        assert digits(6, base=2, width=3).tolist() == [0, 1, 1]
        assert digits(6, base=2, width=3, little_endian=False).tolist() == [1, 1, 0]
        assert digits([1, 2], base=2, width=2, little_endian=False).tolist() == [[0, 1], [1, 0]]
        assert digits(np.arange(4), base=2, width=2).tolist() == [[0, 0], [1, 0], [0, 1], [1, 1]]
        assert digits(5, base=3, width=2).tolist() == [2, 1]
        assert digits(0, base=6, width=0).shape == (0,)

    @staticmethod
    def test_pluralize() -> None:
        assert pluralize(1, "item") == "item"
        assert pluralize(5, "item") == "items"
        assert pluralize(0, "assignment") == "assignments"
        assert pluralize(1, "matrix", "matrices") == "matrix"
        assert pluralize(5, "matrix", "matrices") == "matrices"

    @staticmethod
    def test_format_path() -> None:
        assert format_path(["prep", "strategies", 0, "encoder"]) == "prep.strategies[0].encoder"
        assert format_path(["dims", "n_a"]) == "dims.n_a"
        assert format_path([]) == ""

    @staticmethod
    def test_get_nested_item() -> None:
        nested = {"a": {"b": [{"c": 1}, {"c": 2}]}}
        assert get_nested_item(nested, ["a", "b", 1, "c"]) == 2
        assert get_nested_item(nested, ["a", "b", 0]) == {"c": 1}
        assert get_nested_item(nested, ["a", "c"]) is None
        assert get_nested_item(nested, ["a", "b", 2]) is None
        assert get_nested_item(nested, ["a", "b", "c"]) is None

        with pytest.raises(KeyError):
            get_nested_item(nested, ["a", "b", 5], raise_errors=True)
        with pytest.raises(KeyError):
            get_nested_item(nested, ["b"], raise_errors=True)
