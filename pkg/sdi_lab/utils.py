from typing import Any, Iterable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

PathItem = Union[str, int]


def chunk_ranges(total: int, size: int) -> Iterator[Tuple[int, int]]:
    """
    Splits `range(total)` to chunks of `size` length or less.

    ```python
    for start, stop in chunk_ranges(5, size=2):
        print(start, stop)

    # 0 2
    # 2 4
    # 4 5
    ```

    Arguments:
        total -- Number of items to split.
        size -- Max chunk size.

    Returns:
        A generator of `(start, stop)` pairs.
    """
    if size < 1:
        raise ValueError(f"Chunk size must be positive, got {size}")

    for start in range(0, total, size):
        yield start, min(start + size, total)


def digits(
    indices: Union[int, Sequence[int], np.ndarray],
    base: int,
    width: int,
    little_endian: bool = True,
) -> np.ndarray:
    """
    Decode integers into fixed-width mixed radix digits.

    Little-endian order puts the least significant digit first, so bit `b` of `a`
    is `digits(a, 2, n)[b]`. Big-endian order enumerates tuples lexicographically.

    ```python
    digits(6, base=2, width=3)  # array([0, 1, 1])
    digits([1, 2], base=2, width=2, little_endian=False)  # array([[0, 1], [1, 0]])
    ```

    Arguments:
        indices -- Integer or integer array to decode.
        base -- Radix.
        width -- Number of digits.
        little_endian -- Least significant digit first.

    Returns:
        Array with a trailing axis of length `width`.
    """
    values = np.asarray(indices, dtype=np.int64)
    powers = base ** np.arange(width, dtype=np.int64)
    if not little_endian:
        powers = powers[::-1]
    return (values[..., None] // powers) % base


def pluralize(count: int, singular: str, plural: Optional[str] = None) -> str:
    """
    Pluralize a noun according to `count`.

    Arguments:
        count -- Count of objects.
        singular -- Singular noun form.
        plural -- Plural noun form. If not provided - append `s` to singular form.

    Returns:
        A noun in proper form.
    """
    if count == 1:
        return singular

    if plural is not None:
        return plural

    return f"{singular}s"


def format_path(item_path: Iterable[PathItem]) -> str:
    """
    Render a nested item path as `prep.strategies[0].encoder`.
    """
    result = ""
    for item in item_path:
        if isinstance(item, int):
            result = f"{result}[{item}]"
            continue
        result = f"{result}.{item}" if result else item
    return result


def get_nested_item(data: Any, item_path: Iterable[PathItem], raise_errors: bool = False) -> Any:
    """
    Get nested `item_path` from `data` made of dicts and lists.

    Arguments:
        data -- Source dictionary.
        item_path -- Keys and list indices.
        raise_errors -- Whether to raise `KeyError` on a missing item.

    Raises:
        KeyError -- If nested item is missing and `raise_errors` is set.
    """
    path = list(item_path)
    result: Any = data
    for item in path:
        if isinstance(item, int):
            if isinstance(result, list) and -len(result) <= item < len(result):
                result = result[item]
                continue
        elif isinstance(result, dict) and item in result:
            result = result[item]
            continue

        if raise_errors:
            raise KeyError(f"Cannot get nested path {format_path(path)}")

        return None
    return result
