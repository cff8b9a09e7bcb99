"""
Named placeholder objects, compared by identity.
"""

__all__ = ("SentinelValue", "NO_CLICK")


class SentinelValue:
    """
    Placeholder that prints as its name, so it reads well in logs, event files
    and generated docs.

    ```python
    if outcome is NO_CLICK:
        ...
    str(NO_CLICK)  # 'NC'
    ```

    Arguments:
        name -- Printed form.
    """

    __slots__ = ("_name",)

    def __init__(self, name: str = "DEFAULT") -> None:
        self._name = name

    @property
    def name(self) -> str:
        return self._name

    def __repr__(self) -> str:
        return self._name

    __str__ = __repr__


# Outcome of a round in which the detector stayed silent.
NO_CLICK = SentinelValue("NC")
