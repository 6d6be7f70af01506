"""Value model for the binary wire format.

Values are plain Python where a native type exists: ``None``, ``bool``,
``int`` (29-bit signed payloads; anything wider goes over the wire as a
double), ``float``, ``str``, ``bytes`` and ``dict`` (anonymous dynamic
object with non-empty string keys).  A plain ``list`` is a dense array.
The three shapes Python has no native spelling for get small classes here:
``undefined``, dates carried as millis-since-epoch, and arrays with both a
dense and an associative part.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any


class Undefined:
    """Singleton for the wire-level "undefined" value (distinct from null)."""

    _instance: "Undefined | None" = None

    def __new__(cls) -> "Undefined":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "undefined"

    def __bool__(self) -> bool:
        return False


undefined = Undefined()

#: Inclusive bounds of the integer payload range; wider ints encode as doubles.
INT_MIN = -(2**28)
INT_MAX = 2**28 - 1


@dataclass(frozen=True)
class AmfDate:
    """A wire date: milliseconds since the Unix epoch, as a double."""

    millis: float

    @classmethod
    def from_datetime(cls, dt: datetime) -> "AmfDate":
        return cls(dt.timestamp() * 1000.0)

    def to_datetime(self) -> datetime:
        return datetime.fromtimestamp(self.millis / 1000.0, tz=timezone.utc)


class MixedArray:
    """Array with a dense part plus ordered associative string keys.

    A ``MixedArray`` with an empty associative part compares equal to the
    plain list of its dense items, which is what the decoder hands back in
    that case.
    """

    __slots__ = ("dense", "assoc")

    def __init__(self, dense: list | None = None, assoc: dict[str, Any] | None = None):
        self.dense: list = list(dense) if dense is not None else []
        self.assoc: dict[str, Any] = dict(assoc) if assoc is not None else {}

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MixedArray):
            return self.dense == other.dense and self.assoc == other.assoc
        if isinstance(other, list) and not self.assoc:
            return self.dense == other
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"MixedArray(dense={self.dense!r}, assoc={self.assoc!r})"
