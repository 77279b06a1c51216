"""Messages and their word cost."""

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Tuple


class BandwidthMode(str, Enum):
    """How message cost is charged against the per-link budget."""
    DEFAULT = "default"  # declared word count
    STRICT = "strict"  # encoded bits / word size


@dataclass(frozen=True)
class Message:
    """Tagged payload with a declared word cost."""
    tag: str
    payload: Tuple[Any, ...] = ()
    words: int = 1

    def __post_init__(self) -> None:
        if self.words < 1:
            raise ValueError(f"message word cost must be >= 1, got {self.words}")

    def encoded_bits(self) -> int:
        return sum(field_bits(x) for x in self.payload) or 1

    def cost(self, mode: BandwidthMode, word_bits: int) -> int:
        if mode is BandwidthMode.STRICT:
            return max(1, math.ceil(self.encoded_bits() / word_bits))
        return self.words


def word_size(n: int) -> int:
    """Bits in one O(log n) word."""
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def field_bits(x: Any) -> int:
    """Encoded length of one payload field."""
    if x is None or isinstance(x, bool):
        return 1
    if isinstance(x, int):
        return max(1, abs(x).bit_length()) + (1 if x < 0 else 0)
    if isinstance(x, float):
        # only infinity travels as a float; it is a flag
        return 2 if math.isinf(x) else 64
    if isinstance(x, str):
        return 8 * len(x)
    if isinstance(x, Enum):
        return 2
    if dataclasses.is_dataclass(x):
        return sum(field_bits(getattr(x, f.name)) for f in dataclasses.fields(x))
    if isinstance(x, (tuple, list, frozenset, set)):
        return sum(field_bits(item) for item in x) or 1
    raise TypeError(f"cannot size payload field of type {type(x).__name__}")
