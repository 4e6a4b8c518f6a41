"""Strings over the ternary alphabet {0, 1, erased}.

A trit string is stored as two parallel bit-planes packed into Python
integers: a value plane and a visibility mask.  Bit ``i`` of each plane
describes position ``i`` (LSB first).  Erased positions carry a zero value
bit, so compatibility tests and merges reduce to a handful of word-parallel
integer operations regardless of string length.

Text form uses ``'0'``, ``'1'`` and ``'*'`` (erased).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

__all__ = [
    "ERASED",
    "MergeError",
    "TritString",
    "measure",
    "compatible",
    "is_l_compatible",
    "compatible_substring_positions",
    "merge",
    "fold_cyclic",
]

ERASED = "*"


class MergeError(ValueError):
    """A requested merge or fold violates its preconditions."""


def _mask(length: int) -> int:
    return (1 << length) - 1


@dataclass(frozen=True, slots=True)
class TritString:
    """Immutable string over {0, 1, erased}.

    ``bits`` holds symbol values (bit ``i`` = position ``i``) and must be 0
    wherever ``known`` is 0; ``known`` marks unerased positions.
    """

    bits: int
    known: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError("length must be non-negative")
        full = _mask(self.length)
        if self.known & ~full:
            raise ValueError("visibility mask has bits beyond the string length")
        if self.bits & ~self.known:
            raise ValueError("value bits are only allowed at unerased positions")

    @classmethod
    def from_text(cls, text: str) -> "TritString":
        """Parse a string of '0', '1' and '*' characters."""
        bits = 0
        known = 0
        for i, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << i
                known |= 1 << i
            elif ch == "0":
                known |= 1 << i
            elif ch != ERASED:
                raise ValueError(f"invalid symbol {ch!r} at position {i + 1}")
        return cls(bits, known, len(text))

    @classmethod
    def binary(cls, bits: int, length: int) -> "TritString":
        """Fully visible string with the given value bits."""
        return cls(bits, _mask(length), length)

    @property
    def text(self) -> str:
        out = []
        for i in range(self.length):
            if self.known >> i & 1:
                out.append("1" if self.bits >> i & 1 else "0")
            else:
                out.append(ERASED)
        return "".join(out)

    @property
    def size(self) -> int:
        """Number of unerased positions."""
        return self.known.bit_count()

    def __len__(self) -> int:
        return self.length

    def __str__(self) -> str:
        return self.text

    def __iter__(self) -> Iterator[int | None]:
        for i in range(self.length):
            yield (self.bits >> i & 1) if (self.known >> i & 1) else None

    def prefix(self, length: int) -> "TritString":
        if not 0 <= length <= self.length:
            raise ValueError(f"prefix length {length} out of range [0, {self.length}]")
        m = _mask(length)
        return TritString(self.bits & m, self.known & m, length)

    def suffix(self, length: int) -> "TritString":
        if not 0 <= length <= self.length:
            raise ValueError(f"suffix length {length} out of range [0, {self.length}]")
        shift = self.length - length
        return TritString(self.bits >> shift, self.known >> shift, length)


def measure(u: TritString) -> tuple[int, int]:
    """(length, number of unerased symbols)."""
    return u.length, u.size


def compatible(u: TritString, v: TritString) -> bool:
    """Equal-length strings that disagree nowhere both are unerased."""
    if u.length != v.length:
        raise ValueError(f"length mismatch: {u.length} != {v.length}")
    return ((u.bits ^ v.bits) & u.known & v.known) == 0


def is_l_compatible(u: TritString, v: TritString, l: int) -> bool:
    """The l-suffix of ``u`` is compatible with the l-prefix of ``v``.

    ``l = 0`` is a legal query and vacuously true.
    """
    if not 0 <= l <= min(u.length, v.length):
        raise ValueError(f"overlap {l} out of range [0, {min(u.length, v.length)}]")
    m = _mask(l)
    shift = u.length - l
    return (((u.bits >> shift) ^ (v.bits & m)) & (u.known >> shift) & v.known & m) == 0


def compatible_substring_positions(
    v: TritString, u: TritString, cyclic: bool = False
) -> frozenset[int]:
    """1-based window starts of ``u`` where ``v`` sits compatibly.

    With ``cyclic=True`` windows wrap around the end of ``u`` and every
    start in [1, len(u)] is tried; otherwise only windows that fit.
    ``v`` is a compatible substring of ``u`` iff the result is non-empty.
    """
    if v.length > u.length:
        raise ValueError(f"needle longer than haystack: {v.length} > {u.length}")
    m = _mask(v.length)
    ub, uk = u.bits, u.known
    if cyclic:
        ub |= u.bits << u.length
        uk |= u.known << u.length
        limit = u.length
    else:
        limit = u.length - v.length + 1
    hits = []
    for p in range(limit):
        if (((ub >> p) ^ v.bits) & (uk >> p) & v.known & m) == 0:
            hits.append(p + 1)
    return frozenset(hits)


def merge(u: TritString, v: TritString, l: int) -> TritString:
    """Overlap-merge ``u`` and ``v``: the l-suffix of ``u`` is laid over the
    l-prefix of ``v`` and each overlap position takes the unerased symbol
    when one side has it.

    Requires 1 <= l (a zero overlap is "no merge", never a merge), the
    strings to be l-compatible, and the merging suffix of ``u`` to contain
    at least one unerased symbol.
    """
    s = _splice(u, v, l)
    if (u.known >> (u.length - l)) == 0:
        raise MergeError(f"merging suffix of length {l} has no unerased symbols")
    return s


def _splice(u: TritString, v: TritString, l: int) -> TritString:
    # Same overlap fill-in as merge() but without the visible-suffix demand;
    # ground-truth assembly merges purely on positional overlap.
    if not 1 <= l <= min(u.length, v.length):
        raise MergeError(f"overlap {l} out of range [1, {min(u.length, v.length)}]")
    if not is_l_compatible(u, v, l):
        raise MergeError(f"strings are not {l}-compatible")
    off = u.length - l
    return TritString(
        u.bits | (v.bits << off),
        u.known | (v.known << off),
        u.length + v.length - l,
    )


def fold_cyclic(u: TritString, l: int) -> TritString:
    """Close a chain onto itself: overlay the l-suffix of ``u`` on its own
    l-prefix, leaving one copy of the cyclic period.

    The period ``len(u) - l`` must be at least ``l`` (a tail that wraps
    past one full turn has no consistent placement).
    """
    if l < 1:
        raise MergeError("fold overlap must be at least 1")
    period = u.length - l
    if l > period:
        raise MergeError(f"fold overlap {l} exceeds period {period}")
    m = _mask(l)
    tail_bits = u.bits >> period
    tail_known = u.known >> period
    if (tail_bits ^ (u.bits & m)) & tail_known & u.known & m:
        raise MergeError(f"cyclic closure is not {l}-compatible")
    return TritString(
        (u.bits & _mask(period)) | tail_bits,
        (u.known & _mask(period)) | tail_known,
        period,
    )
