"""Integer signatures: weakly decreasing integer tuples and their combinatorics."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Sequence

__all__ = [
    "Signature",
    "SignatureStats",
    "stats",
    "interlace",
    "shift",
    "negate",
    "concat",
    "transform",
    "enumerate_signatures",
    "parse_signature",
    "ENUMERATE_GUARD",
]

ENUMERATE_GUARD = 64


class Signature(tuple):
    """A weakly decreasing tuple of integers.

    Subclassing ``tuple`` gives hashing, structural equality and the
    lexicographic order for free.
    """

    __slots__ = ()

    def __new__(cls, parts: Sequence[int] = ()):
        parts = tuple(int(x) for x in parts)
        for i in range(len(parts) - 1):
            if parts[i] < parts[i + 1]:
                raise ValueError(f"parts must be weakly decreasing: {parts}")
        return super().__new__(cls, parts)

    @property
    def size(self) -> int:
        return sum(self)

    @property
    def weighted(self) -> int:
        # n(lambda) = sum (i-1) lambda_i with 1-based i
        return sum(i * x for i, x in enumerate(self))

    @property
    def length(self) -> int:
        return sum(1 for x in self if x > 0)

    def mults(self) -> dict[int, int]:
        return dict(Counter(self))

    def __repr__(self):
        return f"Signature({tuple(self)})"

    def __str__(self):
        return ",".join(str(x) for x in self)

    def to_json(self) -> list[int]:
        return list(self)


@dataclass(frozen=True)
class SignatureStats:
    size: int
    weighted: int
    mults: dict[int, int] = field(hash=False)
    length: int


def stats(lam: Sequence[int]) -> SignatureStats:
    lam = Signature(lam)
    return SignatureStats(lam.size, lam.weighted, lam.mults(), lam.length)


def interlace(kind: str, inner: Sequence[int], outer: Sequence[int]) -> bool:
    """Check ``inner <_P outer`` or ``inner <_Q outer``.

    P: len(outer) = len(inner) + 1 and outer_i >= inner_i >= outer_{i+1}.
    Q: equal lengths and outer_i >= inner_i >= outer_{i+1}.
    """
    if kind == "P":
        if len(outer) != len(inner) + 1:
            raise ValueError("P-interlacing needs len(outer) = len(inner) + 1")
        return all(outer[i] >= inner[i] >= outer[i + 1] for i in range(len(inner)))
    if kind == "Q":
        if len(outer) != len(inner):
            raise ValueError("Q-interlacing needs equal lengths")
        n = len(inner)
        return all(
            outer[i] >= inner[i] and (i + 1 >= n or inner[i] >= outer[i + 1]) for i in range(n)
        )
    raise ValueError(f"unknown interlacing kind {kind!r}")


def shift(lam: Sequence[int], d: int) -> Signature:
    return Signature(x + d for x in lam)


def negate(lam: Sequence[int]) -> Signature:
    return Signature(-x for x in reversed(lam))


def concat(lam: Sequence[int], mu: Sequence[int], resort: bool = False) -> Signature:
    parts = tuple(lam) + tuple(mu)
    if resort:
        return Signature(sorted(parts, reverse=True))
    return Signature(parts)


def transform(lam: Sequence[int], action: str, arg=None) -> Signature:
    if action == "shift":
        return shift(lam, arg)
    if action == "negate":
        return negate(lam)
    if action == "concat":
        return concat(lam, arg)
    raise ValueError(f"unknown action {action!r}")


def enumerate_signatures(
    n: int,
    low: int,
    high: int,
    size: int | None = None,
    guard: int = ENUMERATE_GUARD,
) -> Iterator[Signature]:
    """Yield every length-``n`` signature with parts in [low, high], lex-decreasing."""
    if low > high:
        raise ValueError("need low <= high")
    if n * (high - low) > guard:
        raise ValueError(f"enumeration box n*(high-low)={n * (high - low)} exceeds guard {guard}")

    def rec(prefix: list[int], remaining: int, cap: int, budget):
        if remaining == 0:
            if budget is None or budget == 0:
                yield Signature(prefix)
            return
        top = cap
        if budget is not None:
            # the other remaining-1 parts contribute at least low each
            top = min(top, budget - (remaining - 1) * low)
        for x in range(top, low - 1, -1):
            if budget is not None and x * remaining < budget:
                break
            prefix.append(x)
            yield from rec(prefix, remaining - 1, x, None if budget is None else budget - x)
            prefix.pop()

    if n == 0:
        if size is None or size == 0:
            yield Signature(())
        return
    yield from rec([], n, high, size)


def parse_signature(text: str) -> Signature:
    text = text.strip()
    if text in ("", "()", "[]"):
        return Signature(())
    return Signature(int(x) for x in text.strip("()[]").split(","))
