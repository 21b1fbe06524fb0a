"""Ordered set partitions of ``{1, ..., j}``.

Two families index every jet formula in this package:

* ``P1+(j)``: partly ordered partitions (each block ascending) whose first
  block contains 1.  Built by appending ``j + 1`` to an existing block
  (:func:`extend_plus`) or as a new singleton right after it
  (:func:`extend_minus`).
* ``Pa(j)``: anti-lexicographically ordered partitions (block maxima
  strictly increasing), counted by the Bell numbers.  Built by shifting
  every element up by one and inserting 1 (:func:`insert_shift`).

Blocks are tuples of 1-based positions.  A :class:`Partition` keeps blocks in
the order given, so ``is_partly_ordered`` can reject a block such as
``(2, 1)``; every enumerator emits ascending blocks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

Block = tuple[int, ...]

PLUS = "plus"
MINUS = "minus"


class PartitionError(ValueError):
    """Raised when a partition falls outside the domain of an operation."""


@dataclass(frozen=True)
class Partition:
    blocks: tuple[Block, ...]

    def __post_init__(self) -> None:
        blocks = tuple(tuple(int(a) for a in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise PartitionError("a partition needs at least one block")
        seen: list[int] = []
        for b in blocks:
            if not b:
                raise PartitionError("empty block")
            seen.extend(b)
        if sorted(seen) != list(range(1, len(seen) + 1)):
            raise PartitionError(f"blocks {blocks} do not partition {{1..{len(seen)}}}")

    @classmethod
    def _trusted(cls, blocks: tuple[Block, ...]) -> "Partition":
        # skips validation; callers derive blocks from an already valid partition
        obj = object.__new__(cls)
        object.__setattr__(obj, "blocks", blocks)
        return obj

    @classmethod
    def of(cls, *blocks: Sequence[int]) -> "Partition":
        return cls(tuple(tuple(b) for b in blocks))

    @property
    def j(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def length(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[Block]:
        return iter(self.blocks)

    def __str__(self) -> str:
        return "(" + ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + ")"

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[int]]) -> "Partition":
        return cls(tuple(tuple(b) for b in data))


def is_partly_ordered(p: Partition) -> bool:
    return all(all(a < b for a, b in zip(blk, blk[1:])) for blk in p.blocks)


def is_antilex(p: Partition) -> bool:
    maxima = [max(b) for b in p.blocks]
    return all(a < b for a, b in zip(maxima, maxima[1:]))


def in_p1plus(p: Partition) -> bool:
    return is_partly_ordered(p) and p.blocks[0][0] == 1


def _check_block_index(p: Partition, s: int, lo: int) -> None:
    if not lo <= s <= p.length:
        raise IndexError(f"block index {s} outside {lo}..{p.length}")


def extend_plus(p: Partition, s: int) -> Partition:
    """Append ``j + 1`` to block ``s`` (1-based)."""
    _check_block_index(p, s, 1)
    new = p.j + 1
    blocks = list(p.blocks)
    blocks[s - 1] = blocks[s - 1] + (new,)
    return Partition._trusted(tuple(blocks))


def extend_minus(p: Partition, s: int) -> Partition:
    """Insert the singleton ``{j + 1}`` right after block ``s`` (1-based)."""
    _check_block_index(p, s, 1)
    new = p.j + 1
    blocks = list(p.blocks)
    blocks.insert(s, (new,))
    return Partition._trusted(tuple(blocks))


def insert_shift(p: Partition, s: int) -> Partition:
    """Shift every element up by one, then put 1 into block ``s``.

    ``s = 0`` prepends a new singleton block ``{1}``.
    """
    _check_block_index(p, s, 0)
    shifted = [tuple(a + 1 for a in b) for b in p.blocks]
    if s == 0:
        return Partition._trusted(((1,), *shifted))
    shifted[s - 1] = (1,) + shifted[s - 1]
    return Partition._trusted(tuple(shifted))


def _parent_blocks(blocks: tuple[Block, ...], top: int) -> tuple[tuple[Block, ...], int, str]:
    s = next(i for i, b in enumerate(blocks, start=1) if b[-1] == top)
    if len(blocks[s - 1]) > 1:
        return blocks[: s - 1] + (blocks[s - 1][:-1],) + blocks[s:], s, PLUS
    return blocks[: s - 1] + blocks[s:], s - 1, MINUS


def parent(p: Partition) -> tuple[Partition, int, str]:
    """Return the unique ``(q, s, kind)`` with ``extend_<kind>(q, s) == p``."""
    if not in_p1plus(p):
        raise PartitionError(f"{p} is not in P1+")
    if p.j == 1:
        raise PartitionError("({1}) has no parent")
    blocks, s, kind = _parent_blocks(p.blocks, p.j)
    return Partition._trusted(blocks), s, kind


def sign(p: Partition) -> int:
    """Sign attached to ``p`` by walking its parent chain back to ``({1})``.

    Each ``minus`` step flips the sign; the closed form ``(-1)**(l - 1)`` is
    asserted along the way.
    """
    if not in_p1plus(p):
        raise PartitionError(f"{p} is not in P1+")
    eps = 1
    blocks, top = p.blocks, p.j
    while top > 1:
        blocks, _, kind = _parent_blocks(blocks, top)
        if kind == MINUS:
            eps = -eps
        top -= 1
    assert eps == (-1) ** (p.length - 1)
    return eps


@lru_cache(maxsize=None)
def enumerate_p1plus(j: int) -> tuple[Partition, ...]:
    if j < 1:
        raise PartitionError("j must be at least 1")
    if j == 1:
        return (Partition(((1,),)),)
    out: list[Partition] = []
    for p in enumerate_p1plus(j - 1):
        for s in range(1, p.length + 1):
            out.append(extend_plus(p, s))
            out.append(extend_minus(p, s))
    return tuple(out)


@lru_cache(maxsize=None)
def signed_p1plus(j: int) -> tuple[tuple[Partition, int], ...]:
    """``enumerate_p1plus(j)`` paired with each partition's sign."""
    return tuple((p, sign(p)) for p in enumerate_p1plus(j))


@lru_cache(maxsize=None)
def enumerate_antilex(j: int) -> tuple[Partition, ...]:
    if j < 1:
        raise PartitionError("j must be at least 1")
    if j == 1:
        return (Partition(((1,),)),)
    out: list[Partition] = []
    for p in enumerate_antilex(j - 1):
        for s in range(0, p.length + 1):
            out.append(insert_shift(p, s))
    return tuple(out)


def _check_sizes(sizes: Sequence[int]) -> list[int]:
    sizes = [int(x) for x in sizes]
    if not sizes:
        raise PartitionError("empty block-size sequence")
    if any(x < 1 for x in sizes):
        raise PartitionError(f"block sizes must be positive: {sizes}")
    return sizes


def count_c(sizes: Sequence[int]) -> int:
    """Number of partitions in ``P1+(j)`` with the given block sizes."""
    sizes = _check_sizes(sizes)
    total = sum(sizes)
    out = math.comb(total - 1, sizes[0] - 1)
    for i in range(1, len(sizes)):
        out *= math.comb(sum(sizes[i:]), sizes[i])
    return out


def count_N(sizes: Sequence[int]) -> int:
    """Number of partitions in ``Pa(j)`` with the given block sizes."""
    sizes = _check_sizes(sizes)
    out = 1
    for i in range(1, len(sizes)):
        out *= math.comb(sum(sizes[: i + 1]) - 1, sizes[i] - 1)
    return out


def compositions(j: int) -> Iterator[tuple[int, ...]]:
    """Ordered compositions of ``j`` into positive parts, shortest first."""
    if j < 1:
        raise PartitionError("j must be at least 1")

    def rec(rest: int, parts: int) -> Iterator[tuple[int, ...]]:
        if parts == 1:
            yield (rest,)
            return
        for first in range(1, rest - parts + 2):
            for tail in rec(rest - first, parts - 1):
                yield (first,) + tail

    for parts in range(1, j + 1):
        yield from rec(j, parts)


def mirror(p: Partition) -> Partition:
    """Relabel positions by ``a -> j + 1 - a`` and sort each block."""
    top = p.j + 1
    return Partition(tuple(tuple(sorted(top - a for a in b)) for b in p.blocks))
