"""Lie-algebra-valued covariant tensors on R^n at a point.

An order-``j`` tensor is stored densely as an array of shape
``(n,) * j + (N, N)``; axis ``i`` holds the ``i``-th tensor slot (0-based),
so the multi-index ``(mu_1, ..., mu_j)`` is row-major with ``mu_1`` slowest.
Indices handed to the public functions are 1-based, as in coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np


class TensorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GValuedTensor:
    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim < 2 or arr.shape[-1] != arr.shape[-2]:
            raise TensorError(f"entries must end in a square matrix axis pair, got {arr.shape}")
        if len(set(arr.shape[:-2])) > 1:
            raise TensorError(f"all tensor slots must share one base dimension, got {arr.shape}")
        object.__setattr__(self, "entries", arr)

    @property
    def order(self) -> int:
        return self.entries.ndim - 2

    @property
    def base_dim(self) -> int | None:
        return self.entries.shape[0] if self.order else None

    @property
    def N(self) -> int:
        return self.entries.shape[-1]

    def __getitem__(self, multi_index: Sequence[int]) -> np.ndarray:
        idx = tuple(int(m) - 1 for m in multi_index)
        if len(idx) != self.order or any(not 0 <= m < (self.base_dim or 0) for m in idx):
            raise IndexError(f"multi-index {tuple(multi_index)} invalid for order {self.order}")
        return self.entries[idx]

    def __add__(self, other: "GValuedTensor") -> "GValuedTensor":
        return add(self, other)

    def __sub__(self, other: "GValuedTensor") -> "GValuedTensor":
        return add(self, scale(other, -1.0))

    def allclose(self, other: "GValuedTensor", atol: float = 1e-9) -> bool:
        return self.entries.shape == other.entries.shape and bool(
            np.allclose(self.entries, other.entries, rtol=0.0, atol=atol)
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "order": self.order,
            "base_dim": self.base_dim,
            "entries": self.entries.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "GValuedTensor":
        arr = np.asarray(data["entries"], dtype=float)
        t = cls(arr)
        if t.order != int(data["order"]):
            raise TensorError(f"declared order {data['order']} but entries have order {t.order}")
        if t.order and t.base_dim != int(data["base_dim"]):
            raise TensorError(f"declared base_dim {data['base_dim']} but entries have {t.base_dim}")
        return t


def _check_same_shape(a: GValuedTensor, b: GValuedTensor) -> None:
    if a.entries.shape != b.entries.shape:
        raise TensorError(f"shape mismatch: {a.entries.shape} vs {b.entries.shape}")


def add(a: GValuedTensor, b: GValuedTensor) -> GValuedTensor:
    _check_same_shape(a, b)
    return GValuedTensor(a.entries + b.entries)


def scale(a: GValuedTensor, c: float) -> GValuedTensor:
    return GValuedTensor(c * a.entries)


def zero_like(a: GValuedTensor) -> GValuedTensor:
    return GValuedTensor(np.zeros_like(a.entries))


def zeros(order: int, n: int, N: int) -> GValuedTensor:
    return GValuedTensor(np.zeros((n,) * order + (N, N)))


def block_component(t: GValuedTensor, block: Sequence[int], multi_index: Sequence[int]) -> np.ndarray:
    """Entry of ``t`` at the positions of ``multi_index`` picked out by ``block``.

    ``block`` lists 1-based positions into ``multi_index``; they are read in
    ascending order.
    """
    positions = sorted(int(b) for b in block)
    if len(positions) != t.order:
        raise TensorError(f"block of size {len(positions)} cannot index an order-{t.order} tensor")
    if len(set(positions)) != len(positions) or not all(1 <= b <= len(multi_index) for b in positions):
        raise TensorError(f"block {tuple(block)} is not a subset of 1..{len(multi_index)}")
    return t[[multi_index[b - 1] for b in positions]]


def spread(entries: np.ndarray, block: Sequence[int], j: int) -> np.ndarray:
    """Broadcast view of ``block_component`` over every multi-index of length ``j``.

    Returns an array with ``j`` index axes (size 1 on positions outside the
    block) such that ``out[mu] == entries[mu restricted to block]``.
    """
    positions = sorted(block)
    r = entries.ndim - 2
    if len(positions) != r:
        raise TensorError(f"block of size {len(positions)} cannot index an order-{r} tensor")
    missing = [p - 1 for p in range(1, j + 1) if p not in positions]
    return np.expand_dims(entries, tuple(missing)) if missing else entries


def sym2(t: GValuedTensor) -> GValuedTensor:
    if t.order != 2:
        raise TensorError("sym2 needs an order-2 tensor")
    return GValuedTensor(0.5 * (t.entries + np.swapaxes(t.entries, 0, 1)))


def skew2(t: GValuedTensor) -> GValuedTensor:
    if t.order != 2:
        raise TensorError("skew2 needs an order-2 tensor")
    return GValuedTensor(0.5 * (t.entries - np.swapaxes(t.entries, 0, 1)))
