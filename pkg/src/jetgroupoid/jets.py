"""Trivialized jets ``(g, xi^(1), ..., xi^(k))`` and their groupoid operations.

``xi^(j)`` is an order-``j`` algebra-valued tensor stored as an array of shape
``(n,) * j + (N, N)`` (see :mod:`jetgroupoid.tensor`).  Higher orders are
covariant derivatives of lower ones with the differentiation index in the
LAST slot.

Multiplication and inversion are sums over anti-lexicographically ordered
partitions.  Those formulas place each new derivative index FIRST, so a
partition's blocks are read through the mirror ``a -> j + 1 - a`` before
selecting tensor slots.  Without the mirror the ``k = 2`` bracket lands as
``[xi_mu, (Ad_g eta)_nu]`` instead of the correct ``[xi_nu, (Ad_g eta)_mu]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from .lie import MatrixGroup, group_inverse
from .partitions import Partition, compositions, count_N, enumerate_antilex, mirror
from .tensor import GValuedTensor, skew2, spread


class JetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TrivializedJet:
    group: MatrixGroup
    g: np.ndarray
    xi: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        g = np.asarray(self.g, dtype=float)
        xi = tuple(np.asarray(t, dtype=float) for t in self.xi)
        N = self.group.N
        if g.shape != (N, N):
            raise JetError(f"g has shape {g.shape}, expected {(N, N)}")
        if not xi:
            raise JetError("a jet needs at least one tensor (k >= 1)")
        n = xi[0].shape[0]
        for j, t in enumerate(xi, start=1):
            if t.shape != (n,) * j + (N, N):
                raise JetError(f"xi^({j}) has shape {t.shape}, expected {(n,) * j + (N, N)}")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "xi", xi)

    @property
    def n(self) -> int:
        return self.xi[0].shape[0]

    @property
    def k(self) -> int:
        return len(self.xi)

    @property
    def N(self) -> int:
        return self.group.N

    def tensor(self, j: int) -> GValuedTensor:
        return GValuedTensor(self.xi[j - 1])

    def validate(self) -> None:
        """Raise unless ``g`` is in the group and every ``xi^(j)`` is algebra valued."""
        self.group.check_group(self.g, "g")
        for j, t in enumerate(self.xi, start=1):
            self.group.check_algebra(t, f"xi^({j})")

    def residual(self, other: "TrivializedJet") -> float:
        """Largest entrywise difference between two jets of the same shape."""
        _check_compatible(self, other)
        r = float(np.max(np.abs(self.g - other.g)))
        for a, b in zip(self.xi, other.xi):
            r = max(r, float(np.max(np.abs(a - b))))
        return r

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "k": self.k,
            "N": self.N,
            "group_tag": self.group.tag,
            "g": self.g.tolist(),
            "xi": [GValuedTensor(t).to_json() for t in self.xi],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any], tol: float | None = None) -> "TrivializedJet":
        group = MatrixGroup.from_tag(data["group_tag"]) if tol is None else MatrixGroup.from_tag(data["group_tag"], tol)
        xi = tuple(GValuedTensor.from_json(t).entries for t in data["xi"])
        jet = cls(group, np.asarray(data["g"], dtype=float), xi)
        if (jet.n, jet.k, jet.N) != (int(data["n"]), int(data["k"]), int(data["N"])):
            raise JetError(
                f"declared (n, k, N)={(data['n'], data['k'], data['N'])} but data has {(jet.n, jet.k, jet.N)}"
            )
        return jet


def _check_compatible(a: TrivializedJet, b: TrivializedJet) -> None:
    if (a.n, a.k, a.group.tag) != (b.n, b.k, b.group.tag):
        raise JetError(f"jets differ: (n, k, group)={(a.n, a.k, a.group.tag)} vs {(b.n, b.k, b.group.tag)}")


def identity_jet(n: int, k: int, group: MatrixGroup) -> TrivializedJet:
    N = group.N
    return TrivializedJet(group, np.eye(N), tuple(np.zeros((n,) * j + (N, N)) for j in range(1, k + 1)))


@lru_cache(maxsize=None)
def _slot_blocks(j: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Mirrored blocks of every partition in ``Pa(j)``, in enumeration order."""
    return tuple(mirror(p).blocks for p in enumerate_antilex(j))


def _full(t: np.ndarray, j: int, n: int) -> np.ndarray:
    return np.broadcast_to(t, (n,) * j + t.shape[-2:])


def multiply(a: TrivializedJet, b: TrivializedJet) -> TrivializedJet:
    """Fibered product ``(g, xi) (h, eta) = (gh, zeta)``.

    For each partition ``(l_1, ..., l_m)`` the term is
    ``ad(xi_{l_{m-1}}) ... ad(xi_{l_1}) (Ad_g eta_{l_m})``.
    """
    _check_compatible(a, b)
    n = a.n
    g_inv = group_inverse(a.g)
    ad_eta = [a.g @ t @ g_inv for t in b.xi]
    zeta = []
    for j in range(1, a.k + 1):
        acc = a.xi[j - 1].copy()
        for blocks in _slot_blocks(j):
            *chain, last = blocks
            inner = spread(ad_eta[len(last) - 1], last, j)
            for blk in chain:
                x = spread(a.xi[len(blk) - 1], blk, j)
                inner = x @ inner - inner @ x
            acc += _full(inner, j, n)
        zeta.append(acc)
    return TrivializedJet(a.group, a.g @ b.g, tuple(zeta))


def inverse(a: TrivializedJet) -> TrivializedJet:
    """Groupoid inverse ``(g^-1, omega)``.

    For each partition the term is
    ``(-1)^m Ad_{g^-1}(ad(xi_{l_1}) ... ad(xi_{l_{m-1}}) (xi_{l_m}))``.
    """
    n = a.n
    g_inv = group_inverse(a.g)
    omega = []
    for j in range(1, a.k + 1):
        acc = np.zeros((n,) * j + (a.N, a.N))
        for blocks in _slot_blocks(j):
            *chain, last = blocks
            inner = spread(a.xi[len(last) - 1], last, j)
            for blk in reversed(chain):
                x = spread(a.xi[len(blk) - 1], blk, j)
                inner = x @ inner - inner @ x
            acc += (-1) ** len(blocks) * _full(inner, j, n)
        omega.append(g_inv @ acc @ a.g)
    return TrivializedJet(a.group, g_inv, tuple(omega))


def _require_1d(a: TrivializedJet, what: str) -> None:
    if a.n != 1:
        raise JetError(f"{what} is only defined for n = 1 (got n = {a.n})")


def _flat_1d(a: TrivializedJet) -> list[np.ndarray]:
    return [t.reshape(a.N, a.N) for t in a.xi]


def multiply_via_counts(a: TrivializedJet, b: TrivializedJet) -> TrivializedJet:
    """One-dimensional product summed over compositions weighted by partition counts."""
    _check_compatible(a, b)
    _require_1d(a, "multiply_via_counts")
    xi, g_inv = _flat_1d(a), group_inverse(a.g)
    ad_eta = [a.g @ t @ g_inv for t in _flat_1d(b)]
    zeta = []
    for j in range(1, a.k + 1):
        acc = xi[j - 1].copy()
        for sizes in compositions(j):
            inner = ad_eta[sizes[-1] - 1]
            for r in sizes[:-1]:
                inner = xi[r - 1] @ inner - inner @ xi[r - 1]
            acc += count_N(sizes) * inner
        zeta.append(acc.reshape((1,) * j + acc.shape))
    return TrivializedJet(a.group, a.g @ b.g, tuple(zeta))


def inverse_via_counts(a: TrivializedJet) -> TrivializedJet:
    _require_1d(a, "inverse_via_counts")
    xi, g_inv = _flat_1d(a), group_inverse(a.g)
    omega = []
    for j in range(1, a.k + 1):
        acc = np.zeros((a.N, a.N))
        for sizes in compositions(j):
            inner = xi[sizes[-1] - 1]
            for r in reversed(sizes[:-1]):
                inner = xi[r - 1] @ inner - inner @ xi[r - 1]
            acc += (-1) ** len(sizes) * count_N(sizes) * inner
        acc = g_inv @ acc @ a.g
        omega.append(acc.reshape((1,) * j + acc.shape))
    return TrivializedJet(a.group, g_inv, tuple(omega))


def _require_order(a: TrivializedJet, k: int, what: str) -> None:
    if a.k != k:
        raise JetError(f"{what} needs k = {k} (got k = {a.k})")


def multiply_second_order(a: TrivializedJet, b: TrivializedJet) -> TrivializedJet:
    """Closed form for ``k = 2``: ``zeta2_{mu nu} = xi2 + Ad eta2 + [xi_nu, (Ad eta)_mu]``."""
    _check_compatible(a, b)
    _require_order(a, 2, "multiply_second_order")
    g_inv = group_inverse(a.g)
    xi1, xi2 = a.xi
    ad1, ad2 = (a.g @ t @ g_inv for t in b.xi)
    x = xi1[None, :]
    y = ad1[:, None]
    return TrivializedJet(a.group, a.g @ b.g, (xi1 + ad1, xi2 + ad2 + (x @ y - y @ x)))


def inverse_second_order(a: TrivializedJet) -> TrivializedJet:
    """Closed form for ``k = 2``: ``omega2_{mu nu} = Ad_{g^-1}(-xi2_{mu nu} + [xi_nu, xi_mu])``."""
    _require_order(a, 2, "inverse_second_order")
    g_inv = group_inverse(a.g)
    xi1, xi2 = a.xi
    x = xi1[None, :]
    y = xi1[:, None]
    return TrivializedJet(
        a.group, g_inv, (-(g_inv @ xi1 @ a.g), g_inv @ (-xi2 + (x @ y - y @ x)) @ a.g)
    )


def image_residual_k2(a: TrivializedJet) -> float:
    """Largest entry of ``Skew(xi^(2))_{mu nu} + 1/2 [xi_mu, xi_nu]``."""
    _require_order(a, 2, "image_residual_k2")
    xi1 = a.xi[0]
    x = xi1[:, None]
    y = xi1[None, :]
    bracket = x @ y - y @ x
    return float(np.max(np.abs(skew2(a.tensor(2)).entries + 0.5 * bracket)))


def check_image_k2(a: TrivializedJet, tol: float = 1e-9) -> bool:
    """Whether a ``k = 2`` jet satisfies the second-order image law."""
    return image_residual_k2(a) <= tol


def to_1d_form(a: TrivializedJet) -> tuple[np.ndarray, list[np.ndarray]]:
    _require_1d(a, "to_1d_form")
    return a.g.copy(), _flat_1d(a)


def from_1d_form(g: np.ndarray, xi: Sequence[np.ndarray], group: MatrixGroup) -> TrivializedJet:
    N = group.N
    tensors = []
    for j, x in enumerate(xi, start=1):
        x = np.asarray(x, dtype=float)
        if x.shape != (N, N):
            raise JetError(f"entry {j} has shape {x.shape}, expected {(N, N)}")
        tensors.append(x.reshape((1,) * j + (N, N)))
    return TrivializedJet(group, np.asarray(g, dtype=float), tuple(tensors))


def partition_term(a: TrivializedJet, b: TrivializedJet, p: Partition, multi_index: Sequence[int]) -> np.ndarray:
    """Single summand of :func:`multiply` at one 1-based multi-index.

    Reference path for tests: walks the mirrored blocks with
    :func:`jetgroupoid.tensor.block_component` one entry at a time.
    """
    from .tensor import block_component

    blocks = mirror(p).blocks
    g_inv = group_inverse(a.g)
    *chain, last = blocks
    inner = a.g @ block_component(b.tensor(len(last)), last, multi_index) @ g_inv
    for blk in chain:
        x = block_component(a.tensor(len(blk)), blk, multi_index)
        inner = x @ inner - inner @ x
    return inner
