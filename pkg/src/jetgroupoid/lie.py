"""Matrix Lie groups and their Lie algebras.

Group and algebra elements are plain ``(N, N)`` numpy arrays; a
:class:`MatrixGroup` carries the group tag and membership tolerance.  All
operators broadcast over leading axes, so a stack of algebra elements of
shape ``(..., N, N)`` can be bracketed or conjugated in one call.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
import scipy.linalg

DEFAULT_MEMBERSHIP_TOL = 1e-9

_KINDS = ("gl", "sl", "so")


class GroupError(ValueError):
    """Raised for malformed group tags or elements outside a group."""


@dataclass(frozen=True)
class MatrixGroup:
    """A matrix group ``GL(N)``, ``SL(N)`` or ``SO(N)``.

    ``tag`` strings look like ``"gl3"``, ``"sl2"``, ``"so3"``.
    """

    kind: str
    N: int
    tol: float = DEFAULT_MEMBERSHIP_TOL

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise GroupError(f"unknown group kind {self.kind!r}")
        if self.N < 1:
            raise GroupError("matrix size must be positive")

    @classmethod
    def from_tag(cls, tag: str, tol: float = DEFAULT_MEMBERSHIP_TOL) -> "MatrixGroup":
        m = re.fullmatch(r"(gl|sl|so)\(?(\d+)\)?", tag.strip().lower())
        if m is None:
            raise GroupError(f"unrecognised group tag {tag!r}")
        return cls(m.group(1), int(m.group(2)), tol)

    @property
    def tag(self) -> str:
        return f"{self.kind}{self.N}"

    def identity(self) -> np.ndarray:
        return np.eye(self.N)

    def project(self, a: np.ndarray) -> np.ndarray:
        """Orthogonal projection of arbitrary matrices onto the Lie algebra."""
        a = np.asarray(a, dtype=float)
        if self.kind == "so":
            return 0.5 * (a - np.swapaxes(a, -1, -2))
        if self.kind == "sl":
            tr = np.trace(a, axis1=-2, axis2=-1)[..., None, None]
            return a - tr * np.eye(self.N) / self.N
        return a.copy()

    def algebra_residual(self, a: np.ndarray) -> float:
        a = np.asarray(a, dtype=float)
        if a.size == 0:
            return 0.0
        return float(np.max(np.abs(a - self.project(a)), initial=0.0))

    def group_residual(self, g: np.ndarray) -> float:
        g = np.asarray(g, dtype=float)
        det = np.linalg.det(g)
        if self.kind == "gl":
            # invertibility only: report how close det is to vanishing
            return 0.0 if abs(det) > self.tol else float("inf")
        if self.kind == "sl":
            return float(abs(det - 1.0))
        ortho = float(np.max(np.abs(g.T @ g - np.eye(self.N))))
        return max(ortho, float(abs(det - 1.0)))

    def check_algebra(self, a: np.ndarray, what: str = "algebra element") -> None:
        self._check_shape(a, what)
        r = self.algebra_residual(a)
        if r > self.tol:
            raise GroupError(f"{what} is not in {self.tag} (residual {r:.3e})")

    def check_group(self, g: np.ndarray, what: str = "group element") -> None:
        self._check_shape(g, what)
        r = self.group_residual(g)
        if r > self.tol:
            raise GroupError(f"{what} is not in {self.tag.upper()} (residual {r:.3e})")

    def _check_shape(self, a: np.ndarray, what: str) -> None:
        shape = np.shape(a)
        if len(shape) < 2 or shape[-2:] != (self.N, self.N):
            raise GroupError(f"{what} has shape {shape}, expected (..., {self.N}, {self.N})")

    def random_algebra(self, rng: np.random.Generator, size: tuple[int, ...] = ()) -> np.ndarray:
        """Uniform ``[-1, 1]`` entries projected onto the algebra."""
        return self.project(rng.uniform(-1.0, 1.0, size=size + (self.N, self.N)))

    def basis(self) -> list[np.ndarray]:
        """A basis of the algebra as a list of matrices."""
        out = []
        N = self.N
        if self.kind == "so":
            for a in range(N):
                for b in range(a + 1, N):
                    e = np.zeros((N, N))
                    e[a, b], e[b, a] = -1.0, 1.0
                    out.append(e)
            return out
        for a in range(N):
            for b in range(N):
                if self.kind == "sl" and a == b == N - 1:
                    continue
                e = np.zeros((N, N))
                e[a, b] = 1.0
                out.append(self.project(e) if self.kind == "sl" and a == b else e)
        return out


def so3_generator(i: int) -> np.ndarray:
    """Standard skew generator ``E_i`` of so(3), ``i`` in 1..3, with [E1, E2] = E3."""
    e = np.zeros((3, 3))
    a, b = {1: (2, 1), 2: (0, 2), 3: (1, 0)}[i]
    e[a, b], e[b, a] = 1.0, -1.0
    return e


def _same_size(x: np.ndarray, y: np.ndarray) -> None:
    if np.shape(x)[-2:] != np.shape(y)[-2:]:
        raise GroupError(f"matrix size mismatch: {np.shape(x)} vs {np.shape(y)}")


def ad(xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Commutator ``xi eta - eta xi``; broadcasts over leading axes."""
    _same_size(xi, eta)
    return xi @ eta - eta @ xi


def Ad(g: np.ndarray, xi: np.ndarray, g_inv: np.ndarray | None = None) -> np.ndarray:
    """Conjugation ``g xi g^-1``."""
    _same_size(g, xi)
    if g_inv is None:
        g_inv = group_inverse(g)
    return g @ xi @ g_inv


def group_multiply(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    _same_size(g, h)
    return g @ h


def group_inverse(g: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise GroupError("singular matrix has no inverse") from exc


def exp(xi: np.ndarray) -> np.ndarray:
    return scipy.linalg.expm(np.asarray(xi, dtype=float))
