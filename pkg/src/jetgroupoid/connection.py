"""Christoffel data and covariant derivatives of algebra-valued tensor fields.

Fields are germs at ``x = 0`` in a chart.  The covariant derivative of an
order-``j`` field appends the differentiation index as the last slot::

    (nabla a)_{mu_1..mu_j nu} = d_nu a_{mu_1..mu_j}
                                - sum_i Gamma^s_{nu mu_i} a_{mu_1..s..mu_j}

that is, ``nabla_nu dx^s = -Gamma^s_{nu mu} dx^mu``, the connection dual to
``nabla_nu d/dx^mu = Gamma^s_{nu mu} d/dx^s``.  The connection acts on the
tensor slots only; matrix values ride along untouched.
"""
from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Any

import numpy as np

from .germ import GermError, monomial_basis


@dataclass(frozen=True, eq=False)
class ChristoffelGerm:
    """``coeffs[c, s, mu, nu]`` is the monomial-``c`` coefficient of ``Gamma^s_{mu nu}``."""

    n: int
    K: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=float)
        m = monomial_basis(self.n, self.K).size
        if c.shape != (m, self.n, self.n, self.n):
            raise GermError(f"Christoffel coefficients of shape {c.shape}, expected {(m, self.n, self.n, self.n)}")
        object.__setattr__(self, "coeffs", c)

    def truncate(self, K: int) -> "ChristoffelGerm":
        if K > self.K:
            raise GermError(f"cannot raise truncation from {self.K} to {K}")
        return ChristoffelGerm(self.n, K, self.coeffs[: monomial_basis(self.n, K).size])

    def to_json(self) -> dict[str, Any]:
        basis = monomial_basis(self.n, self.K)
        components = []
        for s in range(self.n):
            for mu in range(self.n):
                for nu in range(self.n):
                    col = self.coeffs[:, s, mu, nu]
                    terms = [
                        {"exponents": list(e), "value": float(col[i])}
                        for i, e in enumerate(basis.exps)
                        if col[i] != 0.0
                    ]
                    if terms:
                        components.append({"index": [s + 1, mu + 1, nu + 1], "terms": terms})
        return {"n": self.n, "K": self.K, "components": components}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "ChristoffelGerm":
        n, K = int(data["n"]), int(data["K"])
        basis = monomial_basis(n, K)
        coeffs = np.zeros((basis.size, n, n, n))
        for comp in data.get("components", []):
            s, mu, nu = (int(i) - 1 for i in comp["index"])
            for term in comp["terms"]:
                e = tuple(int(x) for x in term["exponents"])
                if e not in basis.index:
                    raise GermError(f"exponents {list(e)} outside n={n}, K={K}")
                coeffs[basis.index[e], s, mu, nu] += float(term["value"])
        return cls(n, K, coeffs)


def flat_connection(n: int, K: int) -> ChristoffelGerm:
    return ChristoffelGerm(n, K, np.zeros((monomial_basis(n, K).size, n, n, n)))


def constant_connection(n: int, K: int, gamma: np.ndarray) -> ChristoffelGerm:
    coeffs = np.zeros((monomial_basis(n, K).size, n, n, n))
    coeffs[0] = gamma
    return ChristoffelGerm(n, K, coeffs)


def random_connection(rng: np.random.Generator, n: int, K: int) -> ChristoffelGerm:
    """Polynomial Christoffel symbols with uniform ``[-1, 1]`` coefficients, not symmetric."""
    m = monomial_basis(n, K).size
    return ChristoffelGerm(n, K, rng.uniform(-1.0, 1.0, size=(m, n, n, n)))


@dataclass(frozen=True, eq=False)
class TensorFieldGerm:
    """Germ of an order-``order`` tensor field with scalar or matrix values.

    ``coeffs`` has shape ``(M,) + (n,) * order + value_shape`` with ``M``
    the number of monomials of degree ``<= K``.
    """

    n: int
    K: int
    coeffs: np.ndarray
    order: int

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=float)
        m = monomial_basis(self.n, self.K).size
        if c.ndim < 1 + self.order or c.shape[0] != m or c.shape[1 : 1 + self.order] != (self.n,) * self.order:
            raise GermError(f"field coefficients of shape {c.shape} do not fit n={self.n}, K={self.K}, order={self.order}")
        object.__setattr__(self, "coeffs", c)

    @property
    def value_shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[1 + self.order :]

    def value(self) -> np.ndarray:
        """The field at the base point."""
        return self.coeffs[0].copy()


def partial_field(field: TensorFieldGerm) -> TensorFieldGerm:
    """Componentwise partial derivative; the new index is the last slot."""
    if field.K < 1:
        raise GermError("field truncation exhausted")
    basis = monomial_basis(field.n, field.K)
    m = monomial_basis(field.n, field.K - 1).size
    j = field.order
    out = np.zeros((m,) + (field.n,) * (j + 1) + field.value_shape)
    slots = (slice(None),) * j
    for nu in range(field.n):
        src, dst, fac = basis.partial_table(nu)
        scaled = field.coeffs[src] * fac.reshape((-1,) + (1,) * (field.coeffs.ndim - 1))
        out[(dst,) + slots + (nu,)] = scaled
    return TensorFieldGerm(field.n, field.K - 1, out, j + 1)


def covariant_derivative(field: TensorFieldGerm, gamma: ChristoffelGerm) -> TensorFieldGerm:
    if gamma.n != field.n:
        raise GermError(f"Christoffel base dimension {gamma.n} differs from field's {field.n}")
    out = partial_field(field)
    j = field.order
    if j == 0:
        return out
    K = out.K
    if gamma.K < K:
        raise GermError(f"Christoffel truncation {gamma.K} is below {K}")
    basis = monomial_basis(field.n, K)
    g = gamma.coeffs[: basis.size]
    a = field.coeffs[: basis.size]
    letters = [c for c in string.ascii_lowercase if c not in "psvm"][:j]
    coeffs = out.coeffs.copy()
    for i in range(j):
        src = letters.copy()
        src[i] = "s"
        dst = letters.copy()
        dst[i] = "m"
        spec = f"psvm,p{''.join(src)}...->p{''.join(dst)}v..."
        terms = np.einsum(spec, g[basis.mul_a], a[basis.mul_b])
        np.subtract.at(coeffs, basis.mul_c, terms)
    return TensorFieldGerm(field.n, K, coeffs, j + 1)
