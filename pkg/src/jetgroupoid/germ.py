"""Truncated multivariate Taylor germs with matrix coefficients.

A :class:`MatrixGerm` is the Taylor polynomial at ``x = 0`` of a matrix
valued function of ``n`` variables, exact through total degree ``K``.  It is
both the concrete form of a ``k``-jet and the brute-force reference against
which the closed formulas in :mod:`jetgroupoid.jets` are checked.

Coefficients are indexed by exponent vectors in a graded order (degree
first), so the basis of a lower truncation is a prefix of a higher one.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from .lie import MatrixGroup, exp as group_exp, group_inverse
from .partitions import signed_p1plus
from .tensor import spread


class GermError(ValueError):
    pass


class MonomialBasis:
    """Exponent vectors of total degree ``<= K`` in ``n`` variables.

    Use :func:`monomial_basis` to get a cached instance.
    """

    def __init__(self, n: int, K: int):
        if n < 1 or K < 0:
            raise GermError(f"bad basis dimensions n={n}, K={K}")
        self.n, self.K = n, K
        exps: list[tuple[int, ...]] = []
        for d in range(K + 1):
            level = [
                tuple(c.count(v) for v in range(n))
                for c in itertools.combinations_with_replacement(range(n), d)
            ]
            exps.extend(sorted(set(level), reverse=True))
        self.exps = exps
        self.index = {e: i for i, e in enumerate(exps)}
        self.degree = np.array([sum(e) for e in exps])
        self.size = len(exps)
        self.level_start = [int(np.searchsorted(self.degree, d)) for d in range(K + 2)]

        ia, ib, ic = [], [], []
        for a, ea in enumerate(exps):
            for b, eb in enumerate(exps):
                if self.degree[a] + self.degree[b] <= K:
                    ia.append(a)
                    ib.append(b)
                    ic.append(self.index[tuple(x + y for x, y in zip(ea, eb))])
        self.mul_a = np.array(ia, dtype=np.intp)
        self.mul_b = np.array(ib, dtype=np.intp)
        self.mul_c = np.array(ic, dtype=np.intp)

    def size_at(self, K: int) -> int:
        """Number of monomials of degree ``<= K`` (a prefix of this basis)."""
        return self.level_start[min(K, self.K) + 1]

    @lru_cache(maxsize=None)
    def partial_table(self, mu: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(src, dst, factor)`` so that ``d/dx^mu`` maps ``c[src] * factor`` to ``dst``.

        ``mu`` is 0-based; ``dst`` indexes the degree ``K - 1`` prefix.
        """
        src, dst, fac = [], [], []
        for i, e in enumerate(self.exps):
            if e[mu] == 0:
                continue
            lower = list(e)
            lower[mu] -= 1
            src.append(i)
            dst.append(self.index[tuple(lower)])
            fac.append(e[mu])
        return (np.array(src, dtype=np.intp), np.array(dst, dtype=np.intp), np.array(fac, dtype=float))

    @lru_cache(maxsize=None)
    def derivative_table(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Monomial index and factorial weight for each multi-index of length ``j``.

        ``d^j f / dx^{mu_1} ... dx^{mu_j}`` at 0 equals ``alpha! * c[alpha]``
        where ``alpha`` counts the occurrences of each coordinate.
        """
        if j > self.K:
            raise GermError(f"derivative of order {j} exceeds truncation {self.K}")
        shape = (self.n,) * j
        idx = np.zeros(shape, dtype=np.intp)
        fac = np.zeros(shape)
        for mi in itertools.product(range(self.n), repeat=j):
            alpha = tuple(mi.count(v) for v in range(self.n))
            idx[mi] = self.index[alpha]
            fac[mi] = math.prod(math.factorial(a) for a in alpha)
        return idx, fac


@lru_cache(maxsize=None)
def monomial_basis(n: int, K: int) -> MonomialBasis:
    return MonomialBasis(n, K)


def cauchy(basis: MonomialBasis, a: np.ndarray, b: np.ndarray, combine=np.matmul) -> np.ndarray:
    """Truncated product of two coefficient arrays (coefficient axis first).

    ``combine`` multiplies stacks of coefficients; the default is the
    matrix product, which keeps the factor order.
    """
    terms = combine(a[basis.mul_a], b[basis.mul_b])
    out = np.zeros((basis.size,) + terms.shape[1:])
    np.add.at(out, basis.mul_c, terms)
    return out


@dataclass(frozen=True, eq=False)
class MatrixGerm:
    n: int
    K: int
    coeffs: np.ndarray
    group_tag: str | None = None

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=float)
        basis = monomial_basis(self.n, self.K)
        if c.ndim != 3 or c.shape[0] != basis.size or c.shape[1] != c.shape[2]:
            raise GermError(f"coefficients of shape {c.shape} do not fit n={self.n}, K={self.K}")
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self) -> int:
        return self.coeffs.shape[-1]

    @property
    def basis(self) -> MonomialBasis:
        return monomial_basis(self.n, self.K)

    @property
    def value(self) -> np.ndarray:
        """Value of the function at the base point."""
        return self.coeffs[0]

    def coefficient(self, exponents: Sequence[int]) -> np.ndarray:
        return self.coeffs[self.basis.index[tuple(exponents)]]

    def truncate(self, K: int) -> "MatrixGerm":
        if K > self.K:
            raise GermError(f"cannot raise truncation from {self.K} to {K}")
        m = monomial_basis(self.n, K).size
        return MatrixGerm(self.n, K, self.coeffs[:m], self.group_tag)

    def evaluate(self, x: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        powers = np.array([np.prod(x ** np.array(e)) for e in self.basis.exps])
        return np.tensordot(powers, self.coeffs, axes=1)

    def allclose(self, other: "MatrixGerm", atol: float = 1e-9) -> bool:
        return (self.n, self.K, self.N) == (other.n, other.K, other.N) and bool(
            np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol)
        )

    def __matmul__(self, other: "MatrixGerm") -> "MatrixGerm":
        return germ_multiply(self, other)

    def to_json(self) -> dict[str, Any]:
        terms = [
            {"exponents": list(e), "matrix": self.coeffs[i].tolist()}
            for i, e in enumerate(self.basis.exps)
            if i == 0 or np.any(self.coeffs[i])
        ]
        return {"n": self.n, "K": self.K, "N": self.N, "group_tag": self.group_tag, "terms": terms}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "MatrixGerm":
        n, K, N = int(data["n"]), int(data["K"]), int(data["N"])
        basis = monomial_basis(n, K)
        coeffs = np.zeros((basis.size, N, N))
        for term in data["terms"]:
            e = tuple(int(x) for x in term["exponents"])
            if len(e) != n or sum(e) > K or min(e) < 0:
                raise GermError(f"exponents {list(e)} outside n={n}, K={K}")
            m = np.asarray(term["matrix"], dtype=float)
            if m.shape != (N, N):
                raise GermError(f"term matrix has shape {m.shape}, expected {(N, N)}")
            coeffs[basis.index[e]] += m
        return cls(n, K, coeffs, data.get("group_tag"))


def constant_germ(n: int, K: int, value: np.ndarray, group_tag: str | None = None) -> MatrixGerm:
    value = np.asarray(value, dtype=float)
    coeffs = np.zeros((monomial_basis(n, K).size,) + value.shape)
    coeffs[0] = value
    return MatrixGerm(n, K, coeffs, group_tag)


def identity_germ(n: int, K: int, N: int, group_tag: str | None = None) -> MatrixGerm:
    return constant_germ(n, K, np.eye(N), group_tag)


def _check_compatible(a: MatrixGerm, b: MatrixGerm) -> None:
    if (a.n, a.K, a.N) != (b.n, b.K, b.N):
        raise GermError(f"germ shapes differ: (n, K, N)={(a.n, a.K, a.N)} vs {(b.n, b.K, b.N)}")


def germ_multiply(a: MatrixGerm, b: MatrixGerm) -> MatrixGerm:
    _check_compatible(a, b)
    return MatrixGerm(a.n, a.K, cauchy(a.basis, a.coeffs, b.coeffs), a.group_tag or b.group_tag)


def germ_inverse(a: MatrixGerm) -> MatrixGerm:
    """Germ of the pointwise matrix inverse, solved one degree at a time."""
    try:
        a0_inv = np.linalg.inv(a.value)
    except np.linalg.LinAlgError as exc:
        raise GermError("constant term is singular") from exc
    basis = a.basis
    b = np.zeros_like(a.coeffs)
    b[0] = a0_inv
    for d in range(1, a.K + 1):
        lo, hi = basis.level_start[d], basis.level_start[d + 1]
        # b has no degree-d terms yet, so this is the a0 * b_d-free part
        partial = cauchy(basis, a.coeffs, b)[lo:hi]
        b[lo:hi] = -a0_inv @ partial
    return MatrixGerm(a.n, a.K, b, a.group_tag)


def germ_partial(a: MatrixGerm, mu: int) -> MatrixGerm:
    """Formal derivative in the 1-based coordinate ``mu``; truncation drops by one."""
    if a.K < 1:
        raise GermError("cannot differentiate a germ truncated at order 0")
    if not 1 <= mu <= a.n:
        raise GermError(f"coordinate {mu} outside 1..{a.n}")
    src, dst, fac = a.basis.partial_table(mu - 1)
    out = np.zeros((monomial_basis(a.n, a.K - 1).size, a.N, a.N))
    out[dst] = a.coeffs[src] * fac[:, None, None]
    return MatrixGerm(a.n, a.K - 1, out, a.group_tag)


def germ_exp(y: MatrixGerm) -> MatrixGerm:
    """Germ of ``exp(y(x))`` for ``y`` vanishing at the base point."""
    if np.any(y.value):
        raise GermError("germ_exp needs a germ with zero constant term")
    out = identity_germ(y.n, y.K, y.N, y.group_tag)
    power = out
    for m in range(1, y.K + 1):
        power = germ_multiply(power, y)
        out = MatrixGerm(y.n, y.K, out.coeffs + power.coeffs / math.factorial(m), y.group_tag)
    return out


def derivative_tensor(a: MatrixGerm, j: int) -> np.ndarray:
    """All ``j``-th partials at 0 as an array of shape ``(n,) * j + (N, N)``."""
    idx, fac = a.basis.derivative_table(j)
    return a.coeffs[idx] * fac[..., None, None]


def xi_multi(a: MatrixGerm, indices: Sequence[int]) -> np.ndarray:
    """``(d^j a / dx^{mu_1} ... dx^{mu_j})(0) a(0)^{-1}`` for 1-based ``indices``."""
    j = len(indices)
    if j > a.K:
        raise GermError(f"{j} derivatives requested from a germ truncated at {a.K}")
    if any(not 1 <= m <= a.n for m in indices):
        raise GermError(f"indices {tuple(indices)} outside 1..{a.n}")
    idx, fac = a.basis.derivative_table(j)
    pos = tuple(m - 1 for m in indices)
    return a.coeffs[idx[pos]] * fac[pos] @ group_inverse(a.value)


def _group_for(a: MatrixGerm, group: MatrixGroup | None) -> MatrixGroup:
    if group is None:
        group = MatrixGroup.from_tag(a.group_tag) if a.group_tag else MatrixGroup("gl", a.N)
    if group.N != a.N:
        raise GermError(f"group {group.tag} does not act on {a.N}x{a.N} matrices")
    group.check_group(a.value, "germ value at the base point")
    return group


def trivialize_flat(a: MatrixGerm, k: int, group: MatrixGroup | None = None):
    """Right-trivialized ``k``-jet of ``a`` for the flat connection.

    Each ``xi^(j)`` is the signed sum, over partly ordered partitions with 1
    in the first block, of ordered products of the normalized partials
    ``xi_{mu...} = (d^r a) a(0)^{-1}`` taken on each block.
    """
    from .jets import TrivializedJet

    if k > a.K:
        raise GermError(f"order {k} exceeds germ truncation {a.K}")
    group = _group_for(a, group)
    a0_inv = group_inverse(a.value)
    normalized = {r: derivative_tensor(a, r) @ a0_inv for r in range(1, k + 1)}
    full = lambda j: (a.n,) * j + (a.N, a.N)  # noqa: E731
    xi = []
    for j in range(1, k + 1):
        acc = np.zeros(full(j))
        for p, eps in signed_p1plus(j):
            term = None
            for blk in p.blocks:
                factor = spread(normalized[len(blk)], blk, j)
                term = factor if term is None else term @ factor
            acc += eps * term
        xi.append(acc)
    return TrivializedJet(group, a.value.copy(), tuple(xi))


def trivialize_covariant(a: MatrixGerm, k: int, gamma, group: MatrixGroup | None = None):
    """Right-trivialized ``k``-jet of ``a`` built by repeated covariant differentiation.

    ``xi^(1) = da a^{-1}`` is formed as a field germ and each higher order is
    the covariant derivative of the previous field, evaluated at 0 at the end.
    """
    from .connection import TensorFieldGerm, covariant_derivative
    from .jets import TrivializedJet

    if k > a.K:
        raise GermError(f"order {k} exceeds germ truncation {a.K}")
    if k > 1 and gamma.K < a.K - 1:
        raise GermError(f"Christoffel truncation {gamma.K} is below {a.K - 1}")
    if gamma.n != a.n:
        raise GermError(f"Christoffel base dimension {gamma.n} differs from germ's {a.n}")
    group = _group_for(a, group)

    inv = germ_inverse(a).truncate(a.K - 1)
    lower = monomial_basis(a.n, a.K - 1)
    first = np.stack(
        [cauchy(lower, germ_partial(a, mu).coeffs, inv.coeffs) for mu in range(1, a.n + 1)],
        axis=1,
    )
    field = TensorFieldGerm(a.n, a.K - 1, first, order=1)
    xi = [field.value()]
    for _ in range(2, k + 1):
        field = covariant_derivative(field, gamma)
        xi.append(field.value())
    return TrivializedJet(group, a.value.copy(), tuple(xi))


def sample_exp_germ(
    n: int,
    K: int,
    linear: Sequence[np.ndarray],
    quadratic: np.ndarray | None = None,
    group: MatrixGroup | None = None,
) -> MatrixGerm:
    """Germ of ``exp(x^mu A_mu + x^mu x^nu B_{mu nu})``.

    ``linear`` holds ``n`` matrices ``A_mu``; ``quadratic`` (optional) has
    shape ``(n, n, N, N)``.  With a ``group`` every coefficient must lie in
    its algebra.
    """
    linear = np.asarray(linear, dtype=float)
    if linear.ndim != 3 or linear.shape[0] != n or linear.shape[1] != linear.shape[2]:
        raise GermError(f"expected {n} square linear coefficients, got shape {linear.shape}")
    N = linear.shape[-1]
    if group is not None:
        group.check_algebra(linear, "linear coefficient")
        if quadratic is not None:
            group.check_algebra(np.asarray(quadratic), "quadratic coefficient")
    basis = monomial_basis(n, K)
    y = np.zeros((basis.size, N, N))
    if K >= 1:
        for mu in range(n):
            e = [0] * n
            e[mu] = 1
            y[basis.index[tuple(e)]] += linear[mu]
    if quadratic is not None and K >= 2:
        quadratic = np.asarray(quadratic, dtype=float)
        for mu in range(n):
            for nu in range(n):
                e = [0] * n
                e[mu] += 1
                e[nu] += 1
                y[basis.index[tuple(e)]] += quadratic[mu, nu]
    tag = group.tag if group is not None else None
    return germ_exp(MatrixGerm(n, K, y, tag))


def random_group_germ(rng: np.random.Generator, group: MatrixGroup, n: int, K: int) -> MatrixGerm:
    """``exp(C) exp(Y(x))`` with ``C`` and every Taylor coefficient of ``Y`` random in the algebra.

    ``Y`` has terms of every degree ``1..K``, so the jet is generic (not just
    the image of a quadratic exponent).
    """
    basis = monomial_basis(n, K)
    y = group.random_algebra(rng, (basis.size,))
    y[0] = 0.0
    g0 = group_exp(group.random_algebra(rng))
    return germ_multiply(constant_germ(n, K, g0, group.tag), germ_exp(MatrixGerm(n, K, y, group.tag)))

