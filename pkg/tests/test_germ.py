import math

import numpy as np
import pytest
import scipy.linalg

from jetgroupoid.germ import (
    GermError,
    MatrixGerm,
    cauchy,
    constant_germ,
    derivative_tensor,
    germ_exp,
    germ_inverse,
    germ_multiply,
    germ_partial,
    identity_germ,
    monomial_basis,
    random_group_germ,
    sample_exp_germ,
    trivialize_flat,
    xi_multi,
)
from jetgroupoid.lie import MatrixGroup, so3_generator
from jetgroupoid.partitions import enumerate_p1plus, extend_minus, extend_plus


def poly_1d(terms, K, N=2):
    """Germ in one variable from {degree: matrix}."""
    coeffs = np.zeros((K + 1, N, N))
    for d, m in terms.items():
        coeffs[d] = m
    return MatrixGerm(1, K, coeffs)


A = np.array([[0.0, 1.0], [2.0, 3.0]])
B = np.array([[1.0, -1.0], [0.5, 0.0]])
I2 = np.eye(2)


def test_basis_is_graded_prefix():
    big, small = monomial_basis(3, 4), monomial_basis(3, 2)
    assert big.exps[: small.size] == small.exps
    assert big.size == math.comb(3 + 4, 4)
    assert big.size_at(2) == small.size


def test_multiply_examples():
    a, b = constant_germ(1, 2, A), constant_germ(1, 2, B)
    assert np.allclose(germ_multiply(a, b).coeffs, constant_germ(1, 2, A @ B).coeffs)
    a = poly_1d({0: I2, 1: A}, 2)
    b = poly_1d({0: I2, 1: B}, 2)
    assert np.allclose(germ_multiply(a, b).coeffs, [I2, A + B, A @ B])
    assert np.allclose(germ_multiply(a, identity_germ(1, 2, 2)).coeffs, a.coeffs)
    assert not np.allclose(germ_multiply(a, b).coeffs, germ_multiply(b, a).coeffs)
    with pytest.raises(GermError):
        germ_multiply(a, identity_germ(1, 3, 2))


def test_inverse_examples():
    c = constant_germ(2, 2, A + 2 * I2)
    assert np.allclose(germ_inverse(c).value, np.linalg.inv(A + 2 * I2))
    a = poly_1d({0: I2, 1: A}, 2)
    assert np.allclose(germ_inverse(a).coeffs, [I2, -A, A @ A])
    with pytest.raises(GermError):
        germ_inverse(constant_germ(1, 1, np.zeros((2, 2))))


def test_partial_examples():
    assert np.allclose(germ_partial(constant_germ(2, 2, A), 1).coeffs, 0)
    assert np.allclose(germ_partial(poly_1d({1: A}, 2), 1).coeffs, [A, 0 * A])
    d = germ_partial(poly_1d({2: A}, 2), 1)
    assert d.K == 1 and np.allclose(d.coeffs, [0 * A, 2 * A])
    with pytest.raises(GermError):
        germ_partial(constant_germ(1, 0, A), 1)


def test_partial_in_two_variables():
    basis = monomial_basis(2, 3)
    c = np.zeros((basis.size, 2, 2))
    c[basis.index[(2, 1)]] = A  # x^2 y A
    g = MatrixGerm(2, 3, c)
    dx, dy = germ_partial(g, 1), germ_partial(g, 2)
    assert np.allclose(dx.coefficient((1, 1)), 2 * A)
    assert np.allclose(dy.coefficient((2, 0)), A)


def _exp_poly(x, linear, quadratic):
    y = np.tensordot(x, linear, axes=1) + np.einsum("m,n,mnab->ab", x, x, quadratic)
    return scipy.linalg.expm(y)


def test_sample_exp_germ_matches_expm(rng):
    so3 = MatrixGroup.from_tag("so3")
    lin = so3.random_algebra(rng, (2,))
    quad = so3.random_algebra(rng, (2, 2))
    germ = sample_exp_germ(2, 4, lin, quad, so3)
    assert np.allclose(germ.value, np.eye(3))
    for h in (1e-2, 5e-3):
        x = h * np.array([0.6, -0.8])
        err = np.max(np.abs(germ.evaluate(x) - _exp_poly(x, lin, quad)))
        # truncation error is O(h^5)
        assert err < 50 * h ** 5


def test_sample_exp_germ_examples():
    n, K = 1, 5
    assert np.allclose(sample_exp_germ(1, 3, [np.zeros((2, 2))]).coeffs, identity_germ(1, 3, 2).coeffs)
    series = [np.linalg.matrix_power(A, d) / math.factorial(d) for d in range(K + 1)]
    assert np.allclose(sample_exp_germ(n, K, [A]).coeffs, series)
    with pytest.raises(Exception):
        sample_exp_germ(1, 2, [A], group=MatrixGroup.from_tag("so2"))


def test_germ_exp_requires_zero_constant():
    with pytest.raises(GermError):
        germ_exp(constant_germ(1, 2, A))


def test_derivative_tensor_against_finite_differences(rng):
    """Second partials of the evaluated polynomial by central differences."""
    g = random_group_germ(rng, MatrixGroup.from_tag("gl3"), 2, 3)
    d2 = derivative_tensor(g, 2)
    h = 1e-4
    e = np.eye(2) * h
    for a in range(2):
        for b in range(2):
            fd = (
                g.evaluate(e[a] + e[b]) - g.evaluate(e[a] - e[b]) - g.evaluate(-e[a] + e[b]) + g.evaluate(-e[a] - e[b])
            ) / (4 * h * h)
            assert np.allclose(fd, d2[a, b], atol=1e-5)


def test_xi_multi(rng):
    lin = np.array([A, B])
    g = sample_exp_germ(2, 3, lin)
    assert np.allclose(xi_multi(g, (1,)), A)
    assert np.allclose(xi_multi(g, (2,)), B)
    gg = random_group_germ(rng, MatrixGroup.from_tag("gl3"), 3, 3)
    assert np.allclose(xi_multi(gg, (1, 3, 2)), xi_multi(gg, (3, 2, 1)))
    assert np.allclose(xi_multi(constant_germ(2, 2, A + 2 * I2), (1, 2)), 0)
    with pytest.raises(GermError):
        xi_multi(g, (1, 1, 1, 1))


def test_inverse_properties(rng, group):
    g = random_group_germ(rng, group, 2, 4)
    inv = germ_inverse(g)
    ident = identity_germ(2, 4, group.N)
    assert germ_multiply(g, inv).allclose(ident, 1e-10)
    assert germ_multiply(inv, g).allclose(ident, 1e-10)
    assert germ_inverse(inv).allclose(g, 1e-9)


def test_json_round_trip(rng):
    g = random_group_germ(rng, MatrixGroup.from_tag("so3"), 2, 2)
    back = MatrixGerm.from_json(g.to_json())
    assert back.allclose(g, 0) and back.group_tag == "so3"
    bad = g.to_json()
    bad["terms"][1]["exponents"] = [3, 0]
    with pytest.raises(GermError):
        MatrixGerm.from_json(bad)


def _field_xi(g, indices):
    """Germ of x -> (d^J g)(x) g(x)^{-1}, built only from germ arithmetic."""
    d = g
    for mu in indices:
        d = germ_partial(d, mu)
    inv = germ_inverse(g).truncate(d.K)
    return germ_multiply(d, inv)


@pytest.mark.parametrize("j", [1, 2, 3])
def test_partial_recursion(rng, j):
    """d_nu xi_{mu_1..mu_j} = xi_{mu_1..mu_j nu} - xi_{mu_1..mu_j} xi_nu at 0."""
    g = random_group_germ(rng, MatrixGroup.from_tag("gl3"), 2, j + 2)
    for mus in np.ndindex(*(2,) * j):
        mus = tuple(m + 1 for m in mus)
        field = _field_xi(g, mus)
        for nu in (1, 2):
            lhs = germ_partial(field, nu).value
            rhs = xi_multi(g, mus + (nu,)) - xi_multi(g, mus) @ xi_multi(g, (nu,))
            assert np.allclose(lhs, rhs, atol=1e-10)


def _xi_lambda_germ(g, p, mus):
    out = None
    for blk in p.blocks:
        f = _field_xi(g, tuple(mus[b - 1] for b in blk))
        f = f.truncate(g.K - len(mus))
        out = f if out is None else germ_multiply(out, f)
    return out


@pytest.mark.parametrize("j", [1, 2, 3])
def test_partial_product_rule(rng, j):
    """d/dx^{mu_k} xi_{lambda(mu)} = sum_s (xi_{lambda+_s} - xi_{lambda-_s})."""
    g = random_group_germ(rng, MatrixGroup.from_tag("so3"), 2, j + 2)
    for p in enumerate_p1plus(j):
        for mus in np.ndindex(*(2,) * (j + 1)):
            mus = tuple(m + 1 for m in mus)
            lhs = germ_partial(_xi_lambda_germ(g, p, mus[:j]), mus[j]).value
            rhs = 0
            for s in range(1, p.length + 1):
                rhs = rhs + _xi_lambda_germ(g, extend_plus(p, s), mus).value
                rhs = rhs - _xi_lambda_germ(g, extend_minus(p, s), mus).value
            assert np.allclose(lhs, rhs, atol=1e-9)


def test_trivialize_flat_exp_curve():
    so3 = MatrixGroup.from_tag("so3")
    a = 0.8 * so3_generator(1) - 0.3 * so3_generator(3)
    jet = trivialize_flat(sample_exp_germ(1, 3, [a], group=so3), 3)
    assert np.allclose(jet.g, np.eye(3))
    assert np.allclose(jet.xi[0][0], a)
    assert np.allclose(jet.xi[1], 0, atol=1e-14)
    assert np.allclose(jet.xi[2], 0, atol=1e-14)


def test_trivialize_flat_low_orders(rng, group):
    g = random_group_germ(rng, group, 2, 3)
    jet = trivialize_flat(g, 3)
    for mu in (1, 2):
        assert np.allclose(jet.xi[0][mu - 1], xi_multi(g, (mu,)))
        for nu in (1, 2):
            expected = xi_multi(g, (mu, nu)) - xi_multi(g, (mu,)) @ xi_multi(g, (nu,))
            assert np.allclose(jet.xi[1][mu - 1, nu - 1], expected, atol=1e-12)


def test_trivialize_is_derivative_of_lower_order(rng):
    """xi^(j+1)_{..nu} = d_nu of the field xi^(j)(x) at 0 (flat case), field built from germs."""
    g = random_group_germ(rng, MatrixGroup.from_tag("sl2"), 2, 3)
    jet = trivialize_flat(g, 2)
    for mu in (1, 2):
        for nu in (1, 2):
            lhs = germ_partial(_field_xi(g, (mu,)), nu).value
            assert np.allclose(jet.xi[1][mu - 1, nu - 1], lhs, atol=1e-12)


def test_trivialize_errors(rng):
    g = random_group_germ(rng, MatrixGroup.from_tag("so3"), 1, 2)
    with pytest.raises(GermError):
        trivialize_flat(g, 3)
    bad = constant_germ(1, 2, 2 * np.eye(3), "so3")
    with pytest.raises(Exception, match="not in SO3"):
        trivialize_flat(bad, 1)


def test_trivialize_algebra_containment(rng):
    for tag in ("so3", "sl2"):
        grp = MatrixGroup.from_tag(tag)
        for n in (1, 2, 3):
            jet = trivialize_flat(random_group_germ(rng, grp, n, 4), 4)
            for t in jet.xi:
                assert grp.algebra_residual(t) < 1e-9


def test_cauchy_scalar_combine():
    basis = monomial_basis(1, 2)
    a = np.array([1.0, 2.0, 0.0])
    b = np.array([3.0, 0.0, 1.0])
    assert np.allclose(cauchy(basis, a, b, np.multiply), [3.0, 6.0, 1.0])
