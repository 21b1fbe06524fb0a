import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jetgroupoid.connection import random_connection
from jetgroupoid.germ import germ_inverse, germ_multiply, random_group_germ, sample_exp_germ, trivialize_covariant, trivialize_flat
from jetgroupoid.jets import (
    JetError,
    TrivializedJet,
    check_image_k2,
    from_1d_form,
    identity_jet,
    image_residual_k2,
    inverse,
    inverse_second_order,
    inverse_via_counts,
    multiply,
    multiply_second_order,
    multiply_via_counts,
    partition_term,
    to_1d_form,
)
from jetgroupoid.lie import MatrixGroup, exp, so3_generator
from jetgroupoid.partitions import enumerate_antilex


def random_jet(rng, group, n, k):
    """Random point of G x (+) tensors; generally not in the image of a germ."""
    g = exp(group.random_algebra(rng))
    xi = tuple(group.random_algebra(rng, (n,) * j) for j in range(1, k + 1))
    return TrivializedJet(group, g, xi)


def test_identity_jet(rng, group):
    a = trivialize_flat(random_group_germ(rng, group, 2, 3), 3)
    e = identity_jet(2, 3, group)
    assert multiply(e, a).residual(a) < 1e-14
    assert multiply(a, e).residual(a) < 1e-14
    assert inverse(e).residual(e) == 0.0


def test_k2_example_formulas(rng, group):
    for _ in range(10):
        a, b = random_jet(rng, group, 3, 2), random_jet(rng, group, 3, 2)
        assert multiply(a, b).residual(multiply_second_order(a, b)) < 1e-12
        assert inverse(a).residual(inverse_second_order(a)) < 1e-12


def test_k1_inverse(rng, group):
    a = random_jet(rng, group, 2, 1)
    g_inv = np.linalg.inv(a.g)
    inv = inverse(a)
    assert np.allclose(inv.g, g_inv)
    assert np.allclose(inv.xi[0], -(g_inv @ a.xi[0] @ a.g))


def test_vectorized_multiply_matches_entrywise_reference(rng):
    group = MatrixGroup.from_tag("gl3")
    a, b = random_jet(rng, group, 2, 3), random_jet(rng, group, 2, 3)
    zeta = multiply(a, b)
    for j in (1, 2, 3):
        for mu in np.ndindex(*(2,) * j):
            idx = tuple(m + 1 for m in mu)
            expected = a.xi[j - 1][mu] + sum(partition_term(a, b, p, idx) for p in enumerate_antilex(j))
            assert np.allclose(zeta.xi[j - 1][mu], expected, atol=1e-13)


def test_unmirrored_reading_fails_oracle(rng):
    """The mirror is load-bearing: k = 2 with [xi_mu, (Ad eta)_nu] breaks the homomorphism."""
    group = MatrixGroup.from_tag("so3")
    p, q = (random_group_germ(rng, group, 2, 2) for _ in range(2))
    a, b = trivialize_flat(p, 2), trivialize_flat(q, 2)
    g_inv = np.linalg.inv(a.g)
    ad1 = a.g @ b.xi[0] @ g_inv
    wrong = a.xi[1] + a.g @ b.xi[1] @ g_inv + (a.xi[0][:, None] @ ad1[None, :] - ad1[None, :] @ a.xi[0][:, None])
    truth = trivialize_flat(germ_multiply(p, q), 2).xi[1]
    assert np.max(np.abs(wrong - truth)) > 1e-3
    assert np.max(np.abs(multiply(a, b).xi[1] - truth)) < 1e-12


@given(seed=st.integers(0, 2**32 - 1), tag=st.sampled_from(["gl3", "sl2", "so3"]), n=st.integers(1, 3), k=st.integers(1, 4))
@settings(max_examples=40, deadline=None)
def test_homomorphism_against_germ_oracle(seed, tag, n, k):
    rng = np.random.default_rng(seed)
    group = MatrixGroup.from_tag(tag)
    p, q = (random_group_germ(rng, group, n, k) for _ in range(2))
    a, b = trivialize_flat(p, k), trivialize_flat(q, k)
    assert trivialize_flat(germ_multiply(p, q), k).residual(multiply(a, b)) < 1e-8
    assert trivialize_flat(germ_inverse(p), k).residual(inverse(a)) < 1e-8


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 2), k=st.integers(2, 3))
@settings(max_examples=20, deadline=None)
def test_homomorphism_with_connection(seed, n, k):
    rng = np.random.default_rng(seed)
    group = MatrixGroup.from_tag("so3")
    gamma = random_connection(rng, n, k - 1)
    p, q = (random_group_germ(rng, group, n, k) for _ in range(2))
    a, b = (trivialize_covariant(x, k, gamma) for x in (p, q))
    assert trivialize_covariant(germ_multiply(p, q), k, gamma).residual(multiply(a, b)) < 1e-7
    assert trivialize_covariant(germ_inverse(p), k, gamma).residual(inverse(a)) < 1e-7


def test_groupoid_axioms(rng, group):
    e = identity_jet(3, 4, group)
    for _ in range(5):
        a, b, c = (trivialize_flat(random_group_germ(rng, group, 3, 4), 4) for _ in range(3))
        assert multiply(multiply(a, b), c).residual(multiply(a, multiply(b, c))) < 1e-8
        assert multiply(a, inverse(a)).residual(e) < 1e-8
        assert multiply(inverse(a), a).residual(e) < 1e-8


def test_counts_path(rng, group):
    for k in (1, 2, 3, 4, 5):
        a, b = random_jet(rng, group, 1, k), random_jet(rng, group, 1, k)
        assert multiply_via_counts(a, b).residual(multiply(a, b)) < 1e-10
        assert inverse_via_counts(a).residual(inverse(a)) < 1e-10
    e = identity_jet(1, 3, group)
    a = random_jet(rng, group, 1, 3)
    assert multiply_via_counts(e, a).residual(a) < 1e-14
    with pytest.raises(JetError):
        multiply_via_counts(random_jet(rng, group, 2, 2), random_jet(rng, group, 2, 2))


def test_check_image(rng):
    so3 = MatrixGroup.from_tag("so3")
    for n in (1, 2, 3):
        assert check_image_k2(trivialize_flat(random_group_germ(rng, so3, n, 2), 2))
    xi1 = np.stack([so3_generator(1), so3_generator(2)])
    bad = TrivializedJet(so3, np.eye(3), (xi1, np.zeros((2, 2, 3, 3))))
    assert not check_image_k2(bad)
    assert image_residual_k2(bad) == pytest.approx(0.5)
    for _ in range(5):
        assert check_image_k2(random_jet(rng, so3, 1, 2))
    with pytest.raises(JetError):
        check_image_k2(random_jet(rng, so3, 2, 3))


def test_one_dimensional_form(rng):
    so3 = MatrixGroup.from_tag("so3")
    a = random_jet(rng, so3, 1, 3)
    g, xs = to_1d_form(a)
    assert len(xs) == 3
    back = from_1d_form(g, xs, so3)
    assert back.residual(a) == 0.0
    A = so3_generator(3)
    g, xs = to_1d_form(trivialize_flat(sample_exp_germ(1, 2, [A], group=so3), 2))
    assert np.allclose(g, np.eye(3)) and np.allclose(xs[0], A) and np.allclose(xs[1], 0)
    g, xs = to_1d_form(identity_jet(1, 3, so3))
    assert np.array_equal(g, np.eye(3)) and all(not x.any() for x in xs)
    with pytest.raises(JetError):
        to_1d_form(random_jet(rng, so3, 2, 1))


def test_validation_and_json(rng):
    so3 = MatrixGroup.from_tag("so3")
    a = random_jet(rng, so3, 2, 3)
    back = TrivializedJet.from_json(a.to_json())
    assert back.residual(a) == 0.0
    with pytest.raises(JetError):
        TrivializedJet(so3, np.eye(3), (np.zeros((2, 3, 3)), np.zeros((3, 3, 3, 3))))
    with pytest.raises(JetError):
        multiply(a, random_jet(rng, so3, 2, 2))
    with pytest.raises(JetError):
        multiply(a, random_jet(rng, MatrixGroup.from_tag("gl3"), 2, 3))
    tampered = a.to_json()
    tampered["g"][0][0] += 0.5
    with pytest.raises(Exception, match="not in SO3"):
        TrivializedJet.from_json(tampered).validate()
