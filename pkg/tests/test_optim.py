import numpy as np
from hypothesis import given, settings, strategies as st

from asymq.linalg import ginibre, haar_unitary
from asymq.optim import StiefelChart, expm_with_adjoint, generator, lbfgs, product_grads
from scipy.linalg import expm


@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
@settings(max_examples=25)
def test_generator_is_anti_hermitian_and_exp_unitary(n, seed):
    K = generator(np.random.default_rng(seed).normal(size=n * n), n)
    assert np.allclose(K, -K.conj().T)
    E, _ = expm_with_adjoint(K)
    assert np.allclose(E, expm(K))


def test_chart_pullback_matches_finite_differences():
    rng = np.random.default_rng(3)
    n, p = 4, 2
    chart = StiefelChart(haar_unitary(n, rng), p)
    C = ginibre(n, p, rng)

    def f(theta):
        return float(np.real(np.trace(C.conj().T @ chart.point(theta))))

    theta = 0.3 * rng.normal(size=chart.size)
    U, pull = chart.point_and_pullback(theta)
    grad = pull(C)  # Euclidean gradient of Re tr(C^H U) in U is C
    h = 1e-6
    fd = np.array([(f(theta + h * e) - f(theta - h * e)) / (2 * h) for e in np.eye(chart.size)])
    assert np.allclose(grad, fd, atol=1e-6)


def test_product_grads_matches_finite_differences():
    rng = np.random.default_rng(4)
    A, B, G = ginibre(2, 2, rng), ginibre(3, 3, rng), ginibre(6, 6, rng)

    def f(A, B):
        return float(np.real(np.vdot(G, np.kron(A, B))))

    gA, gB = product_grads(G, A, B)
    h = 1e-6
    for (i, j) in [(0, 0), (1, 0)]:
        E = np.zeros((2, 2))
        E[i, j] = h
        assert np.isclose((f(A + E, B) - f(A - E, B)) / (2 * h), gA[i, j].real, atol=1e-6)
    E = np.zeros((3, 3))
    E[2, 1] = h
    assert np.isclose((f(A, B + E) - f(A, B - E)) / (2 * h), gB[2, 1].real, atol=1e-6)


def test_lbfgs_minimizes_quadratic():
    target = np.arange(5.0)
    res = lbfgs(lambda x: (float(np.sum((x - target) ** 2)), 2 * (x - target)), np.zeros(5))
    assert res.fun < 1e-12
