"""Optimizer core shared by the convex-roof engine and the swap searches.

Points on the unitary group (or on a Stiefel manifold of isometries) are
written as ``U = exp(K) @ base`` where ``K`` is anti-Hermitian and is given by
``n*n`` real exponential coordinates. Gradients are pulled back analytically
through the exponential map, so the local search is L-BFGS on a flat chart
centred at a random base point.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize


def generator(theta: np.ndarray, n: int) -> np.ndarray:
    """Anti-Hermitian matrix from ``n*n`` real coordinates (a bijection)."""
    R = np.asarray(theta, dtype=float).reshape(n, n)
    return 0.5 * (R - R.T) + 0.5j * (R + R.T)


def generator_grad(gamma: np.ndarray) -> np.ndarray:
    # pulls Re tr(gamma^H dK) back to the real coordinates of generator()
    g = 0.5 * (gamma.conj() * (1 + 1j) + gamma.T.conj() * (-1 + 1j))
    return g.real.ravel()


def expm_with_adjoint(K: np.ndarray):
    """Return ``exp(K)`` and a function applying the adjoint Fréchet derivative.

    ``K`` must be anti-Hermitian; one Hermitian eigensolve gives both pieces.
    """
    w, Q = np.linalg.eigh(-1j * K)
    E = (Q * np.exp(1j * w)) @ Q.conj().T
    # divided differences of exp at the eigenvalues of K^H = -K, i.e. -i w
    delta = w[:, None] - w[None, :]
    phi = np.exp(-0.5j * (w[:, None] + w[None, :])) * np.sinc(delta / (2 * np.pi))

    def adjoint(G: np.ndarray) -> np.ndarray:
        return Q @ ((Q.conj().T @ G @ Q) * phi) @ Q.conj().T

    return E, adjoint


class StiefelChart:
    """Chart ``theta -> exp(K(theta)) @ base[:, :p]`` around a unitary ``base``."""

    def __init__(self, base: np.ndarray, p: int | None = None):
        self.base = np.asarray(base, dtype=complex)
        self.n = self.base.shape[0]
        self.p = self.n if p is None else p
        self._frame = self.base[:, : self.p]
        self.size = self.n * self.n

    def point(self, theta: np.ndarray) -> np.ndarray:
        if not np.any(theta):
            return self._frame.copy()
        E, _ = expm_with_adjoint(generator(theta, self.n))
        return E @ self._frame

    def point_and_pullback(self, theta: np.ndarray):
        E, adjoint = expm_with_adjoint(generator(theta, self.n))
        frame = self._frame

        def pullback(G: np.ndarray) -> np.ndarray:
            return generator_grad(adjoint(G @ frame.conj().T))

        return E @ frame, pullback


@dataclass
class LocalResult:
    x: np.ndarray
    fun: float
    nit: int
    converged: bool


def lbfgs(fun_and_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
          x0: np.ndarray, max_iters: int = 2000, ftol: float = 1e-7,
          gtol: float = 1e-10) -> LocalResult:
    res = minimize(fun_and_grad, x0, jac=True, method="L-BFGS-B",
                   options={"maxiter": max_iters, "ftol": ftol, "gtol": gtol,
                            "maxcor": 20})
    return LocalResult(np.asarray(res.x), float(res.fun), int(res.nit), bool(res.success))


def product_grads(G: np.ndarray, A: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a gradient with respect to ``A ⊗ B`` into gradients for ``A`` and ``B``."""
    G4 = G.reshape(A.shape[0], B.shape[0], A.shape[1], B.shape[1])
    gA = np.einsum("abcd,bd->ac", G4, B.conj())
    gB = np.einsum("abcd,ac->bd", G4, A.conj())
    return gA, gB
