"""Independent reference formulas used to check the package.

These avoid the package's own helpers: the two-qubit values come from the
non-Hermitian product ρ ρ̃ and the pure-state values from det ρ_A directly.
"""
import numpy as np

_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


def concurrence(rho: np.ndarray) -> float:
    rho = np.asarray(rho, dtype=complex)
    tilde = _YY @ rho.conj() @ _YY
    lam = np.sqrt(np.abs(np.linalg.eigvals(rho @ tilde)))
    lam = np.sort(lam)[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def eof_from_concurrence(c: float) -> float:
    x = (1 + np.sqrt(max(0.0, 1 - c * c))) / 2
    if x >= 1:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def reduced_a(vec: np.ndarray, dA: int, dB: int) -> np.ndarray:
    rho = np.outer(vec, vec.conj()).reshape(dA, dB, dA, dB)
    return np.trace(rho, axis1=1, axis2=3)


def g_concurrence(vec: np.ndarray, d: int) -> float:
    det = np.linalg.det(reduced_a(vec, d, d)).real
    return float(d * max(det, 0.0) ** (1 / d))


def entanglement_entropy(vec: np.ndarray, dA: int, dB: int) -> float:
    w = np.linalg.eigvalsh(reduced_a(vec, dA, dB))
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def werner_concurrence(p: float) -> float:
    return max(0.0, (3 * p - 1) / 2)
