"""Dense complex linear algebra for bipartite systems.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. The
basis convention throughout the package is ``|i>_A |j>_B -> i * dB + j``,
i.e. row-major, so that reshaping a pure state vector to ``(dA, dB)`` yields
its coefficient matrix.
"""
from __future__ import annotations

import numpy as np

from . import config
from .errors import ContractError, ShapeError, SizeError


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractError("matrix has non-finite entries")
    return a


def _square(m) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows * cols > config.MAX_ENTRIES:
        raise SizeError(f"kron result {rows}x{cols} exceeds {config.MAX_ENTRIES} entries")
    return np.kron(a, b)


def _bipartite_view(rho, dA: int, dB: int) -> np.ndarray:
    rho = as_matrix(rho)
    n = dA * dB
    if rho.shape != (n, n):
        raise ShapeError(f"matrix of shape {rho.shape} does not match dims ({dA}, {dB})")
    return rho.reshape(dA, dB, dA, dB)


def partial_trace(rho, dA: int, dB: int, keep: str = "A") -> np.ndarray:
    """Reduced density matrix on subsystem ``keep`` ('A' or 'B')."""
    r = _bipartite_view(rho, dA, dB)
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    if keep == "B":
        return np.einsum("ijil->jl", r)
    raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")


def partial_transpose(rho, dA: int, dB: int, side: str = "B") -> np.ndarray:
    r = _bipartite_view(rho, dA, dB)
    if side == "B":
        r = r.transpose(0, 3, 2, 1)
    elif side == "A":
        r = r.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"side must be 'A' or 'B', not {side!r}")
    return r.reshape(dA * dB, dA * dB)


def swap_operator(dA: int, dB: int) -> np.ndarray:
    """Permutation V with V (x ⊗ y) = y ⊗ x, mapping C^dA⊗C^dB to C^dB⊗C^dA."""
    if dA < 1 or dB < 1:
        raise ValueError("dimensions must be positive")
    n = dA * dB
    V = np.zeros((n, n), dtype=complex)
    for i in range(dA):
        for j in range(dB):
            V[j * dA + i, i * dB + j] = 1.0
    return V


def is_hermitian(m, tol: float | None = None) -> bool:
    m = _square(m)
    tol = config.active().hermiticity if tol is None else tol
    scale = max(np.linalg.norm(m), 1.0)
    return bool(np.linalg.norm(m - m.conj().T) <= tol * scale)


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvectors (columns) of a Hermitian matrix."""
    m = _square(m)
    if not is_hermitian(m):
        raise ContractError("eig_hermitian requires a Hermitian matrix")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return w[::-1].copy(), v[:, ::-1].copy()


def eigvals_hermitian(m) -> np.ndarray:
    m = _square(m)
    return np.linalg.eigvalsh((m + m.conj().T) / 2)[::-1].copy()


def clip_spectrum(w: np.ndarray, floor: float | None = None) -> np.ndarray:
    """Zero out eigenvalues in [floor, 0); larger negative values pass through."""
    floor = config.active().psd_floor if floor is None else floor
    w = np.array(w, dtype=float)
    w[(w < 0) & (w >= floor)] = 0.0
    return w


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return np.linalg.svd(as_matrix(m), full_matrices=False)


def det(m) -> complex:
    return complex(np.linalg.det(_square(m)))


def trace_norm(m) -> float:
    m = _square(m)
    if np.allclose(m, m.conj().T, rtol=0, atol=1e-13):
        return float(np.abs(np.linalg.eigvalsh((m + m.conj().T) / 2)).sum())
    return float(np.linalg.svd(m, compute_uv=False).sum())


def trace_distance(a, b) -> float:
    a, b = _square(a), _square(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    return 0.5 * trace_norm(a - b)


def sqrtm_psd(m) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity(a, b) -> float:
    """Uhlmann fidelity (squared convention) between density matrices."""
    sa = sqrtm_psd(_square(a))
    s = np.linalg.svd(sa @ sqrtm_psd(_square(b)), compute_uv=False).sum()
    return float(min(s * s, 1.0))


def purified_distance(a, b) -> float:
    return float(np.sqrt(max(0.0, 1.0 - fidelity(a, b))))


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase-corrected R."""
    if d < 1:
        raise ValueError("d must be >= 1")
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_pure_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    v = ginibre(n, 1, rng)[:, 0]
    return v / np.linalg.norm(v)


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Induced-measure random density matrix (Hilbert-Schmidt when rank == n)."""
    g = ginibre(n, n if rank is None else rank, rng)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def complete_unitary(iso: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
    """Extend an n×p isometry to an n×n unitary whose first p columns are ``iso``."""
    n, p = iso.shape
    if p == n:
        return iso.copy()
    rng = np.random.default_rng(0) if rng is None else rng
    fill = ginibre(n, n - p, rng)
    fill -= iso @ (iso.conj().T @ fill)
    q, _ = np.linalg.qr(fill)
    return np.hstack([iso, q])
