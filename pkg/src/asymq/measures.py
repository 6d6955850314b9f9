"""Entanglement measures.

G-concurrence and entanglement of formation are extended to mixed states by a
convex-roof search. Every decomposition of ``rho = W W^†`` (``W`` holding the
scaled eigenvectors as columns) is ``psi_i = Σ_j U_ij w_j`` for some isometry
``U`` with ``k`` rows, so the roof is a minimisation over the Stiefel manifold.
Both pure-state functionals are used in homogeneous form, ``p E(psi/√p)``,
which keeps the objective smooth in the unnormalised vectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, InconsistencyError
from .linalg import complete_unitary, haar_unitary, partial_transpose
from .optim import StiefelChart, lbfgs
from .states import BipartiteState, schmidt

SIGMA_Y2 = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


@dataclass
class MeasureResult:
    value: float
    direction: str  # "exact" | "upper_bound" | "lower_bound"
    iterations: int = 0
    restarts: int = 0
    converged: bool = True
    seed: int = 0
    note: str = ""
    decomposition: tuple | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"value": self.value, "direction": self.direction,
                "iterations": self.iterations, "restarts": self.restarts,
                "converged": self.converged, "seed": self.seed, "note": self.note}


@dataclass
class RoofOptions:
    restarts: int = 16
    ensemble_factor: int = 2
    max_iters: int = 2000
    tol: float = 1e-7
    seed: int = 0
    # explicit decompositions (probs, list of normalized vectors) tried as starts
    seed_ensembles: tuple = ()


# ---- pure-state functionals ----------------------------------------------

def _entropy_bits(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return max(0.0, float(-(p * np.log2(p)).sum())) if p.size else 0.0


def g_of_vector(v: np.ndarray, dA: int, dB: int) -> float:
    """Homogeneous G-concurrence d·|det M|^{2/d} of an unnormalised vector.

    Equals ‖v‖² · G(v/‖v‖). Zero when dA ≠ dB.
    """
    if dA != dB:
        return 0.0
    s = np.linalg.svd(np.asarray(v).reshape(dA, dB), compute_uv=False)
    return float(dA * np.prod(s ** (2.0 / dA)))


def g_pure(psi: BipartiteState) -> MeasureResult:
    if not psi.is_pure:
        raise ContractError("g_pure requires a pure state")
    if psi.dA != psi.dB:
        return MeasureResult(0.0, "exact", note="G is zero for unequal local dimensions")
    d = psi.dA
    lam = schmidt(psi).coefficients ** 2
    return MeasureResult(float(d * np.prod(lam) ** (1.0 / d)), "exact")


def entropy_of_entanglement(psi: BipartiteState) -> MeasureResult:
    if not psi.is_pure:
        raise ContractError("entropy_of_entanglement requires a pure state")
    return MeasureResult(_entropy_bits(schmidt(psi).coefficients ** 2), "exact")


def von_neumann_entropy(rho) -> float:
    """Entropy in bits; eigenvalues in [-1e-10, 0) are treated as zero."""
    if isinstance(rho, BipartiteState):
        if rho.is_pure:
            return 0.0
        rho = rho.data
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    return _entropy_bits(w[w > 0])


# ---- convex roof engine --------------------------------------------------

def _g_terms(M: np.ndarray):
    d = M.shape[1]
    u, s, vh = np.linalg.svd(M)
    sp = s ** (2.0 / d)
    vals = d * np.prod(sp, axis=1)
    excl = np.stack([np.prod(np.delete(sp, j, axis=1), axis=1) for j in range(d)], axis=1)
    c = 2.0 * excl * np.maximum(s, 1e-150) ** (2.0 / d - 1.0)
    grad = np.einsum("kij,kj,kjl->kil", u, c, vh)
    return vals, grad


def _entropy_terms(M: np.ndarray):
    u, s, vh = np.linalg.svd(M, full_matrices=False)
    mu = s * s
    p = mu.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        logmu = np.where(mu > 0, np.log2(np.where(mu > 0, mu, 1.0)), 0.0)
        logp = np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), 0.0)
    vals = -(mu * logmu).sum(axis=1) + p * logp
    c = 2.0 * s * (logp[:, None] - logmu)
    grad = np.einsum("kij,kj,kjl->kil", u, c, vh)
    return vals, grad


_FUNCTIONALS = {"G": _g_terms, "E": _entropy_terms}


class RoofProblem:
    """Convex-roof objective for one density matrix and one pure-state functional."""

    def __init__(self, rho: np.ndarray, dA: int, dB: int, functional: str, ensemble_factor: int = 2):
        w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
        keep = w > 1e-13 * max(w[-1], 1e-300)
        self.W = v[:, keep] * np.sqrt(w[keep])
        self.lam = w[keep]
        self.dA, self.dB = dA, dB
        self.rank = self.W.shape[1]
        self.k = max(self.rank * ensemble_factor, self.rank)
        self.terms = _FUNCTIONALS[functional]

    def vectors(self, U: np.ndarray) -> np.ndarray:
        return U @ self.W.T

    def value(self, U: np.ndarray) -> float:
        Psi = self.vectors(U)
        vals, _ = self.terms(Psi.reshape(U.shape[0], self.dA, self.dB))
        return float(vals.sum())

    def objective(self, chart: StiefelChart):
        k, n = chart.n, self.dA * self.dB
        W = self.W

        def f(theta):
            U, pullback = chart.point_and_pullback(theta)
            vals, gM = self.terms((U @ W.T).reshape(k, self.dA, self.dB))
            return float(vals.sum()), pullback(gM.reshape(k, n) @ W.conj())

        return f

    def isometry_from_ensemble(self, probs, vecs) -> np.ndarray:
        """Rows U_i with Σ_j U_ij w_j = √p_i ψ_i; exact when the ensemble realises rho."""
        tilde = np.array([np.sqrt(p) * np.asarray(v) for p, v in zip(probs, vecs)])
        return (tilde @ self.W.conj()) / self.lam

    def decomposition(self, U: np.ndarray):
        Psi = self.vectors(U)
        p = np.einsum("ij,ij->i", Psi.conj(), Psi).real
        keep = p > 1e-14
        return p[keep], Psi[keep] / np.sqrt(p[keep])[:, None]


def _run_roof(problem: RoofProblem, opts: RoofOptions) -> MeasureResult:
    r, k = problem.rank, problem.k
    starts = []
    for probs, vecs in opts.seed_ensembles:
        U = problem.isometry_from_ensemble(probs, vecs)
        if U.shape[0] < k:
            U = np.vstack([U, np.zeros((k - U.shape[0], r))])
        starts.append(U)
    best_val, best_U, iters, converged = np.inf, None, 0, True
    for U in starts:
        val = problem.value(U)
        if val < best_val:
            best_val, best_U = val, U
    for i in range(opts.restarts + len(starts)):
        if i < len(starts):
            base = complete_unitary(starts[i] / np.linalg.norm(starts[i], axis=0), np.random.default_rng(opts.seed))
        elif i == len(starts):
            base = np.eye(k, dtype=complex)
        else:
            base = haar_unitary(k, np.random.default_rng(opts.seed + i - len(starts)))
        chart = StiefelChart(base, r)
        res = lbfgs(problem.objective(chart), np.zeros(chart.size), opts.max_iters, opts.tol)
        iters += res.nit
        U = chart.point(res.x)
        val = problem.value(U)
        if val < best_val:
            best_val, best_U, converged = val, U, res.converged
    return MeasureResult(max(best_val, 0.0), "upper_bound", iterations=iters,
                         restarts=opts.restarts, converged=converged, seed=opts.seed,
                         decomposition=problem.decomposition(best_U))


def _as_state(rho) -> BipartiteState:
    if isinstance(rho, BipartiteState):
        return rho
    raise ContractError("expected a BipartiteState")


def g_convex_roof(rho: BipartiteState, opts: RoofOptions | None = None) -> MeasureResult:
    """Upper bound on the mixed-state G-concurrence by decomposition search."""
    rho = _as_state(rho)
    opts = RoofOptions() if opts is None else opts
    if rho.dA != rho.dB:
        return MeasureResult(0.0, "exact", seed=opts.seed,
                             note="G is zero for unequal local dimensions")
    if rho.is_pure:
        return g_pure(rho)
    problem = RoofProblem(rho.data, rho.dA, rho.dB, "G", opts.ensemble_factor)
    return _run_roof(problem, opts)


def eof_convex_roof(rho: BipartiteState, opts: RoofOptions | None = None) -> MeasureResult:
    """Upper bound on the entanglement of formation (bits) by decomposition search."""
    rho = _as_state(rho)
    opts = RoofOptions() if opts is None else opts
    if rho.is_pure:
        return entropy_of_entanglement(rho)
    problem = RoofProblem(rho.data, rho.dA, rho.dB, "E", opts.ensemble_factor)
    return _run_roof(problem, opts)


# ---- two-qubit closed forms ----------------------------------------------

def _two_qubit_matrix(rho) -> np.ndarray:
    if isinstance(rho, BipartiteState):
        if rho.dims != (2, 2):
            raise ContractError("Wootters formulas need a 2⊗2 state")
        return rho.density()
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ContractError("Wootters formulas need a 4x4 density matrix")
    return rho


def wootters_concurrence(rho) -> float:
    r = _two_qubit_matrix(rho)
    flipped = SIGMA_Y2 @ r.conj() @ SIGMA_Y2
    w, v = np.linalg.eigh((r + r.conj().T) / 2)
    sq = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    m = sq @ flipped @ sq
    lam = np.sqrt(np.clip(np.linalg.eigvalsh((m + m.conj().T) / 2), 0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))

    return _entropy_bits([x, 1 - x])
def binary_entropy(x: float) -> float:
    return _entropy_bits([x, 1 - x])


def wootters_eof(rho) -> float:
    c = min(wootters_concurrence(rho), 1.0)
    return binary_entropy((1 + np.sqrt(1 - c * c)) / 2)


# ---- distillation-side bounds --------------------------------------------

def log_negativity(rho: BipartiteState) -> float:
    """log₂ ‖ρ^{T_B}‖₁; negative eigenvalues above -1e-12 count as zero."""
    w = np.linalg.eigvalsh(partial_transpose(rho.density(), rho.dA, rho.dB, "B"))
    neg = -w[w < -1e-12].sum()
    return float(np.log2(1 + 2 * neg))


def hashing_lower_bound(rho: BipartiteState) -> float:
    """max(S(A) - S(AB), S(B) - S(AB), 0) in bits."""
    if rho.is_pure:
        return entropy_of_entanglement(rho).value
    sab = von_neumann_entropy(rho.data)
    sa = von_neumann_entropy(rho.reduced("A"))
    sb = von_neumann_entropy(rho.reduced("B"))
    return float(max(sa - sab, sb - sab, 0.0))


def is_entangled_npt(rho: BipartiteState) -> bool:
    """Entanglement witness used by the bracket: Schmidt rank > 1 for pure
    states, negative partial transpose otherwise (complete only for 2⊗2, 2⊗3)."""
    if rho.is_pure:
        return schmidt(rho).rank > 1
    return log_negativity(rho) > 0.0


@dataclass
class SymmetryBracket:
    entangled: bool
    ed_lower: float
    ec_upper: float
    s_lower: float
    s_upper: float
    asym_upper: float
    log_negativity: float

    def to_dict(self) -> dict:
        def fin(x):
            return x if np.isfinite(x) else None
        return {"entangled": self.entangled, "ed_lower": self.ed_lower,
                "ec_upper": self.ec_upper, "s_lower": fin(self.s_lower),
                "s_upper": fin(self.s_upper), "asym_upper": self.asym_upper,
                "log_negativity": self.log_negativity, "conservative": True}


def symmetry_bracket(rho: BipartiteState, opts: RoofOptions | None = None,
                     eof: MeasureResult | None = None) -> SymmetryBracket:
    """Conservative bracket  hashing / E_F-upper ≤ symmetry ≤ 1.

    Separable (here: PPT mixed or product pure) inputs get an infinite symmetry
    and zero asymmetry.
    """
    ed = hashing_lower_bound(rho)
    ln = log_negativity(rho)
    if eof is None:
        eof = eof_convex_roof(rho, opts)
    ec = eof.value
    if not is_entangled_npt(rho):
        return SymmetryBracket(False, ed, ec, np.inf, np.inf, 0.0, ln)
    if ec < 1e-9:
        raise InconsistencyError(f"E_F upper bound {ec:.3e} on an entangled state")
    s = 0.0 if ed == 0 else min(1.0, ed / ec)
    return SymmetryBracket(True, ed, ec, s, 1.0, 1.0 - s, ln)
