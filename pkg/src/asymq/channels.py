"""Separable instruments, product-unitary mixtures and one-way LOCC ansätze."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config
from .errors import ContractError, FormatError, ShapeError, StateInvariantError
from .linalg import ginibre, haar_unitary
from .states import BipartiteState, decode_complex, encode_complex

INSTRUMENT_FORMAT = "asymq-instrument/1"


def _tp_defect(branches) -> float:
    total = sum(np.kron(A.conj().T @ A, B.conj().T @ B) for A, B in branches)
    return float(np.linalg.norm(total - np.eye(total.shape[0])))


@dataclass(frozen=True, eq=False)
class SeparableInstrument:
    """Product Kraus pairs ``(A_i, B_i)``; the channel is Σ X_i ρ X_i† with X_i = A_i ⊗ B_i."""

    branches: tuple
    trace_preserving: bool = True

    def __post_init__(self):
        pairs = tuple((np.array(A, dtype=complex), np.array(B, dtype=complex))
                      for A, B in self.branches)
        if not pairs:
            raise ContractError("an instrument needs at least one branch")
        inA, inB = pairs[0][0].shape[1], pairs[0][1].shape[1]
        outA, outB = pairs[0][0].shape[0], pairs[0][1].shape[0]
        for A, B in pairs:
            if A.shape != (outA, inA) or B.shape != (outB, inB):
                raise ShapeError("all branches must share Kraus shapes")
        object.__setattr__(self, "branches", pairs)
        if self.trace_preserving:
            defect = _tp_defect(pairs)
            if defect > config.active().trace_preserving:
                raise StateInvariantError("trace_preserving", f"defect {defect:.3e}")

    @property
    def in_dims(self) -> tuple[int, int]:
        A, B = self.branches[0]
        return A.shape[1], B.shape[1]

    @property
    def out_dims(self) -> tuple[int, int]:
        A, B = self.branches[0]
        return A.shape[0], B.shape[0]

    def kraus(self) -> list[np.ndarray]:
        return [np.kron(A, B) for A, B in self.branches]

    def tp_defect(self) -> float:
        return _tp_defect(self.branches)


@dataclass(frozen=True)
class BranchOutcome:
    probability: float
    state: BipartiteState | None  # None when the branch has zero probability


def _check_dims(ins: SeparableInstrument, rho: BipartiteState):
    if ins.in_dims != rho.dims:
        raise ShapeError(f"instrument expects dims {ins.in_dims}, state has {rho.dims}")


def apply_instrument(ins: SeparableInstrument, rho: BipartiteState) -> list[BranchOutcome]:
    _check_dims(ins, rho)
    dA, dB = ins.out_dims
    floor = config.active().probability_floor
    out = []
    for X in ins.kraus():
        if rho.is_pure:
            v = X @ rho.data
            p = float(np.vdot(v, v).real)
            st = BipartiteState(dA, dB, "pure", v / np.sqrt(p), validate=False) if p > floor else None
        else:
            m = X @ rho.data @ X.conj().T
            p = float(np.trace(m).real)
            st = BipartiteState(dA, dB, "mixed", m / p, validate=False) if p > floor else None
        out.append(BranchOutcome(p, st))
    return out


def channel_output(ins: SeparableInstrument, rho: BipartiteState | np.ndarray) -> np.ndarray:
    """Σ_i X_i ρ X_i† as a density matrix."""
    if isinstance(rho, BipartiteState):
        _check_dims(ins, rho)
        rho = rho.density()
    return sum(X @ rho @ X.conj().T for X in ins.kraus())


def det_weight_sum(ins: SeparableInstrument, d: int | None = None) -> float:
    """Σ_i [det(X_i†X_i)]^{1/d²} = Σ_i |det A_i|^{2/d} |det B_i|^{2/d} for d×d factors.

    This is the per-branch scaling of the homogeneous G-concurrence,
    G((A⊗B)ψ) = |det A|^{2/d} |det B|^{2/d} G(ψ); it is at most 1 for
    trace-preserving instruments, with equality exactly for mixtures of
    product unitaries.
    """
    A0, B0 = ins.branches[0]
    if d is None:
        d = A0.shape[0]
    for A, B in ins.branches:
        if A.shape != (d, d) or B.shape != (d, d):
            raise ContractError(f"det_weight_sum needs square {d}x{d} Kraus factors")
    return float(sum((abs(np.linalg.det(A)) * abs(np.linalg.det(B))) ** (2 / d)
                     for A, B in ins.branches))


def branch_spreads(ins: SeparableInstrument) -> list[float]:
    """Relative eigenvalue spread of X_i†X_i per branch (0 iff ∝ identity)."""
    spreads = []
    for X in ins.kraus():
        w = np.linalg.eigvalsh(X.conj().T @ X)
        spreads.append(float((w[-1] - w[0]) / w[-1]) if w[-1] > 0 else 0.0)
    return spreads


def identity_instrument(dA: int, dB: int) -> SeparableInstrument:
    return SeparableInstrument(((np.eye(dA), np.eye(dB)),))


def product_unitary_mixture(probs, us) -> SeparableInstrument:
    probs = np.asarray(probs, dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-12:
        raise ContractError("mixture weights must be non-negative and sum to 1")
    if len(us) != len(probs):
        raise ShapeError("one unitary pair per weight")
    tol = config.active().trace_preserving
    for UA, UB in us:
        for U in (UA, UB):
            U = np.asarray(U)
            if np.linalg.norm(U.conj().T @ U - np.eye(U.shape[1])) > tol:
                raise ContractError("product_unitary_mixture needs unitary factors")
    return SeparableInstrument(tuple((np.sqrt(p) * np.asarray(UA), np.asarray(UB))
                                     for p, (UA, UB) in zip(probs, us)))


def random_product_unitary_mixture(d: int, k: int, rng: np.random.Generator) -> SeparableInstrument:
    probs = rng.dirichlet(np.ones(k))
    us = [(haar_unitary(d, rng), haar_unitary(d, rng)) for _ in range(k)]
    return product_unitary_mixture(probs, us)


def random_kraus_instrument(d_in: int, d_out: int, k: int, rng: np.random.Generator) -> list[np.ndarray]:
    """k Kraus operators d_out×d_in with Σ M†M = I, cut from a random isometry."""
    iso = haar_unitary(k * d_out, rng)[:, :d_in] if k * d_out >= d_in else None
    if iso is None:
        raise ValueError("k * d_out must be at least d_in")
    return [iso[i * d_out:(i + 1) * d_out] for i in range(k)]


def _product_factorization(S: np.ndarray, dA: int, dB: int):
    """Return (S_A, S_B) if S = S_A ⊗ S_B up to 1e-10, else None."""
    R = S.reshape(dA, dB, dA, dB).transpose(0, 2, 1, 3).reshape(dA * dA, dB * dB)
    u, s, vh = np.linalg.svd(R)
    if s[0] == 0 or (len(s) > 1 and s[1] > 1e-10 * s[0]):
        return None
    SA = (np.sqrt(s[0]) * u[:, 0]).reshape(dA, dA)
    SB = (np.sqrt(s[0]) * vh[0]).reshape(dB, dB)
    return SA, SB


def _inv_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v / np.sqrt(w)) @ v.conj().T


def random_tp_separable_instrument(d: int, k: int, rng: np.random.Generator) -> SeparableInstrument:
    """Random trace-preserving separable instrument with k product branches on C^d⊗C^d.

    Random product pairs are normalized with S = (Σ X†X)^{-1/2} when S factors
    as S_A ⊗ S_B. Pairs are drawn with one side proportional to a unitary so the
    factorization exists; if it does not, an Alice-side instrument with
    Bob-side unitaries is used instead. Sides are swapped at random, and some
    branches are made rank deficient or replaced by product unitaries.
    """
    if d < 2 or k < 1:
        raise ValueError("need d >= 2 and k >= 1")
    style = rng.integers(5)
    if style == 0:
        return random_product_unitary_mixture(d, k, rng)
    pairs = []
    for _ in range(k):
        A = ginibre(d, d, rng)
        if rng.random() < 0.25:
            # rank-deficient branch
            A[:, rng.integers(d)] = 0.0
        B = (rng.random() + 0.1) * np.exp(2j * np.pi * rng.random()) * haar_unitary(d, rng)
        pairs.append((A, B))
    total = sum(np.kron(A.conj().T @ A, B.conj().T @ B) for A, B in pairs)
    fac = None
    if np.linalg.eigvalsh(total)[0] > 1e-8:
        fac = _product_factorization(_inv_sqrt(total), d, d)
    if fac is not None:
        SA, SB = fac
        pairs = [(A @ SA, B @ SB) for A, B in pairs]
    else:
        Ms = random_kraus_instrument(d, d, k, rng)
        pairs = [(M, haar_unitary(d, rng)) for M in Ms]
    if style >= 3:
        pairs = [(B, A) for A, B in pairs]
    return SeparableInstrument(tuple(pairs))


@dataclass(frozen=True, eq=False)
class OneWayLoccAnsatz:
    """One-round LOCC: the sender measures with ``kraus``, the receiver applies
    ``conditionals[i]`` on outcome i.

    ``direction='AB'`` means Alice sends (kraus act on A); ``'BA'`` swaps roles.
    Conditionals are isometries (unitaries when input and output dimensions agree).
    """

    kraus: tuple
    conditionals: tuple
    direction: str = "AB"
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kraus", tuple(np.array(m, dtype=complex) for m in self.kraus))
        object.__setattr__(self, "conditionals",
                           tuple(np.array(u, dtype=complex) for u in self.conditionals))
        if self.direction not in ("AB", "BA"):
            raise ContractError("direction must be 'AB' or 'BA'")
        if len(self.kraus) != len(self.conditionals) or not self.kraus:
            raise ContractError("need one conditional per measurement outcome")
        if self.validate:
            tol = config.active().trace_preserving
            M0 = self.kraus[0]
            s = sum(M.conj().T @ M for M in self.kraus)
            if np.linalg.norm(s - np.eye(M0.shape[1])) > tol:
                raise StateInvariantError("completeness", "Σ M†M ≠ I")
            for U in self.conditionals:
                if np.linalg.norm(U.conj().T @ U - np.eye(U.shape[1])) > tol:
                    raise StateInvariantError("isometry", "conditional is not an isometry")


def ansatz_to_instrument(a: OneWayLoccAnsatz) -> SeparableInstrument:
    if a.direction == "AB":
        branches = tuple(zip(a.kraus, a.conditionals))
    else:
        branches = tuple(zip(a.conditionals, a.kraus))
    return SeparableInstrument(branches)


def subspace_measurement_protocol(dA: int, dB: int) -> OneWayLoccAnsatz:
    """Block-measurement protocol for dB = m·dA (direction 'BA').

    Bob measures which dA-dimensional block |i·dA + j> his system lies in and
    relabels it to C^dA; Alice embeds her system into block i of C^dB.
    On ½(ψ+ + ψ) for dA=2, dB=4 this reproduces the swapped state exactly.
    """
    if dB % dA:
        raise ContractError("block protocol needs dB to be a multiple of dA")
    m = dB // dA
    kraus, conds = [], []
    for i in range(m):
        P = np.zeros((dA, dB), dtype=complex)
        P[:, i * dA:(i + 1) * dA] = np.eye(dA)
        kraus.append(P)
        conds.append(P.T.copy())
    return OneWayLoccAnsatz(tuple(kraus), tuple(conds), "BA")


def mirror_ansatz(a: OneWayLoccAnsatz) -> OneWayLoccAnsatz:
    """The same protocol with Alice and Bob exchanged."""
    return OneWayLoccAnsatz(a.kraus, a.conditionals, "BA" if a.direction == "AB" else "AB")


# ---- serialization -------------------------------------------------------

def instrument_to_dict(ins: SeparableInstrument) -> dict:
    dA, dB = ins.in_dims
    return {"format": INSTRUMENT_FORMAT, "dA": dA, "dB": dB,
            "branches": [{"A": encode_complex(A), "B": encode_complex(B),
                          "A_shape": list(A.shape), "B_shape": list(B.shape)}
                         for A, B in ins.branches]}


def instrument_from_dict(obj) -> SeparableInstrument:
    if not isinstance(obj, dict) or obj.get("format") != INSTRUMENT_FORMAT:
        raise FormatError("not an asymq instrument object")
    try:
        dA, dB = int(obj["dA"]), int(obj["dB"])
        branches = []
        for br in obj["branches"]:
            a_shape = tuple(br.get("A_shape", (dA, dA)))
            b_shape = tuple(br.get("B_shape", (dB, dB)))
            A = decode_complex(br["A"], a_shape[0] * a_shape[1]).reshape(a_shape)
            B = decode_complex(br["B"], b_shape[0] * b_shape[1]).reshape(b_shape)
            branches.append((A, B))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ShapeError):
            raise
        raise FormatError(f"bad instrument field: {exc}") from None
    ins = SeparableInstrument(tuple(branches))
    if ins.in_dims != (dA, dB):
        raise ShapeError("branch shapes do not match declared dims")
    return ins


def save_instrument(ins: SeparableInstrument, path) -> None:
    Path(path).write_text(json.dumps(instrument_to_dict(ins)) + "\n", encoding="utf-8")


def load_instrument(path) -> SeparableInstrument:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from None
    return instrument_from_dict(obj)
