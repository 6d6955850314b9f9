"""Bipartite states, Schmidt analysis, example constructors and the state file."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config
from .errors import ContractError, FormatError, ShapeError, StateInvariantError
from .linalg import eigvals_hermitian, partial_trace, svd, swap_operator

STATE_FORMAT = "asymq-state/1"


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """A pure vector or a density matrix on C^dA ⊗ C^dB.

    ``data`` is a length ``dA*dB`` vector for pure states and a square
    ``(dA*dB, dA*dB)`` matrix for mixed ones. Invariants are checked on
    construction; pass ``validate=False`` only for trusted internal results.
    """

    dA: int
    dB: int
    kind: str
    data: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        arr = np.array(self.data, dtype=complex)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        if self.dA < 1 or self.dB < 1:
            raise ShapeError("local dimensions must be positive")
        n = self.dA * self.dB
        if self.kind == "pure":
            if arr.shape != (n,):
                raise ShapeError(f"pure state needs {n} amplitudes, got shape {arr.shape}")
        elif self.kind == "mixed":
            if arr.shape != (n, n):
                raise ShapeError(f"density matrix must be {n}x{n}, got shape {arr.shape}")
        else:
            raise ShapeError(f"kind must be 'pure' or 'mixed', not {self.kind!r}")
        if not np.all(np.isfinite(arr)):
            raise StateInvariantError("finite", "non-finite entries")
        if self.validate:
            self._check()

    def _check(self):
        tol = config.active()
        if self.kind == "pure":
            nrm = np.linalg.norm(self.data)
            if abs(nrm - 1) > tol.norm:
                raise StateInvariantError("norm", f"|psi| = {nrm!r}")
            return
        rho = self.data
        scale = max(np.linalg.norm(rho), 1.0)
        if np.linalg.norm(rho - rho.conj().T) > tol.hermiticity * scale:
            raise StateInvariantError("hermiticity")
        tr = np.trace(rho).real
        if abs(tr - 1) > tol.trace:
            raise StateInvariantError("trace", f"Tr rho = {tr!r}")
        lo = eigvals_hermitian(rho)[-1]
        if lo < tol.psd_floor:
            raise StateInvariantError("positivity", f"min eigenvalue {lo!r}")

    @classmethod
    def pure(cls, vec, dA: int, dB: int, normalize: bool = False) -> "BipartiteState":
        v = np.asarray(vec, dtype=complex).ravel()
        if normalize:
            v = v / np.linalg.norm(v)
        return cls(dA, dB, "pure", v)

    @classmethod
    def mixed(cls, rho, dA: int, dB: int) -> "BipartiteState":
        return cls(dA, dB, "mixed", np.asarray(rho, dtype=complex))

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"

    @property
    def dims(self) -> tuple[int, int]:
        return self.dA, self.dB

    @property
    def n(self) -> int:
        return self.dA * self.dB

    def density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data.copy()

    def as_mixed(self) -> "BipartiteState":
        if not self.is_pure:
            return self
        return BipartiteState(self.dA, self.dB, "mixed", self.density(), validate=False)

    def reduced(self, keep: str) -> np.ndarray:
        if self.is_pure:
            M = self.data.reshape(self.dA, self.dB)
            return M @ M.conj().T if keep == "A" else (M.T @ M.conj())
        return partial_trace(self.data, self.dA, self.dB, keep)


def _require_pure(psi: BipartiteState, what: str):
    if not psi.is_pure:
        raise ContractError(f"{what} requires a pure state")


@dataclass(frozen=True)
class SchmidtData:
    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray
    rank: int


def schmidt(psi: BipartiteState, tol: float | None = None) -> SchmidtData:
    _require_pure(psi, "schmidt")
    tol = config.active().rank if tol is None else tol
    u, s, vh = svd(psi.data.reshape(psi.dA, psi.dB))
    rank = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    return SchmidtData(s, u, vh.T, rank)


def schmidt_rank(psi: BipartiteState, tol: float | None = None) -> int:
    return schmidt(psi, tol).rank


def local_spectra(state: BipartiteState) -> tuple[np.ndarray, np.ndarray]:
    return eigvals_hermitian(state.reduced("A")), eigvals_hermitian(state.reduced("B"))


def apply_swap(state: BipartiteState) -> BipartiteState:
    V = swap_operator(state.dA, state.dB)
    if state.is_pure:
        return BipartiteState(state.dB, state.dA, "pure", V @ state.data, validate=False)
    return BipartiteState(state.dB, state.dA, "mixed", V @ state.data @ V.conj().T,
                          validate=False)


def basis_vector(i: int, n: int) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    e[i] = 1.0
    return e


def bell_state(d: int = 2) -> BipartiteState:
    """Maximally entangled state (1/√d) Σ_i |ii>."""
    v = np.zeros(d * d, dtype=complex)
    v[[i * d + i for i in range(d)]] = 1 / np.sqrt(d)
    return BipartiteState(d, d, "pure", v)


def product_state(a, b) -> BipartiteState:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return BipartiteState.pure(np.kron(a, b), a.size, b.size, normalize=True)


def example_mix01_bell(p: float = 0.5) -> BipartiteState:
    """p |01><01| + (1-p) |Φ+><Φ+| on two qubits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixture weight p={p} outside [0, 1]")
    e01 = basis_vector(1, 4)
    phi = bell_state(2).data
    rho = p * np.outer(e01, e01.conj()) + (1 - p) * np.outer(phi, phi.conj())
    return BipartiteState.mixed(rho, 2, 2)


def example_2x4_mixture() -> BipartiteState:
    """½|ψ+><ψ+| + ½|ψ><ψ| on C²⊗C⁴, ψ+ = (|00>+|11>)/√2, ψ = (|02>+|13>)/√2."""
    psi_plus = (basis_vector(0 * 4 + 0, 8) + basis_vector(1 * 4 + 1, 8)) / np.sqrt(2)
    psi = (basis_vector(0 * 4 + 2, 8) + basis_vector(1 * 4 + 3, 8)) / np.sqrt(2)
    rho = 0.5 * np.outer(psi_plus, psi_plus.conj()) + 0.5 * np.outer(psi, psi.conj())
    return BipartiteState.mixed(rho, 2, 4)


def werner_like(p: float) -> BipartiteState:
    """p Φ+ + (1-p) I/4 on two qubits."""
    phi = bell_state(2).data
    rho = p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(4) / 4
    return BipartiteState.mixed(rho, 2, 2)


# ---- serialization -------------------------------------------------------

def encode_complex(values: np.ndarray) -> list[list[float]]:
    flat = np.asarray(values, dtype=complex).ravel()
    return [[float(z.real), float(z.imag)] for z in flat]


def decode_complex(pairs, expected: int | None = None) -> np.ndarray:
    if not isinstance(pairs, list):
        raise FormatError("complex data must be a list of [re, im] pairs")
    try:
        arr = np.array([complex(float(re), float(im)) for re, im in pairs], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad complex entry: {exc}") from None
    if expected is not None and arr.size != expected:
        raise ShapeError(f"expected {expected} entries, got {arr.size}")
    return arr


def state_to_dict(state: BipartiteState, as_projector: bool = False) -> dict:
    kind, data = state.kind, state.data
    if as_projector and state.is_pure:
        kind, data = "mixed", state.density()
    return {"format": STATE_FORMAT, "dA": state.dA, "dB": state.dB,
            "kind": kind, "data": encode_complex(data)}


def state_from_dict(obj) -> BipartiteState:
    if not isinstance(obj, dict):
        raise FormatError("state file must contain a JSON object")
    if obj.get("format") != STATE_FORMAT:
        raise FormatError(f"unsupported format tag {obj.get('format')!r}")
    try:
        dA, dB, kind, data = int(obj["dA"]), int(obj["dB"]), obj["kind"], obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"missing or invalid field: {exc}") from None
    if kind not in ("pure", "mixed"):
        raise FormatError(f"kind must be 'pure' or 'mixed', not {kind!r}")
    n = dA * dB
    if kind == "pure":
        return BipartiteState(dA, dB, "pure", decode_complex(data, n))
    return BipartiteState(dA, dB, "mixed", decode_complex(data, n * n).reshape(n, n))


def save_state(state: BipartiteState, path, as_projector: bool = False) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state, as_projector)) + "\n", encoding="utf-8")


def load_state(path) -> BipartiteState:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from None
    return state_from_dict(obj)
