"""Swapability of bipartite states.

Numeric searches here only ever produce upper bounds on infima over LOCC (the
ansatz classes are strict subsets) and statistical, not certified, verdicts
about product-unitary swapability.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import (OneWayLoccAnsatz, SeparableInstrument, ansatz_to_instrument,
                       channel_output, identity_instrument, subspace_measurement_protocol,
                       mirror_ansatz)
from .errors import ContractError
from .linalg import (complete_unitary, haar_unitary, partial_transpose, purified_distance,
                     swap_operator, trace_distance)
from .measures import MeasureResult, RoofOptions, g_convex_roof
from .optim import StiefelChart, lbfgs, product_grads
from .states import BipartiteState, apply_swap, local_spectra, schmidt

__all__ = [
    "swap_operator", "SwapOptions", "SwapVerdict", "lu_swap_check", "AnsatzOptions",
    "AsymmetryEstimate", "asymmetry_upper_bound", "ansatz_distance_minimum",
    "ppt_projection", "nonsymmetric_measure_estimate", "locc_swapability_report",
    "SwapabilityReport", "ANSATZ_CLASSES",
]

LU_SWAPABLE = "lu_swapable"
NOT_LU_SWAPABLE = "not_lu_swapable"
INCONCLUSIVE = "inconclusive"


def _frobenius_fit(rho: np.ndarray, target: np.ndarray, kraus: list[np.ndarray]):
    """‖Σ X ρ X† − T‖_F² and its gradient with respect to each X."""
    out = sum(X @ rho @ X.conj().T for X in kraus)
    delta = out - target
    f = float(np.vdot(delta, delta).real)
    return f, [4.0 * delta @ X @ rho for X in kraus]


# ---- product-unitary swap check ------------------------------------------

@dataclass
class SwapOptions:
    restarts: int = 32
    pass_tol: float = 1e-6
    fail_tol: float = 1e-3
    max_iters: int = 2000
    seed: int = 0
    spectra_tol: float = 1e-8
    # exchange the roles of the A and B random starts (for checking V ρ V)
    mirror: bool = False


@dataclass
class SwapVerdict:
    status: str
    witness: tuple | None
    residual: float
    spectral_necessary_passed: bool
    restarts_used: int
    residual_lower: float = 0.0
    seed: int = 0

    def to_dict(self) -> dict:
        return {"status": self.status, "residual": self.residual,
                "residual_lower": self.residual_lower,
                "spectral_necessary_passed": self.spectral_necessary_passed,
                "restarts_used": self.restarts_used, "seed": self.seed,
                "has_witness": self.witness is not None}


def _restart_bases(i: int, dims: list[int], seed: int, mirror: bool) -> list[np.ndarray]:
    if i == 0:
        return [np.eye(d, dtype=complex) for d in dims]
    rng = np.random.default_rng(seed + i)
    order = dims[::-1] if mirror else dims
    drawn = [haar_unitary(d, rng) for d in order]
    return drawn[::-1] if mirror else drawn


def lu_swap_check(rho: BipartiteState, opts: SwapOptions | None = None) -> SwapVerdict:
    """Decide whether some U_A ⊗ U_B maps ρ to V ρ V.

    Stage 1 compares local spectra (necessary). Stage 2 minimises
    ‖VρV − (U_A⊗U_B)ρ(U_A⊗U_B)†‖_F² from multiple starts and reports the
    trace distance at the best point. ``residual_lower`` is half the Frobenius
    residual, which never exceeds the trace distance; the negative verdict is
    drawn from it.
    """
    opts = SwapOptions() if opts is None else opts
    if rho.dA != rho.dB:
        return SwapVerdict(NOT_LU_SWAPABLE, None, float("nan"), False, 0, seed=opts.seed)
    sa, sb = local_spectra(rho)
    if np.max(np.abs(sa - sb)) > opts.spectra_tol:
        return SwapVerdict(NOT_LU_SWAPABLE, None, float("nan"), False, 0, seed=opts.seed)

    d = rho.dA
    r = rho.density()
    V = swap_operator(d, d)
    target = V @ r @ V.T

    best = (np.inf, None)
    best_frob = np.inf
    used = 0
    for i in range(max(opts.restarts, 1)):
        used = i + 1
        cA, cB = (StiefelChart(b) for b in _restart_bases(i, [d, d], opts.seed, opts.mirror))

        def f(theta, cA=cA, cB=cB):
            UA, pbA = cA.point_and_pullback(theta[: d * d])
            UB, pbB = cB.point_and_pullback(theta[d * d:])
            val, (G,) = _frobenius_fit(r, target, [np.kron(UA, UB)])
            gA, gB = product_grads(G, UA, UB)
            return val, np.concatenate([pbA(gA), pbB(gB)])

        x0 = np.zeros(2 * d * d)
        if f(x0)[0] > 0:
            res = lbfgs(f, x0, opts.max_iters, ftol=1e-30, gtol=1e-14)
            x = res.x
        else:
            x = x0
        UA, UB = cA.point(x[: d * d]), cB.point(x[d * d:])
        X = np.kron(UA, UB)
        out = X @ r @ X.conj().T
        resid = trace_distance(out, target)
        best_frob = min(best_frob, float(np.linalg.norm(out - target)))
        if resid < best[0]:
            best = (resid, (UA, UB))
        if best[0] <= opts.pass_tol:
            break
    resid, witness = best
    lower = 0.5 * best_frob
    if resid <= opts.pass_tol:
        status = LU_SWAPABLE
    elif lower > opts.fail_tol:
        status = NOT_LU_SWAPABLE
    else:
        status = INCONCLUSIVE
    return SwapVerdict(status, witness if status == LU_SWAPABLE else None, float(resid), True,
                       used, float(lower), opts.seed)


# ---- ansatz-restricted LOCC searches -------------------------------------

ANSATZ_CLASSES = ("identity", "product_unitary_mixture", "one_way_AB", "one_way_BA")


@dataclass
class AnsatzOptions:
    restarts: int = 8
    k: int = 2  # mixture terms or measurement outcomes
    max_iters: int = 1000
    seed: int = 0
    distance: str = "trace"  # "trace" | "purified"
    seed_ansatz: OneWayLoccAnsatz | None = None
    mirror: bool = False


@dataclass
class AsymmetryEstimate:
    value: float
    direction: str
    ansatz_class: str
    distance_kind: str
    best_channel: SeparableInstrument | None
    restarts_used: int = 0
    identity_value: float | None = None

    def to_dict(self) -> dict:
        return {"value": self.value, "direction": self.direction,
                "ansatz_class": self.ansatz_class, "distance_kind": self.distance_kind,
                "restarts_used": self.restarts_used, "identity_value": self.identity_value,
                "branches": None if self.best_channel is None else len(self.best_channel.branches)}


def _distance(kind: str):
    if kind == "trace":
        return trace_distance
    if kind == "purified":
        return purified_distance
    raise ContractError(f"unknown distance {kind!r}")


class _MixtureModel:
    """Σ p_i (U_i ⊗ W_i) · (U_i ⊗ W_i)† with p = softmax(phi)."""

    def __init__(self, dA, dB, k, bases):
        self.dA, self.dB, self.k = dA, dB, k
        self.charts = [StiefelChart(b) for b in bases]
        self.size = k + sum(c.size for c in self.charts)

    def _split(self, theta):
        phi = theta[: self.k]
        p = np.exp(phi - phi.max())
        p /= p.sum()
        parts, pos = [], self.k
        for c in self.charts:
            parts.append(theta[pos:pos + c.size])
            pos += c.size
        return p, parts

    def instrument(self, theta) -> SeparableInstrument:
        p, parts = self._split(theta)
        us = [c.point(t) for c, t in zip(self.charts, parts)]
        return SeparableInstrument(tuple((np.sqrt(p[i]) * us[2 * i], us[2 * i + 1])
                                         for i in range(self.k)))

    def objective(self, rho, target):
        def f(theta):
            p, parts = self._split(theta)
            c = np.sqrt(p)
            pts = [ch.point_and_pullback(t) for ch, t in zip(self.charts, parts)]
            Us = [pt[0] for pt in pts]
            kraus = [c[i] * np.kron(Us[2 * i], Us[2 * i + 1]) for i in range(self.k)]
            val, grads = _frobenius_fit(rho, target, kraus)
            gc = np.empty(self.k)
            out = []
            for i, G in enumerate(grads):
                U, W = Us[2 * i], Us[2 * i + 1]
                gc[i] = np.vdot(G, np.kron(U, W)).real
                gU, gW = product_grads(G, c[i] * U, W)
                out.append(pts[2 * i][1](c[i] * gU))
                out.append(pts[2 * i + 1][1](gW))
            s = np.sum(gc * c)
            gphi = 0.5 * (gc * c - p * s)
            return val, np.concatenate([gphi] + out)
        return f


class _OneWayModel:
    """Sender Kraus stack (an isometry) plus receiver conditional isometries."""

    def __init__(self, direction, s_in, s_out, r_in, r_out, k, bases):
        self.direction, self.k = direction, k
        self.s_in, self.s_out, self.r_in, self.r_out = s_in, s_out, r_in, r_out
        self.sender = StiefelChart(bases[0], s_in)
        self.receivers = [StiefelChart(b, r_in) for b in bases[1:]]
        self.size = self.sender.size + sum(c.size for c in self.receivers)

    def _parts(self, theta):
        parts, pos = [], self.sender.size
        for c in self.receivers:
            parts.append(theta[pos:pos + c.size])
            pos += c.size
        return theta[: self.sender.size], parts

    def _pair(self, M, R):
        return (M, R) if self.direction == "AB" else (R, M)

    def instrument(self, theta) -> SeparableInstrument:
        ts, parts = self._parts(theta)
        S = self.sender.point(ts)
        Rs = [c.point(t) for c, t in zip(self.receivers, parts)]
        return SeparableInstrument(tuple(self._pair(S[i * self.s_out:(i + 1) * self.s_out], Rs[i])
                                         for i in range(self.k)))

    def objective(self, rho, target):
        so = self.s_out

        def f(theta):
            ts, parts = self._parts(theta)
            S, pbS = self.sender.point_and_pullback(ts)
            pts = [c.point_and_pullback(t) for c, t in zip(self.receivers, parts)]
            Ms = [S[i * so:(i + 1) * so] for i in range(self.k)]
            kraus = [np.kron(*self._pair(Ms[i], pts[i][0])) for i in range(self.k)]
            val, grads = _frobenius_fit(rho, target, kraus)
            gS, gR = [], []
            for i, G in enumerate(grads):
                first, second = product_grads(G, *self._pair(Ms[i], pts[i][0]))
                gM, gRi = (first, second) if self.direction == "AB" else (second, first)
                gS.append(gM)
                gR.append(pts[i][1](gRi))
            return val, np.concatenate([pbS(np.vstack(gS))] + gR)
        return f


def _one_way_dims(direction, in_dims, out_dims):
    (iA, iB), (oA, oB) = in_dims, out_dims
    if direction == "AB":
        return iA, oA, iB, oB
    return iB, oB, iA, oA


def ansatz_distance_minimum(rho: BipartiteState, target: np.ndarray, out_dims: tuple[int, int],
                            ansatz_class: str, opts: AnsatzOptions | None = None) -> AsymmetryEstimate:
    """Upper bound on min D(Λ(ρ), target) over channels Λ in ``ansatz_class``.

    The identity channel is always a candidate when input and output dimensions
    agree, so the result never exceeds D(ρ, target) in that case. Restarts are
    evaluated in a fixed order, making the value non-increasing in the budget.
    """
    opts = AnsatzOptions() if opts is None else opts
    if ansatz_class not in ANSATZ_CLASSES:
        raise ContractError(f"unknown ansatz class {ansatz_class!r}")
    dist = _distance(opts.distance)
    r = rho.density()
    in_dims = rho.dims
    best_val, best_ch = np.inf, None
    identity_value = None
    if in_dims == tuple(out_dims):
        identity_value = dist(r, target)
        best_val, best_ch = identity_value, identity_instrument(*in_dims)
    if ansatz_class == "identity":
        if identity_value is None:
            raise ContractError("identity class needs equal input and output dimensions")
        return AsymmetryEstimate(best_val, "upper_bound", ansatz_class, opts.distance, best_ch, 0,
                                 identity_value)

    def consider(ins):
        nonlocal best_val, best_ch
        val = dist(channel_output(ins, r), target)
        if val < best_val:
            best_val, best_ch = val, ins

    k = opts.k
    if ansatz_class == "product_unitary_mixture":
        if in_dims != tuple(out_dims):
            raise ContractError("product-unitary mixtures keep the local dimensions")
        dA, dB = in_dims
        dims = [dA, dB] * k

        def model_for(i):
            return _MixtureModel(dA, dB, k, _restart_bases(i, dims, opts.seed, opts.mirror))
    else:
        direction = ansatz_class[-2:]
        s_in, s_out, r_in, r_out = _one_way_dims(direction, in_dims, out_dims)
        if r_out < r_in:
            raise ContractError(f"{ansatz_class}: receiver cannot map dimension {r_in} to {r_out} isometrically")
        if k * s_out < s_in:
            raise ContractError(f"{ansatz_class}: {k} outcomes too few for the sender")
        seed_ansatz = opts.seed_ansatz
        if seed_ansatz is not None and seed_ansatz.direction == direction:
            seeded = ansatz_to_instrument(seed_ansatz)
            if seeded.in_dims == in_dims and seeded.out_dims == tuple(out_dims):
                consider(seeded)
            else:
                seed_ansatz = None
        else:
            seed_ansatz = None
        dims = [k * s_out] + [r_out] * k

        def model_for(i):
            if i == 0 and seed_ansatz is not None:
                stack = np.vstack(seed_ansatz.kraus)
                bases = [complete_unitary(stack)] + [complete_unitary(u) for u in seed_ansatz.conditionals]
                return _OneWayModel(direction, s_in, s_out, r_in, r_out, len(seed_ansatz.kraus), bases)
            return _OneWayModel(direction, s_in, s_out, r_in, r_out, k,
                                _restart_bases(i, dims, opts.seed, opts.mirror))

    used = 0
    for i in range(opts.restarts):
        if best_val <= 1e-12:
            break
        used = i + 1
        model = model_for(i)
        f = model.objective(r, target)
        x0 = np.zeros(model.size)
        res = lbfgs(f, x0, opts.max_iters, ftol=1e-30, gtol=1e-14)
        consider(model.instrument(res.x))
    return AsymmetryEstimate(float(best_val), "upper_bound", ansatz_class, opts.distance,
                             best_ch, used, identity_value)


def asymmetry_upper_bound(rho: BipartiteState, ansatz_class: str = "product_unitary_mixture",
                          opts: AnsatzOptions | None = None) -> AsymmetryEstimate:
    """Upper bound on inf_Λ D(Λ(ρ), VρV) over the chosen LOCC ansatz class."""
    target = apply_swap(rho).density()
    return ansatz_distance_minimum(rho, target, (rho.dB, rho.dA), ansatz_class, opts)


def applicable_classes(in_dims, out_dims, k: int = 2) -> list[str]:
    classes = []
    if tuple(in_dims) == tuple(out_dims):
        classes += ["identity", "product_unitary_mixture"]
    for direction in ("AB", "BA"):
        s_in, s_out, r_in, r_out = _one_way_dims(direction, in_dims, out_dims)
        if r_out >= r_in and k * s_out >= s_in:
            classes.append("one_way_" + direction)
    return classes


def structured_seed(in_dims, out_dims) -> OneWayLoccAnsatz | None:
    """Block-measurement protocol for C^a⊗C^(m·a) (or mirrored), if the dims fit."""
    (iA, iB), (oA, oB) = in_dims, out_dims
    if (oA, oB) != (iB, iA) or iA == iB:
        return None
    if iB % iA == 0:
        return subspace_measurement_protocol(iA, iB)
    if iA % iB == 0:
        return mirror_ansatz(subspace_measurement_protocol(iB, iA))
    return None


# ---- distance to the PPT set ---------------------------------------------

def _project_simplex(w: np.ndarray) -> np.ndarray:
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(w) + 1)
    rho_i = np.nonzero(u - css / idx > 0)[0][-1]
    return np.maximum(w - css[rho_i] / (rho_i + 1), 0.0)


def _project_states(X: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((X + X.conj().T) / 2)
    return (v * _project_simplex(w)) @ v.conj().T


def ppt_projection(rho: np.ndarray, dA: int, dB: int, max_iters: int = 5000,
                   tol: float = 1e-13) -> tuple[np.ndarray, int]:
    """Frobenius-nearest PPT state by Dykstra's alternating projections."""
    x = np.asarray(rho, dtype=complex)
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for it in range(1, max_iters + 1):
        y = _project_states(x + p)
        p = x + p - y
        z = partial_transpose(_project_states(partial_transpose(y + q, dA, dB)), dA, dB)
        q = y + q - z
        change = np.linalg.norm(z - x)
        x = z
        if change < tol:
            break
    return x, it


def nonsymmetric_measure_estimate(sigma: BipartiteState, rho: BipartiteState,
                                  opts: AnsatzOptions | None = None,
                                  classes: list[str] | None = None) -> dict:
    """Lower estimate of E_σ(ρ) = E^D(σ) − inf_Λ D(σ, Λ(ρ)) with D the trace distance.

    ``e_first_term`` is ½‖σ − τ*‖_F with τ* the Frobenius projection onto the
    PPT states; it lower-bounds the trace distance from σ to the separable set.
    ``inner_term_upper`` is the best ansatz value of D(σ, Λ(ρ)).
    """
    opts = AnsatzOptions() if opts is None else opts
    target = sigma.density()
    tau, its = ppt_projection(target, sigma.dA, sigma.dB)
    first = 0.5 * float(np.linalg.norm(target - tau))
    ppt_td = trace_distance(target, tau)
    if classes is None:
        classes = applicable_classes(rho.dims, sigma.dims, opts.k)
    if not classes:
        raise ContractError("no ansatz class maps the input dimensions to those of sigma")
    best = None
    for cls in classes:
        est = ansatz_distance_minimum(rho, target, sigma.dims, cls, opts)
        if best is None or est.value < best.value:
            best = est
    exact_ppt = sigma.dA * sigma.dB <= 6
    return {"e_first_term": first, "ppt_trace_distance": ppt_td,
            "projection_iterations": its,
            "first_term_grade": "exact-relaxation" if exact_ppt else "heuristic",
            "inner_term_upper": best.value, "inner_term_class": best.ansatz_class,
            "e_sigma_lower": first - best.value}


# ---- combined report -----------------------------------------------------

G_THRESHOLD = 1e-4


@dataclass
class SwapabilityReport:
    g: MeasureResult
    full_rank_criterion: str  # "applicable" | "inapplicable"
    lu: SwapVerdict
    locc_swapable: bool | None
    verdict: str
    schmidt_rank: int | None = None
    density_rank: int | None = None
    protocol: AsymmetryEstimate | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"g": self.g.to_dict(), "full_rank_criterion": self.full_rank_criterion,
                "lu": self.lu.to_dict(), "locc_swapable": self.locc_swapable,
                "verdict": self.verdict, "schmidt_rank": self.schmidt_rank,
                "density_rank": self.density_rank,
                "protocol": None if self.protocol is None else self.protocol.to_dict()}


def locc_swapability_report(rho: BipartiteState, swap_opts: SwapOptions | None = None,
                            roof_opts: RoofOptions | None = None,
                            ansatz_opts: AnsatzOptions | None = None) -> SwapabilityReport:
    """Combine the G-concurrence test with the product-unitary search.

    When G > 0 any LOCC swap of the state would be a product-unitary swap, so a
    negative LU verdict means the state is not LOCC-swapable. When G = 0 that
    implication is unavailable and an explicit one-way protocol is searched.
    """
    swap_opts = SwapOptions() if swap_opts is None else swap_opts
    ansatz_opts = AnsatzOptions() if ansatz_opts is None else ansatz_opts
    lu = lu_swap_check(rho, swap_opts)
    g = g_convex_roof(rho, roof_opts)
    srank = schmidt(rho).rank if rho.is_pure else None
    drank = None if rho.is_pure else int(np.sum(np.linalg.eigvalsh(rho.data) > 1e-10))
    applicable = g.value > G_THRESHOLD
    crit = "applicable" if applicable else "inapplicable"

    if lu.status == LU_SWAPABLE:
        return SwapabilityReport(g, crit, lu, True, "LOCC-swapable: a product unitary swaps the state",
                                 srank, drank)
    if applicable:
        if lu.status == NOT_LU_SWAPABLE:
            return SwapabilityReport(g, crit, lu, False,
                                     "not LOCC-swapable: G > 0 and no product unitary swaps the state",
                                     srank, drank)
        return SwapabilityReport(g, crit, lu, None,
                                 "undetermined: G > 0 but the product-unitary search is inconclusive",
                                 srank, drank)

    out_dims = (rho.dB, rho.dA)
    best = None
    for cls in applicable_classes(rho.dims, out_dims, ansatz_opts.k):
        if cls == "identity":
            continue
        seed = structured_seed(rho.dims, out_dims)
        o = ansatz_opts if seed is None else _with_seed(ansatz_opts, seed)
        est = ansatz_distance_minimum(rho, apply_swap(rho).density(), out_dims, cls, o)
        if best is None or est.value < best.value:
            best = est
    if best is not None and best.value <= swap_opts.pass_tol:
        return SwapabilityReport(g, crit, lu, True,
                                 "full-rank criterion inapplicable (G = 0) / LOCC-swapable via explicit protocol",
                                 srank, drank, best)
    return SwapabilityReport(g, crit, lu, None,
                             "full-rank criterion inapplicable (G = 0) / no swapping protocol found",
                             srank, drank, best)


def _with_seed(opts: AnsatzOptions, seed: OneWayLoccAnsatz) -> AnsatzOptions:
    from dataclasses import replace
    return replace(opts, seed_ansatz=seed)
