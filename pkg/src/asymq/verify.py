"""Monte-Carlo verification campaigns.

Every campaign draws sample ``i`` from its own generator seeded with
``(seed, i)``, so results do not depend on execution order or worker count.
The worst sample's inputs are serialized into the report and can be re-fed
through :func:`replay`.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channels import (SeparableInstrument, apply_instrument, branch_spreads, det_weight_sum,
                       instrument_from_dict, instrument_to_dict, random_tp_separable_instrument)
from .linalg import ginibre, random_density_matrix, random_pure_vector
from .measures import (RoofOptions, g_of_vector, g_pure, hashing_lower_bound, symmetry_bracket,
                       wootters_eof)
from .reporting import REPORT_FORMAT
from .states import (BipartiteState, decode_complex, encode_complex, state_from_dict,
                     state_to_dict)

CAMPAIGNS = ("lemma1", "lemma2", "g_identity", "monotonicity", "theorem2")


@dataclass
class CampaignReport:
    campaign: str
    samples: int
    dims: list
    seed: int
    max_violation: float | None
    violations: int
    tolerance: float
    passed: bool
    runtime_ms: int = 0
    worst_case: dict | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = False) -> dict:
        out = {"format": REPORT_FORMAT, "kind": "campaign", "campaign": self.campaign,
               "samples": self.samples, "dims": self.dims, "seed": self.seed,
               "max_violation": self.max_violation, "violations": self.violations,
               "tolerance": self.tolerance, "passed": self.passed,
               "worst_case": self.worst_case, "extra": self.extra}
        if timing:
            out["runtime_ms"] = self.runtime_ms
        return out


def _rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng([seed, i])


def _map(fn, n: int, workers: int):
    if workers > 1 and n > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, range(n)))
    return [fn(i) for i in range(n)]


def _collect(name, dims, seed, tol, results, start, extra=None) -> CampaignReport:
    """results: list of (violation, worst_case_payload, flag_count)."""
    viol = [r[0] for r in results]
    count = sum(1 for r in results if r[0] > tol or r[2])
    worst = None
    maxv = None
    if results:
        j = int(np.argmax(viol))
        maxv = float(viol[j])
        worst = dict(results[j][1], index=j)
    return CampaignReport(name, len(results), dims, seed, maxv, count, tol, count == 0,
                          int(1000 * (time.perf_counter() - start)), worst, extra or {})


# ---- sample evaluators (shared with replay) -------------------------------

def lemma1_violation(psi: BipartiteState, ins: SeparableInstrument) -> float:
    """Σ p_i G(σ_i) − det_weight_sum · G(ψ) for a pure input."""
    lhs = sum(o.probability * g_pure(o.state).value
              for o in apply_instrument(ins, psi) if o.state is not None)
    return float(lhs - det_weight_sum(ins) * g_pure(psi).value)


def monotonicity_violation(psi: BipartiteState, ins: SeparableInstrument) -> float:
    lhs = sum(o.probability * g_pure(o.state).value
              for o in apply_instrument(ins, psi) if o.state is not None)
    return float(lhs - g_pure(psi).value)


def g_identity_violation(A: np.ndarray, B: np.ndarray, psi: BipartiteState) -> float:
    d = psi.dA
    lhs = g_of_vector(np.kron(A, B) @ psi.data, d, d)
    rhs = (abs(np.linalg.det(A)) * abs(np.linalg.det(B))) ** (2 / d) * g_pure(psi).value
    return float(abs(lhs - rhs))


def lemma2_check(ins: SeparableInstrument, eq_tol: float = 1e-9,
                 spread_tol: float = 1e-6) -> tuple[float, bool]:
    """(det_weight_sum − 1, equality-branch failure flag)."""
    s = det_weight_sum(ins)
    spreads = branch_spreads(ins)
    flag = False
    if s > 1 - eq_tol and max(spreads) >= spread_tol:
        flag = True
    if max(spreads) < 1e-8 and s < 1 - eq_tol:
        flag = True
    return float(s - 1), flag


def theorem2_violation(rho: BipartiteState, roof: RoofOptions) -> float:
    """Largest excess over the bracket checks; ≤ 0 means all checks pass."""
    br = symmetry_bracket(rho, roof)
    checks = [hashing_lower_bound(rho) - wootters_eof(rho) - 1e-3]
    if br.entangled:
        checks += [br.s_lower - 1.0, -br.s_lower, br.ed_lower - br.ec_upper - 1e-9]
        if rho.is_pure:
            checks.append(abs(br.s_lower - 1.0) - 1e-6)
    return float(max(checks))


def _psi_payload(psi):
    return {"psi": state_to_dict(psi)}


# ---- campaigns ------------------------------------------------------------

def run_lemma1_campaign(n: int = 1000, d: int = 2, k: int = 3, seed: int = 0,
                        workers: int = 1) -> CampaignReport:
    start = time.perf_counter()

    def one(i):
        rng = _rng(seed, i)
        psi = BipartiteState.pure(random_pure_vector(d * d, rng), d, d)
        ins = random_tp_separable_instrument(d, k, rng)
        return lemma1_violation(psi, ins), {**_psi_payload(psi), "instrument": instrument_to_dict(ins)}, False

    return _collect("lemma1", [d, d], seed, 1e-8, _map(one, n, workers), start, {"branches": k})


def run_monotonicity_campaign(n: int = 1000, d: int = 2, seed: int = 0, k: int = 3,
                              workers: int = 1) -> CampaignReport:
    start = time.perf_counter()

    def one(i):
        rng = _rng(seed, i)
        psi = BipartiteState.pure(random_pure_vector(d * d, rng), d, d)
        ins = random_tp_separable_instrument(d, k, rng)
        return monotonicity_violation(psi, ins), {**_psi_payload(psi), "instrument": instrument_to_dict(ins)}, False

    return _collect("monotonicity", [d, d], seed, 1e-8, _map(one, n, workers), start, {"branches": k})


def run_lemma2_campaign(n: int = 1000, d: int = 2, k: int = 3, seed: int = 0,
                        workers: int = 1) -> CampaignReport:
    start = time.perf_counter()

    def one(i):
        rng = _rng(seed, i)
        ins = random_tp_separable_instrument(d, k, rng)
        v, flag = lemma2_check(ins)
        return v, {"instrument": instrument_to_dict(ins)}, flag

    results = _map(one, n, workers)
    extra = {"branches": k,
             "equality_cases": sum(1 for r in results if r[0] > -1e-9),
             "equality_branch_failures": sum(1 for r in results if r[2])}
    return _collect("lemma2", [d, d], seed, 1e-9, results, start, extra)


def run_g_identity_campaign(n: int = 1000, d: int = 2, seed: int = 0,
                            workers: int = 1) -> CampaignReport:
    start = time.perf_counter()

    def one(i):
        rng = _rng(seed, i)
        A, B = ginibre(d, d, rng), ginibre(d, d, rng)
        psi = BipartiteState.pure(random_pure_vector(d * d, rng), d, d)
        payload = {**_psi_payload(psi), "A": encode_complex(A), "B": encode_complex(B)}
        return g_identity_violation(A, B, psi), payload, False

    return _collect("g_identity", [d, d], seed, 1e-8, _map(one, n, workers), start)


def _theorem2_state(rng) -> BipartiteState:
    while True:
        if rng.random() < 0.25:
            st = BipartiteState.pure(random_pure_vector(4, rng), 2, 2)
        else:
            st = BipartiteState.mixed(random_density_matrix(4, rng, rank=int(rng.integers(2, 5))), 2, 2)
        if wootters_eof(st) > 1e-9:
            return st


def run_theorem2_consistency(n: int = 200, seed: int = 0, roof_restarts: int = 4,
                             workers: int = 1) -> CampaignReport:
    start = time.perf_counter()
    roof = RoofOptions(restarts=roof_restarts, seed=seed)

    def one(i):
        st = _theorem2_state(_rng(seed, i))
        return theorem2_violation(st, roof), {"state": state_to_dict(st), "roof_restarts": roof_restarts,
                                              "roof_seed": seed}, False

    return _collect("theorem2", [2, 2], seed, 0.0, _map(one, n, workers), start)


def run_campaign(name: str, n: int, d: int = 2, k: int = 3, seed: int = 0,
                 workers: int = 1) -> CampaignReport:
    if name == "lemma1":
        return run_lemma1_campaign(n, d, k, seed, workers)
    if name == "lemma2":
        return run_lemma2_campaign(n, d, k, seed, workers)
    if name == "g_identity":
        return run_g_identity_campaign(n, d, seed, workers)
    if name == "monotonicity":
        return run_monotonicity_campaign(n, d, seed, k, workers)
    if name == "theorem2":
        return run_theorem2_consistency(n, seed, workers=workers)
    raise KeyError(name)


def replay(report: CampaignReport | dict) -> float:
    """Recompute the worst sample's violation from its serialized inputs."""
    if isinstance(report, CampaignReport):
        report = report.to_dict()
    name, wc = report["campaign"], report["worst_case"]
    if wc is None:
        raise ValueError("report has no samples")
    if name in ("lemma1", "monotonicity"):
        psi = state_from_dict(wc["psi"])
        ins = instrument_from_dict(wc["instrument"])
        fn = lemma1_violation if name == "lemma1" else monotonicity_violation
        return fn(psi, ins)
    if name == "lemma2":
        return lemma2_check(instrument_from_dict(wc["instrument"]))[0]
    if name == "g_identity":
        psi = state_from_dict(wc["psi"])
        d = psi.dA
        A = decode_complex(wc["A"], d * d).reshape(d, d)
        B = decode_complex(wc["B"], d * d).reshape(d, d)
        return g_identity_violation(A, B, psi)
    if name == "theorem2":
        roof = RoofOptions(restarts=wc["roof_restarts"], seed=wc["roof_seed"])
        return theorem2_violation(state_from_dict(wc["state"]), roof)
    raise KeyError(name)
