"""Diagnostics for the two reference states.

σ* = ½|01><01| + ½Φ+ on two qubits, and the 2⊗4 mixture ½ψ+ + ½ψ whose
G-concurrence vanishes but which an explicit one-way protocol swaps.
"""
import json

import numpy as np

from asymq.channels import ansatz_to_instrument, channel_output, subspace_measurement_protocol
from asymq.linalg import trace_distance
from asymq.measures import RoofOptions, symmetry_bracket, wootters_concurrence
from asymq.reporting import plain
from asymq.states import apply_swap, example_2x4_mixture, example_mix01_bell, local_spectra
from asymq.swap import (AnsatzOptions, asymmetry_upper_bound, locc_swapability_report,
                        lu_swap_check, nonsymmetric_measure_estimate)


def sigma_star():
    s = example_mix01_bell(0.5)
    v = lu_swap_check(s)
    out = {"rho_A": np.diag(s.reduced("A")).real, "rho_B": np.diag(s.reduced("B")).real,
           "concurrence": wootters_concurrence(s), "lu": v.to_dict(),
           "witness": None if v.witness is None else [np.round(u, 6).tolist() for u in v.witness],
           "bracket": symmetry_bracket(s, RoofOptions()).to_dict(),
           "asymmetry": {cls: asymmetry_upper_bound(s, cls, AnsatzOptions()).value
                         for cls in ("product_unitary_mixture", "one_way_AB", "one_way_BA")},
           "nonsymmetric": nonsymmetric_measure_estimate(s, apply_swap(s))}
    return out


def two_by_four():
    rho = example_2x4_mixture()
    sa, sb = local_spectra(rho)
    ins = ansatz_to_instrument(subspace_measurement_protocol(2, 4))
    rep = locc_swapability_report(rho)
    return {"spectra": [sa, sb],
            "protocol_trace_distance": trace_distance(channel_output(ins, rho),
                                                      apply_swap(rho).density()),
            "report": rep.to_dict()}


if __name__ == "__main__":
    def fmt(obj):
        return json.dumps(plain(obj), indent=2, default=str)
    print("sigma*:", fmt(sigma_star()))
    print("2x4 mixture:", fmt(two_by_four()))
