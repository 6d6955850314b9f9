"""Entanglement-asymmetry diagnostics for bipartite quantum states."""
from .channels import (OneWayLoccAnsatz, SeparableInstrument, apply_instrument,
                       ansatz_to_instrument, det_weight_sum, product_unitary_mixture,
                       random_tp_separable_instrument)
from .measures import (MeasureResult, RoofOptions, eof_convex_roof, g_convex_roof, g_pure,
                       symmetry_bracket, wootters_concurrence, wootters_eof)
from .states import (BipartiteState, apply_swap, example_2x4_mixture, example_mix01_bell,
                     load_state, local_spectra, save_state, schmidt)
from .swap import (asymmetry_upper_bound, locc_swapability_report, lu_swap_check,
                   nonsymmetric_measure_estimate, swap_operator)

__version__ = "0.1.0"
