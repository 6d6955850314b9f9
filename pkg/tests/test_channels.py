import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asymq.channels import (OneWayLoccAnsatz, SeparableInstrument, ansatz_to_instrument,
                            apply_instrument, channel_output, det_weight_sum, identity_instrument,
                            instrument_from_dict, instrument_to_dict, load_instrument,
                            product_unitary_mixture, random_product_unitary_mixture,
                            random_tp_separable_instrument, save_instrument,
                            subspace_measurement_protocol)
from asymq.errors import ContractError, ShapeError, StateInvariantError
from asymq.linalg import haar_unitary, random_density_matrix, trace_distance
from asymq.measures import g_pure
from asymq.states import (BipartiteState, apply_swap, bell_state, example_2x4_mixture,
                          product_state)

seeds = st.integers(0, 2**32 - 1)


def test_identity_instrument_returns_input():
    rho = BipartiteState.mixed(random_density_matrix(4, np.random.default_rng(0)), 2, 2)
    (out,) = apply_instrument(identity_instrument(2, 2), rho)
    assert np.isclose(out.probability, 1) and np.allclose(out.state.data, rho.data)


def test_product_unitary_mixture_outcomes():
    rng = np.random.default_rng(1)
    us = [(haar_unitary(2, rng), haar_unitary(2, rng)) for _ in range(2)]
    ins = product_unitary_mixture([0.3, 0.7], us)
    psi = bell_state(2)
    outs = apply_instrument(ins, psi)
    for p, (UA, UB), o in zip([0.3, 0.7], us, outs):
        assert np.isclose(o.probability, p)
        assert np.isclose(abs(np.vdot(np.kron(UA, UB) @ psi.data, o.state.data)), 1)


def test_local_measurement_on_bell_gives_product_branches():
    P0, P1 = np.diag([1.0, 0]), np.diag([0, 1.0])
    ins = SeparableInstrument(((P0, np.eye(2)), (P1, np.eye(2))))
    outs = apply_instrument(ins, bell_state(2))
    assert [round(o.probability, 12) for o in outs] == [0.5, 0.5]
    assert np.allclose(outs[0].state.data, product_state([1, 0], [1, 0]).data)
    assert np.allclose(outs[1].state.data, product_state([0, 1], [0, 1]).data)


def test_zero_probability_branch_has_no_state():
    P0, P1 = np.diag([1.0, 0]), np.diag([0, 1.0])
    ins = SeparableInstrument(((P0, np.eye(2)), (P1, np.eye(2))))
    outs = apply_instrument(ins, product_state([1, 0], [1, 0]))
    assert outs[1].probability == 0 and outs[1].state is None


def test_dimension_mismatch_and_trace_preservation_checks():
    with pytest.raises(ShapeError):
        apply_instrument(identity_instrument(2, 3), bell_state(2))
    with pytest.raises(StateInvariantError) as exc:
        SeparableInstrument(((0.5 * np.eye(2), np.eye(2)),))
    assert exc.value.invariant == "trace_preserving"


def test_det_weight_sum_examples():
    rng = np.random.default_rng(2)
    ins = random_product_unitary_mixture(3, 4, rng)
    assert abs(det_weight_sum(ins) - 1) < 1e-10
    singular = SeparableInstrument(((np.diag([1.0, 0]), np.eye(2)),), trace_preserving=False)
    assert det_weight_sum(singular) == 0
    rect = SeparableInstrument(((np.ones((2, 3)), np.eye(2)),), trace_preserving=False)
    with pytest.raises(ContractError):
        det_weight_sum(rect)


def test_product_unitary_mixture_validation():
    with pytest.raises(ContractError):
        product_unitary_mixture([0.5, 0.6], [(np.eye(2), np.eye(2))] * 2)
    with pytest.raises(ContractError):
        product_unitary_mixture([1.0], [(2 * np.eye(2), np.eye(2))])


@given(st.integers(2, 3), st.integers(1, 6), seeds)
@settings(max_examples=60, deadline=None)
def test_random_instruments_are_trace_preserving_and_bounded(d, k, seed):
    ins = random_tp_separable_instrument(d, k, np.random.default_rng(seed))
    assert len(ins.branches) == k
    assert ins.tp_defect() < 1e-9
    assert det_weight_sum(ins) <= 1 + 1e-9


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_single_branch_instrument_is_product_unitary(seed):
    ins = random_tp_separable_instrument(2, 1, np.random.default_rng(seed))
    X = ins.kraus()[0]
    assert np.allclose(X.conj().T @ X, np.eye(4), atol=1e-9)


@given(st.integers(2, 3), st.integers(1, 4), seeds)
@settings(max_examples=30, deadline=None)
def test_channel_output_is_a_state(d, k, seed):
    rng = np.random.default_rng(seed)
    ins = random_tp_separable_instrument(d, k, rng)
    rho = BipartiteState.mixed(random_density_matrix(d * d, rng), d, d)
    out = channel_output(ins, rho)
    assert np.isclose(np.trace(out).real, 1)
    assert np.linalg.eigvalsh(out)[0] > -1e-10
    outs = apply_instrument(ins, rho)
    assert np.isclose(sum(o.probability for o in outs), 1)


@given(st.integers(2, 3), st.integers(1, 4), seeds)
@settings(max_examples=30, deadline=None)
def test_g_scales_by_branch_det_weight(d, k, seed):
    # per-branch homogeneity: p_i G(σ_i) = |det A_i|^{2/d} |det B_i|^{2/d} G(ψ)
    rng = np.random.default_rng(seed)
    ins = random_tp_separable_instrument(d, k, rng)
    psi = BipartiteState.pure(np.exp(1j * rng.normal(size=d * d)) * rng.normal(size=d * d), d, d,
                              normalize=True)
    g = g_pure(psi).value
    for (A, B), o in zip(ins.branches, apply_instrument(ins, psi)):
        w = (abs(np.linalg.det(A)) * abs(np.linalg.det(B))) ** (2 / d)
        lhs = 0.0 if o.state is None else o.probability * g_pure(o.state).value
        assert abs(lhs - w * g) < 1e-9


def test_one_way_ansatz_examples():
    a = OneWayLoccAnsatz((np.eye(2),), (np.eye(2),))
    ins = ansatz_to_instrument(a)
    assert np.allclose(ins.kraus()[0], np.eye(4))
    X = np.array([[0, 1], [1, 0]])
    a = OneWayLoccAnsatz((np.diag([1.0, 0]), np.diag([0, 1.0])), (np.eye(2), X))
    ins = ansatz_to_instrument(a)
    assert len(ins.branches) == 2
    out = channel_output(ins, bell_state(2))
    # measuring |1> on A then flipping B maps Φ+ to the mixture of |00> and |10>
    assert np.allclose(np.diag(out).real, [0.5, 0, 0.5, 0])
    with pytest.raises(StateInvariantError):
        OneWayLoccAnsatz((np.diag([1.0, 0]),), (np.eye(2),))
    with pytest.raises(StateInvariantError):
        OneWayLoccAnsatz((np.eye(2),), (2 * np.eye(2),))


def test_block_protocol_swaps_2x4_example():
    rho = example_2x4_mixture()
    ins = ansatz_to_instrument(subspace_measurement_protocol(2, 4))
    assert ins.out_dims == (4, 2)
    out = channel_output(ins, rho)
    assert trace_distance(out, apply_swap(rho).data) < 1e-9


def test_instrument_serialization_round_trip(tmp_path):
    ins = random_tp_separable_instrument(3, 3, np.random.default_rng(5))
    back = instrument_from_dict(instrument_to_dict(ins))
    for (A, B), (A2, B2) in zip(ins.branches, back.branches):
        assert np.array_equal(A, A2) and np.array_equal(B, B2)
    save_instrument(ins, tmp_path / "i.json")
    assert len(load_instrument(tmp_path / "i.json").branches) == 3
