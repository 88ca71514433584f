import functools

import numpy as np
import pytest

from anyonrng import errors
from anyonrng import logical_layer
from anyonrng import majorana_sim
from anyonrng import validation

REVERSED_CNOT = np.array([[1, 0, 0, 0],
                          [0, 0, 0, 1],
                          [0, 0, 1, 0],
                          [0, 1, 0, 0]], dtype=complex)


def _assert_logical(actual, expected):
    deviation = majorana_sim.global_phase_deviation(actual, expected)
    assert deviation < 1e-10, "deviation {:.3g}\n{}".format(deviation, np.round(actual, 6))


def _braid(pair, state, direction=majorana_sim.COUNTERCLOCKWISE):
    layout = state.layout
    state.register.apply_braid(layout.mode(1, pair[0]), layout.mode(1, pair[1]), direction)
    return state


def test_layout_mode_bookkeeping():

    layout = logical_layer.QubitLayout(3)

    assert layout.mode_count == 14
    assert layout.qubit_modes[1] == (5, 6, 7, 8)
    assert layout.ancilla_modes == (13, 14)
    assert layout.mode(3, 4) == 12

    modes = layout.cnot_modes(2, 3)
    assert [modes[label] for label in range(1, 11)] == [5, 6, 7, 8, 9, 10, 11, 12, 13, 14]


def test_layout_rejects_bad_qubits():

    with pytest.raises(logical_layer.LogicalLayerError):
        logical_layer.QubitLayout(0)

    layout = logical_layer.QubitLayout(2)

    with pytest.raises(logical_layer.LogicalLayerError):
        layout.check_qubit(3)

    with pytest.raises(logical_layer.LogicalLayerError):
        layout.cnot_modes(1, 1)


def test_encode_is_in_codespace():

    state = logical_layer.encode(3, seed=0)

    assert state.register.mode_count == 14
    assert logical_layer.codespace_leakage(state) == pytest.approx(0.0)
    assert abs(logical_layer.logical_amplitudes(state)[0]) == pytest.approx(1.0)


@pytest.mark.parametrize("pair,expected", [((1, 2), logical_layer.B12_MATRIX),
                                           ((3, 4), logical_layer.B12_MATRIX),
                                           ((2, 3), logical_layer.B23_MATRIX)])
def test_elementary_braids_act_as_expected(pair, expected):
    actual = logical_layer.logical_operator_matrix(1, functools.partial(_braid, pair))
    _assert_logical(actual, expected)


def test_double_b23_is_x():
    actual = logical_layer.logical_operator_matrix(1, lambda state: _braid((2, 3), _braid((2, 3), state)))
    _assert_logical(actual, logical_layer.PAULI_MATRICES["X"])


def test_inverse_b12_is_conjugate():
    actual = logical_layer.logical_operator_matrix(1, lambda state: logical_layer.logical_b12(state, 1, inverse=True))
    _assert_logical(actual, logical_layer.B12_MATRIX.conj())


def test_hadamard_word_is_seven_braid_palindrome():

    assert len(logical_layer.HADAMARD_WORD) == 7
    assert logical_layer.HADAMARD_WORD == tuple(reversed(logical_layer.HADAMARD_WORD))


def test_hadamard_word_is_hadamard():
    actual = logical_layer.logical_operator_matrix(1, lambda state: logical_layer.logical_hadamard(state, 1))
    _assert_logical(actual, logical_layer.HADAMARD_MATRIX)


@pytest.mark.parametrize("pauli", logical_layer.PAULIS)
def test_pauli_gates(pauli):
    actual = logical_layer.logical_operator_matrix(1, lambda state: logical_layer.apply_pauli(state, 1, pauli))
    _assert_logical(actual, logical_layer.PAULI_MATRICES[pauli])


def test_unknown_pauli_is_rejected():
    with pytest.raises(logical_layer.LogicalLayerError):
        logical_layer.apply_pauli(logical_layer.encode(1, seed=0), 1, "W")


@pytest.mark.parametrize("branch", sorted(logical_layer.CNOT_CORRECTIONS))
def test_every_cnot_branch_is_cnot(branch):
    actual = logical_layer.logical_operator_matrix(
        2, lambda state: logical_layer.logical_cnot(state, 1, 2, branch=branch))
    _assert_logical(actual, logical_layer.CNOT_MATRIX)


@pytest.mark.parametrize("branch", sorted(logical_layer.CNOT_CORRECTIONS))
def test_cnot_with_control_on_second_qubit(branch):
    actual = logical_layer.logical_operator_matrix(
        2, lambda state: logical_layer.logical_cnot(state, 2, 1, branch=branch))
    _assert_logical(actual, REVERSED_CNOT)


@pytest.mark.parametrize("seed", range(8))
def test_sampled_cnot_flips_target(seed):

    state = logical_layer.encode_basis_state(2, 0b10, seed=seed)
    logical_layer.logical_cnot(state, 1, 2)

    weights = np.abs(logical_layer.logical_amplitudes(state)) ** 2
    assert weights[0b11] == pytest.approx(1.0)
    assert logical_layer.codespace_leakage(state) < 1e-12


def test_cnot_refuses_excited_ancilla():

    state = logical_layer.encode(2, seed=0)
    ancilla = state.layout.ancilla_modes
    state.register.apply(majorana_sim.majorana_operator(state.register.mode_count, ancilla[0]))

    with pytest.raises(errors.ProtocolError):
        logical_layer.logical_cnot(state, 1, 2)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_ghz_preparation(seed):

    state = logical_layer.prepare_ghz(seed)
    amplitudes = logical_layer.logical_amplitudes(state)

    weights = np.abs(amplitudes) ** 2
    assert weights[0] == pytest.approx(0.5)
    assert weights[7] == pytest.approx(0.5)
    assert logical_layer.codespace_leakage(state) < 1e-12

    assert validation.logical_correlator(amplitudes, "XXX") == pytest.approx(1.0)
    for paulis in ("XYY", "YXY", "YYX"):
        assert validation.logical_correlator(amplitudes, paulis) == pytest.approx(-1.0)


def test_readout_rejects_unknown_setting():
    with pytest.raises(logical_layer.LogicalLayerError):
        logical_layer.readout(logical_layer.encode(1, seed=0), 1, 2)


def test_readout_of_basis_state():

    state = logical_layer.encode_basis_state(1, 1, seed=0)
    logical_layer.logical_hadamard(state, 1)

    # H|1> read out in the X basis gives the psi channel.
    assert logical_layer.readout(state, 1, 0) == 1


def test_b23_has_order_eight():

    def eight_braids(state):
        for _ in range(8):
            logical_layer.logical_b23(state, 1)
        return state

    _assert_logical(logical_layer.logical_operator_matrix(1, eight_braids), np.eye(2))


def test_b23_conjugates_z_into_y():

    b23 = logical_layer.logical_operator_matrix(1, lambda state: logical_layer.logical_b23(state, 1))
    conjugated = b23.conj().T @ logical_layer.PAULI_MATRICES["Z"] @ b23

    assert np.allclose(conjugated, logical_layer.PAULI_MATRICES["Y"], atol=1e-10)


def _cnot_branch_counts(runs):

    counts = dict.fromkeys(logical_layer.CNOT_CORRECTIONS, 0)

    for seed in range(runs):
        state = logical_layer.encode(2, seed=seed)
        logical_layer.logical_hadamard(state, 1)
        logical_layer.logical_cnot(state, 1, 2)
        counts[state.cnot_branches[-1]] += 1

    return counts


def _assert_uniform_branches(counts, runs):

    sigma = np.sqrt(runs * 0.25 * 0.75)
    for branch, count in counts.items():
        assert abs(count - runs / 4.0) <= 5 * sigma, "branch {} seen {} times in {} runs".format(branch, count, runs)


def test_cnot_branches_are_equally_likely():
    _assert_uniform_branches(_cnot_branch_counts(400), 400)


@pytest.mark.slow
def test_cnot_branches_are_equally_likely_over_many_runs():
    _assert_uniform_branches(_cnot_branch_counts(10000), 10000)


def test_cnot_branches_are_recorded():

    state = logical_layer.prepare_ghz(3)

    assert len(state.cnot_branches) == 2
    assert all(branch in logical_layer.CNOT_CORRECTIONS for branch in state.cnot_branches)


def _bell_pair(seed):
    state = logical_layer.encode(2, seed=seed)
    logical_layer.logical_hadamard(state, 1)
    return logical_layer.logical_cnot(state, 1, 2)


@pytest.mark.parametrize("setting,same", [(0, True), (1, False)])
def test_bell_pair_readout_is_correlated(setting, same):

    # (|00> + |11>)/sqrt(2) has <XX> = 1 and <YY> = -1.
    first_bits = set()

    for seed in range(40):
        state = _bell_pair(seed)
        first = logical_layer.readout(state, 1, setting)
        second = logical_layer.readout(state, 2, setting)

        assert (first == second) is same, "seed {} read {} and {}".format(seed, first, second)
        first_bits.add(first)

    assert first_bits == {0, 1}


def test_product_state_shows_no_violation():

    # Without the CNOTs the state is |+00>, every MABK correlator vanishes.
    state = logical_layer.encode(3, seed=0)
    logical_layer.logical_hadamard(state, 1)
    amplitudes = logical_layer.logical_amplitudes(state)

    correlators = [validation.logical_correlator(amplitudes, paulis) for paulis in ("XXX", "XYY", "YXY", "YYX")]
    assert correlators == pytest.approx([0.0, 0.0, 0.0, 0.0], abs=1e-12)


@pytest.mark.parametrize("settings", [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)])
def test_ghz_readout_parity_never_mixes(settings):

    expected = 0 if settings == (0, 0, 0) else 1
    first_bits = []

    for seed in range(200):
        state = logical_layer.prepare_ghz(seed)
        bits = [logical_layer.readout(state, qubit, setting) for qubit, setting in zip((1, 2, 3), settings)]

        assert sum(bits) % 2 == expected, "seed {} gave {}".format(seed, bits)
        first_bits.append(bits[0])

    assert 0 < sum(first_bits) < len(first_bits)


def test_random_braids_and_fusions_keep_even_parity():

    rng = np.random.default_rng(17)
    state = logical_layer.prepare_ghz(5)
    register = state.register

    for _ in range(200):
        j, jp = rng.choice(np.arange(1, register.mode_count + 1), size=2, replace=False)

        if rng.random() < 0.6:
            register.apply_braid(int(j), int(jp), majorana_sim.DIRECTIONS[int(rng.integers(2))])
        else:
            register.measure_fusion_pair(int(j), int(jp))

        assert register.odd_parity_weight() < 1e-12
        assert register.norm() == pytest.approx(1.0)
