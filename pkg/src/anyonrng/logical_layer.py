'''
Logical qubits encoded in four Majorana modes each.

Qubit q owns modes 4q-3 .. 4q. Its logical states are

    |0> = both pairs (4q-3, 4q-2) and (4q-1, 4q) fused to I
    |1> = both pairs fused to psi

and one extra pair of modes (4n+1, 4n+2) serves as the ancilla of the
measurement-assisted CNOT. In local labels c1..c4 of one qubit the logical
Paulis are Z = -i c1 c2, X = -i c2 c3 and -i c1 c3 = -Y.

Gate-level checks are made up to a global phase throughout.
'''

import logging
import math

import numpy as np

from . import errors
from . import majorana_sim

LOG = logging.getLogger(__name__)

SETTINGS = (0, 1)
PAULIS = ("X", "Y", "Z")

# Logical matrices of the gates built below, up to global phase.
B12_MATRIX = np.array([[1, 0], [0, 1j]], dtype=complex)
B23_MATRIX = np.array([[1, -1j], [-1j, 1]], dtype=complex) / math.sqrt(2)
HADAMARD_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
CNOT_MATRIX = np.array([[1, 0, 0, 0],
                        [0, 1, 0, 0],
                        [0, 0, 0, 1],
                        [0, 0, 1, 0]], dtype=complex)
PAULI_MATRICES = {"X": np.array([[0, 1], [1, 0]], dtype=complex),
                  "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
                  "Z": np.array([[1, 0], [0, -1]], dtype=complex)}

# B23^2 B12^-1 B23 B12^-1 B23^2, as (local pair, direction) in the order applied.
HADAMARD_WORD = (((2, 3), majorana_sim.COUNTERCLOCKWISE),
                 ((2, 3), majorana_sim.COUNTERCLOCKWISE),
                 ((1, 2), majorana_sim.CLOCKWISE),
                 ((2, 3), majorana_sim.COUNTERCLOCKWISE),
                 ((1, 2), majorana_sim.CLOCKWISE),
                 ((2, 3), majorana_sim.COUNTERCLOCKWISE),
                 ((2, 3), majorana_sim.COUNTERCLOCKWISE))

# Correction U_(eta, zeta) after the CNOT fusion measurements. Labels 1-4 are
# the control block, 5-8 the target block and 9, 10 the ancilla pair. Factors
# are exp(angle c_j c_j') listed in the order they are applied; the factor i
# of the mixed branches is a dropped global phase.
CNOT_CORRECTIONS = {
    (1, 1): (((5, 10), math.pi / 4),),
    (1, -1): (((5, 10), math.pi / 4), ((5, 6), math.pi / 2), ((4, 3), math.pi / 2)),
    (-1, 1): (((5, 10), -math.pi / 4), ((5, 6), math.pi / 2), ((4, 3), math.pi / 2)),
    (-1, -1): (((5, 10), -math.pi / 4),),
}


class LogicalLayerError(errors.InvalidArgumentError):
    pass


class QubitLayout(object):
    '''
    Mode bookkeeping for ``qubit_count`` four-mode qubits plus the ancilla pair.
    '''

    def __init__(self, qubit_count):

        if not isinstance(qubit_count, (int, np.integer)) or qubit_count < 1:
            raise LogicalLayerError("A layout needs at least one qubit, got {!r}".format(qubit_count))

        self.qubit_count = int(qubit_count)
        self.qubit_modes = [tuple(range(4 * q - 3, 4 * q + 1)) for q in range(1, self.qubit_count + 1)]
        self.ancilla_modes = (4 * self.qubit_count + 1, 4 * self.qubit_count + 2)

    @property
    def mode_count(self):
        return 4 * self.qubit_count + 2

    def check_qubit(self, qubit):
        if not 1 <= qubit <= self.qubit_count:
            raise LogicalLayerError("Qubit {} is outside 1..{}".format(qubit, self.qubit_count))

    def mode(self, qubit, local):
        '''
        Global mode index of local label ``local`` (1..4) of ``qubit``.
        '''
        self.check_qubit(qubit)
        return self.qubit_modes[qubit - 1][local - 1]

    def cnot_modes(self, control, target):
        '''
        Map the CNOT labels 1..10 onto global modes: 1-4 the control block,
        5-8 the target block, 9 and 10 the ancilla pair.
        '''

        self.check_qubit(control)
        self.check_qubit(target)

        if control == target:
            raise LogicalLayerError("Control and target must differ, both are {}".format(control))

        labels = list(self.qubit_modes[control - 1]) + list(self.qubit_modes[target - 1]) + list(self.ancilla_modes)
        return dict(zip(range(1, 11), labels))

    def occupation_index(self, logical_index):
        '''
        Occupation-basis index of a logical basis state. Qubit 1 is the most
        significant logical bit; logical 1 on qubit q sets occupation bits
        2q-2 and 2q-1.
        '''

        index = 0
        for q in range(1, self.qubit_count + 1):
            if (logical_index >> (self.qubit_count - q)) & 1:
                index |= 0b11 << (2 * q - 2)

        return index

    def logical_indices(self):
        return np.array([self.occupation_index(i) for i in range(1 << self.qubit_count)])


class LogicalState(object):
    '''
    A register with its qubit layout. ``cnot_branches`` lists the (eta, zeta)
    outcomes of every CNOT applied so far, in order.
    '''

    def __init__(self, register, layout):

        if register.mode_count != layout.mode_count:
            raise LogicalLayerError("Register has {} modes but the layout needs {}".format(register.mode_count, layout.mode_count))

        self.register = register
        self.layout = layout
        self.cnot_branches = []

    @property
    def qubit_count(self):
        return self.layout.qubit_count

    def copy(self):
        state = LogicalState(self.register.copy(), self.layout)
        state.cnot_branches = list(self.cnot_branches)
        return state


def encode(n_qubits, seed):
    '''
    Logical |0...0> on ``n_qubits`` four-mode qubits with the ancilla pair
    fused to I. Three qubits take fourteen modes.

    :returns: The encoded state
    :rtype: :py:class:`LogicalState`
    '''

    layout = QubitLayout(n_qubits)
    return LogicalState(majorana_sim.new_vacuum(layout.mode_count, seed), layout)


def encode_basis_state(n_qubits, logical_index, seed=0):
    '''
    The logical computational basis state ``logical_index`` (qubit 1 is the
    most significant bit).
    '''

    state = encode(n_qubits, seed)
    amplitudes = np.zeros(state.register.dimension, dtype=complex)
    amplitudes[state.layout.occupation_index(logical_index)] = 1.0
    state.register.amplitudes = amplitudes

    return state


def logical_amplitudes(state):
    return state.register.amplitudes[state.layout.logical_indices()]


def codespace_leakage(state):
    '''
    Probability mass outside the logical codespace (including any ancilla
    excitation).
    '''
    inside = np.sum(np.abs(logical_amplitudes(state)) ** 2)
    return float(max(0.0, 1.0 - inside))


def logical_b23(state, qubit):
    '''
    Counterclockwise braid of local modes 2 and 3; logically
    (1/sqrt(2)) [[1, -i], [-i, 1]].
    '''

    layout = state.layout
    state.register.apply_braid(layout.mode(qubit, 2), layout.mode(qubit, 3))
    return state


def logical_b12(state, qubit, inverse=False):
    '''
    Braid of local modes 1 and 2; logically diag(1, i), or its inverse.
    '''

    layout = state.layout
    direction = majorana_sim.CLOCKWISE if inverse else majorana_sim.COUNTERCLOCKWISE
    state.register.apply_braid(layout.mode(qubit, 1), layout.mode(qubit, 2), direction)
    return state


def logical_hadamard(state, qubit):
    '''
    Hadamard from the braid word B23^2 B12^-1 B23 B12^-1 B23^2.
    '''

    layout = state.layout
    for (first, second), direction in HADAMARD_WORD:
        state.register.apply_braid(layout.mode(qubit, first), layout.mode(qubit, second), direction)

    return state


def apply_pauli(state, qubit, pauli):
    '''
    Logical Pauli from braid-like exponentials: exp((pi/2) c2 c3) = i X,
    exp((pi/2) c1 c2) = i Z, and Y as Z after X.
    '''

    if pauli not in PAULIS:
        raise LogicalLayerError("Unknown Pauli '{}', expected one of {}".format(pauli, PAULIS))

    layout = state.layout
    register = state.register

    if pauli in ("X", "Y"):
        register.apply_exponential_braid_like(layout.mode(qubit, 2), layout.mode(qubit, 3), math.pi / 2)

    if pauli in ("Z", "Y"):
        register.apply_exponential_braid_like(layout.mode(qubit, 1), layout.mode(qubit, 2), math.pi / 2)

    return state


def logical_cnot(state, control_qubit, target_qubit, branch=None):
    '''
    Measurement-assisted CNOT: a Hadamard-conjugated controlled phase flip
    built from braids, two fusion measurements and a correction U_(eta, zeta).

    :param branch: Optional ``(eta, zeta)`` pair of signs to post-select
                   instead of sampling the two fusion measurements
    :type branch: tuple of int

    :returns: This state
    :rtype: :py:class:`LogicalState`
    '''

    modes = state.layout.cnot_modes(control_qubit, target_qubit)
    register = state.register

    ancilla = state.layout.ancilla_modes
    if register.fusion_probability(*ancilla) < 1.0 - 1e-12:
        raise errors.ProtocolError("The ancilla pair {} is not fused to I before the CNOT".format(ancilla))

    logical_hadamard(state, target_qubit)

    register.apply_exponential_braid_like(modes[3], modes[4], -math.pi / 4)
    register.apply_exponential_braid_like(modes[5], modes[6], -math.pi / 4)

    if branch is None:
        zeta = register.measure_fusion_quad(modes[4], modes[3], modes[6], modes[9])
        eta = register.measure_fusion_pair(modes[5], modes[9]).sign

    else:
        eta, zeta = branch
        register.postselect_quad(modes[4], modes[3], modes[6], modes[9], zeta)
        register.postselect_pair(modes[5], modes[9], majorana_sim.FusionOutcome.from_sign(eta))

    LOG.debug("CNOT {} -> {}: eta={:+d} zeta={:+d}".format(control_qubit, target_qubit, eta, zeta))
    state.cnot_branches.append((eta, zeta))

    for (first, second), angle in CNOT_CORRECTIONS[(eta, zeta)]:
        register.apply_exponential_braid_like(modes[first], modes[second], angle)

    if register.measure_fusion_pair(*ancilla) is not majorana_sim.FusionOutcome.I:
        raise errors.ProtocolError("The ancilla pair {} was left in the psi channel after the CNOT correction".format(ancilla))

    logical_hadamard(state, target_qubit)

    return state


def prepare_ghz(seed):
    '''
    (|000> + |111>)/sqrt(2): Hadamard on qubit 1, then CNOT(1, 2) and CNOT(2, 3).
    '''

    state = encode(3, seed)
    logical_hadamard(state, 1)
    logical_cnot(state, 1, 2)
    logical_cnot(state, 2, 3)

    return state


def readout(state, qubit, setting):
    '''
    Rotate with U_0 = H (setting 0) or U_1 = B23 (setting 1) and measure the
    fusion channel of the qubit's first two modes. Setting 0 measures X and
    setting 1 measures Y of the pre-rotation state.

    :returns: 0 for the I channel, 1 for psi
    :rtype: int
    '''

    if setting not in SETTINGS:
        raise LogicalLayerError("Readout setting must be 0 or 1, got {!r}".format(setting))

    if setting == 0:
        logical_hadamard(state, qubit)

    else:
        logical_b23(state, qubit)

    layout = state.layout
    return state.register.measure_fusion_pair(layout.mode(qubit, 1), layout.mode(qubit, 2)).bit


def logical_operator_matrix(n_qubits, operation, seed=0):
    '''
    The 2^n x 2^n logical action of ``operation`` (a callable taking a
    :py:class:`LogicalState`), built column by column from the logical basis.
    Columns share one global phase only if ``operation`` is linear on the
    codespace.
    '''

    dimension = 1 << n_qubits
    matrix = np.zeros((dimension, dimension), dtype=complex)

    for column in range(dimension):
        state = encode_basis_state(n_qubits, column, seed)
        operation(state)

        leakage = codespace_leakage(state)
        if leakage > 1e-10:
            raise errors.ProtocolError("Operation leaked {:.3g} of probability out of the codespace".format(leakage))

        matrix[:, column] = logical_amplitudes(state)

    return matrix
