'''
Physics acceptance checks behind ``anyonrng validate``.
'''

import functools
import logging

import numpy as np

from . import logical_layer
from . import mabk_stats
from . import majorana_sim
from . import trial_engine

LOG = logging.getLogger(__name__)

GATE_TOLERANCE = 1e-10


class CheckResult(object):

    def __init__(self, name, deviation, tolerance=GATE_TOLERANCE):
        self.name = name
        self.deviation = float(deviation)
        self.tolerance = tolerance

    @property
    def passed(self):
        return self.deviation < self.tolerance

    def to_dict(self):
        return {"name": self.name, "deviation": self.deviation, "tolerance": self.tolerance, "passed": self.passed}

    def __repr__(self):
        return "CheckResult({!r}, deviation={:.3g}, passed={})".format(self.name, self.deviation, self.passed)


def _braid(local_pair, state):
    layout = state.layout
    state.register.apply_braid(layout.mode(1, local_pair[0]), layout.mode(1, local_pair[1]))
    return state


def check_braid_matrices():
    expected = {(1, 2): logical_layer.B12_MATRIX,
                (3, 4): logical_layer.B12_MATRIX,
                (2, 3): logical_layer.B23_MATRIX}

    results = []
    for pair, matrix in expected.items():
        actual = logical_layer.logical_operator_matrix(1, functools.partial(_braid, pair))
        results.append(CheckResult("braid B{}{}".format(*pair), majorana_sim.global_phase_deviation(actual, matrix)))

    return results


def check_hadamard_word():
    actual = logical_layer.logical_operator_matrix(1, lambda state: logical_layer.logical_hadamard(state, 1))
    return [CheckResult("hadamard braid word", majorana_sim.global_phase_deviation(actual, logical_layer.HADAMARD_MATRIX))]


def _cnot_branch(branch, state):
    return logical_layer.logical_cnot(state, 1, 2, branch=branch)


def check_cnot_branches():
    results = []
    for branch in sorted(logical_layer.CNOT_CORRECTIONS):
        actual = logical_layer.logical_operator_matrix(2, functools.partial(_cnot_branch, branch))
        results.append(CheckResult("cnot branch eta={:+d} zeta={:+d}".format(*branch),
                                   majorana_sim.global_phase_deviation(actual, logical_layer.CNOT_MATRIX)))

    return results


def logical_correlator(amplitudes, paulis):
    operator = np.array([[1.0]])
    for pauli in paulis:
        operator = np.kron(operator, logical_layer.PAULI_MATRICES[pauli])

    return float(np.vdot(amplitudes, operator @ amplitudes).real)


def check_ghz(seed=0):
    state = logical_layer.prepare_ghz(seed)
    amplitudes = logical_layer.logical_amplitudes(state)
    weights = np.abs(amplitudes) ** 2

    expected = np.zeros(8)
    expected[0] = expected[7] = 0.5

    return [CheckResult("ghz populations", np.abs(weights - expected).max()),
            CheckResult("ghz <XXX> = +1", abs(logical_correlator(amplitudes, "XXX") - 1.0)),
            CheckResult("ghz <XYY> = -1", abs(logical_correlator(amplitudes, "XYY") + 1.0)),
            CheckResult("ghz codespace", logical_layer.codespace_leakage(state))]


def check_noiseless_violation(seed=0, k=200):
    dist = trial_engine.uniform_distribution()
    records = trial_engine.run_trials(k, dist, trial_engine.NoiseSpec(), seed)
    return [CheckResult("noiseless L-hat = 4", abs(mabk_stats.estimate(records, dist).l_hat - 4.0))]


def run_acceptance_suite(seed=0):
    '''
    Run every check.

    :rtype: list of :py:class:`CheckResult`
    '''

    results = (check_braid_matrices() + check_hadamard_word() + check_cnot_branches()
               + check_ghz(seed) + check_noiseless_violation(seed))

    for result in results:
        LOG.debug(repr(result))

    return results
