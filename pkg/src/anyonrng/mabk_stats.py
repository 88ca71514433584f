'''
MABK bookkeeping: the sign tau, parity classes, the estimator L-hat and the
per-trial variable whose mean it is.

The inequality reads

    L = sum over S of tau(x,y,z) [P(even|xyz) - P(odd|xyz)] <= 2

with S = {000, 011, 101, 110}, tau(x,y,z) = (-1)^((x+y+z)/2), a quantum
maximum of 4 and a classical maximum of 2.
'''

import enum
import itertools
import logging

import numpy as np

from . import errors

LOG = logging.getLogger(__name__)

SETTINGS_SUPPORT = ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0))
ALL_SETTINGS = tuple(itertools.product((0, 1), repeat=3))
ALL_OUTCOMES = ALL_SETTINGS

CLASSICAL_BOUND = 2.0
QUANTUM_BOUND = 4.0


class MabkError(errors.InvalidArgumentError):
    pass


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"

    @property
    def sign(self):
        return 1 if self is Parity.EVEN else -1


def tau(x, y, z):
    if (x, y, z) not in SETTINGS_SUPPORT:
        raise MabkError("Settings ({}, {}, {}) are outside the MABK support {}".format(x, y, z, SETTINGS_SUPPORT))

    return -1 if (x + y + z) // 2 % 2 else 1


def parity_class(a, b, c):
    return Parity.ODD if (a + b + c) % 2 else Parity.EVEN


def _design_probability(dist, settings):
    probability = dist.probability(settings)

    if probability <= 0:
        raise MabkError("Settings {} have zero probability under the settings distribution".format(settings))

    return probability


class ViolationEstimate(object):
    '''
    The estimated violation L-hat over ``k`` trials, with the per-setting
    (N_even, N_odd) counts it was computed from.
    '''

    def __init__(self, l_hat, k, counts):
        self.l_hat = l_hat
        self.k = k
        self.counts = counts

    def to_dict(self):
        return {"l_hat": self.l_hat,
                "k": self.k,
                "counts": {"".join(str(bit) for bit in settings): list(self.counts.get(settings, (0, 0)))
                           for settings in SETTINGS_SUPPORT}}

    @classmethod
    def from_dict(cls, data):
        counts = {tuple(int(bit) for bit in key): tuple(int(n) for n in value)
                  for key, value in data["counts"].items()}

        return cls(float(data["l_hat"]), int(data["k"]), counts)


def estimate(records, dist):
    '''
    L-hat = (1/k) sum over S of tau / P(xyz) [N_even - N_odd], dividing by the
    design probability P(xyz) rather than the observed frequency. Settings
    that never occurred contribute 0.

    :param records: The trial records
    :type records: list of :py:class:`~anyonrng.trial_engine.TrialRecord`

    :param dist: The distribution the settings were drawn from
    :type dist: :py:class:`~anyonrng.trial_engine.SettingsDistribution`

    :rtype: :py:class:`ViolationEstimate`
    '''

    counts = {settings: [0, 0] for settings in SETTINGS_SUPPORT}

    for record in records:
        settings = (record.x, record.y, record.z)
        tau(*settings)
        _design_probability(dist, settings)

        counts[settings][0 if parity_class(record.a, record.b, record.c) is Parity.EVEN else 1] += 1

    k = len(records)
    if k == 0:
        raise MabkError("Cannot estimate a violation from zero records")

    total = 0.0
    for settings in SETTINGS_SUPPORT:
        even, odd = counts[settings]
        if even or odd:
            total += tau(*settings) / _design_probability(dist, settings) * (even - odd)

    l_hat = total / k
    LOG.debug("Estimated L-hat = {} from {} records".format(l_hat, k))

    return ViolationEstimate(l_hat, k, {settings: tuple(value) for settings, value in counts.items()})


def trial_variable(record, dist):
    '''
    tau(x,y,z) Lambda(a,b,c) / P(xyz) with Lambda = +1 for even parity and -1
    for odd. Bounded by 1/r in absolute value.
    '''

    settings = (record.x, record.y, record.z)
    return tau(*settings) * parity_class(record.a, record.b, record.c).sign / _design_probability(dist, settings)


def correlator(conditional, settings):
    '''
    P(even|xyz) - P(odd|xyz) of a conditional table indexed [x,y,z,a,b,c].
    '''

    table = np.asarray(conditional)[settings]
    signs = np.array([parity_class(*outcome).sign for outcome in ALL_OUTCOMES]).reshape(2, 2, 2)

    return float(np.sum(signs * table))


def violation_of(conditional):
    '''
    Exact MABK value of a conditional distribution P(abc|xyz), given as an
    array indexed [x, y, z, a, b, c].
    '''
    return sum(tau(*settings) * correlator(conditional, settings) for settings in SETTINGS_SUPPORT)


def deterministic_strategies():
    '''
    Every local deterministic strategy, as a conditional table. Each party
    fixes one output per setting, giving 2^6 strategies.
    '''

    for assignment in itertools.product((0, 1), repeat=6):
        table = np.zeros((2,) * 6)

        for x, y, z in ALL_SETTINGS:
            table[x, y, z, assignment[x], assignment[2 + y], assignment[4 + z]] = 1.0

        yield table


def classical_bound():
    return max(violation_of(table) for table in deterministic_strategies())
