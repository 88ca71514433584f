import concurrent.futures
import itertools
import logging
import math

import cioseq.sequence
import numpy as np
import scipy.stats

from . import errors
from . import logical_layer
from . import mabk_stats
from . import outputs

LOG = logging.getLogger(__name__)

RECORD_FIELDS = ("trial", "x", "y", "z", "a", "b", "c")

NOISE_NONE = "none"
NOISE_LOGICAL_DEPOLARIZING = "logical_depolarizing"
NOISE_KINDS = (NOISE_NONE, NOISE_LOGICAL_DEPOLARIZING)

# A depolarized qubit receives one of these uniformly; "I" leaves it alone.
DEPOLARIZING_PAULIS = ("I", "X", "Y", "Z")

READOUT_ROTATIONS = {0: logical_layer.HADAMARD_MATRIX,
                     1: logical_layer.B23_MATRIX}


class TrialEngineError(errors.InvalidArgumentError):
    pass


class SettingsDistribution(object):
    '''
    A distribution P(xyz) supported on the four MABK settings
    000, 011, 101 and 110.
    '''

    def __init__(self, probabilities):

        for settings, probability in probabilities.items():
            if tuple(settings) not in mabk_stats.SETTINGS_SUPPORT:
                raise TrialEngineError("Settings {} are outside the MABK support".format(settings))

            if not probability >= 0:
                raise TrialEngineError("Probability of {} must be non-negative, got {}".format(settings, probability))

        total = math.fsum(probabilities.values())
        if abs(total - 1.0) > 1e-12:
            raise TrialEngineError("Settings probabilities sum to {}, not 1".format(total))

        self.probabilities = {settings: float(probabilities[settings])
                              for settings in mabk_stats.SETTINGS_SUPPORT
                              if probabilities.get(settings, 0.0) > 0}

        self._support = list(self.probabilities)
        self._weights = np.array([self.probabilities[s] for s in self._support])

    @property
    def r(self):
        return float(self._weights.min())

    @property
    def support(self):
        return list(self._support)

    def probability(self, settings):
        return self.probabilities.get(tuple(settings), 0.0)

    def entropy_bits(self):
        '''
        Shannon entropy of one settings draw, in bits.
        '''
        return float(scipy.stats.entropy(self._weights, base=2))

    def sample(self, rng):
        return self._support[rng.choice(len(self._support), p=self._weights)]

    def to_dict(self):
        return {"".join(str(bit) for bit in settings): probability
                for settings, probability in self.probabilities.items()}

    @classmethod
    def from_dict(cls, data):
        return cls({tuple(int(bit) for bit in key): float(value) for key, value in data.items()})

    def __eq__(self, other):
        return isinstance(other, SettingsDistribution) and self.probabilities == other.probabilities

    def __repr__(self):
        return "SettingsDistribution({})".format(self.to_dict())


def uniform_distribution():
    return SettingsDistribution({settings: 0.25 for settings in mabk_stats.SETTINGS_SUPPORT})


def biased_distribution(k, alpha):
    '''
    P(011) = P(101) = P(110) = alpha / sqrt(k) and P(000) = 1 - 3 alpha / sqrt(k).

    :param k: Number of trials the distribution is tuned for; must exceed (3 alpha)^2
    :type k: int

    :param alpha: Bias strength, positive
    :type alpha: float
    '''

    if not alpha > 0:
        raise TrialEngineError("alpha must be positive, got {}".format(alpha))

    if not k > (3 * alpha) ** 2:
        raise TrialEngineError("k must exceed (3 alpha)^2 = {} for alpha = {}, got {}".format((3 * alpha) ** 2, alpha, k))

    rare = alpha / math.sqrt(k)
    probabilities = {settings: rare for settings in mabk_stats.SETTINGS_SUPPORT[1:]}
    probabilities[(0, 0, 0)] = 1.0 - 3.0 * rare

    return SettingsDistribution(probabilities)


class NoiseSpec(object):
    '''
    Logical noise applied to each qubit of a freshly prepared GHZ state.

    :param kind: ``"none"`` or ``"logical_depolarizing"``
    :param p: Per-qubit probability in [0, 1]
    '''

    def __init__(self, kind=NOISE_NONE, p=0.0):

        if kind not in NOISE_KINDS:
            raise TrialEngineError("Unknown noise kind '{}', expected one of {}".format(kind, NOISE_KINDS))

        if not 0.0 <= p <= 1.0:
            raise TrialEngineError("Noise probability must lie in [0, 1], got {}".format(p))

        self.kind = kind
        self.p = p

    @property
    def is_noiseless(self):
        return self.kind == NOISE_NONE or self.p == 0.0

    @classmethod
    def depolarizing(cls, p):
        return cls(NOISE_LOGICAL_DEPOLARIZING, float(p))

    def __eq__(self, other):
        return isinstance(other, NoiseSpec) and (self.kind, self.p) == (other.kind, other.p)

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        return "NoiseSpec(kind={!r}, p={!r})".format(self.kind, self.p)


class TrialRecord(object):
    '''
    One protocol round: the trial number, settings x, y, z and outcome bits a, b, c.
    '''

    def __init__(self, trial, x, y, z, a, b, c):
        self.trial = trial
        self.x = x
        self.y = y
        self.z = z
        self.a = a
        self.b = b
        self.c = c

    @property
    def settings(self):
        return (self.x, self.y, self.z)

    @property
    def outcomes(self):
        return (self.a, self.b, self.c)

    def as_row(self):
        return [getattr(self, field) for field in RECORD_FIELDS]

    def __eq__(self, other):
        return isinstance(other, TrialRecord) and self.as_row() == other.as_row()

    def __hash__(self):
        return hash(tuple(self.as_row()))

    def __repr__(self):
        return "TrialRecord({})".format(", ".join("{}={}".format(field, getattr(self, field)) for field in RECORD_FIELDS))

    @classmethod
    def from_row(cls, row):
        '''
        Build a record from a CSV row (a mapping of field name to text).
        '''

        try:
            values = {field: int(row[field]) for field in RECORD_FIELDS}

        except (KeyError, ValueError) as error:
            raise TrialEngineError("Malformed trial record {}: {}".format(row, error))

        record = cls(**values)

        if record.settings not in mabk_stats.SETTINGS_SUPPORT or any(bit not in (0, 1) for bit in record.outcomes):
            raise TrialEngineError("Trial record {} has invalid settings or outcome bits".format(record))

        return record


def records_to_csv(path, records, config):
    return outputs.write_csv(path, RECORD_FIELDS, [record.as_row() for record in records], config)


def records_from_csv(path):
    '''
    Read records written by :py:func:`records_to_csv`, in file order.
    '''

    records = [TrialRecord.from_row(row) for row in outputs.read_csv(path)]

    if not records:
        raise TrialEngineError("No trial records in '{}'".format(path))

    return records


def apply_noise(state, noise, rng):
    '''
    With probability ``noise.p`` per qubit, replace the qubit by the maximally
    mixed state by applying a uniformly random element of {I, X, Y, Z}.
    '''

    if noise.is_noiseless:
        return state

    for qubit in range(1, state.qubit_count + 1):
        if rng.random() < noise.p:
            pauli = DEPOLARIZING_PAULIS[rng.integers(len(DEPOLARIZING_PAULIS))]

            if pauli != "I":
                logical_layer.apply_pauli(state, qubit, pauli)

    return state


def trial_rng(seed, trial):
    '''
    The generator for one trial, split from the master seed by trial number.
    ``seed`` is an integer or a tuple of integers.
    '''

    entropy = list(seed) if isinstance(seed, (tuple, list)) else [seed]
    return np.random.default_rng(entropy + [trial])


def run_trial(trial, dist, noise, seed):

    rng = trial_rng(seed, trial)
    settings = dist.sample(rng)

    state = logical_layer.prepare_ghz(rng)
    apply_noise(state, noise, rng)

    outcomes = [logical_layer.readout(state, qubit, setting) for qubit, setting in zip((1, 2, 3), settings)]

    return TrialRecord(trial, *settings, *outcomes)


def _run_chunk(trials, dist, noise, seed):
    return [run_trial(trial, dist, noise, seed) for trial in trials]


def run_trials(k, dist, noise, seed, workers=1, chunk_size=None):
    '''
    Run ``k`` protocol rounds: draw settings, prepare a fresh GHZ state, apply
    noise and read out all three qubits.

    Trial numbers 1..k are split into chunks that run on up to ``workers``
    processes. Every trial has its own generator, so the records depend only
    on ``(k, dist, noise, seed)`` and always come back in trial order.

    :returns: One record per trial
    :rtype: list of :py:class:`TrialRecord`
    '''

    if not isinstance(k, (int, np.integer)) or k < 1:
        raise TrialEngineError("The number of trials must be a positive integer, got {!r}".format(k))

    sequence = cioseq.sequence.Sequence.create("1-{}".format(k))

    if chunk_size is None:
        chunk_size = max(1, int(math.ceil(k / float(max(1, workers) * 4))))

    sequence.chunk_size = chunk_size
    chunks = [list(chunk) for chunk in sequence.chunks()]
    LOG.debug("Running {} trials in {} chunks on {} worker(s)".format(k, len(chunks), workers))

    if workers <= 1 or len(chunks) == 1:
        results = [_run_chunk(chunk, dist, noise, seed) for chunk in chunks]

    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, chunks, itertools.repeat(dist),
                                    itertools.repeat(noise), itertools.repeat(seed)))

    records = [record for chunk in results for record in chunk]
    LOG.info("Completed {} trials".format(len(records)))

    return records


def _on_qubit(matrix, qubit, qubit_count=3):
    factors = [np.eye(2)] * qubit_count
    factors[qubit - 1] = matrix
    operator = factors[0]
    for factor in factors[1:]:
        operator = np.kron(operator, factor)

    return operator


def exact_distribution(noise):
    '''
    Exact P(abc|xyz) of the simulated device for all eight settings, as an
    array indexed [x, y, z, a, b, c]. Computed on the 8-dimensional logical
    space: GHZ state, noise channel, then U_x, U_y, U_z and a computational
    readout.
    '''

    ghz = np.zeros(8, dtype=complex)
    ghz[0] = ghz[7] = 1.0 / math.sqrt(2)
    rho = np.outer(ghz, ghz.conj())

    if not noise.is_noiseless:
        for qubit in (1, 2, 3):
            twirl = sum(_on_qubit(logical_layer.PAULI_MATRICES[pauli], qubit) @ rho
                        @ _on_qubit(logical_layer.PAULI_MATRICES[pauli], qubit).conj().T
                        for pauli in logical_layer.PAULIS)
            rho = (1.0 - noise.p) * rho + noise.p / 4.0 * (rho + twirl)

    table = np.zeros((2,) * 6)
    for x, y, z in mabk_stats.ALL_SETTINGS:
        rotation = np.kron(np.kron(READOUT_ROTATIONS[x], READOUT_ROTATIONS[y]), READOUT_ROTATIONS[z])
        rotated = rotation @ rho @ rotation.conj().T
        table[x, y, z] = np.clip(np.diag(rotated).real, 0.0, 1.0).reshape(2, 2, 2)

    return table


def oracle_violation(noise):
    '''
    The MABK value of the simulated device; 4 (1 - p)^3 under logical
    depolarizing noise.
    '''
    return mabk_stats.violation_of(exact_distribution(noise))
