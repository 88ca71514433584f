'''
State-vector simulation of an even number of Majorana modes.

Mode pair (2k-1, 2k) is stored as occupation bit k-1 of the amplitude index and
the Majorana operators follow the Jordan-Wigner convention

    c_{2k-1} = Z_1 ... Z_{k-1} X_k
    c_{2k}   = Z_1 ... Z_{k-1} Y_k

Every monomial in the c_j is a permutation of the occupation basis with a phase
per row, so operators are kept as :class:`PhasedPermutation` objects and never
materialized as matrices outside of tests.
'''

import enum
import functools
import logging
import math

import numpy as np

from . import errors

LOG = logging.getLogger(__name__)

ZERO_PROBABILITY = 1e-14
MAX_MODE_COUNT = 24

COUNTERCLOCKWISE = "counterclockwise"
CLOCKWISE = "clockwise"
DIRECTIONS = (COUNTERCLOCKWISE, CLOCKWISE)


class MajoranaError(errors.InvalidArgumentError):
    pass


class FusionOutcome(enum.Enum):
    '''
    Fusion channel of a pair of Majorana modes. I is the vacuum channel
    (eigenvalue +1 of -i c_j c_j'), PSI the fermion channel.
    '''

    I = 1
    PSI = -1

    @property
    def sign(self):
        return self.value

    @property
    def channel(self):
        return "I" if self is FusionOutcome.I else "psi"

    @property
    def bit(self):
        return 0 if self is FusionOutcome.I else 1

    @classmethod
    def from_sign(cls, sign):
        return cls.I if sign > 0 else cls.PSI


class PhasedPermutation(object):
    '''
    Sparse operator with ``(op v)[t] = phases[t] * v[source[t]]``.

    ``a @ b`` is the operator product (``b`` acts first).
    '''

    __slots__ = ("source", "phases")

    def __init__(self, source, phases):
        self.source = source
        self.phases = phases

    def apply(self, vector):
        return self.phases * vector[self.source]

    def scaled(self, factor):
        return PhasedPermutation(self.source, self.phases * factor)

    def matrix(self):
        dimension = len(self.source)
        dense = np.zeros((dimension, dimension), dtype=complex)
        dense[np.arange(dimension), self.source] = self.phases
        return dense

    def __matmul__(self, other):
        return PhasedPermutation(other.source[self.source], self.phases * other.phases[self.source])


def _check_mode_count(mode_count):
    if not isinstance(mode_count, (int, np.integer)) or mode_count < 2 or mode_count % 2:
        raise MajoranaError("The mode count must be an even integer >= 2, got {!r}".format(mode_count))

    if mode_count > MAX_MODE_COUNT:
        raise MajoranaError("At most {} modes are supported by the dense representation, got {}".format(MAX_MODE_COUNT, mode_count))


def _check_modes(mode_count, *modes):
    for mode in modes:
        if not 1 <= mode <= mode_count:
            raise MajoranaError("Mode index {} is outside 1..{}".format(mode, mode_count))

    if len(set(modes)) != len(modes):
        raise MajoranaError("Mode indices must be distinct, got {}".format(modes))


def _frozen(operator):
    operator.source.flags.writeable = False
    operator.phases.flags.writeable = False
    return operator


@functools.lru_cache(maxsize=None)
def majorana_operator(mode_count, j):
    '''
    The action of c_j on a register of ``mode_count`` modes.

    :param mode_count: Number of Majorana modes M
    :type mode_count: int

    :param j: 1-based mode index
    :type j: int

    :returns: c_j as a sparse operator (Hermitian, squares to the identity)
    :rtype: :py:class:`PhasedPermutation`
    '''

    _check_mode_count(mode_count)
    _check_modes(mode_count, j)

    bit = (j - 1) // 2
    index = np.arange(1 << (mode_count // 2))
    source = index ^ (1 << bit)

    string = np.zeros(len(index), dtype=np.int64)
    for lower in range(bit):
        string ^= (source >> lower) & 1

    phases = np.where(string, -1.0, 1.0).astype(complex)

    if j % 2 == 0:
        occupied = (source >> bit) & 1
        phases *= np.where(occupied, -1j, 1j)

    return _frozen(PhasedPermutation(source, phases))


@functools.lru_cache(maxsize=None)
def majorana_product(mode_count, *modes):
    '''
    The operator c_{modes[0]} c_{modes[1]} ... with the ordering exactly as given.
    '''

    _check_mode_count(mode_count)
    _check_modes(mode_count, *modes)

    product = majorana_operator(mode_count, modes[0])
    for mode in modes[1:]:
        product = product @ majorana_operator(mode_count, mode)

    return _frozen(product)


@functools.lru_cache(maxsize=None)
def fusion_operator(mode_count, j, jp):
    '''
    The Hermitian pair charge -i c_j c_j'. Eigenvalue +1 is the I channel.
    '''
    return _frozen(majorana_product(mode_count, j, jp).scaled(-1j))


def global_phase_deviation(actual, expected):
    '''
    Largest entry-wise deviation between ``actual`` and ``expected`` after
    rotating ``actual`` so that the first nonzero entry of ``expected`` has a
    matching phase.
    '''

    actual = np.asarray(actual, dtype=complex)
    expected = np.asarray(expected, dtype=complex)

    if actual.shape != expected.shape:
        raise MajoranaError("Cannot compare shapes {} and {}".format(actual.shape, expected.shape))

    scale = np.abs(expected).max()
    if scale == 0:
        return float(np.abs(actual).max())

    reference = np.flatnonzero(np.abs(expected.ravel()) > 1e-6 * scale)[0]
    actual_reference = actual.ravel()[reference]
    if actual_reference == 0:
        return float(np.abs(actual - expected).max())

    expected_reference = expected.ravel()[reference]
    phase = (expected_reference / abs(expected_reference)) / (actual_reference / abs(actual_reference))

    return float(np.abs(actual * phase - expected).max())


def equal_up_to_global_phase(actual, expected, atol=1e-10):
    return global_phase_deviation(actual, expected) < atol


def strip_global_phase(values):
    '''
    Rotate ``values`` so that its first nonzero entry is real and positive.
    '''

    values = np.asarray(values, dtype=complex)
    flat = values.ravel()
    nonzero = np.flatnonzero(np.abs(flat) > 1e-6 * np.abs(flat).max()) if flat.size else []

    if not len(nonzero):
        return values

    first = flat[nonzero[0]]
    return values * (abs(first) / first)


class MajoranaRegister(object):
    '''
    Dense amplitudes over the fermionic occupation basis of ``mode_count / 2``
    modes, with the random generator used to sample fusion outcomes.

    Gates and measurements update the register in place. Gates return the
    register so calls can be chained, measurements return the outcome.
    '''

    def __init__(self, mode_count, amplitudes, rng):

        _check_mode_count(mode_count)

        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (1 << (mode_count // 2),):
            raise MajoranaError("A register of {} modes needs {} amplitudes, got shape {}".format(mode_count,
                                                                                                    1 << (mode_count // 2),
                                                                                                    amplitudes.shape))

        self.mode_count = mode_count
        self.amplitudes = amplitudes
        self.rng = rng

    @property
    def dimension(self):
        return len(self.amplitudes)

    def copy(self):
        return MajoranaRegister(self.mode_count, self.amplitudes.copy(), self.rng)

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def odd_parity_weight(self):
        '''
        Probability mass on occupation states with an odd number of fermions.
        '''

        index = np.arange(self.dimension)
        parity = np.zeros(self.dimension, dtype=np.int64)
        for bit in range(self.mode_count // 2):
            parity ^= (index >> bit) & 1

        return float(np.sum(np.abs(self.amplitudes[parity == 1]) ** 2))

    def expectation(self, operator):
        return complex(np.vdot(self.amplitudes, operator.apply(self.amplitudes)))

    def apply(self, operator):
        self.amplitudes = operator.apply(self.amplitudes)
        return self

    def apply_exponential_braid_like(self, j, jp, angle):
        '''
        Apply exp(angle c_j c_j') = cos(angle) + sin(angle) c_j c_j'.
        '''

        pair = majorana_product(self.mode_count, j, jp)
        self.amplitudes = math.cos(angle) * self.amplitudes + math.sin(angle) * pair.apply(self.amplitudes)

        return self

    def apply_braid(self, j, jp, direction=COUNTERCLOCKWISE):
        '''
        Exchange modes j and j'.

        The counterclockwise exchange is B = exp(-(pi/4) c_j c_j') =
        (1 - c_j c_j') / sqrt(2), which gives B_12 ~ diag(1, i) and
        B_23^2 = -i X on a four-mode logical qubit. The clockwise exchange is
        its inverse.

        :param direction: ``"counterclockwise"`` or ``"clockwise"``
        :type direction: str

        :returns: This register
        :rtype: :py:class:`MajoranaRegister`
        '''

        if direction not in DIRECTIONS:
            raise MajoranaError("Unknown braid direction '{}', expected one of {}".format(direction, DIRECTIONS))

        angle = -math.pi / 4 if direction == COUNTERCLOCKWISE else math.pi / 4

        return self.apply_exponential_braid_like(j, jp, angle)

    def _project(self, operator, description, sign=None):

        image = operator.apply(self.amplitudes)
        expectation = float(np.vdot(self.amplitudes, image).real)
        probability_plus = min(1.0, max(0.0, 0.5 * (1.0 + expectation)))

        if probability_plus < ZERO_PROBABILITY:
            probability_plus = 0.0

        elif probability_plus > 1.0 - ZERO_PROBABILITY:
            probability_plus = 1.0

        if sign is None:
            sign = 1 if self.rng.random() < probability_plus else -1

        probability = probability_plus if sign > 0 else 1.0 - probability_plus

        if probability < ZERO_PROBABILITY:
            raise errors.InternalError("Post-selected {} outcome {:+d} has probability {:.3g}".format(description, sign, probability))

        projected = 0.5 * (self.amplitudes + sign * image)
        norm = np.linalg.norm(projected)

        if norm < math.sqrt(ZERO_PROBABILITY):
            raise errors.InternalError("Degenerate state norm {:.3g} after measuring {}".format(norm, description))

        self.amplitudes = projected / norm
        LOG.debug("Measured {} -> {:+d} (p={:.6f})".format(description, sign, probability))

        return sign

    def fusion_probability(self, j, jp, outcome=FusionOutcome.I):
        expectation = self.expectation(fusion_operator(self.mode_count, j, jp)).real
        return min(1.0, max(0.0, 0.5 * (1.0 + outcome.sign * expectation)))

    def measure_fusion_pair(self, j, jp):
        '''
        Nondestructive fusion measurement of modes j and j'.

        :returns: The sampled fusion channel; the register is collapsed onto it
        :rtype: :py:class:`FusionOutcome`
        '''

        operator = fusion_operator(self.mode_count, j, jp)
        return FusionOutcome.from_sign(self._project(operator, "pair ({}, {})".format(j, jp)))

    def measure_fusion_quad(self, j1, j2, j3, j4):
        '''
        Projective measurement of c_j1 c_j2 c_j3 c_j4 (ordering as given).

        :returns: +1 or -1
        :rtype: int
        '''

        operator = majorana_product(self.mode_count, j1, j2, j3, j4)
        return self._project(operator, "quad ({}, {}, {}, {})".format(j1, j2, j3, j4))

    def postselect_pair(self, j, jp, outcome):
        '''
        Project onto a chosen fusion channel instead of sampling it. Raises
        :py:class:`~anyonrng.errors.InternalError` for a zero-probability
        channel.
        '''

        operator = fusion_operator(self.mode_count, j, jp)
        self._project(operator, "pair ({}, {})".format(j, jp), sign=outcome.sign)
        return outcome

    def postselect_quad(self, j1, j2, j3, j4, sign):
        operator = majorana_product(self.mode_count, j1, j2, j3, j4)
        return self._project(operator, "quad ({}, {}, {}, {})".format(j1, j2, j3, j4), sign=sign)


def new_vacuum(mode_count, seed):
    '''
    Fock vacuum of ``mode_count`` Majorana modes: every pair (2k-1, 2k) fuses
    to I.

    :param seed: Seed for the measurement generator, or an existing
                 :py:class:`numpy.random.Generator` to share
    '''

    _check_mode_count(mode_count)

    amplitudes = np.zeros(1 << (mode_count // 2), dtype=complex)
    amplitudes[0] = 1.0

    return MajoranaRegister(mode_count, amplitudes, np.random.default_rng(seed))
