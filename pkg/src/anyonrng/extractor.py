'''
Seeded Toeplitz hashing over GF(2).

For an input of n bits and an output of m bits the seed s has n + m - 1 bits
and defines T[i, j] = s[i - j + n - 1]. Output bit i is the parity of
sum_j T[i, j] x[j], which is entry i + n - 1 of the integer convolution s * x.
'''

import logging
import math

import numpy as np
import scipy.linalg
import scipy.signal

from . import errors

LOG = logging.getLogger(__name__)


class ExtractorError(errors.InvalidArgumentError):
    pass


def _as_bits(bits):
    bits = np.asarray(bits, dtype=np.uint8).ravel()

    if bits.size and bits.max() > 1:
        raise ExtractorError("Bit vectors may only contain 0 and 1")

    return bits


def bits_to_hex(bits):
    '''
    Hex encoding of a bit vector, most significant bit first, zero-padded on
    the right to whole bytes.
    '''
    return np.packbits(_as_bits(bits)).tobytes().hex()


def hex_to_bits(text, length):
    try:
        data = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)

    except ValueError as error:
        raise ExtractorError("Invalid hex bit string: {}".format(error))

    bits = np.unpackbits(data)
    if len(bits) < length:
        raise ExtractorError("Hex string holds {} bits, {} are needed".format(len(bits), length))

    return bits[:length]


class ToeplitzSeed(object):

    def __init__(self, bits, n, m):

        self.bits = _as_bits(bits)
        self.n = int(n)
        self.m = int(m)

        if self.n < 1 or self.m < 0:
            raise ExtractorError("Toeplitz dimensions must satisfy n >= 1 and m >= 0, got n={} m={}".format(n, m))

        if len(self.bits) != self.required_length(self.n, self.m):
            raise ExtractorError("A seed for n={} and m={} needs {} bits, got {}".format(self.n, self.m,
                                                                                        self.required_length(self.n, self.m),
                                                                                        len(self.bits)))

    @staticmethod
    def required_length(n, m):
        return n + m - 1 if m > 0 else 0

    @classmethod
    def random(cls, n, m, rng):
        return cls(rng.integers(0, 2, size=cls.required_length(n, m), dtype=np.uint8), n, m)

    @classmethod
    def from_hex(cls, text, n, m):
        length = cls.required_length(n, m)
        text = text.strip()

        if len(text) != 2 * int(math.ceil(length / 8.0)):
            raise ExtractorError("A seed for n={} and m={} is {} hex digits long, got {}".format(n, m,
                                                                                               2 * int(math.ceil(length / 8.0)),
                                                                                               len(text)))

        return cls(hex_to_bits(text, length), n, m)

    def to_hex(self):
        return bits_to_hex(self.bits)

    def matrix(self):
        '''
        The explicit m x n Toeplitz matrix.
        '''

        if self.m == 0:
            return np.zeros((0, self.n), dtype=np.uint8)

        first_column = self.bits[self.n - 1:]
        first_row = self.bits[self.n - 1::-1]

        return scipy.linalg.toeplitz(first_column, first_row).astype(np.uint8)


def output_length(min_entropy_bits, security):
    '''
    Leftover-hash sizing m = floor(H - 2 log2(1/security)), at least 0.

    :param security: Extractor distance from uniform, in (0, 1]
    '''

    if not 0 < security <= 1:
        raise ExtractorError("The extractor security parameter must lie in (0, 1], got {}".format(security))

    return max(0, int(math.floor(min_entropy_bits - 2.0 * math.log2(1.0 / security))))


def extract(raw_bits, seed, m):
    '''
    Multiply the m x n Toeplitz matrix of ``seed`` with ``raw_bits`` over GF(2).

    :rtype: numpy.ndarray of uint8, length m
    '''

    raw = _as_bits(raw_bits)
    n = len(raw)

    if m > n:
        raise ExtractorError("Cannot extract {} bits from {} input bits".format(m, n))

    if seed.n != n or seed.m != m:
        raise ExtractorError("Seed is sized for n={} m={}, not n={} m={}".format(seed.n, seed.m, n, m))

    if m == 0:
        return np.zeros(0, dtype=np.uint8)

    convolution = scipy.signal.fftconvolve(seed.bits.astype(float), raw.astype(float))
    counts = np.rint(convolution[n - 1:n - 1 + m]).astype(np.int64)

    LOG.debug("Extracted {} bits from {} raw bits".format(m, n))

    return (counts % 2).astype(np.uint8)


def raw_bits_from_records(records):
    '''
    The raw string a1 b1 c1 a2 b2 c2 ... of a record list.
    '''
    return np.array([bit for record in records for bit in (record.a, record.b, record.c)], dtype=np.uint8)
