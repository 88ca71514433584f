import numpy as np
import pytest
import scipy.stats

from anyonrng import extractor
from anyonrng import trial_engine


def test_output_length():

    assert extractor.output_length(1000, 2.0 ** -64) == 872
    assert extractor.output_length(100, 2.0 ** -64) == 0
    assert extractor.output_length(0.0, 1.0) == 0


def test_output_length_rejects_bad_security():
    with pytest.raises(extractor.ExtractorError):
        extractor.output_length(1000, 0.0)


@pytest.mark.parametrize("n,m", [(1, 1), (12, 4), (40, 17), (64, 64)])
def test_fft_product_matches_explicit_matrix(n, m):

    rng = np.random.default_rng(n * 100 + m)
    seed = extractor.ToeplitzSeed.random(n, m, rng)
    raw = rng.integers(0, 2, size=n, dtype=np.uint8)

    expected = (seed.matrix().astype(np.int64) @ raw) % 2
    assert np.array_equal(extractor.extract(raw, seed, m), expected)


def test_toeplitz_matrix_is_constant_along_diagonals():

    seed = extractor.ToeplitzSeed(np.array([1, 0, 0, 1, 1, 0, 1], dtype=np.uint8), n=4, m=4)
    matrix = seed.matrix()

    assert matrix.shape == (4, 4)
    for i in range(1, 4):
        for j in range(1, 4):
            assert matrix[i, j] == matrix[i - 1, j - 1]

    # T[i, j] = s[i - j + n - 1]
    assert matrix[0, 3] == seed.bits[0]
    assert matrix[3, 0] == seed.bits[6]


def test_zero_output_length():

    seed = extractor.ToeplitzSeed(np.zeros(0, dtype=np.uint8), n=9, m=0)

    assert extractor.ToeplitzSeed.required_length(9, 0) == 0
    assert extractor.extract(np.ones(9, dtype=np.uint8), seed, 0).size == 0


def test_seed_length_is_checked():

    with pytest.raises(extractor.ExtractorError):
        extractor.ToeplitzSeed(np.zeros(5, dtype=np.uint8), n=4, m=4)

    with pytest.raises(extractor.ExtractorError):
        extractor.ToeplitzSeed(np.zeros(0, dtype=np.uint8), n=0, m=0)


def test_extract_rejects_mismatched_sizes():

    rng = np.random.default_rng(0)

    with pytest.raises(extractor.ExtractorError):
        extractor.extract(np.ones(4, dtype=np.uint8), extractor.ToeplitzSeed.random(4, 5, rng), 5)

    with pytest.raises(extractor.ExtractorError):
        extractor.extract(np.ones(6, dtype=np.uint8), extractor.ToeplitzSeed.random(4, 2, rng), 2)


def test_non_binary_input_is_rejected():
    with pytest.raises(extractor.ExtractorError):
        extractor.bits_to_hex([0, 1, 2])


def test_hex_encoding():

    assert extractor.bits_to_hex([1, 0, 1]) == "a0"
    assert list(extractor.hex_to_bits("a0", 3)) == [1, 0, 1]

    with pytest.raises(extractor.ExtractorError):
        extractor.hex_to_bits("zz", 3)

    with pytest.raises(extractor.ExtractorError):
        extractor.hex_to_bits("a0", 9)


def test_seed_hex_form():

    seed = extractor.ToeplitzSeed.random(10, 5, np.random.default_rng(3))
    restored = extractor.ToeplitzSeed.from_hex(seed.to_hex() + "\n", 10, 5)

    assert np.array_equal(restored.bits, seed.bits)


def test_seed_hex_of_wrong_length_is_rejected():

    seed = extractor.ToeplitzSeed.random(10, 5, np.random.default_rng(3))

    with pytest.raises(extractor.ExtractorError):
        extractor.ToeplitzSeed.from_hex(seed.to_hex() + "00", 10, 5)

    with pytest.raises(extractor.ExtractorError):
        extractor.ToeplitzSeed.from_hex(seed.to_hex()[:-2], 10, 5)


def test_raw_bits_follow_record_order():

    records = [trial_engine.TrialRecord(1, 0, 0, 0, 1, 0, 1), trial_engine.TrialRecord(2, 0, 1, 1, 0, 1, 1)]
    assert list(extractor.raw_bits_from_records(records)) == [1, 0, 1, 0, 1, 1]


def test_output_is_uniform_over_random_seeds():

    # Four trials give twelve raw bits; a universal family maps any fixed
    # nonzero input to a uniform output when the seed is uniform.
    rng = np.random.default_rng(2024)
    raw = np.array([1, 0, 1, 1, 0, 0, 0, 1, 1, 0, 1, 0], dtype=np.uint8)

    counts = np.zeros(16)
    for _ in range(1000):
        bits = extractor.extract(raw, extractor.ToeplitzSeed.random(12, 4, rng), 4)
        counts[int("".join(str(bit) for bit in bits), 2)] += 1

    assert scipy.stats.chisquare(counts).pvalue > 1e-4


@pytest.mark.slow
def test_output_is_uniform_over_many_extractions():

    rng = np.random.default_rng(7)
    counts = np.zeros(16)

    for _ in range(100000):
        raw = rng.integers(0, 2, size=12, dtype=np.uint8)
        raw[0] = 1
        bits = extractor.extract(raw, extractor.ToeplitzSeed.random(12, 4, rng), 4)
        counts[int("".join(str(bit) for bit in bits), 2)] += 1

    assert scipy.stats.chisquare(counts).pvalue > 1e-4


@pytest.mark.parametrize("n", range(1, 11))
def test_fft_product_matches_explicit_matrix_for_small_sizes(n):

    rng = np.random.default_rng(n)

    for m in range(1, n + 1):
        seed = extractor.ToeplitzSeed.random(n, m, rng)
        matrix = seed.matrix().astype(np.int64)

        for _ in range(5):
            raw = rng.integers(0, 2, size=n, dtype=np.uint8)
            assert np.array_equal(extractor.extract(raw, seed, m), (matrix @ raw) % 2), "n={} m={}".format(n, m)


def test_extraction_is_linear_over_gf2():

    rng = np.random.default_rng(99)
    seed = extractor.ToeplitzSeed.random(96, 40, rng)

    for _ in range(1000):
        x = rng.integers(0, 2, size=96, dtype=np.uint8)
        y = rng.integers(0, 2, size=96, dtype=np.uint8)

        combined = extractor.extract(x ^ y, seed, 40)
        assert np.array_equal(combined, extractor.extract(x, seed, 40) ^ extractor.extract(y, seed, 40))


def _protocol_output_counts(trials, extractions, seed):

    # Windows of 16 trials keep an all-zero input out of reach.
    records = trial_engine.run_trials(trials, trial_engine.uniform_distribution(), trial_engine.NoiseSpec(), seed)
    raw = extractor.raw_bits_from_records(records)
    window = 48
    rng = np.random.default_rng(seed)

    counts = np.zeros(16)
    for _ in range(extractions):
        start = 3 * int(rng.integers(0, trials - 16 + 1))
        bits = extractor.extract(raw[start:start + window], extractor.ToeplitzSeed.random(window, 4, rng), 4)
        counts[int("".join(str(bit) for bit in bits), 2)] += 1

    return counts


def test_output_from_protocol_bits_is_uniform():
    assert scipy.stats.chisquare(_protocol_output_counts(200, 4000, 11)).pvalue > 1e-3


@pytest.mark.slow
def test_output_from_protocol_bits_is_uniform_over_many_extractions():
    assert scipy.stats.chisquare(_protocol_output_counts(2000, 100000, 12)).pvalue > 1e-3
