import math

import numpy as np
import pytest
import scipy.stats

from anyonrng import config as run_config
from anyonrng import mabk_stats
from anyonrng import trial_engine


def test_uniform_distribution():

    dist = trial_engine.uniform_distribution()

    assert dist.r == 0.25
    assert dist.entropy_bits() == pytest.approx(2.0)
    assert set(dist.support) == set(mabk_stats.SETTINGS_SUPPORT)


def test_biased_distribution_entropy():

    dist = trial_engine.biased_distribution(10000, 1.0)

    assert dist.probability((0, 0, 0)) == pytest.approx(0.97)
    assert dist.r == pytest.approx(0.01)
    assert dist.entropy_bits() == pytest.approx(0.241941, abs=1e-6)


@pytest.mark.parametrize("k,alpha", [(900, 10.0), (100, 10.0), (10000, 0.0)])
def test_biased_distribution_rejects_bad_parameters(k, alpha):
    with pytest.raises(trial_engine.TrialEngineError):
        trial_engine.biased_distribution(k, alpha)


def test_settings_distribution_validation():

    with pytest.raises(trial_engine.TrialEngineError):
        trial_engine.SettingsDistribution({(1, 1, 1): 1.0})

    with pytest.raises(trial_engine.TrialEngineError):
        trial_engine.SettingsDistribution({(0, 0, 0): 0.5, (0, 1, 1): 0.4})


def test_settings_distribution_dict_form():

    dist = trial_engine.biased_distribution(10000, 10.0)
    data = dist.to_dict()

    assert data["011"] == pytest.approx(0.1)
    assert trial_engine.SettingsDistribution.from_dict(data) == dist


def test_noise_spec_validation():

    assert trial_engine.NoiseSpec().is_noiseless
    assert trial_engine.NoiseSpec.depolarizing(0.0).is_noiseless
    assert not trial_engine.NoiseSpec.depolarizing(0.2).is_noiseless

    with pytest.raises(trial_engine.TrialEngineError):
        trial_engine.NoiseSpec("amplitude_damping", 0.1)

    with pytest.raises(trial_engine.TrialEngineError):
        trial_engine.NoiseSpec.depolarizing(1.5)


def test_trial_record_rows():

    record = trial_engine.TrialRecord.from_row({"trial": "3", "x": "0", "y": "1", "z": "1", "a": "1", "b": "0", "c": "0"})

    assert record.settings == (0, 1, 1)
    assert record.outcomes == (1, 0, 0)
    assert record.as_row() == [3, 0, 1, 1, 1, 0, 0]


def test_noise_and_records_compare_by_value():

    assert trial_engine.NoiseSpec.depolarizing(0.2) == trial_engine.NoiseSpec("logical_depolarizing", 0.2)
    assert trial_engine.NoiseSpec.depolarizing(0.2) != trial_engine.NoiseSpec()
    assert len({trial_engine.NoiseSpec(), trial_engine.NoiseSpec.depolarizing(0.0), trial_engine.NoiseSpec()}) == 2

    record = trial_engine.TrialRecord(1, 0, 1, 1, 1, 0, 0)
    assert record == trial_engine.TrialRecord(1, 0, 1, 1, 1, 0, 0)
    assert record != trial_engine.TrialRecord(2, 0, 1, 1, 1, 0, 0)
    assert len({record, trial_engine.TrialRecord(1, 0, 1, 1, 1, 0, 0)}) == 1
    assert "trial=1" in repr(record)


@pytest.mark.parametrize("row", [
    {"trial": "1", "x": "1", "y": "1", "z": "1", "a": "0", "b": "0", "c": "0"},
    {"trial": "1", "x": "0", "y": "0", "z": "0", "a": "2", "b": "0", "c": "0"},
    {"trial": "1", "x": "0", "y": "0", "z": "0", "a": "0", "b": "0"},
    {"trial": "one", "x": "0", "y": "0", "z": "0", "a": "0", "b": "0", "c": "0"},
])
def test_malformed_records_are_rejected(row):
    with pytest.raises(trial_engine.TrialEngineError):
        trial_engine.TrialRecord.from_row(row)


def test_records_csv_round_trip(tmp_path):

    records = trial_engine.run_trials(6, trial_engine.uniform_distribution(), trial_engine.NoiseSpec(), seed=4)
    path = str(tmp_path / "records.csv")

    trial_engine.records_to_csv(path, records, run_config.RunConfig("simulate"))

    assert trial_engine.records_from_csv(path) == records
    assert (tmp_path / "records.csv.meta.json").exists()


def test_records_from_empty_csv(tmp_path):

    path = tmp_path / "records.csv"
    path.write_text(",".join(trial_engine.RECORD_FIELDS) + "\n")

    with pytest.raises(trial_engine.TrialEngineError):
        trial_engine.records_from_csv(str(path))


def test_run_trials_is_deterministic_and_ordered():

    dist = trial_engine.uniform_distribution()
    noise = trial_engine.NoiseSpec.depolarizing(0.3)

    first = trial_engine.run_trials(12, dist, noise, seed=7)
    second = trial_engine.run_trials(12, dist, noise, seed=7, chunk_size=5)

    assert first == second
    assert [record.trial for record in first] == list(range(1, 13))


def test_run_trials_does_not_depend_on_worker_count():

    dist = trial_engine.uniform_distribution()
    noise = trial_engine.NoiseSpec.depolarizing(0.2)

    serial = trial_engine.run_trials(16, dist, noise, seed=3)
    parallel = trial_engine.run_trials(16, dist, noise, seed=3, workers=2)

    assert serial == parallel


def test_different_seeds_give_different_records():

    dist = trial_engine.uniform_distribution()

    first = trial_engine.run_trials(30, dist, trial_engine.NoiseSpec(), seed=1)
    second = trial_engine.run_trials(30, dist, trial_engine.NoiseSpec(), seed=2)

    assert first != second


@pytest.mark.parametrize("k", [0, -3, 2.5])
def test_run_trials_rejects_bad_trial_counts(k):
    with pytest.raises(trial_engine.TrialEngineError):
        trial_engine.run_trials(k, trial_engine.uniform_distribution(), trial_engine.NoiseSpec(), seed=0)


def test_noiseless_records_have_ghz_parity():

    records = trial_engine.run_trials(40, trial_engine.uniform_distribution(), trial_engine.NoiseSpec(), seed=9)

    for record in records:
        expected = 0 if record.settings == (0, 0, 0) else 1
        assert sum(record.outcomes) % 2 == expected


@pytest.mark.parametrize("p", [0.0, 0.1, 0.5, 1.0])
def test_oracle_violation_under_depolarizing_noise(p):
    oracle = trial_engine.oracle_violation(trial_engine.NoiseSpec.depolarizing(p))
    assert oracle == pytest.approx(4.0 * (1.0 - p) ** 3, abs=1e-12)


def test_exact_distribution_is_normalized():

    table = trial_engine.exact_distribution(trial_engine.NoiseSpec.depolarizing(0.3))

    assert table.shape == (2,) * 6
    assert table.reshape(8, 8).sum(axis=1) == pytest.approx([1.0] * 8)


def test_noisy_estimate_tracks_oracle():

    noise = trial_engine.NoiseSpec.depolarizing(0.1)
    dist = trial_engine.uniform_distribution()

    records = trial_engine.run_trials(2000, dist, noise, seed=21)
    l_hat = mabk_stats.estimate(records, dist).l_hat

    # Each trial variable is +-4, so L-hat has a standard deviation below 4 / sqrt(2000).
    assert abs(l_hat - 4.0 * 0.9 ** 3) < 5 * 4.0 / math.sqrt(2000), "L-hat {}".format(l_hat)


def test_fully_depolarized_device_shows_no_violation():

    dist = trial_engine.uniform_distribution()
    records = trial_engine.run_trials(2000, dist, trial_engine.NoiseSpec.depolarizing(1.0), seed=5)

    assert abs(mabk_stats.estimate(records, dist).l_hat) < 5 * 4.0 / math.sqrt(2000)


@pytest.mark.slow
def test_large_noiseless_run_has_full_violation():

    dist = trial_engine.uniform_distribution()
    records = trial_engine.run_trials(100000, dist, trial_engine.NoiseSpec(), seed=0, workers=4)

    assert mabk_stats.estimate(records, dist).l_hat == pytest.approx(4.0)


SKEWED = {(0, 0, 0): 0.4, (0, 1, 1): 0.3, (1, 0, 1): 0.2, (1, 1, 0): 0.1}


def test_settings_follow_the_distribution():

    dist = trial_engine.SettingsDistribution(SKEWED)
    records = trial_engine.run_trials(2000, dist, trial_engine.NoiseSpec(), seed=31)

    observed = [sum(1 for record in records if record.settings == settings) for settings in mabk_stats.SETTINGS_SUPPORT]
    expected = [2000 * SKEWED[settings] for settings in mabk_stats.SETTINGS_SUPPORT]

    assert scipy.stats.chisquare(observed, expected).pvalue > 1e-3


@pytest.mark.parametrize("party", [0, 1, 2])
def test_outcomes_are_uncorrelated_between_trials(party):

    records = trial_engine.run_trials(2000, trial_engine.uniform_distribution(), trial_engine.NoiseSpec(), seed=41)
    bits = np.array([record.outcomes[party] for record in records], dtype=float)

    lag_one = np.corrcoef(bits[:-1], bits[1:])[0, 1]

    assert abs(lag_one) < 5.0 / math.sqrt(len(bits)), "lag-1 correlation {:.4f}".format(lag_one)
    assert abs(bits.mean() - 0.5) < 5.0 * 0.5 / math.sqrt(len(bits))


def test_run_trials_logs_formatted_messages(caplog):

    with caplog.at_level("DEBUG", logger="anyonrng.trial_engine"):
        trial_engine.run_trials(3, trial_engine.uniform_distribution(), trial_engine.NoiseSpec(), seed=0, chunk_size=2)

    assert "Running 3 trials in 2 chunks on 1 worker(s)" in caplog.messages
    assert "Completed 3 trials" in caplog.messages
