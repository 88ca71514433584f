import math

import numpy as np
import pytest

from anyonrng import errors
from anyonrng import majorana_sim


@pytest.mark.parametrize("mode_count", [2, 4, 6])
def test_majorana_operators_satisfy_clifford_relations(mode_count):

    operators = [majorana_sim.majorana_operator(mode_count, j).matrix() for j in range(1, mode_count + 1)]
    identity = np.eye(1 << (mode_count // 2))

    for i, first in enumerate(operators):
        assert np.allclose(first, first.conj().T)

        for j, second in enumerate(operators):
            anticommutator = first @ second + second @ first
            expected = 2 * identity if i == j else 0 * identity
            assert np.allclose(anticommutator, expected), "{{c{}, c{}}} is wrong".format(i + 1, j + 1)


def test_phased_permutation_product_matches_matrix_product():

    first = majorana_sim.majorana_operator(6, 2)
    second = majorana_sim.majorana_operator(6, 5)

    assert np.allclose((first @ second).matrix(), first.matrix() @ second.matrix())
    assert np.allclose(majorana_sim.majorana_product(6, 2, 5).matrix(), first.matrix() @ second.matrix())


def test_fusion_operator_is_plus_one_on_vacuum():

    register = majorana_sim.new_vacuum(6, seed=1)

    for pair in [(1, 2), (3, 4), (5, 6)]:
        assert register.fusion_probability(*pair) == pytest.approx(1.0)
        assert register.fusion_probability(*pair, outcome=majorana_sim.FusionOutcome.PSI) == pytest.approx(0.0)


@pytest.mark.parametrize("mode_count", [0, 3, 26])
def test_invalid_mode_counts_are_rejected(mode_count):
    with pytest.raises(majorana_sim.MajoranaError):
        majorana_sim.new_vacuum(mode_count, seed=0)


def test_mode_index_out_of_range_is_rejected():
    register = majorana_sim.new_vacuum(4, seed=0)

    with pytest.raises(errors.InvalidArgumentError):
        register.apply_braid(4, 5)

    with pytest.raises(errors.InvalidArgumentError):
        register.measure_fusion_pair(2, 2)


def test_clockwise_braid_undoes_counterclockwise_braid():

    register = majorana_sim.new_vacuum(4, seed=0)
    register.apply_braid(1, 2).apply_braid(2, 3)
    before = register.amplitudes.copy()

    register.apply_braid(1, 3).apply_braid(1, 3, majorana_sim.CLOCKWISE)

    assert np.allclose(register.amplitudes, before)


def test_braid_matches_exponential_at_minus_quarter_pi():

    braided = majorana_sim.new_vacuum(4, seed=0).apply_braid(2, 3)
    exponential = majorana_sim.new_vacuum(4, seed=0).apply_exponential_braid_like(2, 3, -math.pi / 4)

    assert np.allclose(braided.amplitudes, exponential.amplitudes)


def test_unknown_braid_direction_is_rejected():
    with pytest.raises(majorana_sim.MajoranaError):
        majorana_sim.new_vacuum(4, seed=0).apply_braid(1, 2, "sideways")


def test_braid_splits_fusion_channel_evenly():

    register = majorana_sim.new_vacuum(4, seed=3).apply_braid(2, 3)

    assert register.fusion_probability(1, 2) == pytest.approx(0.5)
    assert register.norm() == pytest.approx(1.0)
    assert register.odd_parity_weight() == pytest.approx(0.0)


def test_measurement_collapses_and_repeats():

    register = majorana_sim.new_vacuum(4, seed=11).apply_braid(2, 3)
    outcome = register.measure_fusion_pair(1, 2)

    assert register.fusion_probability(1, 2, outcome) == pytest.approx(1.0)
    assert register.measure_fusion_pair(1, 2) is outcome


def test_vacuum_measurement_leaves_state_unchanged():

    register = majorana_sim.new_vacuum(6, seed=0)
    before = register.amplitudes.copy()

    assert register.measure_fusion_pair(3, 4) is majorana_sim.FusionOutcome.I
    assert np.allclose(register.amplitudes, before)


def test_quad_measurement_depends_on_ordering():

    assert majorana_sim.new_vacuum(4, seed=0).measure_fusion_quad(1, 2, 3, 4) == -1
    assert majorana_sim.new_vacuum(4, seed=0).measure_fusion_quad(2, 1, 3, 4) == 1


def test_measurement_statistics_follow_born_rule():

    outcomes = [majorana_sim.new_vacuum(4, seed=seed).apply_braid(2, 3).measure_fusion_pair(1, 2).bit
                for seed in range(2000)]

    # Binomial(2000, 1/2) has a standard deviation of about 22.
    assert abs(sum(outcomes) - 1000) < 120


def _psi_frequency(angle, samples):

    expected = majorana_sim.new_vacuum(4, seed=0).apply_exponential_braid_like(2, 3, angle).fusion_probability(
        1, 2, majorana_sim.FusionOutcome.PSI)

    rng = np.random.default_rng(23)
    hits = 0
    for _ in range(samples):
        register = majorana_sim.new_vacuum(4, seed=rng).apply_exponential_braid_like(2, 3, angle)
        hits += register.measure_fusion_pair(1, 2).bit

    return hits, expected


def test_born_rule_at_an_unequal_split():

    hits, expected = _psi_frequency(math.pi / 6, 4000)

    assert expected == pytest.approx(0.25)
    assert abs(hits - 4000 * expected) < 5 * math.sqrt(4000 * 0.25 * 0.75)


@pytest.mark.slow
@pytest.mark.parametrize("angle", [-math.pi / 4, math.pi / 6, 0.3])
def test_born_rule_over_many_samples(angle):

    samples = 100000
    hits, expected = _psi_frequency(angle, samples)

    assert expected == pytest.approx(math.sin(angle) ** 2)
    assert abs(hits - samples * expected) < 5 * math.sqrt(samples * expected * (1 - expected))


def test_postselecting_impossible_branch_raises():

    register = majorana_sim.new_vacuum(4, seed=0)

    with pytest.raises(errors.InternalError):
        register.postselect_pair(1, 2, majorana_sim.FusionOutcome.PSI)

    with pytest.raises(errors.InternalError):
        register.postselect_quad(1, 2, 3, 4, 1)


def test_postselection_projects_onto_requested_channel():

    register = majorana_sim.new_vacuum(4, seed=0).apply_braid(2, 3)
    register.postselect_pair(1, 2, majorana_sim.FusionOutcome.PSI)

    assert register.fusion_probability(1, 2, majorana_sim.FusionOutcome.PSI) == pytest.approx(1.0)


def test_generator_is_shared_when_passed_as_seed():

    rng = np.random.default_rng(5)
    register = majorana_sim.new_vacuum(4, rng)

    assert register.rng is rng


def test_fusion_outcome_helpers():

    assert majorana_sim.FusionOutcome.from_sign(1) is majorana_sim.FusionOutcome.I
    assert majorana_sim.FusionOutcome.from_sign(-1) is majorana_sim.FusionOutcome.PSI
    assert majorana_sim.FusionOutcome.PSI.bit == 1
    assert majorana_sim.FusionOutcome.I.channel == "I"


def test_global_phase_helpers():

    vector = np.array([0.6, 0.8j])

    assert majorana_sim.equal_up_to_global_phase(vector * np.exp(0.7j), vector)
    assert not majorana_sim.equal_up_to_global_phase(np.array([0.6, -0.8j]), vector)
    assert np.allclose(majorana_sim.strip_global_phase(vector * 1j), vector)
