from fractions import Fraction

import pytest

from conftest import vertex
from specker_kit.exceptions import InfeasibleError, JointSpaceTooLarge, NotFactorizable
from specker_kit.services.fine_bridge import (
    deterministic_model_from_joint,
    factorizability_check,
    find_joint,
    joint_from_factorizable,
    lp_find_joint,
    specker_p000_interval,
)
from specker_kit.services.inequalities import check_ks, evaluate_vector
from specker_kit.services.marginal_scenario import (
    MarginalScenario,
    ScenarioStats,
    specker_scenario,
    stats_from_correlation_vector,
)
from specker_kit.services.ontmodel import FiniteOntologicalModel, OnticState, fair_coin_model, model_stats
from specker_kit.services.polytope import in_ks_polytope
from specker_kit.services.sampling import make_generator, membership_verdicts, r3_boundary_point, random_ks_point, random_point
from specker_kit.services.scenario_core import SixParams, from_six_params, to_six_params

F = Fraction
HALF = F(1, 2)


def joint_of(cv):
    return find_joint(specker_scenario(), stats_from_correlation_vector(cv))


def test_p000_interval_examples(uniform):
    interval = specker_p000_interval(to_six_params(vertex(0)))
    assert (interval.lower, interval.upper) == (1, 1)
    assert specker_p000_interval(to_six_params(vertex(8))) is None
    interval = specker_p000_interval(to_six_params(uniform))
    assert (interval.lower, interval.upper) == (0, F(1, 4))
    assert F(1, 8) in interval


def test_uniform_point_takes_the_lower_end(uniform):
    joint = joint_of(uniform)
    assert joint.probabilities[0] == 0
    assert joint.marginal_stats() == stats_from_correlation_vector(uniform)


def test_degenerate_interval():
    two_thirds = F(2, 3)
    six = SixParams(two_thirds, two_thirds, two_thirds, HALF, HALF, HALF)
    cv = from_six_params(six)
    assert cv.pairs == ((F(1, 6), F(1, 3), F(1, 3), F(1, 6)),) * 3
    interval = specker_p000_interval(six)
    assert (interval.lower, interval.upper) == (0, 0)
    assert joint_of(cv).marginal_stats() == stats_from_correlation_vector(cv)


@pytest.mark.parametrize("vid", [8, 9, 10, 11])
def test_certificates_verify(vid):
    stats = stats_from_correlation_vector(vertex(vid))
    with pytest.raises(InfeasibleError) as e:
        find_joint(specker_scenario(), stats)
    certificate = e.value.certificate
    assert certificate.value > certificate.bound
    assert certificate.evaluate(stats) == certificate.value
    assert certificate.verify(stats)
    assert not certificate.verify(stats_from_correlation_vector(vertex(0)))


def test_joint_model_joint_cycle():
    rng = make_generator(3)
    for _ in range(1000):
        cv = random_ks_point(rng)
        stats = stats_from_correlation_vector(cv)
        joint = find_joint(specker_scenario(), stats)
        model = deterministic_model_from_joint(joint)
        assert model.deterministic
        assert factorizability_check(model)
        assert model_stats(model) == stats
        assert joint_from_factorizable(model).marginal_stats() == stats


def test_three_membership_oracles_agree():
    rng = make_generator(4)
    inside = 0
    for _ in range(10_000):
        verdicts = membership_verdicts(random_point(rng))
        assert len(set(verdicts)) == 1
        inside += verdicts[0]
    assert 0 < inside < 10_000
    for _ in range(1000):
        cv = r3_boundary_point(rng)
        assert evaluate_vector(cv).R3 == 2
        assert membership_verdicts(cv) == (True, True, True)


def test_facet_membership_and_ks_checks_agree_on_random_points():
    rng = make_generator(5)
    for _ in range(1000):
        cv = random_point(rng)
        assert in_ks_polytope(to_six_params(cv)).member == (not check_ks(evaluate_vector(cv)))


def test_fair_coin_model_is_not_factorizable():
    model = fair_coin_model()
    assert not factorizability_check(model)
    with pytest.raises(NotFactorizable) as e:
        joint_from_factorizable(model)
    assert e.value.state_index == 0


def test_product_of_fair_coins():
    model = FiniteOntologicalModel(
        specker_scenario(),
        (OnticState(weight=F(1), responses=((HALF, HALF),) * 3),),
    )
    assert joint_from_factorizable(model).probabilities == (F(1, 8),) * 8


def pr_box():
    # measurements A0, A1, B0, B1; outputs anticorrelate only on (A1, B1)
    scenario = MarginalScenario(outcome_counts=(2, 2, 2, 2), contexts=((0, 2), (0, 3), (1, 2), (1, 3)))
    correlated = (HALF, F(0), F(0), HALF)
    anticorrelated = (F(0), HALF, HALF, F(0))
    distributions = {(0, 2): correlated, (0, 3): correlated, (1, 2): correlated, (1, 3): anticorrelated}
    return scenario, ScenarioStats(scenario, distributions)


def test_general_scenario_infeasible_with_certificate():
    scenario, stats = pr_box()
    with pytest.raises(InfeasibleError) as e:
        find_joint(scenario, stats)
    assert e.value.certificate.verify(stats)


def test_general_scenario_feasible():
    scenario = MarginalScenario(outcome_counts=(2, 3), contexts=((0, 1), (1,)))
    stats = ScenarioStats(scenario, {(0, 1): (F(1, 6),) * 6, (1,): (F(1, 3),) * 3})
    joint = find_joint(scenario, stats)
    assert joint.marginal_stats() == stats


def test_joint_space_limit():
    scenario = MarginalScenario(outcome_counts=(10,) * 7, contexts=((0, 1),))
    with pytest.raises(JointSpaceTooLarge):
        lp_find_joint(scenario, ScenarioStats(scenario, {}))
