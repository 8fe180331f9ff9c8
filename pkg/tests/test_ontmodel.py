from fractions import Fraction

import pytest

from conftest import vertex
from specker_kit.exceptions import InvalidDecomposition, ModelError
from specker_kit.services.inequalities import evaluate_vector
from specker_kit.services.marginal_scenario import specker_scenario
from specker_kit.services.ontmodel import (
    OnticState,
    FiniteOntologicalModel,
    PairwiseResponseDecomposition,
    deterministic_state,
    fair_coin_model,
    max_anticorrelation_bounds,
    maximizing_anticorrelation,
    min_anticorrelation_bounds,
    noncontextual_max_R,
    noncontextual_max_R_mixed,
    noncontextual_optimum,
    optimal_model,
    pairwise_response,
    single_response,
    stats_from_model,
)
from specker_kit.services.scenario_core import mix

F = Fraction
ETA_GRID = [F(k, 20) for k in range(21)]


def test_single_response():
    assert single_response(F(1, 2), 1) == (F(1, 4), F(3, 4))
    assert single_response(1, 0) == (1, 0)
    assert single_response(0, 0) == (F(1, 2), F(1, 2))
    with pytest.raises(ValueError):
        single_response(F(3, 2), 0)


def test_pairwise_response_of_maximizing_decomposition():
    table = pairwise_response(maximizing_anticorrelation(F(1, 2), (0, 1)))
    # alpha=1/2 on (0,1), epsilon=1/2 split over 01 and 10
    assert table == (0, F(3, 4), F(1, 4), 0)


def test_invalid_decomposition():
    d = PairwiseResponseDecomposition(
        alpha=F(1, 2), beta=F(1, 4), gamma=F(0), delta=F(0), epsilon=F(1, 4),
        eta=F(1, 2), assignment=(0, 0),
    )
    with pytest.raises(InvalidDecomposition):
        pairwise_response(d)


@pytest.mark.parametrize("eta", ETA_GRID)
def test_anticorrelation_bounds(eta):
    assert max_anticorrelation_bounds(eta) == (1 - eta, 1)
    assert min_anticorrelation_bounds(eta) == (0, eta)


@pytest.mark.parametrize("eta", ETA_GRID)
def test_noncontextual_maxima(eta):
    assert noncontextual_max_R("R3", eta) == 3 - eta
    for which in ("R0", "R1", "R2"):
        assert noncontextual_max_R(which, eta) == 1 - eta


def test_noncontextual_examples():
    assert noncontextual_max_R("R3", F(1, 2)) == F(5, 2)
    assert noncontextual_max_R("R0", F(1, 4)) == F(3, 4)
    with pytest.raises(ValueError):
        noncontextual_max_R("R4", F(1, 2))


def test_r3_is_maximised_by_every_non_constant_assignment():
    optimum = noncontextual_optimum("R3", F(1, 3))
    labels = {"".join(map(str, a)) for a in optimum.assignments}
    assert labels == {"001", "010", "011", "100", "101", "110"}
    assert optimum.closed_form == optimum.value


@pytest.mark.parametrize("which", ["R0", "R3"])
@pytest.mark.parametrize("eta", [F(0), F(1, 3), F(1, 2), F(1)])
def test_optimal_model_attains_the_maximum(which, eta):
    model = optimal_model(which, eta)
    assert model.factorizable is (eta == 1)
    assert evaluate_vector(stats_from_model(model))[which] == noncontextual_max_R(which, eta)


@pytest.mark.parametrize("which", ["R0", "R3"])
@pytest.mark.parametrize("eta", [F(0), F(1, 4), F(3, 5), F(1)])
def test_mixed_sharpness_agrees_with_closed_form_when_equal(which, eta):
    assert noncontextual_max_R_mixed(which, (eta, eta, eta)).value == noncontextual_max_R(which, eta)


def test_mixed_sharpness_needs_three_values():
    with pytest.raises(ValueError):
        noncontextual_max_R_mixed("R3", (F(1, 2), F(1, 2)))


def test_fair_coin_model_reproduces_the_anticorrelated_vertex():
    model = fair_coin_model()
    assert stats_from_model(model) == vertex(11)
    assert not model.factorizable
    assert not model.deterministic


def test_deterministic_models():
    scenario = specker_scenario()
    model = FiniteOntologicalModel(scenario, (deterministic_state(scenario, (1, 1, 1), F(1)),))
    assert model.deterministic and model.factorizable
    assert stats_from_model(model) == vertex(7)

    mixed = FiniteOntologicalModel(scenario, (
        deterministic_state(scenario, (0, 0, 0), F(1, 3)),
        deterministic_state(scenario, (1, 0, 1), F(2, 3)),
    ))
    assert stats_from_model(mixed) == mix([vertex(0), vertex(5)], [F(1, 3), F(2, 3)])


def test_model_invariants():
    scenario = specker_scenario()
    with pytest.raises(ModelError):
        FiniteOntologicalModel(scenario, (deterministic_state(scenario, (0, 0, 0), F(1, 2)),))
    half = F(1, 2)
    with pytest.raises(ModelError):
        # joint response whose M1 marginal is (1, 0) while the single response is (1/2, 1/2)
        FiniteOntologicalModel(scenario, (OnticState(
            weight=F(1),
            responses=((half, half),) * 3,
            joint_responses={(0, 1): (half, half, F(0), F(0))},
        ),))
    with pytest.raises(ModelError):
        FiniteOntologicalModel(scenario, ())
