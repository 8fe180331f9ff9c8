from fractions import Fraction

import pytest

from conftest import correlation_document, vertex
from specker_kit.exceptions import ChainViolation, DocumentError, ModelError, StatisticsValidationError
from specker_kit.services.ontmodel import fair_coin_model
from specker_kit.services.translation_tools import (
    load_json,
    translate_correlation_document,
    translate_model_document,
    translate_scenario_document,
)

F = Fraction
HALF = "1/2"


def test_pairs_document():
    cv = translate_correlation_document({"pairs": {"12": [0, HALF, HALF, 0], "23": [0, HALF, HALF, 0], "13": [0, 0.5, 0.5, 0]}})
    assert cv == vertex(11)


def test_six_document():
    cv = translate_correlation_document({"six": {"w12": 1, "w23": 0, "w13": 0, "p1": HALF, "p2": HALF, "p3": HALF}})
    assert cv == vertex(8)


def test_six_document_with_broken_chain():
    with pytest.raises(ChainViolation):
        translate_correlation_document({"six": {"w12": 0, "w23": 0, "w13": 0, "p1": 1, "p2": 0, "p3": 0}})


def test_document_needs_exactly_one_form():
    with pytest.raises(DocumentError):
        translate_correlation_document({})
    six = {"w12": 1, "w23": 0, "w13": 0, "p1": HALF, "p2": HALF, "p3": HALF}
    with pytest.raises(DocumentError):
        translate_correlation_document({"pairs": correlation_document(vertex(0))["pairs"], "six": six})


def test_unknown_pair_label():
    pairs = dict(correlation_document(vertex(0))["pairs"], **{"21": [1, 0, 0, 0]})
    with pytest.raises(StatisticsValidationError):
        translate_correlation_document({"pairs": pairs})


def test_canonical_document_round_trip():
    document = correlation_document(vertex(5))
    assert document["pairs"]["12"] == ["0", "0", "1", "0"]
    assert translate_correlation_document(document) == vertex(5)


def test_bad_six_entry_is_located():
    with pytest.raises(DocumentError) as e:
        translate_correlation_document({"six": {"w12": "x", "w23": 0, "w13": 0, "p1": HALF, "p2": HALF, "p3": HALF}})
    assert e.value.location == "six.w12"


def test_scenario_document():
    scenario, stats = translate_scenario_document({
        "measurements": [{"name": "A", "outcomes": 2}, {"name": "B", "outcomes": 2}],
        "contexts": [[0, 1]],
        "stats": {"0,1": ["1/4", "1/4", "1/4", "1/4"]},
    })
    assert scenario.names == ("A", "B")
    assert stats.distributions[(0, 1)] == (F(1, 4),) * 4


def test_scenario_document_with_stray_context():
    with pytest.raises(DocumentError) as e:
        translate_scenario_document({
            "measurements": [{"name": "A", "outcomes": 2}, {"name": "B", "outcomes": 2}],
            "contexts": [[0, 1]],
            "stats": {"0,1": ["1/4"] * 4, "1": [HALF, HALF]},
        })
    assert e.value.location == "stats.1"


def test_scenario_document_with_unknown_measurement():
    with pytest.raises(DocumentError) as e:
        translate_scenario_document({
            "measurements": [{"name": "A", "outcomes": 2}],
            "contexts": [[0, 3]],
            "stats": {},
        })
    assert e.value.location == "contexts"


def fair_coin_states():
    half = [HALF, HALF]
    return [{
        "weight": 1,
        "responses": {"M1": half, "M2": half, "2": half},
        "joint_responses": {label: [0, HALF, HALF, 0] for label in ("0,1", "1,2", "0,2")},
    }]


def test_bare_state_list_defaults_to_specker_scenario():
    model = translate_model_document(fair_coin_states())
    assert model == fair_coin_model()


def test_model_document_errors():
    states = fair_coin_states()
    states[0]["responses"]["M7"] = states[0]["responses"].pop("M1")
    with pytest.raises(DocumentError) as e:
        translate_model_document(states)
    assert e.value.location == "states[0].responses.M7"

    states = fair_coin_states()
    states[0]["weight"] = HALF
    with pytest.raises(ModelError):
        translate_model_document(states)

    with pytest.raises(DocumentError):
        translate_model_document({"measurements": [{"name": "A", "outcomes": 2}], "states": fair_coin_states()})


def test_load_json_reports_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"pairs": \n  [1, 2,]}', encoding="utf-8")
    with pytest.raises(DocumentError) as e:
        load_json(path)
    assert e.value.location.startswith(f"{path}:2:")
    with pytest.raises(DocumentError):
        load_json(tmp_path / "missing.json")
