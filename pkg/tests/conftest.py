import json
from fractions import Fraction

import pytest

from specker_kit.config import get_settings
from specker_kit.services.polytope import vertices
from specker_kit.services.scenario_core import CorrelationVector

QUARTER = Fraction(1, 4)


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    monkeypatch.setenv("SPECKER_KIT_LOG", "quiet")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def vertex(vid: int) -> CorrelationVector:
    return vertices()[vid].cv


def correlation_document(cv: CorrelationVector) -> dict:
    return {"pairs": cv.as_dict()}


@pytest.fixture
def uniform() -> CorrelationVector:
    return CorrelationVector(pairs=((QUARTER,) * 4,) * 3)


@pytest.fixture
def write_json(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)
    return write
