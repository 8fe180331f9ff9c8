"""
Translation between JSON documents and the toolkit's exact types.

Every translator validates the pydantic document first and then hands the
coerced tables to the domain constructors, which run their own invariant checks.
"""
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from pydantic import TypeAdapter, ValidationError

from ..exceptions import (
    DocumentError,
    ModelError,
    SpeckerKitError,
    StatisticsValidationError,
    Violation,
)
from ..models import (
    CorrelationDocument,
    MeasurementSpec,
    ModelDocument,
    OnticStateDocument,
    ScenarioDocument,
)
from .marginal_scenario import Context, MarginalScenario, ScenarioStats, specker_scenario
from .ontmodel import FiniteOntologicalModel, OnticState
from .scenario_core import CorrelationVector, SixParams, from_six_params, parse_rational
from .validation_service import validate, validate_stats

logger = logging.getLogger(__name__)

_STATES_ADAPTER = TypeAdapter(List[OnticStateDocument])


def _first_error(e: ValidationError) -> DocumentError:
    first = e.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "$"
    return DocumentError(first["msg"], location)


def load_json(path: Union[str, Path]) -> Any:
    """Reads a UTF-8 JSON file, reporting the line and column of a syntax error."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e.strerror}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(e.msg, f"{path}:{e.lineno}:{e.colno}") from e


def _rationals(values: List[Any], where: str) -> Tuple[Fraction, ...]:
    coerced = []
    for k, value in enumerate(values):
        try:
            coerced.append(parse_rational(value))
        except SpeckerKitError as e:
            raise DocumentError(str(e), f"{where}[{k}]") from e
    return tuple(coerced)


def translate_correlation_document(data: Any) -> CorrelationVector:
    """``{"pairs": {...}}`` or ``{"six": {...}}`` to a validated CorrelationVector."""
    logger.debug("[TRANSLATION] Executing: translate_correlation_document")
    try:
        document = CorrelationDocument.model_validate(data)
    except ValidationError as e:
        raise _first_error(e) from e

    if document.pairs is not None:
        unknown = sorted(set(document.pairs) - {"12", "23", "13"})
        if unknown:
            raise StatisticsValidationError(
                [Violation("parse", f"unknown pair label {label!r}", pair=label) for label in unknown]
            )
        return validate(document.pairs)

    six = document.six
    values = {}
    for name in ("w12", "w23", "w13", "p1", "p2", "p3"):
        try:
            values[name] = parse_rational(getattr(six, name))
        except SpeckerKitError as e:
            raise DocumentError(str(e), f"six.{name}") from e
    return from_six_params(SixParams(**values))


def _parse_context(label: str, where: str) -> Context:
    try:
        return tuple(sorted(int(part) for part in label.split(",")))
    except ValueError as e:
        raise DocumentError(f"context key {label!r} is not a comma-separated list of indices", where) from e


def _scenario(measurements: List[MeasurementSpec], contexts: List[List[int]]) -> MarginalScenario:
    try:
        return MarginalScenario(
            outcome_counts=tuple(m.outcomes for m in measurements),
            contexts=tuple(tuple(c) for c in contexts),
            names=tuple(m.name for m in measurements),
        )
    except SpeckerKitError as e:
        raise DocumentError(str(e), "contexts") from e


def translate_scenario_document(data: Any) -> Tuple[MarginalScenario, ScenarioStats]:
    """Scenario file to a validated (MarginalScenario, ScenarioStats) pair."""
    logger.debug("[TRANSLATION] Executing: translate_scenario_document")
    try:
        document = ScenarioDocument.model_validate(data)
    except ValidationError as e:
        raise _first_error(e) from e

    scenario = _scenario(document.measurements, document.contexts)
    distributions: Dict[Context, Tuple[Fraction, ...]] = {}
    for label, values in document.stats.items():
        context = _parse_context(label, f"stats.{label}")
        if context not in scenario.contexts:
            raise DocumentError("statistics given for a context not listed in 'contexts'", f"stats.{label}")
        distributions[context] = _rationals(values, f"stats.{label}")
    stats = validate_stats(scenario, ScenarioStats(scenario=scenario, distributions=distributions))
    logger.info(f"[TRANSLATION] Scenario with {scenario.n} measurements and {len(scenario.contexts)} contexts")
    return scenario, stats


def _measurement_index(key: str, scenario: MarginalScenario, where: str) -> int:
    if key in scenario.names:
        return scenario.names.index(key)
    try:
        index = int(key)
    except ValueError:
        raise DocumentError(f"unknown measurement {key!r}", where) from None
    if not 0 <= index < scenario.n:
        raise DocumentError(f"measurement index {index} out of range", where)
    return index


def _ontic_state(document: OnticStateDocument, scenario: MarginalScenario, where: str) -> OnticState:
    weight = _rationals([document.weight], f"{where}.weight")[0]
    responses: List[Tuple[Fraction, ...]] = [None] * scenario.n
    for key, values in document.responses.items():
        m = _measurement_index(key, scenario, f"{where}.responses.{key}")
        responses[m] = _rationals(values, f"{where}.responses.{key}")
    missing = [scenario.names[m] for m, r in enumerate(responses) if r is None]
    if missing:
        raise DocumentError(f"no response function for {', '.join(missing)}", f"{where}.responses")
    joint = {
        _parse_context(label, f"{where}.joint_responses.{label}"): _rationals(values, f"{where}.joint_responses.{label}")
        for label, values in document.joint_responses.items()
    }
    return OnticState(weight=weight, responses=tuple(responses), joint_responses=joint)


def translate_model_document(data: Any) -> FiniteOntologicalModel:
    """
    A model file: either a bare list of ontic-state records (Specker's scenario)
    or an object with ``measurements``, ``contexts`` and ``states``.
    """
    logger.debug("[TRANSLATION] Executing: translate_model_document")
    try:
        if isinstance(data, list):
            document = ModelDocument(states=_STATES_ADAPTER.validate_python(data))
        else:
            document = ModelDocument.model_validate(data)
    except ValidationError as e:
        raise _first_error(e) from e

    if (document.measurements is None) != (document.contexts is None):
        raise DocumentError("give both 'measurements' and 'contexts' or neither")
    scenario = (
        specker_scenario() if document.measurements is None
        else _scenario(document.measurements, document.contexts)
    )
    states = tuple(
        _ontic_state(state, scenario, f"states[{k}]") for k, state in enumerate(document.states)
    )
    try:
        return FiniteOntologicalModel(scenario=scenario, states=states)
    except ModelError:
        logger.info("[TRANSLATION] Model document failed its invariant checks")
        raise
