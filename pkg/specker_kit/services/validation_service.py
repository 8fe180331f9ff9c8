import logging
from fractions import Fraction
from itertools import combinations
from typing import List, Mapping, Sequence, Union

from ..exceptions import SpeckerKitError, StatisticsValidationError, Violation
from .marginal_scenario import MarginalScenario, ScenarioStats, is_float_valued
from .scenario_core import (
    OUTCOME_LABELS,
    PAIR_LABELS,
    CorrelationVector,
    parse_rational,
)

logger = logging.getLogger(__name__)

FLOAT_TOLERANCE = 1e-9

RawTable = Union[Mapping[str, Sequence], Sequence]

# (measurement, (pair, outcome indices summing to X=0)) for both pairs containing it
_MARGINAL_SOURCES = {
    1: (("12", (0, 1)), ("13", (0, 1))),
    2: (("12", (0, 2)), ("23", (0, 1))),
    3: (("23", (0, 2)), ("13", (0, 2))),
}


def _coerce_table(raw: RawTable, violations: List[Violation]) -> dict:
    if isinstance(raw, Mapping):
        tables = {label: raw.get(label) for label in PAIR_LABELS}
    else:
        flat = list(raw)
        if len(flat) != 12:
            violations.append(Violation("parse", f"expected 12 entries, got {len(flat)}"))
            return {}
        tables = {label: flat[4 * k:4 * k + 4] for k, label in enumerate(PAIR_LABELS)}

    coerced = {}
    for label, table in tables.items():
        if table is None or len(table) != 4:
            violations.append(Violation("parse", f"pair {label} needs exactly 4 entries", pair=label))
            continue
        values = []
        for outcome, value in zip(OUTCOME_LABELS, table):
            try:
                values.append(parse_rational(value))
            except SpeckerKitError as e:
                violations.append(Violation("parse", str(e), pair=label, outcome=outcome))
                values.append(None)
        coerced[label] = values
    return coerced


def validate(raw: RawTable) -> CorrelationVector:
    """
    Validates a raw 12-entry table of Specker statistics.
    Returns the CorrelationVector, or raises StatisticsValidationError naming every violated constraint.
    """
    logger.info("[VALIDATION] Starting Specker statistics validation...")
    violations: List[Violation] = []

    tables = _coerce_table(raw, violations)
    if violations:
        logger.info(f"[VALIDATION FAILED] {len(violations)} unreadable entr(y/ies)")
        raise StatisticsValidationError(violations)

    logger.debug("[VALIDATION] Checking positivity...")
    for label in PAIR_LABELS:
        for outcome, value in zip(OUTCOME_LABELS, tables[label]):
            if value < 0:
                violations.append(Violation(
                    "negative-entry", f"v{label}_{outcome} = {value} is negative",
                    pair=label, outcome=outcome,
                ))
            elif value > 1:
                violations.append(Violation(
                    "range", f"v{label}_{outcome} = {value} exceeds 1",
                    pair=label, outcome=outcome,
                ))

    logger.debug("[VALIDATION] Checking normalization...")
    for label in PAIR_LABELS:
        total = sum(tables[label], Fraction(0))
        if total != 1:
            violations.append(Violation(
                "normalization", f"pair {label} sums to {total}", pair=label,
            ))

    logger.debug("[VALIDATION] Checking no-disturbance...")
    for measurement, sources in _MARGINAL_SOURCES.items():
        found = [sum((tables[label][k] for k in idx), Fraction(0)) for label, idx in sources]
        if found[0] != found[1]:
            violations.append(Violation(
                "no-disturbance",
                f"p(X{measurement}=0) is {found[0]} from pair {sources[0][0]} "
                f"but {found[1]} from pair {sources[1][0]}",
                measurement=measurement,
                marginals=(found[0], found[1]),
            ))

    if violations:
        logger.info(f"[VALIDATION FAILED] {len(violations)} violated constraint(s)")
        raise StatisticsValidationError(violations)

    logger.info("[VALIDATION] ✓ Positivity, normalization and no-disturbance hold")
    return CorrelationVector(pairs=tuple(tuple(tables[label]) for label in PAIR_LABELS))


def validate_stats(scenario: MarginalScenario, stats: ScenarioStats) -> ScenarioStats:
    """
    Checks per-context normalization and agreement of overlapping contexts on shared marginals.
    Exact for rational statistics, within 1e-9 when any entry is a float.
    """
    violations: List[Violation] = []
    inexact = is_float_valued(stats.distributions.values())

    def differs(a, b) -> bool:
        return abs(a - b) > FLOAT_TOLERANCE if inexact else a != b

    for context in scenario.contexts:
        label = scenario.context_label(context)
        distribution = stats.distributions.get(context)
        if distribution is None:
            violations.append(Violation("parse", f"no statistics for context {label}", pair=label))
            continue
        if len(distribution) != scenario.context_size(context):
            violations.append(Violation(
                "parse",
                f"context {label} needs {scenario.context_size(context)} entries, got {len(distribution)}",
                pair=label,
            ))
            continue
        for outcome, value in zip(scenario.context_outcomes(context), distribution):
            if value < (-FLOAT_TOLERANCE if inexact else 0):
                violations.append(Violation(
                    "negative-entry", f"p({outcome}|{label}) = {value} is negative",
                    pair=label, outcome="".join(map(str, outcome)),
                ))
        total = sum(distribution)
        if differs(total, 1):
            violations.append(Violation("normalization", f"context {label} sums to {total}", pair=label))

    if violations:
        raise StatisticsValidationError(violations)

    for first, second in combinations(scenario.contexts, 2):
        shared = tuple(sorted(set(first) & set(second)))
        if not shared:
            continue
        left = stats.marginal(first, shared)
        right = stats.marginal(second, shared)
        for outcome in left:
            if differs(left[outcome], right[outcome]):
                violations.append(Violation(
                    "no-disturbance",
                    f"marginal on {shared} at {outcome} is {left[outcome]} from context "
                    f"{scenario.context_label(first)} but {right[outcome]} from {scenario.context_label(second)}",
                    measurement=shared[0] + 1,
                    marginals=(left[outcome], right[outcome]) if not inexact else None,
                ))
    if violations:
        raise StatisticsValidationError(violations)
    return stats
