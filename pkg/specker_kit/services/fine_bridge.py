"""
Joint-distribution feasibility for marginal scenarios and the conversions
between joint distributions, outcome-deterministic models and factorizable
models.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from ..config import get_settings
from ..exceptions import (
    InfeasibleError,
    InternalConsistencyError,
    JointSpaceTooLarge,
    NotFactorizable,
)
from . import simplex
from .marginal_scenario import (
    Context,
    JointDistribution,
    MarginalScenario,
    Outcome,
    ScenarioStats,
    specker_scenario,
)
from .ontmodel import FiniteOntologicalModel, deterministic_state
from .scenario_core import SixParams, from_six_params, snap_rational, to_six_params
from .validation_service import validate_stats

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FarkasCertificate:
    """
    ``sum c[S,k] p(k|S) <= bound`` holds for every joint distribution, yet the
    observed statistics give ``value > bound``.
    """

    coefficients: Dict[Tuple[Context, Outcome], Fraction]
    bound: Fraction
    value: Fraction

    def evaluate(self, stats: ScenarioStats) -> Fraction:
        total = Fraction(0)
        for (context, outcome), c in self.coefficients.items():
            k = stats.scenario.context_outcomes(context).index(outcome)
            total += c * snap_rational(stats.distributions[context][k])
        return total

    def verify(self, stats: ScenarioStats) -> bool:
        scenario = stats.scenario
        if not self.evaluate(stats) > self.bound:
            return False
        for joint_outcome in scenario.joint_outcomes():
            score = sum(
                (c for (context, outcome), c in self.coefficients.items()
                 if tuple(joint_outcome[i] for i in context) == outcome),
                Fraction(0),
            )
            if score > self.bound:
                return False
        return True

    def as_dict(self, scenario: MarginalScenario) -> dict:
        return {
            "coefficients": [
                {
                    "context": scenario.context_label(context),
                    "outcome": "".join(map(str, outcome)),
                    "coefficient": str(c),
                }
                for (context, outcome), c in self.coefficients.items()
                if c
            ],
            "bound": str(self.bound),
            "value": str(self.value),
        }


@dataclass(frozen=True)
class Interval:
    lower: Fraction
    upper: Fraction

    def __contains__(self, t) -> bool:
        return self.lower <= t <= self.upper


def _check_size(scenario: MarginalScenario) -> None:
    limit = get_settings().max_joint_outcomes
    if scenario.joint_size > limit:
        raise JointSpaceTooLarge(scenario.joint_size, limit)


def lp_find_joint(scenario: MarginalScenario, stats: ScenarioStats) -> JointDistribution:
    """Exact LP over the joint outcomes; raises InfeasibleError with a Farkas certificate."""
    _check_size(scenario)
    joint_outcomes = scenario.joint_outcomes()
    rows: List[List[int]] = []
    rhs: List[Fraction] = []
    labels: List[Tuple[Context, Outcome]] = []
    for context in scenario.contexts:
        for outcome, value in zip(scenario.context_outcomes(context), stats.distributions[context]):
            rows.append([int(tuple(x[i] for i in context) == outcome) for x in joint_outcomes])
            rhs.append(snap_rational(value))
            labels.append((context, outcome))

    result = simplex.solve(rows, rhs)
    if result.feasible:
        logger.debug(f"[FINE] LP feasible after {result.pivots} pivots")
        return JointDistribution(scenario=scenario, probabilities=result.x)

    y = result.farkas
    coefficients = {label: yi for label, yi in zip(labels, y)}
    column_scores = [
        sum((yi * row[col] for yi, row in zip(y, rows)), Fraction(0)) for col in range(len(joint_outcomes))
    ]
    certificate = FarkasCertificate(
        coefficients=coefficients,
        bound=max(column_scores),
        value=sum((yi * bi for yi, bi in zip(y, rhs)), Fraction(0)),
    )
    logger.debug(f"[FINE] LP infeasible: certificate value {certificate.value} > bound {certificate.bound}")
    raise InfeasibleError(certificate)


def _joint_terms(six: SixParams) -> List[Tuple[Fraction, int]]:
    """p(x1x2x3) = const + sign * p(000), in lexicographic order of x1x2x3."""
    t12, t23, t13 = from_six_params(six).pairs
    return [
        (Fraction(0), 1),                       # 000
        (t12[0], -1),                           # 001
        (t13[0], -1),                           # 010
        (t12[1] - t13[0], 1),                   # 011
        (t23[0], -1),                           # 100
        (t12[2] - t23[0], 1),                   # 101
        (t13[2] - t23[0], 1),                   # 110
        (t12[3] - t13[2] + t23[0], -1),         # 111
    ]


def specker_p000_interval(six: SixParams) -> Optional[Interval]:
    """The p(000) values for which all eight reconstructed p(x1x2x3) lie in [0, 1]; None when empty."""
    lower = Fraction(0)
    upper = min(Fraction(1), *six.p)
    for const, sign in _joint_terms(six):
        if sign > 0:
            lower = max(lower, -const)
            upper = min(upper, 1 - const)
        else:
            lower = max(lower, const - 1)
            upper = min(upper, const)
    if lower > upper:
        return None
    return Interval(lower=lower, upper=upper)


def joint_from_p000(six: SixParams, p000: Fraction) -> JointDistribution:
    probabilities = tuple(const + sign * p000 for const, sign in _joint_terms(six))
    return JointDistribution(scenario=specker_scenario(), probabilities=probabilities)


def find_joint(scenario: MarginalScenario, stats: ScenarioStats) -> JointDistribution:
    """
    A joint distribution reproducing every context's statistics, or InfeasibleError.

    Specker's scenario goes through the closed-form p(000) interval and is
    cross-checked against the generic LP.
    """
    validate_stats(scenario, stats)
    if not scenario.is_specker:
        return lp_find_joint(scenario, stats)

    logger.info("[FINE] Specker scenario detected, using the closed-form p(000) interval")
    six = to_six_params(stats.to_correlation_vector())
    interval = specker_p000_interval(six)
    try:
        lp_joint = lp_find_joint(scenario, stats)
    except InfeasibleError:
        if interval is not None:
            raise InternalConsistencyError("LP reports infeasible but the p(000) interval is nonempty")
        raise
    if interval is None:
        raise InternalConsistencyError("LP found a joint but the p(000) interval is empty")
    logger.debug(f"[FINE] p(000) interval [{interval.lower}, {interval.upper}], LP p(000)={lp_joint.probabilities[0]}")
    return joint_from_p000(six, interval.lower)


def deterministic_model_from_joint(joint: JointDistribution) -> FiniteOntologicalModel:
    """One ontic state per support point, weighted by its probability, with delta responses."""
    states = tuple(deterministic_state(joint.scenario, outcome, p) for outcome, p in joint.support())
    return FiniteOntologicalModel(scenario=joint.scenario, states=states)


def factorizability_check(model: FiniteOntologicalModel) -> bool:
    defects = model.factorization_defects()
    if defects:
        logger.debug(f"[FINE] non-factorizable joint responses at {defects}")
    return not defects


def joint_from_factorizable(model: FiniteOntologicalModel) -> JointDistribution:
    """p(k_1..k_N) = sum_lambda mu(lambda) prod_i xi(k_i|M_i;lambda)."""
    defects = model.factorization_defects()
    if defects:
        raise NotFactorizable(*defects[0])
    _check_size(model.scenario)
    probabilities = []
    for outcome in model.scenario.joint_outcomes():
        total = Fraction(0)
        for state in model.states:
            term = state.weight
            for m, k in enumerate(outcome):
                term = term * state.responses[m][k]
            total = total + term
        probabilities.append(total)
    return JointDistribution(scenario=model.scenario, probabilities=tuple(probabilities))
