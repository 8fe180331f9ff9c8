"""
Finite ontological models and the noncontextual optimisation of R0..R3.

A model lists ontic states with weights mu(lambda), single-measurement
response functions xi(k|M,lambda) and, optionally, joint response functions
per context. A context without an explicit joint response is read as the
product of single responses. Joint responses need not factorize.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from ..exceptions import InvalidDecomposition, ModelError
from . import simplex
from .marginal_scenario import (
    Context,
    MarginalScenario,
    Number,
    ScenarioStats,
    is_float_valued,
    specker_scenario,
)
from .scenario_core import PAIR_LABELS, PAIR_MEASUREMENTS, CorrelationVector
from .validation_service import validate, validate_stats

logger = logging.getLogger(__name__)

FLOAT_TOLERANCE = 1e-12

Assignment = Tuple[int, int, int]
ALL_ASSIGNMENTS: Tuple[Assignment, ...] = tuple(product((0, 1), repeat=3))

# sign of w12, w23, w13 in each R
R_COEFFICIENTS: Dict[str, Tuple[int, int, int]] = {
    "R0": (1, -1, -1),
    "R1": (-1, 1, -1),
    "R2": (-1, -1, 1),
    "R3": (1, 1, 1),
}


def _close(a: Number, b: Number, inexact: bool) -> bool:
    return abs(a - b) <= FLOAT_TOLERANCE if inexact else a == b


@dataclass(frozen=True)
class OnticState:
    weight: Number
    responses: Tuple[Tuple[Number, ...], ...]
    joint_responses: Mapping[Context, Tuple[Number, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class FiniteOntologicalModel:
    scenario: MarginalScenario
    states: Tuple[OnticState, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if not self.states:
            raise ModelError("a model needs at least one ontic state")
        inexact = self.inexact
        total = sum(s.weight for s in self.states)
        if any(s.weight < 0 for s in self.states) or not _close(total, 1, inexact):
            raise ModelError(f"ontic weights must be nonnegative and sum to 1 (sum {total})")
        for k, state in enumerate(self.states):
            if len(state.responses) != self.scenario.n:
                raise ModelError(f"ontic state {k} needs one response function per measurement")
            for m, (response, count) in enumerate(zip(state.responses, self.scenario.outcome_counts)):
                if len(response) != count:
                    raise ModelError(f"response of M{m + 1} in state {k} needs {count} entries")
                if any(v < 0 or v > 1 for v in response) or not _close(sum(response), 1, inexact):
                    raise ModelError(f"response of M{m + 1} in state {k} is not a distribution")
            for context, table in state.joint_responses.items():
                if context not in self.scenario.contexts:
                    raise ModelError(f"state {k} has a joint response for unknown context {context}")
                if len(table) != self.scenario.context_size(context):
                    raise ModelError(f"joint response of state {k} on {context} has wrong size")
                if any(v < 0 for v in table) or not _close(sum(table), 1, inexact):
                    raise ModelError(f"joint response of state {k} on {context} is not a distribution")
                # measurement noncontextuality: marginals equal the single responses
                for position, m in enumerate(context):
                    marginal = [Fraction(0)] * self.scenario.outcome_counts[m]
                    for outcome, value in zip(self.scenario.context_outcomes(context), table):
                        marginal[outcome[position]] += value
                    if not all(_close(a, b, inexact) for a, b in zip(marginal, state.responses[m])):
                        raise ModelError(
                            f"joint response of state {k} on {context} has a marginal on M{m + 1} "
                            "different from its single response"
                        )

    @property
    def inexact(self) -> bool:
        tables = [(s.weight,) for s in self.states]
        for s in self.states:
            tables.extend(s.responses)
            tables.extend(s.joint_responses.values())
        return is_float_valued(tables)

    def product_response(self, state: OnticState, context: Context) -> Tuple[Number, ...]:
        values = []
        for outcome in self.scenario.context_outcomes(context):
            value: Number = Fraction(1)
            for m, k in zip(context, outcome):
                value = value * state.responses[m][k]
            values.append(value)
        return tuple(values)

    def joint_response(self, state: OnticState, context: Context) -> Tuple[Number, ...]:
        explicit = state.joint_responses.get(context)
        return explicit if explicit is not None else self.product_response(state, context)

    def factorization_defects(self) -> List[Tuple[int, Context]]:
        """(state index, context) of every joint response that differs from the product."""
        inexact = self.inexact
        defects = []
        for k, state in enumerate(self.states):
            for context, table in state.joint_responses.items():
                expected = self.product_response(state, context)
                if not all(_close(a, b, inexact) for a, b in zip(table, expected)):
                    defects.append((k, context))
        return defects

    @property
    def deterministic(self) -> bool:
        return all(v in (0, 1) for s in self.states for r in s.responses for v in r)

    @property
    def factorizable(self) -> bool:
        return not self.factorization_defects()


def single_response(eta, bit: int) -> Tuple[Fraction, Fraction]:
    """xi(X|M;lambda) = eta delta_{X,bit} + (1-eta)/2."""
    eta = Fraction(eta)
    if not 0 <= eta <= 1:
        raise ValueError(f"sharpness must lie in [0, 1], got {eta}")
    if bit not in (0, 1):
        raise ValueError(f"assignment bit must be 0 or 1, got {bit}")
    noise = (1 - eta) / 2
    return (eta * (bit == 0) + noise, eta * (bit == 1) + noise)


@dataclass(frozen=True)
class PairwiseResponseDecomposition:
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    delta: Fraction
    epsilon: Fraction
    eta: Fraction
    assignment: Tuple[int, int]

    @property
    def weights(self) -> Tuple[Fraction, ...]:
        return (self.alpha, self.beta, self.gamma, self.delta, self.epsilon)

    def check(self) -> None:
        problems = []
        if any(w < 0 for w in self.weights) or sum(self.weights) != 1:
            problems.append("weights must be nonnegative and sum to 1")
        if not 0 <= self.eta <= 1:
            problems.append("eta must lie in [0, 1]")
        if not (self.alpha + self.beta == self.alpha + self.gamma == self.eta):
            problems.append("alpha+beta = alpha+gamma = eta fails")
        if not (self.gamma + self.delta + self.epsilon == self.beta + self.delta + self.epsilon == 1 - self.eta):
            problems.append("gamma+delta+epsilon = beta+delta+epsilon = 1-eta fails")
        if any(b not in (0, 1) for b in self.assignment):
            problems.append("assignment bits must be 0 or 1")
        if problems:
            raise InvalidDecomposition("; ".join(problems))


def _decomposition(eta, assignment, **weights) -> PairwiseResponseDecomposition:
    zero = Fraction(0)
    values = {name: Fraction(weights.get(name, zero)) for name in ("alpha", "beta", "gamma", "delta", "epsilon")}
    return PairwiseResponseDecomposition(eta=Fraction(eta), assignment=tuple(assignment), **values)


def maximizing_anticorrelation(eta, assignment: Tuple[int, int]) -> PairwiseResponseDecomposition:
    eta = Fraction(eta)
    return _decomposition(eta, assignment, alpha=eta, epsilon=1 - eta)


def minimizing_anticorrelation(eta, assignment: Tuple[int, int]) -> PairwiseResponseDecomposition:
    eta = Fraction(eta)
    return _decomposition(eta, assignment, alpha=eta, delta=1 - eta)


def pairwise_response(d: PairwiseResponseDecomposition) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """The five-term mixture over outcomes (00, 01, 10, 11)."""
    d.check()
    xi, xj = d.assignment
    half = Fraction(1, 2)
    table = []
    for x, y in product((0, 1), repeat=2):
        value = d.alpha * ((x == xi) and (y == xj))
        value += d.beta * (x == xi) * half
        value += d.gamma * (y == xj) * half
        value += d.delta * half * (x == y)
        value += d.epsilon * half * (x != y)
        table.append(Fraction(value))
    return tuple(table)


def anticorrelation(table: Sequence[Fraction]) -> Fraction:
    return table[1] + table[2]


def _bounds(builder, eta) -> Tuple[Fraction, Fraction]:
    values = [anticorrelation(pairwise_response(builder(eta, a))) for a in product((0, 1), repeat=2)]
    return (min(values), max(values))


def max_anticorrelation_bounds(eta) -> Tuple[Fraction, Fraction]:
    return _bounds(maximizing_anticorrelation, eta)


def min_anticorrelation_bounds(eta) -> Tuple[Fraction, Fraction]:
    return _bounds(minimizing_anticorrelation, eta)


@dataclass(frozen=True)
class NoncontextualOptimum:
    which: str
    value: Fraction
    assignments: Tuple[Assignment, ...]
    etas: Tuple[Fraction, Fraction, Fraction]
    closed_form: Optional[Fraction] = None


def _pair_decompositions(which: str, eta, assignment: Assignment) -> Dict[str, PairwiseResponseDecomposition]:
    result = {}
    for label, (i, j), sign in zip(PAIR_LABELS, PAIR_MEASUREMENTS, R_COEFFICIENTS[which]):
        builder = maximizing_anticorrelation if sign > 0 else minimizing_anticorrelation
        result[label] = builder(eta, (assignment[i], assignment[j]))
    return result


def _check_which(which: str) -> None:
    if which not in R_COEFFICIENTS:
        raise ValueError(f"unknown inequality {which!r}, expected one of {sorted(R_COEFFICIENTS)}")


def noncontextual_optimum(which: str, eta) -> NoncontextualOptimum:
    """Enumerate the 8 assignments with the max/min decomposition chosen by each coefficient's sign."""
    _check_which(which)
    eta = Fraction(eta)
    scores = {}
    for assignment in ALL_ASSIGNMENTS:
        decompositions = _pair_decompositions(which, eta, assignment)
        scores[assignment] = sum(
            (sign * anticorrelation(pairwise_response(decompositions[label]))
             for label, sign in zip(PAIR_LABELS, R_COEFFICIENTS[which])),
            Fraction(0),
        )
    best = max(scores.values())
    closed_form = 3 - eta if which == "R3" else 1 - eta
    if best != closed_form:
        logger.warning(f"[ONTMODEL] enumeration gave {best} for {which} at eta={eta}, closed form {closed_form}")
    return NoncontextualOptimum(
        which=which,
        value=best,
        assignments=tuple(a for a in ALL_ASSIGNMENTS if scores[a] == best),
        etas=(eta, eta, eta),
        closed_form=closed_form,
    )


def noncontextual_max_R(which: str, eta) -> Fraction:
    return noncontextual_optimum(which, eta).value


def _extreme_anticorrelation(eta_i: Fraction, eta_j: Fraction, assignment: Tuple[int, int], maximize: bool) -> Fraction:
    # variables alpha, beta, gamma, delta, epsilon
    A = [
        [1, 1, 0, 0, 0],
        [1, 0, 1, 0, 0],
        [1, 1, 1, 1, 1],
    ]
    b = [eta_i, eta_j, 1]
    w = [Fraction(int(assignment[0] != assignment[1])), Fraction(1, 2), Fraction(1, 2), Fraction(0), Fraction(1)]
    c = [-v for v in w] if maximize else w
    result = simplex.solve(A, b, c)
    if result.status != simplex.OPTIMAL:
        raise InvalidDecomposition(f"no pairwise decomposition for sharpness ({eta_i}, {eta_j})")
    return -result.objective if maximize else result.objective


def noncontextual_max_R_mixed(which: str, etas: Sequence) -> NoncontextualOptimum:
    """
    Research mode: unequal sharpness per measurement. Each pair's anticorrelation is
    extremised by an exact LP over the five-term decomposition; no closed form is claimed.
    """
    _check_which(which)
    etas = tuple(Fraction(e) for e in etas)
    if len(etas) != 3 or any(not 0 <= e <= 1 for e in etas):
        raise ValueError("three sharpness values in [0, 1] are required")
    scores = {}
    for assignment in ALL_ASSIGNMENTS:
        total = Fraction(0)
        for (i, j), sign in zip(PAIR_MEASUREMENTS, R_COEFFICIENTS[which]):
            total += sign * _extreme_anticorrelation(etas[i], etas[j], (assignment[i], assignment[j]), sign > 0)
        scores[assignment] = total
    best = max(scores.values())
    return NoncontextualOptimum(
        which=which,
        value=best,
        assignments=tuple(a for a in ALL_ASSIGNMENTS if scores[a] == best),
        etas=etas,
    )


def state_from_decompositions(
    eta,
    assignment: Assignment,
    decompositions: Mapping[str, PairwiseResponseDecomposition],
    weight=1,
) -> OnticState:
    """An ontic state of Specker's scenario with eta-noisy singles and the given pairwise responses."""
    joint = {}
    for label, (i, j) in zip(PAIR_LABELS, PAIR_MEASUREMENTS):
        d = decompositions[label]
        if d.assignment != (assignment[i], assignment[j]) or d.eta != Fraction(eta):
            raise InvalidDecomposition(f"decomposition for pair {label} does not match the ontic state")
        joint[(i, j)] = pairwise_response(d)
    return OnticState(
        weight=Fraction(weight),
        responses=tuple(single_response(eta, bit) for bit in assignment),
        joint_responses=joint,
    )


def optimal_model(which: str, eta) -> FiniteOntologicalModel:
    """Single-state noncontextual model attaining max R for the first maximising assignment."""
    optimum = noncontextual_optimum(which, eta)
    assignment = optimum.assignments[0]
    state = state_from_decompositions(eta, assignment, _pair_decompositions(which, Fraction(eta), assignment))
    return FiniteOntologicalModel(scenario=specker_scenario(), states=(state,))


def fair_coin_model() -> FiniteOntologicalModel:
    """Ignore the system and output (0,1) or (1,0) on a fair coin for every pair."""
    half = Fraction(1, 2)
    state = OnticState(
        weight=Fraction(1),
        responses=((half, half),) * 3,
        joint_responses={context: (Fraction(0), half, half, Fraction(0)) for context in PAIR_MEASUREMENTS},
    )
    return FiniteOntologicalModel(scenario=specker_scenario(), states=(state,))


def deterministic_state(scenario: MarginalScenario, outcome: Sequence[int], weight) -> OnticState:
    responses = []
    for k, count in zip(outcome, scenario.outcome_counts):
        response = [Fraction(0)] * count
        response[k] = Fraction(1)
        responses.append(tuple(response))
    return OnticState(weight=weight, responses=tuple(responses))


def model_stats(model: FiniteOntologicalModel) -> ScenarioStats:
    distributions = {}
    for context in model.scenario.contexts:
        values: List[Number] = [Fraction(0)] * model.scenario.context_size(context)
        for state in model.states:
            response = model.joint_response(state, context)
            values = [acc + state.weight * r for acc, r in zip(values, response)]
        distributions[context] = tuple(values)
    return ScenarioStats(scenario=model.scenario, distributions=distributions)


def stats_from_model(model: FiniteOntologicalModel) -> Union[CorrelationVector, ScenarioStats]:
    """
    p(k_S|M_S;P) = sum_lambda mu(lambda) xi(k_S|M_S;lambda). Exact Specker models give a
    CorrelationVector, anything else validated ScenarioStats.
    """
    stats = model_stats(model)
    if model.scenario.is_specker and not model.inexact:
        return validate({label: stats.distributions[context] for label, context in zip(PAIR_LABELS, PAIR_MEASUREMENTS)})
    return validate_stats(model.scenario, stats)
