"""
General marginal scenarios: measurements with finite outcome sets, jointly
measurable contexts, per-context statistics and global joint distributions.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from ..exceptions import SpeckerKitError
from .scenario_core import PAIR_MEASUREMENTS, CorrelationVector

Number = Union[Fraction, float]
Context = Tuple[int, ...]
Outcome = Tuple[int, ...]


def is_float_valued(tables: Iterable[Iterable[Number]]) -> bool:
    return any(isinstance(v, float) for table in tables for v in table)


@dataclass(frozen=True)
class MarginalScenario:
    outcome_counts: Tuple[int, ...]
    contexts: Tuple[Context, ...]
    names: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.outcome_counts or any(k < 1 for k in self.outcome_counts):
            raise SpeckerKitError("every measurement needs a nonempty outcome set")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"M{i + 1}" for i in range(len(self.outcome_counts))))
        normalized = []
        for context in self.contexts:
            context = tuple(sorted(set(context)))
            if not context:
                raise SpeckerKitError("contexts must be nonempty")
            if context[0] < 0 or context[-1] >= len(self.outcome_counts):
                raise SpeckerKitError(f"context {context} names an unknown measurement")
            normalized.append(context)
        if not normalized:
            raise SpeckerKitError("a scenario needs at least one context")
        object.__setattr__(self, "contexts", tuple(normalized))

    @property
    def n(self) -> int:
        return len(self.outcome_counts)

    @staticmethod
    def context_label(context: Context) -> str:
        return ",".join(str(i) for i in context)

    def context_size(self, context: Context) -> int:
        size = 1
        for i in context:
            size *= self.outcome_counts[i]
        return size

    def context_outcomes(self, context: Context) -> List[Outcome]:
        return list(product(*(range(self.outcome_counts[i]) for i in context)))

    @property
    def joint_size(self) -> int:
        size = 1
        for k in self.outcome_counts:
            size *= k
        return size

    def joint_outcomes(self) -> List[Outcome]:
        return list(product(*(range(k) for k in self.outcome_counts)))

    @cached_property
    def is_specker(self) -> bool:
        return self.outcome_counts == (2, 2, 2) and set(self.contexts) == set(PAIR_MEASUREMENTS)


def specker_scenario() -> MarginalScenario:
    return MarginalScenario(outcome_counts=(2, 2, 2), contexts=PAIR_MEASUREMENTS)


@dataclass(frozen=True)
class ScenarioStats:
    """p(k_S|M_S;P) for every context S, in lexicographic outcome order."""

    scenario: MarginalScenario
    distributions: Mapping[Context, Tuple[Number, ...]] = field(compare=True)

    def marginal(self, context: Context, subset: Sequence[int]) -> Dict[Outcome, Number]:
        positions = [context.index(i) for i in subset]
        result: Dict[Outcome, Number] = {
            o: Fraction(0) for o in product(*(range(self.scenario.outcome_counts[i]) for i in subset))
        }
        for outcome, value in zip(self.scenario.context_outcomes(context), self.distributions[context]):
            key = tuple(outcome[p] for p in positions)
            result[key] = result[key] + value
        return result

    def to_correlation_vector(self) -> CorrelationVector:
        if not self.scenario.is_specker:
            raise SpeckerKitError("statistics do not belong to Specker's scenario")
        return CorrelationVector(pairs=tuple(
            tuple(Fraction(v) for v in self.distributions[context]) for context in PAIR_MEASUREMENTS
        ))

    def as_dict(self) -> dict:
        return {
            self.scenario.context_label(context): [str(v) for v in self.distributions[context]]
            for context in self.scenario.contexts
        }


def stats_from_correlation_vector(cv: CorrelationVector) -> ScenarioStats:
    return ScenarioStats(
        scenario=specker_scenario(),
        distributions={context: table for context, table in zip(PAIR_MEASUREMENTS, cv.pairs)},
    )


@dataclass(frozen=True)
class JointDistribution:
    """p(k_1,...,k_N|P) over the full product outcome set, in lexicographic order."""

    scenario: MarginalScenario
    probabilities: Tuple[Number, ...]

    def __post_init__(self):
        if len(self.probabilities) != self.scenario.joint_size:
            raise SpeckerKitError(
                f"joint distribution needs {self.scenario.joint_size} entries, got {len(self.probabilities)}"
            )
        if any(p < 0 for p in self.probabilities):
            raise SpeckerKitError("joint distribution has a negative entry")
        total = sum(self.probabilities)
        if (abs(total - 1) > 1e-12) if is_float_valued([self.probabilities]) else total != 1:
            raise SpeckerKitError(f"joint distribution sums to {total}")

    def support(self) -> List[Tuple[Outcome, Number]]:
        return [(o, p) for o, p in zip(self.scenario.joint_outcomes(), self.probabilities) if p]

    def marginal(self, context: Context) -> Tuple[Number, ...]:
        index = {o: k for k, o in enumerate(self.scenario.context_outcomes(context))}
        values: List[Number] = [Fraction(0)] * len(index)
        for outcome, p in zip(self.scenario.joint_outcomes(), self.probabilities):
            k = index[tuple(outcome[i] for i in context)]
            values[k] = values[k] + p
        return tuple(values)

    def marginal_stats(self) -> ScenarioStats:
        return ScenarioStats(
            scenario=self.scenario,
            distributions={context: self.marginal(context) for context in self.scenario.contexts},
        )

    def as_dict(self) -> dict:
        sep = "," if max(self.scenario.outcome_counts) > 10 else ""
        return {sep.join(map(str, o)): str(p) for o, p in self.support()}
