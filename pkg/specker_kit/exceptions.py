from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Sequence, Tuple


class SpeckerKitError(Exception):
    """Base class for every error raised by the toolkit."""


@dataclass(frozen=True)
class Violation:
    """One violated constraint of a statistics table."""

    kind: str  # negative-entry | normalization | no-disturbance | range | parse
    message: str
    pair: Optional[str] = None
    outcome: Optional[str] = None
    measurement: Optional[int] = None
    marginals: Optional[Tuple[Fraction, Fraction]] = None

    def as_dict(self) -> dict:
        data = {"kind": self.kind, "message": self.message}
        if self.pair is not None:
            data["pair"] = self.pair
        if self.outcome is not None:
            data["outcome"] = self.outcome
        if self.measurement is not None:
            data["measurement"] = self.measurement
        if self.marginals is not None:
            data["marginals"] = [str(m) for m in self.marginals]
        return data


class StatisticsValidationError(SpeckerKitError, ValueError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = tuple(violations)
        summary = "; ".join(v.message for v in self.violations)
        super().__init__(f"{len(self.violations)} violated constraint(s): {summary}")


class ChainViolation(SpeckerKitError, ValueError):
    def __init__(self, chains: Sequence[str]):
        self.chains = tuple(chains)
        super().__init__(f"positivity chain(s) violated: {', '.join(self.chains)}")


class InfeasibleError(SpeckerKitError):
    """No joint distribution reproduces the given marginals."""

    def __init__(self, certificate: Any):
        self.certificate = certificate
        super().__init__("statistics admit no joint distribution")


class DecompositionError(SpeckerKitError, RuntimeError):
    """A validated vector failed to decompose over the vertices (internal bug)."""


class InternalConsistencyError(SpeckerKitError, RuntimeError):
    """Two independent computations of the same quantity disagree."""


class JointSpaceTooLarge(SpeckerKitError, ValueError):
    def __init__(self, size: int, limit: int):
        self.size = size
        self.limit = limit
        super().__init__(f"joint outcome space has {size} points, limit is {limit}")


class ModelError(SpeckerKitError, ValueError):
    """An ontological model violates one of its invariants."""


class NotFactorizable(SpeckerKitError, ValueError):
    def __init__(self, state_index: int, context: Tuple[int, ...]):
        self.state_index = state_index
        self.context = context
        super().__init__(
            f"joint response of ontic state {state_index} on context {context} "
            "is not the product of single responses"
        )


class InvalidDecomposition(SpeckerKitError, ValueError):
    """Pairwise response decomposition weights violate their linear constraints."""


class QuantumStateError(SpeckerKitError, ValueError):
    """A density matrix or measurement is not physical."""


class NotJointlyMeasurable(SpeckerKitError):
    def __init__(self, margin: float):
        self.margin = margin
        super().__init__(f"no joint POVM exists (infeasibility margin {margin:.3e})")


class SolverStall(SpeckerKitError, RuntimeError):
    def __init__(self, iterations: int, detail: str = ""):
        self.iterations = iterations
        super().__init__(f"joint POVM solver stalled after {iterations} iterations {detail}".strip())


class MarginalMismatch(SpeckerKitError, ValueError):
    def __init__(self, measurement: int, deviation: float):
        self.measurement = measurement
        self.deviation = deviation
        super().__init__(
            f"joint POVMs disagree on the effect of M{measurement} (deviation {deviation:.3e})"
        )


class DocumentError(SpeckerKitError, ValueError):
    """A JSON document could not be read; ``location`` points at the first problem."""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        self.detail = message
        super().__init__(f"{location}: {message}" if location else message)
