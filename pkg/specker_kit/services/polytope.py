"""
The Specker (no-disturbance) polytope: 12 vertices, the facet description of
its KS-noncontextual subpolytope, exact vertex decompositions and extremality.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Tuple

from ..exceptions import DecompositionError
from . import simplex
from .inequalities import relabel_many
from .scenario_core import (
    PAIR_LABELS,
    PAIR_MEASUREMENTS,
    CorrelationVector,
    SixParams,
)

logger = logging.getLogger(__name__)

DETERMINISTIC = "deterministic"
INDETERMINISTIC = "indeterministic"

HALF = Fraction(1, 2)
_CORRELATED = (HALF, Fraction(0), Fraction(0), HALF)
_ANTICORRELATED = (Fraction(0), HALF, HALF, Fraction(0))

# anticorrelated pairs of each indeterministic vertex
_INDETERMINISTIC_PATTERNS = {
    8: {"12"},
    9: {"23"},
    10: {"13"},
    11: {"12", "23", "13"},
}


@dataclass(frozen=True)
class Vertex:
    id: int
    kind: str
    cv: CorrelationVector

    @property
    def assignment(self) -> Tuple[int, int, int]:
        """(X1, X2, X3) of a deterministic vertex."""
        if self.kind != DETERMINISTIC:
            raise ValueError(f"vertex {self.id} is indeterministic")
        return ((self.id >> 2) & 1, (self.id >> 1) & 1, self.id & 1)


@dataclass(frozen=True)
class Facet:
    """``coefficients . (w12, w23, w13, p1, p2, p3) <= bound``."""

    label: str
    kind: str  # chain | ks
    coefficients: Tuple[int, int, int, int, int, int]
    bound: int

    def value(self, six: SixParams) -> Fraction:
        params = six.w + six.p
        return sum((c * v for c, v in zip(self.coefficients, params)), Fraction(0))

    def violated(self, six: SixParams) -> bool:
        return self.value(six) > self.bound


@dataclass(frozen=True)
class MembershipReport:
    member: bool
    violated: Tuple[str, ...]


@dataclass(frozen=True)
class ConvexDecomposition:
    weights: Tuple[Fraction, ...]

    def support(self) -> Dict[int, Fraction]:
        return {k: w for k, w in enumerate(self.weights) if w}


def deterministic_vector(assignment: Tuple[int, int, int]) -> CorrelationVector:
    tables = []
    for i, j in PAIR_MEASUREMENTS:
        table = [Fraction(0)] * 4
        table[2 * assignment[i] + assignment[j]] = Fraction(1)
        tables.append(tuple(table))
    return CorrelationVector(pairs=tuple(tables))


@lru_cache(maxsize=1)
def vertices() -> Tuple[Vertex, ...]:
    result: List[Vertex] = []
    for vid in range(8):
        assignment = ((vid >> 2) & 1, (vid >> 1) & 1, vid & 1)
        result.append(Vertex(id=vid, kind=DETERMINISTIC, cv=deterministic_vector(assignment)))
    for vid, anticorrelated in _INDETERMINISTIC_PATTERNS.items():
        tables = tuple(_ANTICORRELATED if label in anticorrelated else _CORRELATED for label in PAIR_LABELS)
        result.append(Vertex(id=vid, kind=INDETERMINISTIC, cv=CorrelationVector(pairs=tables)))
    return tuple(result)


def ks_vertices() -> Tuple[Vertex, ...]:
    return vertices()[:8]


@lru_cache(maxsize=1)
def facets() -> Tuple[Facet, ...]:
    result = []
    for k, (label, (i, j)) in enumerate(zip(PAIR_LABELS, PAIR_MEASUREMENTS)):
        def coeffs(w, pi, pj):
            c = [0] * 6
            c[k] = w
            c[3 + i] += pi
            c[3 + j] += pj
            return tuple(c)
        pi, pj, w = f"p{i + 1}", f"p{j + 1}", f"w{label}"
        result += [
            Facet(f"{pi}-{pj}<={w}", "chain", coeffs(-1, 1, -1), 0),
            Facet(f"{pj}-{pi}<={w}", "chain", coeffs(-1, -1, 1), 0),
            Facet(f"{w}<={pi}+{pj}", "chain", coeffs(1, -1, -1), 0),
            Facet(f"{pi}+{pj}<=2-{w}", "chain", coeffs(1, 1, 1), 2),
        ]
    result += [
        Facet("R3<=2", "ks", (1, 1, 1, 0, 0, 0), 2),
        Facet("R0<=0", "ks", (1, -1, -1, 0, 0, 0), 0),
        Facet("R1<=0", "ks", (-1, 1, -1, 0, 0, 0), 0),
        Facet("R2<=0", "ks", (-1, -1, 1, 0, 0, 0), 0),
    ]
    return tuple(result)


def in_ks_polytope(six: SixParams) -> MembershipReport:
    violated = tuple(f.label for f in facets() if f.violated(six))
    return MembershipReport(member=not violated, violated=violated)


def _vertex_system(cv: CorrelationVector):
    columns = [v.cv.flat() for v in vertices()]
    A = [[column[e] for column in columns] for e in range(12)]
    return A, list(cv.flat())


def decompose(cv: CorrelationVector) -> ConvexDecomposition:
    """Lexicographically smallest vertex weights (in id order) reproducing ``cv``."""
    A, b = _vertex_system(cv)
    result = simplex.solve_lexicographic(A, b, order=range(12))
    if result.status != simplex.OPTIMAL:
        raise DecompositionError(f"validated vector did not decompose over the 12 vertices ({result.status})")
    decomposition = ConvexDecomposition(weights=result.x)
    rebuilt = [sum((w * v.cv.flat()[e] for w, v in zip(result.x, vertices())), Fraction(0)) for e in range(12)]
    if rebuilt != b or sum(result.x) != 1:
        raise DecompositionError("vertex weights do not reproduce the vector")
    logger.debug(f"[POLYTOPE] decomposition support {decomposition.support()} ({result.pivots} pivots)")
    return decomposition


def is_extremal(cv: CorrelationVector) -> bool:
    """True iff no convex decomposition puts weight on any vertex other than ``cv`` itself."""
    A, b = _vertex_system(cv)
    others = [0 if v.cv == cv else -1 for v in vertices()]
    result = simplex.solve(A, b, others)
    if result.status != simplex.OPTIMAL:
        raise DecompositionError(f"validated vector did not decompose over the 12 vertices ({result.status})")
    return result.objective == 0


def vertex_id(cv: CorrelationVector) -> int:
    for v in vertices():
        if v.cv == cv:
            return v.id
    raise ValueError("vector is not a vertex")


def vertex_permutation(measurements: Iterable[int]) -> Tuple[int, ...]:
    """Image of each vertex id under the composed outcome flips."""
    measurements = tuple(measurements)
    return tuple(vertex_id(relabel_many(v.cv, measurements)) for v in vertices())
