"""
Specker-scenario statistics: the 12-entry pairwise table and its six-parameter form.

Pairs are always ordered (12), (23), (13) and outcomes (00, 01, 10, 11).
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

from ..config import get_settings
from ..exceptions import ChainViolation, SpeckerKitError

PAIR_LABELS: Tuple[str, str, str] = ("12", "23", "13")
# zero-based measurement indices of each pair
PAIR_MEASUREMENTS: Tuple[Tuple[int, int], ...] = ((0, 1), (1, 2), (0, 2))
OUTCOME_LABELS: Tuple[str, str, str, str] = ("00", "01", "10", "11")

PairTable = Tuple[Fraction, Fraction, Fraction, Fraction]


def outcome_index(x: int, y: int) -> int:
    return 2 * x + y


@dataclass(frozen=True)
class CorrelationVector:
    """
    The 12 probabilities p(XiXj|Mij;P). Build through validation_service.validate
    unless the table is valid by construction.
    """

    pairs: Tuple[PairTable, PairTable, PairTable]

    def pair(self, label: str) -> PairTable:
        return self.pairs[PAIR_LABELS.index(label)]

    def entry(self, label: str, x: int, y: int) -> Fraction:
        return self.pair(label)[outcome_index(x, y)]

    def flat(self) -> Tuple[Fraction, ...]:
        return tuple(v for table in self.pairs for v in table)

    def items(self) -> Iterator[Tuple[str, str, Fraction]]:
        for label, table in zip(PAIR_LABELS, self.pairs):
            for outcome, value in zip(OUTCOME_LABELS, table):
                yield label, outcome, value

    def as_dict(self) -> dict:
        return {label: [str(v) for v in table] for label, table in zip(PAIR_LABELS, self.pairs)}

    @classmethod
    def from_flat(cls, values: Sequence[Fraction]) -> "CorrelationVector":
        values = [Fraction(v) for v in values]
        return cls(pairs=(tuple(values[0:4]), tuple(values[4:8]), tuple(values[8:12])))


@dataclass(frozen=True)
class SixParams:
    """Anticorrelations w_ij and outcome-0 marginals p_i."""

    w12: Fraction
    w23: Fraction
    w13: Fraction
    p1: Fraction
    p2: Fraction
    p3: Fraction

    @property
    def w(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.w12, self.w23, self.w13)

    @property
    def p(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.p1, self.p2, self.p3)

    def as_dict(self) -> dict:
        return {name: str(getattr(self, name)) for name in ("w12", "w23", "w13", "p1", "p2", "p3")}


def to_six_params(cv: CorrelationVector) -> SixParams:
    t12, t23, t13 = cv.pairs
    return SixParams(
        w12=t12[1] + t12[2],
        w23=t23[1] + t23[2],
        w13=t13[1] + t13[2],
        p1=t12[0] + t12[1],
        p2=t23[0] + t23[1],
        p3=t13[0] + t13[2],
    )


def _pair_from_params(w: Fraction, pi: Fraction, pj: Fraction) -> PairTable:
    return (
        (pi + pj - w) / 2,
        (w + pi - pj) / 2,
        (w - pi + pj) / 2,
        1 - (w + pi + pj) / 2,
    )


def chain_violations(six: SixParams) -> List[str]:
    """Names of the failing chains |pi-pj| <= wij <= pi+pj <= 2-wij."""
    failing = []
    for label, w, (i, j) in zip(PAIR_LABELS, six.w, PAIR_MEASUREMENTS):
        pi, pj = six.p[i], six.p[j]
        if not (abs(pi - pj) <= w <= pi + pj <= 2 - w):
            failing.append(label)
    return failing


def table_from_six_params(six: SixParams) -> CorrelationVector:
    """The 12 entries the six parameters determine, without checking positivity."""
    tables = tuple(
        _pair_from_params(w, six.p[i], six.p[j]) for w, (i, j) in zip(six.w, PAIR_MEASUREMENTS)
    )
    return CorrelationVector(pairs=tables)


def from_six_params(six: SixParams) -> CorrelationVector:
    failing = chain_violations(six)
    if failing:
        raise ChainViolation([f"|p{l[0]}-p{l[1]}| <= w{l} <= p{l[0]}+p{l[1]} <= 2-w{l}" for l in failing])
    return table_from_six_params(six)


def marginals(cv: CorrelationVector) -> Tuple[Fraction, Fraction, Fraction]:
    six = to_six_params(cv)
    return six.p


def mix(vectors: Sequence[CorrelationVector], weights: Sequence[Fraction]) -> CorrelationVector:
    """Exact convex combination."""
    if len(vectors) != len(weights):
        raise ValueError("one weight per vector is required")
    weights = [Fraction(w) for w in weights]
    if any(w < 0 for w in weights) or sum(weights) != 1:
        raise ValueError("mixing weights must be nonnegative and sum to 1")
    flat = [Fraction(0)] * 12
    for cv, weight in zip(vectors, weights):
        if weight:
            flat = [acc + weight * v for acc, v in zip(flat, cv.flat())]
    return CorrelationVector.from_flat(flat)


def snap_rational(value, max_denominator: int = None, tolerance: float = None) -> Fraction:
    """
    Snap a float to the nearest fraction with bounded denominator, or refuse.

    Integers and Fractions pass through unchanged.
    """
    if isinstance(value, bool):
        raise SpeckerKitError(f"not a probability: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    settings = get_settings()
    max_denominator = max_denominator or settings.snap_max_denominator
    tolerance = settings.snap_tolerance if tolerance is None else tolerance
    try:
        snapped = Fraction(value).limit_denominator(max_denominator)
    except (ValueError, OverflowError, TypeError) as e:
        raise SpeckerKitError(f"not a probability: {value!r}") from e
    if abs(float(snapped) - float(value)) > tolerance:
        raise SpeckerKitError(
            f"{value!r} is not within {tolerance:g} of a fraction with denominator <= {max_denominator}"
        )
    return snapped


def parse_rational(value) -> Fraction:
    """Accepts "p/q" and decimal strings exactly; numbers go through snap_rational."""
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise SpeckerKitError(f"cannot read {value!r} as a rational") from e
    return snap_rational(value)
