"""
The four KS inequalities and the four noncontextuality (NC) inequalities of
Specker's scenario, and outcome relabellings.

KS:  R3 <= 2,        R0, R1, R2 <= 0
NC:  R3 <= 3 - eta0, R0, R1, R2 <= 1 - eta0
Violations are strict and exact.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable

from .scenario_core import (
    PAIR_MEASUREMENTS,
    CorrelationVector,
    SixParams,
    to_six_params,
)

LABELS = ("R0", "R1", "R2", "R3")


@dataclass(frozen=True)
class RValues:
    R0: Fraction
    R1: Fraction
    R2: Fraction
    R3: Fraction

    def __getitem__(self, label: str) -> Fraction:
        return getattr(self, label)

    def as_dict(self) -> Dict[str, str]:
        return {label: str(self[label]) for label in LABELS}


@dataclass(frozen=True)
class Predictability:
    eta0: Fraction

    def __post_init__(self):
        if not 0 <= self.eta0 <= 1:
            raise ValueError(f"predictability must lie in [0, 1], got {self.eta0}")


def evaluate(six: SixParams) -> RValues:
    w12, w23, w13 = six.w
    return RValues(
        R0=w12 - w23 - w13,
        R1=w23 - w13 - w12,
        R2=w13 - w12 - w23,
        R3=w12 + w23 + w13,
    )


def evaluate_vector(cv: CorrelationVector) -> RValues:
    return evaluate(to_six_params(cv))


def ks_bounds() -> Dict[str, Fraction]:
    return {"R0": Fraction(0), "R1": Fraction(0), "R2": Fraction(0), "R3": Fraction(2)}


def nc_bounds(eta0) -> Dict[str, Fraction]:
    eta0 = Predictability(Fraction(eta0)).eta0
    return {"R0": 1 - eta0, "R1": 1 - eta0, "R2": 1 - eta0, "R3": 3 - eta0}


def _violated(r: RValues, bounds: Dict[str, Fraction]) -> FrozenSet[str]:
    return frozenset(label for label in LABELS if r[label] > bounds[label])


def check_ks(r: RValues) -> FrozenSet[str]:
    return _violated(r, ks_bounds())


def check_nc(r: RValues, eta0) -> FrozenSet[str]:
    return _violated(r, nc_bounds(eta0))


def violation_margins(r: RValues, eta0=None) -> Dict[str, Fraction]:
    """Signed ``R - bound`` per inequality; positive means violated. KS bounds when eta0 is None."""
    bounds = ks_bounds() if eta0 is None else nc_bounds(eta0)
    return {label: r[label] - bounds[label] for label in LABELS}


def relabel(cv: CorrelationVector, measurement: int) -> CorrelationVector:
    """Swap the outcomes 0 <-> 1 of measurement 1, 2 or 3 in every pair containing it."""
    if measurement not in (1, 2, 3):
        raise ValueError(f"measurement index must be 1, 2 or 3, got {measurement}")
    m = measurement - 1
    tables = []
    for (i, j), table in zip(PAIR_MEASUREMENTS, cv.pairs):
        flip_x, flip_y = int(i == m), int(j == m)
        tables.append(tuple(
            table[2 * (x ^ flip_x) + (y ^ flip_y)] for x in (0, 1) for y in (0, 1)
        ))
    return CorrelationVector(pairs=tuple(tables))


def relabel_many(cv: CorrelationVector, measurements: Iterable[int]) -> CorrelationVector:
    for m in measurements:
        cv = relabel(cv, m)
    return cv
