"""
Unsharp qubit measurements, pairwise joint POVMs and the search for quantum
violations of the noncontextuality inequalities.

Everything here is floating point. Correlations leave this module through
correlation_vector, which snaps them to rationals for the exact modules.
"""
import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from ..config import get_settings
from ..exceptions import (
    InternalConsistencyError,
    MarginalMismatch,
    NotJointlyMeasurable,
    QuantumStateError,
    SolverStall,
    SpeckerKitError,
)
from ..models import QuantumScanResult, RelabelledValue, ScanRow
from . import joint_povm
from .marginal_scenario import ScenarioStats, specker_scenario
from .scenario_core import (
    PAIR_LABELS,
    PAIR_MEASUREMENTS,
    CorrelationVector,
    SixParams,
    chain_violations,
    from_six_params,
    mix,
    snap_rational,
    table_from_six_params,
)
from .validation_service import validate, validate_stats

logger = logging.getLogger(__name__)

IDENTITY = np.eye(2, dtype=complex)
PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

STATE_TOLERANCE = 1e-12
EFFECT_TOLERANCE = 1e-10
MARGINAL_TOLERANCE = 1e-9
VIOLATION_TOLERANCE = 1e-8

OBJECTIVES = ("max_anticorrelation", "min_anticorrelation", "feasibility")

Vector = Tuple[float, float, float]


def _operator(scalar: float, vector) -> np.ndarray:
    """(scalar I + vector.sigma) / 2."""
    return (scalar * IDENTITY + np.tensordot(np.asarray(vector, dtype=float), PAULI, axes=1)) / 2


@dataclass(frozen=True)
class QubitState:
    matrix: np.ndarray = field(compare=False)

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.shape != (2, 2):
            raise QuantumStateError(f"density matrix must be 2x2, got shape {rho.shape}")
        if not np.allclose(rho, rho.conj().T, atol=STATE_TOLERANCE):
            raise QuantumStateError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > STATE_TOLERANCE:
            raise QuantumStateError(f"density matrix has trace {np.trace(rho).real:.6g}")
        if np.linalg.eigvalsh(rho).min() < -STATE_TOLERANCE:
            raise QuantumStateError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def from_bloch(cls, r) -> "QubitState":
        r = np.asarray(r, dtype=float)
        if r.shape != (3,) or np.linalg.norm(r) > 1 + STATE_TOLERANCE:
            raise QuantumStateError(f"Bloch vector must have three components and norm <= 1, got {r.tolist()}")
        return cls(_operator(1.0, r))

    @classmethod
    def maximally_mixed(cls) -> "QubitState":
        return cls(IDENTITY / 2)

    @property
    def bloch(self) -> np.ndarray:
        return np.real(np.einsum("ij,kji->k", self.matrix, PAULI))

    def expectation(self, operator: np.ndarray) -> float:
        return float(np.real(np.trace(self.matrix @ operator)))


@dataclass(frozen=True)
class UnsharpMeasurement:
    """Noisy spin measurement along ``direction`` with sharpness ``eta``."""

    direction: Vector
    eta: float

    def __post_init__(self):
        direction = tuple(float(v) for v in self.direction)
        if len(direction) != 3 or abs(math.sqrt(sum(v * v for v in direction)) - 1) > STATE_TOLERANCE:
            raise QuantumStateError(f"measurement direction must be a unit 3-vector, got {direction}")
        if not 0 <= self.eta <= 1:
            raise QuantumStateError(f"sharpness must lie in [0, 1], got {self.eta}")
        object.__setattr__(self, "direction", direction)
        object.__setattr__(self, "eta", float(self.eta))

    @property
    def vector(self) -> np.ndarray:
        return self.eta * np.asarray(self.direction)

    def flipped(self) -> "UnsharpMeasurement":
        return UnsharpMeasurement(direction=tuple(-v for v in self.direction), eta=self.eta)


def effect(measurement: UnsharpMeasurement, outcome: int) -> np.ndarray:
    """E_X = eta Pi_X + (1-eta) I/2, Pi_X the projector along (-1)^X n."""
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    sign = 1 - 2 * outcome
    projector = _operator(1.0, sign * np.asarray(measurement.direction))
    return measurement.eta * projector + (1 - measurement.eta) * IDENTITY / 2


def predictability(measurement: UnsharpMeasurement) -> float:
    """2 lambda_max(E_0) - 1."""
    return float(2 * np.linalg.eigvalsh(effect(measurement, 0)).max() - 1)


def maximizing_preparation(measurement: UnsharpMeasurement) -> QubitState:
    """The eigenstate of E_0 with the largest eigenvalue."""
    _, vectors = np.linalg.eigh(effect(measurement, 0))
    v = vectors[:, -1]
    return QubitState(np.outer(v, v.conj()))


def compatibility_margin(mi: UnsharpMeasurement, mj: UnsharpMeasurement) -> float:
    """2 - |b_i+b_j| - |b_i-b_j| for b = eta n; nonnegative iff the pair is jointly measurable."""
    bi, bj = mi.vector, mj.vector
    return float(2 - np.linalg.norm(bi + bj) - np.linalg.norm(bi - bj))


def pairwise_compatible(mi: UnsharpMeasurement, mj: UnsharpMeasurement) -> bool:
    return compatibility_margin(mi, mj) >= 0


def trine_directions() -> Tuple[Vector, Vector, Vector]:
    """Three coplanar unit vectors 120 degrees apart."""
    s = math.sqrt(3) / 2
    return ((1.0, 0.0, 0.0), (-0.5, s, 0.0), (-0.5, -s, 0.0))


def compatibility_threshold(directions: Sequence[Vector]) -> float:
    """Largest common eta for which every pair of directions is jointly measurable."""
    threshold = 1.0
    for i, j in PAIR_MEASUREMENTS:
        ni, nj = np.asarray(directions[i]), np.asarray(directions[j])
        threshold = min(threshold, 2 / (np.linalg.norm(ni + nj) + np.linalg.norm(ni - nj)))
    return float(threshold)


@dataclass(frozen=True)
class JointPOVM:
    """Effects G_XY of a joint measurement of ``first`` and ``second``, ordered 00, 01, 10, 11."""

    first: UnsharpMeasurement
    second: UnsharpMeasurement
    effects: np.ndarray = field(compare=False)
    # Tr[rho(G01+G10)] as reported by the solver, when the POVM came from an optimisation
    value: Optional[float] = None
    boundary: bool = False

    def effect(self, x: int, y: int) -> np.ndarray:
        return self.effects[2 * x + y]

    def validate(self, tolerance: float = EFFECT_TOLERANCE) -> "JointPOVM":
        for k, g in enumerate(self.effects):
            if np.linalg.eigvalsh(g).min() < -tolerance:
                raise QuantumStateError(f"joint effect {k:02b} is not positive semidefinite")
        if np.abs(self.effects.sum(axis=0) - IDENTITY).max() > tolerance:
            raise QuantumStateError("joint effects do not sum to the identity")
        first = self.effects[0] + self.effects[1]
        second = self.effects[0] + self.effects[2]
        if np.abs(first - effect(self.first, 0)).max() > MARGINAL_TOLERANCE:
            raise QuantumStateError("joint POVM does not reproduce the first measurement")
        if np.abs(second - effect(self.second, 0)).max() > MARGINAL_TOLERANCE:
            raise QuantumStateError("joint POVM does not reproduce the second measurement")
        return self

    def marginal(self, position: int) -> np.ndarray:
        """The outcome-0 effect of the measurement at ``position`` (0 or 1)."""
        return self.effects[0] + (self.effects[1] if position == 0 else self.effects[2])

    def probabilities(self, state: QubitState) -> Tuple[float, float, float, float]:
        return tuple(state.expectation(g) for g in self.effects)

    def anticorrelation(self, state: QubitState) -> float:
        return state.expectation(self.effects[1] + self.effects[2])

    def relabelled(self, position: int) -> "JointPOVM":
        """Swap the outcomes of the measurement at ``position``."""
        if position == 0:
            order, first, second = [2, 3, 0, 1], self.first.flipped(), self.second
        elif position == 1:
            order, first, second = [1, 0, 3, 2], self.first, self.second.flipped()
        else:
            raise ValueError(f"position must be 0 or 1, got {position}")
        return JointPOVM(first=first, second=second, effects=self.effects[order], boundary=self.boundary)


def _effects_from_cone_point(mi: UnsharpMeasurement, mj: UnsharpMeasurement, x: np.ndarray) -> np.ndarray:
    g00 = _operator(x[0], x[1:4])
    ei, ej = effect(mi, 0), effect(mj, 0)
    return np.array([g00, ei - g00, ej - g00, IDENTITY - ei - ej + g00])


def optimize_joint_povm(
    mi: UnsharpMeasurement,
    mj: UnsharpMeasurement,
    state: QubitState,
    objective: str = "max_anticorrelation",
) -> JointPOVM:
    """
    A joint POVM of ``mi`` and ``mj`` extremising Tr[rho(G01+G10)], or the analytic
    centre of all joint POVMs for ``feasibility``.
    Raises NotJointlyMeasurable or SolverStall.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}, expected one of {OBJECTIVES}")
    r = state.bloch
    # Tr[rho(G01+G10)] = 1 + r.(a_i+a_j)/2 - (g0 + r.g)
    offset = 1 + float(r @ (mi.vector + mj.vector)) / 2
    cost = np.append(1.0, r)
    if objective == "min_anticorrelation":
        cost = -cost
    elif objective == "feasibility":
        cost = np.zeros(4)

    program = joint_povm.cone_program(mi.vector, mj.vector)
    solution = joint_povm.solve(program, cost)
    x = solution.x
    povm = JointPOVM(
        first=mi,
        second=mj,
        effects=_effects_from_cone_point(mi, mj, x),
        value=offset - float(x[0] + r @ x[1:4]),
        boundary=solution.boundary,
    )
    return povm.validate()


def _check_shared_effects(povms: Sequence[JointPOVM]) -> None:
    # (pair index, position) of each measurement in the 12, 23, 13 ordering
    appearances = {1: ((0, 0), (2, 0)), 2: ((0, 1), (1, 0)), 3: ((1, 1), (2, 1))}
    for measurement, ((a, pa), (b, pb)) in appearances.items():
        deviation = float(np.abs(povms[a].marginal(pa) - povms[b].marginal(pb)).max())
        if deviation > MARGINAL_TOLERANCE:
            raise MarginalMismatch(measurement, deviation)


def _uniform_vector() -> CorrelationVector:
    quarter = Fraction(1, 4)
    return CorrelationVector(pairs=((quarter,) * 4,) * 3)


def snap_correlations(tables: Sequence[Sequence[float]]) -> CorrelationVector:
    """
    Float pairwise tables to an exact CorrelationVector: the six parameters are snapped to
    denominators <= the configured bound, and an entry pushed below zero by snapping is
    repaired by the smallest exact mixture with the uniform point.
    """
    settings = get_settings()
    limit = settings.snap_max_denominator
    t12, t23, t13 = tables
    floats = {
        "w12": t12[1] + t12[2], "w23": t23[1] + t23[2], "w13": t13[1] + t13[2],
        "p1": t12[0] + t12[1], "p2": t23[0] + t23[1], "p3": t13[0] + t13[2],
    }
    six = SixParams(**{
        name: min(max(snap_rational(value, limit, tolerance=1.0 / limit), Fraction(0)), Fraction(1))
        for name, value in floats.items()
    })
    if not chain_violations(six):
        return from_six_params(six)

    raw = table_from_six_params(six)
    worst = min(raw.flat())
    # (1-t) e + t/4 >= 0 for the most negative entry e
    t = -4 * worst / (1 - 4 * worst)
    if t > Fraction(10, limit):
        raise InternalConsistencyError(f"snapped correlations need a uniform admixture of {float(t):.3e}")
    logger.debug(f"[QUANTUM] snapping pushed an entry to {worst}; mixing in {t} of the uniform point")
    return validate(mix([raw, _uniform_vector()], [1 - t, t]).as_dict())


def correlation_vector(povms: Sequence[JointPOVM], state: QubitState) -> CorrelationVector:
    """v[ij][XY] = Tr(rho G^ij_XY) for the joint POVMs of pairs 12, 23 and 13, snapped to rationals."""
    if len(povms) != 3:
        raise ValueError("one joint POVM per pair (12, 23, 13) is required")
    _check_shared_effects(povms)
    tables = [povm.probabilities(state) for povm in povms]
    validate_stats(
        specker_scenario(),
        ScenarioStats(scenario=specker_scenario(), distributions=dict(zip(PAIR_MEASUREMENTS, tables))),
    )
    return snap_correlations(tables)


def _pair_povms(measurements: Sequence[UnsharpMeasurement], state: QubitState) -> Dict[str, Optional[JointPOVM]]:
    povms = {}
    for label, (i, j) in zip(PAIR_LABELS, PAIR_MEASUREMENTS):
        try:
            povms[label] = optimize_joint_povm(measurements[i], measurements[j], state)
        except NotJointlyMeasurable as e:
            logger.debug(f"[SCAN] pair {label} not jointly measurable (margin {e.margin:.3e})")
            povms[label] = None
    return povms


def best_r3(directions: Sequence[Vector], eta: float, state: QubitState) -> Optional[float]:
    """Largest R3 the state reaches with optimal pairwise joint POVMs; None if a pair is incompatible."""
    measurements = [UnsharpMeasurement(d, eta) for d in directions]
    povms = _pair_povms(measurements, state)
    if any(p is None for p in povms.values()):
        return None
    return sum(p.value for p in povms.values())


def _bloch_from_angles(angles) -> np.ndarray:
    theta, phi = angles
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])


def maximizing_state(directions: Sequence[Vector], eta: float, grid: int = 6, maxiter: int = 200) -> QubitState:
    """
    Pure state maximising R3: a (theta, phi) grid followed by Nelder-Mead refinement.
    R3 is convex in the Bloch vector, so pure states suffice.
    """
    def negative_r3(angles) -> float:
        try:
            value = best_r3(directions, eta, QubitState.from_bloch(_bloch_from_angles(angles)))
        except SolverStall as e:
            logger.debug(f"[SCAN] eta={eta}: skipping state at angles {tuple(angles)}: {e}")
            return math.inf
        return math.inf if value is None else -value

    candidates = [
        (theta, phi)
        for theta in np.linspace(0, math.pi, grid + 1)
        for phi in np.linspace(0, 2 * math.pi, 2 * grid, endpoint=False)
    ]
    start = min(candidates, key=negative_r3)
    if math.isinf(negative_r3(start)):
        return QubitState.from_bloch(_bloch_from_angles(start))
    refined = minimize(negative_r3, np.array(start), method="Nelder-Mead",
                       options={"xatol": 1e-6, "fatol": 1e-10, "maxiter": maxiter})
    best = refined.x if refined.fun <= negative_r3(start) else np.array(start)
    return QubitState.from_bloch(_bloch_from_angles(best))


def scan_point(
    directions: Sequence[Vector],
    eta: float,
    state: Optional[Sequence[float]] = None,
    optimize_state: bool = False,
) -> ScanRow:
    """One grid point of lsw_scan; solver failures land in the row's ``error``."""
    bound = 3 - eta
    try:
        if optimize_state:
            rho = maximizing_state(directions, eta)
        else:
            rho = QubitState.from_bloch(state if state is not None else (0.0, 0.0, 0.0))
        measurements = [UnsharpMeasurement(d, eta) for d in directions]
        povms = _pair_povms(measurements, rho)
        pair_feasible = {label: p is not None for label, p in povms.items()}
        row = ScanRow(
            eta=eta, feasible=all(pair_feasible.values()), pair_feasible=pair_feasible,
            bound=bound, violated=False, state=rho.bloch.tolist(),
        )
        if not row.feasible:
            return row

        ordered = [povms[label] for label in PAIR_LABELS]
        correlation_vector(ordered, rho)
        row.R3 = sum(p.value for p in ordered)
        row.r3_certified = sum(p.anticorrelation(rho) for p in ordered)
        row.violated = row.R3 > bound + VIOLATION_TOLERANCE

        # flipping n3, n1, n2 turns R3 into R0+2, R1+2, R2+2
        for label, flip in (("R0", 2), ("R1", 0), ("R2", 1)):
            flipped = [d if k != flip else tuple(-v for v in d) for k, d in enumerate(directions)]
            r3 = best_r3(flipped, eta, rho)
            value = None if r3 is None else r3 - 2
            row.relabelled[label] = RelabelledValue(
                value=value,
                bound=1 - eta,
                violated=value is not None and value > 1 - eta + VIOLATION_TOLERANCE,
            )
        return row
    except SpeckerKitError as e:
        logger.info(f"[SCAN] eta={eta}: {e}")
        return ScanRow(
            eta=eta, feasible=False, pair_feasible={}, bound=bound, violated=False,
            state=list(state) if state is not None else [], error=str(e),
        )


def lsw_scan(
    directions: Sequence[Vector],
    eta_grid: Sequence[float],
    state: Optional[Sequence[float]] = None,
    optimize_state: bool = False,
    workers: Optional[int] = None,
) -> QuantumScanResult:
    """Best achievable R3 against 3-eta over a sharpness grid; R0-R2 through relabelling."""
    directions = [tuple(float(v) for v in d) for d in directions]
    if len(directions) != 3:
        raise QuantumStateError("three measurement directions are required")
    for d in directions:
        UnsharpMeasurement(d, 0.0)
    if any(not 0 <= eta <= 1 for eta in eta_grid):
        raise QuantumStateError("sharpness grid must lie in [0, 1]")

    workers = workers or get_settings().workers
    logger.info(f"[SCAN] {len(eta_grid)} grid points, {workers} worker(s)")
    task = partial(scan_point, directions, state=state, optimize_state=optimize_state)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(task, eta_grid))
    else:
        rows = [task(eta) for eta in eta_grid]

    violating = [row.eta for row in rows if row.violated]
    logger.info(f"[SCAN] violation at {len(violating)} grid point(s)")
    return QuantumScanResult(
        directions=[list(d) for d in directions],
        compatibility_threshold=compatibility_threshold(directions),
        rows=rows,
        violating_etas=violating,
    )


CSV_COLUMNS = ("eta", "feasible", "R3", "r3_certified", "bound", "violated",
               "R0", "R1", "R2", "error")


def write_scan_csv(result: QuantumScanResult, path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for row in result.rows:
            relabelled = [row.relabelled[k].value if k in row.relabelled else None for k in ("R0", "R1", "R2")]
            writer.writerow([
                row.eta, row.feasible, row.R3, row.r3_certified, row.bound, row.violated,
                *relabelled, row.error or "",
            ])
