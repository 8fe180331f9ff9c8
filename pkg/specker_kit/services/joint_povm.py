"""
Second-order-cone solver behind qubit joint measurability.

For a pair of unsharp qubit measurements with vectors a_i = eta_i n_i and
a_j = eta_j n_j, write G00 = (g0 I + g.sigma)/2. The marginal constraints fix

    G01 = E^i_0 - G00,  G10 = E^j_0 - G00,  G11 = I - E^i_0 - E^j_0 + G00,

and a 2x2 Hermitian (t I + u.sigma)/2 is PSD iff t >= |u|. The four effects are
therefore PSD iff x = (g0, g) lies in four Lorentz cones

    g0 >= |g|,  1-g0 >= |g-a_i|,  1-g0 >= |g-a_j|,  g0 >= |g-a_i-a_j|.

Linear objectives over this set are minimised with a log-barrier Newton method.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..exceptions import NotJointlyMeasurable, SolverStall

logger = logging.getLogger(__name__)

# barrier parameter: degree 2 per Lorentz cone
BARRIER_DEGREE = 8
GAP_TOLERANCE = 1e-10
BOUNDARY_TOLERANCE = 1e-10
GROWTH = 10.0
MAX_NEWTON_STEPS = 2000
# relative floor for Hessian eigenvalues in the Newton solve
HESSIAN_FLOOR = 1e-13
# a stalled centring still counts as an optimum once the gap is this small
STALL_GAP = 1e-7


@dataclass(frozen=True)
class ConeProgram:
    """Cone k reads offsets[k] + slopes[k] * g0 >= |g - centers[k]|."""

    offsets: np.ndarray
    slopes: np.ndarray
    centers: np.ndarray


@dataclass(frozen=True)
class ConeSolution:
    x: np.ndarray
    objective: float
    gap: float
    newton_steps: int
    # the feasible set has no interior; x is feasible to BOUNDARY_TOLERANCE only
    boundary: bool = False


def cone_program(a_i, a_j) -> ConeProgram:
    a_i = np.asarray(a_i, dtype=float)
    a_j = np.asarray(a_j, dtype=float)
    return ConeProgram(
        offsets=np.array([0.0, 1.0, 1.0, 0.0]),
        slopes=np.array([1.0, -1.0, -1.0, 1.0]),
        centers=np.stack([np.zeros(3), a_i, a_j, a_i + a_j]),
    )


def cone_residuals(program: ConeProgram, x: np.ndarray, slack: float = 0.0) -> np.ndarray:
    """t_k - |u_k| for every cone; all nonnegative iff x is feasible."""
    t = program.offsets + program.slopes * x[0] + slack
    return t - np.linalg.norm(x[1:4] - program.centers, axis=1)


class _Barrier:
    """-sum log(t_k^2 - |u_k|^2), over x or over (x, s) when slack is on."""

    def __init__(self, program: ConeProgram, slack: bool):
        self.program = program
        self.slack = slack
        self.size = 5 if slack else 4
        # row k: gradient of t_k in z
        self.directions = np.zeros((len(program.slopes), self.size))
        self.directions[:, 0] = program.slopes
        if slack:
            self.directions[:, 4] = 1.0
        self.block = np.zeros((self.size, self.size))
        self.block[1:4, 1:4] = np.eye(3)

    def _split(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        t = self.program.offsets + self.program.slopes * z[0]
        if self.slack:
            t = t + z[4]
        u = z[1:4] - self.program.centers
        return t, u, np.linalg.norm(u, axis=1)

    def value(self, z: np.ndarray) -> float:
        t, _, norms = self._split(z)
        if np.any(t <= norms):
            return np.inf
        return float(-np.sum(np.log((t - norms) * (t + norms))))

    def derivatives(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        t, u, norms = self._split(z)
        B = self.directions
        f = (t - norms) * (t + norms)
        df = 2.0 * t[:, None] * B
        df[:, 1:4] -= 2.0 * u
        grad = -(df / f[:, None]).sum(axis=0)
        # sum_k df df^T / f^2 - (2 b b^T - 2 block) / f
        hess = (df.T / f ** 2) @ df - 2.0 * (B.T / f) @ B + 2.0 * np.sum(1.0 / f) * self.block
        return grad, hess


def _newton_direction(hess: np.ndarray, g: np.ndarray, steps: int) -> np.ndarray:
    """
    -H^-1 g with the eigenvalues of H clipped at HESSIAN_FLOOR times the largest one.
    Near a degenerate optimal face H is ill-conditioned like tau^2.
    """
    if not (np.all(np.isfinite(hess)) and np.all(np.isfinite(g))):
        raise SolverStall(steps, "(non-finite Newton system)")
    try:
        eigenvalues, vectors = np.linalg.eigh(hess)
    except np.linalg.LinAlgError as e:
        raise SolverStall(steps, "(singular Newton system)") from e
    floor = max(float(eigenvalues.max()), 1.0) * HESSIAN_FLOOR
    return -vectors @ ((vectors.T @ g) / np.maximum(eigenvalues, floor))


def _center(barrier: _Barrier, z: np.ndarray, c: np.ndarray, tau: float, budget: int) -> Tuple[np.ndarray, int]:
    """Newton's method on tau c.z + barrier(z) with backtracking; returns the centre and steps used."""
    steps = 0
    while True:
        grad, hess = barrier.derivatives(z)
        g = tau * c + grad
        delta = _newton_direction(hess, g, steps)
        decrement = float(-g @ delta)
        if decrement / 2.0 <= 1e-10:
            return z, steps
        if steps >= budget:
            raise SolverStall(steps)

        current = barrier.value(z)
        step = 1.0
        while True:
            trial = z + step * delta
            change = tau * float(c @ (step * delta)) + barrier.value(trial) - current
            if np.isfinite(change) and change <= -0.25 * step * decrement:
                break
            step *= 0.5
            if step < 1e-16:
                # roundoff floor: no further descent is measurable
                return z, steps
        z = trial
        steps += 1


def _phase_one(program: ConeProgram) -> Tuple[np.ndarray, bool, int]:
    """
    Minimises s subject to t_k + s >= |u_k|. Returns a strictly feasible x, or
    a boundary point when the optimum is 0 within tolerance.
    """
    barrier = _Barrier(program, slack=True)
    x0 = np.array([0.5, 0.0, 0.0, 0.0])
    s0 = float(np.max(-cone_residuals(program, x0))) + 1.0
    z = np.append(x0, s0)
    c = np.zeros(5)
    c[4] = 1.0
    tau = 1.0
    used = 0
    while True:
        z, steps = _center(barrier, z, c, tau, MAX_NEWTON_STEPS - used)
        used += steps
        s = float(z[4])
        gap = BARRIER_DEGREE / tau
        if s < 0:
            logger.debug(f"[POVM] phase I found an interior point (s={s:.3e}) after {used} Newton steps")
            return z[:4], False, used
        if s - gap > 0:
            raise NotJointlyMeasurable(margin=s - gap)
        if gap <= GAP_TOLERANCE:
            if s <= BOUNDARY_TOLERANCE:
                logger.debug(f"[POVM] feasible set has empty interior (s={s:.3e})")
                return z[:4], True, used
            raise NotJointlyMeasurable(margin=s)
        tau *= GROWTH


def solve(program: ConeProgram, c) -> ConeSolution:
    """
    Minimises c.x over the cones. A zero objective returns the analytic centre.
    Raises NotJointlyMeasurable when the cones do not intersect.
    """
    c = np.asarray(c, dtype=float)
    x, boundary, used = _phase_one(program)
    if boundary:
        return ConeSolution(x=x, objective=float(c @ x), gap=0.0, newton_steps=used, boundary=True)

    barrier = _Barrier(program, slack=False)
    if not np.any(c):
        x, steps = _center(barrier, x, c, 1.0, MAX_NEWTON_STEPS - used)
        return ConeSolution(x=x, objective=0.0, gap=0.0, newton_steps=used + steps)

    tau = 1.0
    gap = np.inf
    while True:
        try:
            x, steps = _center(barrier, x, c, tau, MAX_NEWTON_STEPS - used)
        except SolverStall as e:
            if gap > STALL_GAP:
                raise
            logger.debug(f"[POVM] keeping the centre at gap {gap:.1e}: {e}")
            break
        used += steps
        gap = BARRIER_DEGREE / tau
        if gap <= GAP_TOLERANCE:
            break
        tau *= GROWTH
    logger.debug(f"[POVM] optimum {float(c @ x):.12f} (gap {gap:.1e}) after {used} Newton steps")
    return ConeSolution(x=x, objective=float(c @ x), gap=gap, newton_steps=used)
