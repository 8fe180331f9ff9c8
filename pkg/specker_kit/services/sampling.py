"""
Seeded random points of the Specker polytope and the audit that re-checks the
structural properties on them.

All randomness comes from numpy's PCG64 bit generator, so a seed fully
determines every sample.
"""
import logging
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from ..exceptions import ChainViolation, InfeasibleError
from ..models import AuditResult
from .fine_bridge import lp_find_joint, specker_p000_interval
from .inequalities import check_ks, check_nc, evaluate_vector
from .marginal_scenario import specker_scenario, stats_from_correlation_vector
from .polytope import in_ks_polytope, ks_vertices, vertices
from .scenario_core import (
    CorrelationVector,
    SixParams,
    from_six_params,
    mix,
    table_from_six_params,
    to_six_params,
)

logger = logging.getLogger(__name__)

GENERATOR = "PCG64"
ETA0_GRID: Tuple[Fraction, ...] = tuple(Fraction(k, 10) for k in range(11))


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_mixture(rng: np.random.Generator, pool: Sequence[CorrelationVector], max_weight: int = 12) -> CorrelationVector:
    """Convex mixture of a random subset of ``pool`` with integer weights, normalised exactly."""
    size = int(rng.integers(1, len(pool) + 1))
    chosen = rng.choice(len(pool), size=size, replace=False)
    weights = [int(w) for w in rng.integers(1, max_weight + 1, size=size)]
    total = sum(weights)
    return mix([pool[k] for k in chosen], [Fraction(w, total) for w in weights])


def random_point(rng: np.random.Generator) -> CorrelationVector:
    """A random point of the Specker polytope."""
    return random_mixture(rng, [v.cv for v in vertices()])


def random_ks_point(rng: np.random.Generator) -> CorrelationVector:
    """A random point of the KS-noncontextual subpolytope."""
    return random_mixture(rng, [v.cv for v in ks_vertices()])


def r3_boundary_point(rng: np.random.Generator) -> CorrelationVector:
    """A point with R3 = 2 exactly: a KS point pushed towards the OS box until it reaches the facet."""
    base = random_ks_point(rng)
    r3 = evaluate_vector(base).R3
    if r3 == 2:
        return base
    share = (2 - r3) / (3 - r3)
    return mix([base, vertices()[11].cv], [1 - share, share])


def random_six_tuple(rng: np.random.Generator, denominator: int = 100) -> SixParams:
    values = [Fraction(int(k), denominator) for k in rng.integers(0, denominator + 1, size=6)]
    return SixParams(*values)


def membership_verdicts(cv: CorrelationVector) -> Tuple[bool, bool, bool]:
    """(facet test, exact joint-distribution LP, nonempty p(000) interval)."""
    six = to_six_params(cv)
    facet = in_ks_polytope(six).member
    try:
        lp_find_joint(specker_scenario(), stats_from_correlation_vector(cv))
        lp = True
    except InfeasibleError:
        lp = False
    interval = specker_p000_interval(six) is not None
    return facet, lp, interval


def chain_verdicts(six: SixParams) -> Tuple[bool, bool]:
    """(from_six_params accepts, the rebuilt table has no negative entry)."""
    try:
        from_six_params(six)
        accepted = True
    except ChainViolation:
        accepted = False
    nonnegative = all(v >= 0 for v in table_from_six_params(six).flat())
    return accepted, nonnegative


def audit(samples: int, seed: int) -> AuditResult:
    """
    Counts exclusivity breaches (two KS or two NC inequalities violated at once),
    disagreements between the three membership oracles (random and R3 = 2 points)
    and between the chain test and table positivity.
    """
    rng = make_generator(seed)
    ks_double = nc_double = nc_only = disagreements = chain_disagreements = inside = 0
    logger.info(f"[AUDIT] {samples} samples from {GENERATOR}(seed={seed})")
    for k in range(samples):
        cv = random_point(rng)
        r = evaluate_vector(cv)
        ks = check_ks(r)
        if len(ks) > 1:
            ks_double += 1
        for eta0 in ETA0_GRID:
            nc = check_nc(r, eta0)
            if len(nc) > 1:
                nc_double += 1
            if nc and not ks:
                nc_only += 1

        point = cv if k % 2 == 0 else r3_boundary_point(rng)
        verdicts = membership_verdicts(point)
        if len(set(verdicts)) > 1:
            disagreements += 1
            logger.info(f"[AUDIT] membership oracles disagree at {point.as_dict()}: {verdicts}")
        inside += verdicts[0]

        accepted, nonnegative = chain_verdicts(random_six_tuple(rng))
        if accepted != nonnegative:
            chain_disagreements += 1

    return AuditResult(
        generator=GENERATOR,
        seed=seed,
        samples=samples,
        ks_double_violations=ks_double,
        nc_double_violations=nc_double,
        nc_without_ks=nc_only,
        membership_disagreements=disagreements,
        chain_disagreements=chain_disagreements,
        points_in_ks_polytope=inside,
    )
