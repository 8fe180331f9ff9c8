"""
Builds the report payloads shared by the command line and the HTTP app.
"""
import logging
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from ..console import log_json
from ..exceptions import InfeasibleError, InternalConsistencyError
from ..models import (
    CertificateModel,
    CheckResult,
    DecomposeResult,
    FineResult,
    MembershipModel,
    NCCheck,
    OntmaxResult,
    RelabelResult,
    VertexModel,
    VerticesResult,
)
from .fine_bridge import factorizability_check, find_joint, specker_p000_interval
from .inequalities import check_ks, check_nc, evaluate_vector, relabel_many, violation_margins
from .marginal_scenario import MarginalScenario, ScenarioStats
from .ontmodel import (
    FiniteOntologicalModel,
    model_stats,
    noncontextual_max_R_mixed,
    noncontextual_optimum,
)
from .polytope import decompose, in_ks_polytope, is_extremal, vertices
from .scenario_core import CorrelationVector, to_six_params
from .validation_service import validate_stats

logger = logging.getLogger(__name__)


def check_result(cv: CorrelationVector, eta0s: Iterable[Fraction] = ()) -> CheckResult:
    six = to_six_params(cv)
    r = evaluate_vector(cv)
    membership = in_ks_polytope(six)
    nc = [
        NCCheck(
            eta0=str(eta0),
            violations=sorted(check_nc(r, eta0)),
            margins={label: str(m) for label, m in violation_margins(r, eta0).items()},
        )
        for eta0 in eta0s
    ]
    result = CheckResult(
        pairs=cv.as_dict(),
        six=six.as_dict(),
        r_values=r.as_dict(),
        ks_violations=sorted(check_ks(r)),
        nc=nc,
        polytope=MembershipModel(member=membership.member, violated=list(membership.violated)),
    )
    log_json(logger, result.model_dump(), "CHECK")
    return result


def vertices_result() -> VerticesResult:
    return VerticesResult(vertices=[
        VertexModel(
            id=v.id,
            kind=v.kind,
            pairs=v.cv.as_dict(),
            six=to_six_params(v.cv).as_dict(),
            ks_violations=sorted(check_ks(evaluate_vector(v.cv))),
        )
        for v in vertices()
    ])


def decompose_result(cv: CorrelationVector) -> DecomposeResult:
    decomposition = decompose(cv)
    return DecomposeResult(
        weights=[str(w) for w in decomposition.weights],
        support={str(vid): str(w) for vid, w in decomposition.support().items()},
        extremal=is_extremal(cv),
    )


def _label(outcome: Sequence[int]) -> str:
    return "".join(map(str, outcome))


def fine_result(scenario: MarginalScenario, stats: ScenarioStats) -> FineResult:
    """The joint distribution, or the verified infeasibility certificate."""
    try:
        joint = find_joint(scenario, stats)
    except InfeasibleError as e:
        certificate = e.certificate
        if not certificate.verify(stats):
            raise InternalConsistencyError("infeasibility certificate failed independent verification")
        logger.info(f"[FINE] No joint distribution: certificate value {certificate.value} > bound {certificate.bound}")
        return FineResult(
            status="infeasible",
            stats=stats.as_dict(),
            certificate=CertificateModel(**certificate.as_dict(scenario)),
        )

    interval = None
    if scenario.is_specker:
        found = specker_p000_interval(to_six_params(stats.to_correlation_vector()))
        interval = [str(found.lower), str(found.upper)]
    logger.info(f"[FINE] Joint distribution found with {len(joint.support())} support point(s)")
    return FineResult(status="feasible", stats=stats.as_dict(), joint=joint.as_dict(), p000_interval=interval)


def model_fine_result(model: FiniteOntologicalModel) -> FineResult:
    """Joint-distribution analysis of the statistics a model predicts, with its model flags."""
    stats = validate_stats(model.scenario, model_stats(model))
    result = fine_result(model.scenario, stats)
    result.deterministic = model.deterministic
    result.factorizable = factorizability_check(model)
    return result


def ontmax_result(which: str, eta: Optional[Fraction] = None, etas: Optional[Sequence[Fraction]] = None) -> OntmaxResult:
    if etas is not None and len(set(etas)) > 1:
        optimum = noncontextual_max_R_mixed(which, etas)
        research = True
    else:
        optimum = noncontextual_optimum(which, etas[0] if etas else eta)
        research = False
    return OntmaxResult(
        which=optimum.which,
        etas=[str(e) for e in optimum.etas],
        value=str(optimum.value),
        assignments=[_label(a) for a in optimum.assignments],
        closed_form=None if optimum.closed_form is None else str(optimum.closed_form),
        research_mode=research,
    )


def relabel_result(cv: CorrelationVector, measurements: Sequence[int]) -> RelabelResult:
    relabelled = relabel_many(cv, measurements)
    return RelabelResult(
        measurements=list(measurements),
        pairs=relabelled.as_dict(),
        six=to_six_params(relabelled).as_dict(),
        r_values=evaluate_vector(relabelled).as_dict(),
    )
