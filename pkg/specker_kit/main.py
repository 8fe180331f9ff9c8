import logging

from fastapi import FastAPI, HTTPException

from .config import get_settings
from .console import configure_logging
from .exceptions import ChainViolation, DocumentError, SpeckerKitError, StatisticsValidationError
from .models import CheckReport, CheckRequest, FineReport, FineRequest, VerticesReport
from .services import analysis_service, translation_tools
from .services.marginal_scenario import specker_scenario, stats_from_correlation_vector
from .services.scenario_core import parse_rational

configure_logging(get_settings().log_level)
logger = logging.getLogger(__name__)

app = FastAPI(
    title="Specker Kit",
    description="Exact contextuality analysis of Specker's scenario: vertices, inequality checks and joint distributions.",
)

INPUT_ERRORS = (DocumentError, StatisticsValidationError, ChainViolation)


def _unprocessable(e: Exception) -> HTTPException:
    detail = {"error": str(e)}
    if isinstance(e, StatisticsValidationError):
        detail["violations"] = [v.as_dict() for v in e.violations]
    if isinstance(e, DocumentError):
        detail["location"] = e.location
    logger.info(f"[VALIDATION FAILED] {e}")
    return HTTPException(status_code=422, detail=detail)


@app.get("/api/vertices", response_model=VerticesReport)
async def get_vertices():
    return VerticesReport(command="vertices", results=analysis_service.vertices_result())


@app.post("/api/check", response_model=CheckReport)
async def check(request: CheckRequest):
    logger.info("[REQUEST] check")
    try:
        cv = translation_tools.translate_correlation_document(request.correlations)
        eta0s = [parse_rational(e) for e in request.eta0]
        results = analysis_service.check_result(cv, eta0s)
    except (SpeckerKitError, ValueError) as e:
        # unreadable statistics or a predictability outside [0, 1]
        raise _unprocessable(e)
    return CheckReport(
        command="check",
        inputs={"eta0": [str(e) for e in eta0s]},
        results=results,
    )


@app.post("/api/fine", response_model=FineReport)
async def fine(request: FineRequest):
    logger.info("[REQUEST] fine")
    try:
        if request.scenario is not None:
            scenario, stats = translation_tools.translate_scenario_document(request.scenario)
        else:
            scenario = specker_scenario()
            stats = stats_from_correlation_vector(
                translation_tools.translate_correlation_document(request.correlations)
            )
    except INPUT_ERRORS as e:
        raise _unprocessable(e)

    results = analysis_service.fine_result(scenario, stats)
    # infeasibility is an answer, not a failure
    status = 3 if results.status == "infeasible" else 0
    return FineReport(command="fine", exit_status=status, results=results)
