from __future__ import annotations

import logging
from time import perf_counter
from typing import Any

from fastapi import APIRouter, Body, Depends

from app.api.v1.dependencies.request_context import get_correlation_id, get_planner_settings
from app.application.dtos.planning import ExactSolverConfig, validate_decompose_payload, validate_solve_payload
from app.application.use_cases.decompose_task import DecomposeTaskUseCase
from app.application.use_cases.solve_exact import SolveExactUseCase
from app.core.config.settings import Settings
from app.core.errors.http_exceptions import ApiValidationError
from app.domain.services.mdp_service import build_grid_world, validate_grid_spec
from app.infrastructure.io.dfa_loader import parse_dfa

logger = logging.getLogger(__name__)

router = APIRouter(prefix='/v1', tags=['planning'])


def _load_problem(dfa_text: str, grid_config):
    spec = grid_config.to_spec()
    validate_grid_spec(spec)
    return build_grid_world(spec), parse_dfa(dfa_text)


@router.post('/decompose')
def decompose_task(
    payload: dict[str, Any] = Body(...),
    correlation_id: str = Depends(get_correlation_id),
) -> dict[str, Any]:
    request = validate_decompose_payload(payload)
    mdp, dfa = _load_problem(request.dfa, request.grid)
    result = DecomposeTaskUseCase().execute(mdp=mdp, dfa=dfa, dependency=request.dependency)
    logger.info(
        'Decomposicao via API concluida. correlation_id=%s meta_modos=%s ms=%.2f',
        correlation_id,
        len(result.decomposition.meta_modes),
        result.timings_ms['decompose'],
    )
    return result.payload


@router.post('/solve')
def solve_task(
    payload: dict[str, Any] = Body(...),
    correlation_id: str = Depends(get_correlation_id),
    settings: Settings = Depends(get_planner_settings),
) -> dict[str, Any]:
    started = perf_counter()
    request = validate_solve_payload(payload)
    mdp, dfa = _load_problem(request.dfa, request.grid)

    product_states = len(mdp.states) * len(dfa.states)
    if product_states > settings.max_api_product_states:
        raise ApiValidationError(
            413,
            f'Produto grande demais para a API. estados={product_states} limite={settings.max_api_product_states}',
            'PRODUCT_TOO_LARGE',
        )

    config = request.config or ExactSolverConfig.from_settings(settings)
    result = SolveExactUseCase(config).execute(solver=request.solver, mdp=mdp, dfa=dfa)
    logger.info(
        'Solucao via API concluida. correlation_id=%s solver=%s backups=%s ms_total=%.2f',
        correlation_id,
        request.solver,
        result.table.backup_count,
        (perf_counter() - started) * 1000.0,
    )
    return result.summary()
