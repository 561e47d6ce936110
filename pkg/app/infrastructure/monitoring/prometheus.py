from __future__ import annotations

from prometheus_client import Counter, Gauge, Histogram

http_requests_total = Counter(
    'http_requests_total',
    'Total de requisicoes HTTP por metodo, path e classe de status.',
    ['method', 'path', 'status_class'],
)

http_request_duration_seconds = Histogram(
    'http_request_duration_seconds',
    'Duracao das requisicoes HTTP em segundos.',
    ['method', 'path'],
    buckets=(0.005, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5, 1, 2.5, 5, 10, 30),
)

http_inflight_requests = Gauge(
    'http_inflight_requests',
    'Quantidade de requisicoes HTTP em andamento.',
)

http_exceptions_total = Counter(
    'http_exceptions_total',
    'Total de excecoes HTTP por metodo, path e tipo.',
    ['method', 'path', 'exception_type'],
)

bellman_backups_total = Counter(
    'bellman_backups_total',
    'Total de backups de Bellman executados por solver.',
    ['solver'],
)

solver_duration_seconds = Histogram(
    'solver_duration_seconds',
    'Duracao das execucoes de solver em segundos.',
    ['solver'],
    buckets=(0.01, 0.05, 0.1, 0.25, 0.5, 1, 2.5, 5, 10, 30, 60, 120, 300, 600),
)

tadp_epochs_total = Counter(
    'tadp_epochs_total',
    'Total de epocas internas executadas pelo TADP.',
)

tadp_level_duration_seconds = Histogram(
    'tadp_level_duration_seconds',
    'Duracao da solucao de cada nivel pelo TADP em segundos.',
    buckets=(0.1, 0.5, 1, 2.5, 5, 10, 30, 60, 120, 300, 600),
)

rollouts_total = Counter(
    'rollouts_total',
    'Total de simulacoes de politica por resultado.',
    ['result'],
)

_ALLOWED_EXCEPTION_TYPES = {
    'ApiValidationError',
    'RequestValidationError',
    'HTTPException',
    'DfaParseError',
    'DfaValidationError',
    'UnsatisfiableTaskError',
    'MdpError',
    'ProductError',
    'ConvergenceError',
    'DivergenceError',
    'SimulationError',
    'ConfigError',
    'ValueError',
    'TypeError',
    'RuntimeError',
    'UnknownError',
}


def status_class_from_code(status_code: int) -> str:
    if 200 <= status_code < 300:
        return '2xx'
    if 400 <= status_code < 500:
        return '4xx'
    if 500 <= status_code < 600:
        return '5xx'
    return 'other'


def bounded_exception_type(value: str | None) -> str:
    candidate = str(value or '').strip()[:64]
    if not candidate:
        return 'UnknownError'
    if candidate in _ALLOWED_EXCEPTION_TYPES:
        return candidate
    return 'OtherError'
