import pytest
from fastapi.testclient import TestClient

from app.core.config.settings import reload_settings
from app.main import create_app

REACH_GOAL_DFA = """
props: goal
states: q1, q2
initial: q1
accepting: q2
default: self-loop
q1 --[goal]--> q2
"""


@pytest.fixture()
def client(settings):
    with TestClient(create_app()) as test_client:
        yield test_client


def _grid():
    return {'width': 3, 'height': 1, 'noise': 0.0, 'regions': {'goal': [[2, 0]]}}


def _solve_payload(**overrides):
    payload = {'dfa': REACH_GOAL_DFA, 'grid': _grid(), 'solver': 'tvi'}
    payload.update(overrides)
    return payload


def test_health(client):
    response = client.get('/health')

    assert response.status_code == 200
    assert response.json() == {'status': 'ok'}
    assert response.headers['X-Correlation-Id']


def test_metrics_enabled(client):
    client.get('/health')
    response = client.get('/metrics')

    assert response.status_code == 200
    assert 'http_requests_total' in response.text


def test_metrics_disabled(monkeypatch, settings):
    monkeypatch.setenv('PROMETHEUS_METRICS_ENABLED', '0')
    reload_settings()
    with TestClient(create_app()) as client:
        assert client.get('/metrics').status_code == 404


def test_decompose_returns_levels(client):
    response = client.post('/v1/decompose', json={'dfa': REACH_GOAL_DFA, 'grid': _grid()})

    assert response.status_code == 200
    body = response.json()
    assert body['levels'] == [[['q2']], [['q1']]]
    assert body['dropped_modes'] == []
    assert body['topo_id'] == {'q1': 2, 'q2': 1}


def test_solve_returns_summary(client):
    response = client.post('/v1/solve', json=_solve_payload())

    assert response.status_code == 200
    body = response.json()
    assert body['solver'] == 'tvi'
    assert body['product_states'] == 6
    assert body['initial_state'] == [[0, 0], 'q1']
    assert body['backup_count'] > 0
    assert len(body['level_backups']) == 2


def test_solve_accepts_explicit_config(client):
    config = {'operator': 'hardmax', 'epsilon': 1e-9, 'alpha': 1.0}
    response = client.post('/v1/solve', json=_solve_payload(solver='vi', config=config))

    assert response.status_code == 200
    assert response.json()['initial_value']['raw'] == pytest.approx(0.9)


@pytest.mark.parametrize(
    ('payload', 'code'),
    [
        (_solve_payload(solver='qlearning'), 'INVALID_SOLVER'),
        (_solve_payload(dfa='  '), 'INVALID_DFA'),
        (_solve_payload(grid=None), 'INVALID_GRID'),
        (_solve_payload(grid={'width': 0, 'height': 1}), 'INVALID_REQUEST'),
        (_solve_payload(config={'operator': 'argmax'}), 'INVALID_REQUEST'),
    ],
)
def test_solve_rejects_bad_requests(client, payload, code):
    response = client.post('/v1/solve', json=payload)

    assert response.status_code == 400
    body = response.json()
    assert body['code'] == code
    assert 'correlation_id' in body


def test_solve_rejects_large_products(monkeypatch, settings):
    monkeypatch.setenv('PLANNER_MAX_API_PRODUCT_STATES', '4')
    reload_settings()
    with TestClient(create_app()) as client:
        response = client.post('/v1/solve', json=_solve_payload())

    assert response.status_code == 413
    assert response.json()['code'] == 'PRODUCT_TOO_LARGE'


def test_bad_automaton_is_a_domain_error(client):
    response = client.post(
        '/v1/decompose',
        json={'dfa': 'isso nao e um automato', 'grid': _grid()},
        headers={'X-Correlation-Id': 'corr-123'},
    )

    assert response.status_code == 422
    body = response.json()
    assert body['code'] == 'DFA_PARSE_ERROR'
    assert body['correlation_id'] == 'corr-123'
    assert response.headers['X-Correlation-Id'] == 'corr-123'


def test_invalid_grid_is_a_domain_error(client):
    grid = _grid() | {'regions': {'goal': [[7, 0]]}}
    response = client.post('/v1/decompose', json={'dfa': REACH_GOAL_DFA, 'grid': grid})

    assert response.status_code == 422
    assert response.json()['code'] == 'MDP_ERROR'
