from pathlib import Path

import pytest

from app.core.config.settings import reload_settings
from app.domain.entities.mdp import GridWorldSpec
from app.domain.services.mdp_service import build_grid_world
from app.infrastructure.io.dfa_loader import load_dfa, parse_dfa
from app.infrastructure.io.mdp_loader import load_grid_world

RESOURCES = Path(__file__).resolve().parents[2] / 'resources'

REACH_GOAL_DFA = """
props: goal
states: q1, q2
initial: q1
accepting: q2
default: self-loop
q1 --[goal]--> q2
"""


@pytest.fixture()
def settings(monkeypatch, tmp_path):
    monkeypatch.setenv('PLANNER_OUTPUT_DIR', str(tmp_path / 'out'))
    monkeypatch.setenv('PROMETHEUS_METRICS_ENABLED', '1')
    yield reload_settings()
    reload_settings()


@pytest.fixture(scope='session')
def case_dfa():
    return load_dfa(RESOURCES / 'dfa' / 'case_study.dfa')


@pytest.fixture(scope='session')
def sequencing_dfa():
    return load_dfa(RESOURCES / 'dfa' / 'sequencing.dfa')


@pytest.fixture(scope='session')
def reach_dfa():
    return parse_dfa(REACH_GOAL_DFA)


@pytest.fixture(scope='session')
def case_world():
    return load_grid_world(RESOURCES / 'worlds' / 'case_study_10x10.json')


@pytest.fixture(scope='session')
def corridor():
    return build_grid_world(GridWorldSpec(width=3, height=1, noise=0.0, regions={'goal': {(2, 0)}}))


@pytest.fixture(scope='session')
def single_cell():
    return build_grid_world(GridWorldSpec(width=1, height=1, noise=0.0, regions={'goal': {(0, 0)}}))


@pytest.fixture(scope='session')
def small_world():
    """5x5 with a region per case-study proposition and one obstacle."""
    spec = GridWorldSpec(
        width=5,
        height=5,
        noise=0.03,
        regions={
            'a': {(0, 4)},
            'b': {(4, 0)},
            'c': {(2, 2)},
            'd': {(4, 4)},
            'goal': {(2, 4)},
        },
        obstacles={(1, 1)},
    )
    return build_grid_world(spec)
