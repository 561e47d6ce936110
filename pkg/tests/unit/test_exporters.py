import csv
import json

import numpy as np
import pytest

from app.domain.entities.approx import ValueApprox
from app.domain.entities.simulation import Trajectory, TrajectoryStep
from app.domain.exceptions import SimulationError
from app.domain.services.adp_solver import ConvergenceRecord, build_kernel_basis
from app.domain.services.decomposition_service import decompose
from app.domain.services.product_service import build_product
from app.infrastructure.io.exporters import (
    BENCH_COLUMNS,
    dump_product,
    export_bench,
    export_condensation_dot,
    export_convergence_csv,
    export_heatmap,
    export_mode_heatmaps,
    export_theta_json,
    export_trajectories_csv,
    product_mode_values,
)


def _rows(path):
    with open(path, encoding='utf-8', newline='') as handle:
        return list(csv.reader(handle))


def test_heatmap_rows_follow_y(tmp_path):
    path = export_heatmap(np.arange(6.0), (3, 2), tmp_path / 'maps' / 'h.csv', decimals=1)

    assert path.read_text(encoding='utf-8').splitlines() == ['0.0,1.0,2.0', '3.0,4.0,5.0']


def test_constant_values_give_a_constant_heatmap(tmp_path):
    path = export_heatmap(np.full(4, 0.25), (2, 2), tmp_path / 'flat.csv', decimals=2)

    assert _rows(path) == [['0.25', '0.25'], ['0.25', '0.25']]


def test_heatmap_size_mismatch(tmp_path):
    with pytest.raises(SimulationError):
        export_heatmap([1.0, 2.0], (3, 2), tmp_path / 'h.csv')


def test_mode_values_mark_pruned_states(corridor, reach_dfa):
    product = build_product(corridor, reach_dfa, 0.9, 2.0, prune_unreachable=True)
    values = np.arange(product.size, dtype=float)
    q2 = product_mode_values(product, values, 'q2')

    assert np.isnan(q2[0]) and np.isnan(q2[1])
    assert q2[2] == values[product.index_of(((2, 0), 'q2'))]


def test_mode_heatmaps_one_file_per_mode(tmp_path):
    paths = export_mode_heatmaps({'q2': np.ones(3), 'q1': np.zeros(3)}, (3, 1), tmp_path)

    assert [path.name for path in paths] == ['heatmap_q1.csv', 'heatmap_q2.csv']
    assert paths[1].read_text(encoding='utf-8') == '1.000000,1.000000,1.000000\n'


def test_convergence_csv(tmp_path):
    trace = [
        ConvergenceRecord(epoch=0, level=1, state=((1, 0), 'q1'), value=0.5),
        ConvergenceRecord(epoch=1, level=1, state=((1, 0), 'q1'), value=0.75),
    ]
    rows = _rows(export_convergence_csv(trace, ('q2', 'q1'), tmp_path / 'convergence.csv'))

    assert rows[0] == ['epoch', 'level', 'state', 'value']
    assert rows[1] == ['0', '1', '(1,0,1)', '0.500000']
    assert rows[2][3] == '0.750000'


def test_trajectories_csv_ends_each_run_with_final_state(tmp_path):
    trajectory = Trajectory(
        start=((0, 0), 'q1'),
        steps=(
            TrajectoryStep(state=((0, 0), 'q1'), action='R', reward=0.0),
            TrajectoryStep(state=((1, 0), 'q1'), action='R', reward=1.0),
        ),
        final=((2, 0), 'q2'),
        terminated='accepting',
    )
    rows = _rows(export_trajectories_csv([trajectory, trajectory], tmp_path / 'runs.csv'))

    assert rows[0] == ['run', 't', 'x', 'y', 'mode', 'action', 'reward']
    assert rows[2] == ['0', '1', '1', '0', 'q1', 'R', '1.000000']
    assert rows[3] == ['0', '2', '2', '0', 'q2', '', '']
    assert len(rows) == 7


def test_theta_json(tmp_path, corridor):
    basis = build_kernel_basis(corridor, sigma=1.0)
    approx = ValueApprox(basis={'q1': basis, 'q2': basis}, alpha=60.0)
    approx.theta['q1'] = np.array([0.1, 0.2, 0.3])
    approx.pinned['q2'] = 1.0

    payload = json.loads(export_theta_json(approx, tmp_path / 'theta.json').read_text(encoding='utf-8'))

    assert payload['alpha'] == 60.0
    assert payload['sigma'] == 1.0
    assert payload['centers'] == [[0, 0], [1, 0], [2, 0]]
    assert payload['theta'] == {'q1': [0.1, 0.2, 0.3]}
    assert payload['pinned'] == {'q2': 1.0}


def test_dump_product_lines(tmp_path, corridor, reach_dfa):
    product = build_product(corridor, reach_dfa, 0.9, 2.0)
    lines = dump_product(product, tmp_path / 'product.txt').read_text(encoding='utf-8').splitlines()

    assert lines[0] == '0 0 q1 U -> 0 0 q1 1.000000000'
    assert '1 0 q1 R -> 2 0 q2 1.000000000' in lines
    assert 'reward 1 0 q1 R 1.000000000' in lines
    # q1 at the goal cell moves into q2 under every action
    assert sum(line.startswith('reward') for line in lines) == 5


def test_condensation_dot(tmp_path, case_world, case_dfa):
    decomposition = decompose(case_world, case_dfa)
    text = export_condensation_dot(decomposition, tmp_path / 'graph.dot').read_text(encoding='utf-8')

    assert text.startswith('digraph condensation {')
    assert text.count('shape=doublecircle') == 1
    assert text.count(' -> ') == len(decomposition.meta_edges)
    assert '{q5}\\nL0' in text


def test_bench_files(tmp_path):
    rows = [
        {'solver': 'vi', 'wall_time_s': 1.5, 'backups': 900, 'epochs': None, 'success_rate': 0.9, 'n_runs': 10, 'error': None},
        {'solver': 'tadp', 'wall_time_s': None, 'backups': None, 'epochs': None, 'success_rate': None, 'n_runs': 0, 'error': 'falhou'},
    ]
    csv_path, json_path = export_bench(rows, tmp_path / 'bench.csv', tmp_path / 'bench.json')
    table = _rows(csv_path)

    assert table[0] == list(BENCH_COLUMNS)
    assert table[1] == ['vi', '1.5', '900', '', '0.9', '10', '']
    assert table[2][-1] == 'falhou'
    assert json.loads(json_path.read_text(encoding='utf-8'))[1]['error'] == 'falhou'
