from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from app.application.dtos.planning import state_to_id
from app.domain.entities.approx import ValueApprox
from app.domain.entities.automaton import mode_sort_key
from app.domain.entities.decomposition import Decomposition
from app.domain.entities.product import ProductMdp
from app.domain.entities.simulation import Trajectory
from app.domain.exceptions import SimulationError

logger = logging.getLogger(__name__)

DECIMALS = 6
BENCH_COLUMNS = ('solver', 'wall_time_s', 'backups', 'epochs', 'success_rate', 'n_runs', 'error')


def _fmt(value: float, decimals: int = DECIMALS) -> str:
    return f'{float(value):.{decimals}f}'


def _prepare(path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    return target


def export_heatmap(values: Sequence[float], grid_size: tuple[int, int], path: str | Path, *, decimals: int = DECIMALS) -> Path:
    """Write one mode's values as a CSV matrix; row ``y`` holds the cells ``(0..w-1, y)``."""
    width, height = grid_size
    flat = np.asarray(values, dtype=float)
    if flat.size != width * height:
        raise SimulationError(f'Valores nao batem com o grid. valores={flat.size} celulas={width * height}')
    target = _prepare(path)
    matrix = flat.reshape(height, width)
    with target.open('w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        for row in matrix:
            writer.writerow([_fmt(item, decimals) for item in row])
    return target


def product_mode_values(product: ProductMdp, values: np.ndarray, mode: str) -> np.ndarray:
    """Values of ``mode`` in MDP state order; states pruned from the product read NaN."""
    out = np.full(len(product.mdp.states), np.nan)
    for k, state in enumerate(product.mdp.states):
        if product.has_state((state, mode)):
            out[k] = values[product.index_of((state, mode))]
    return out


def export_mode_heatmaps(
    per_mode: Mapping[str, np.ndarray],
    grid_size: tuple[int, int],
    out_dir: str | Path,
    *,
    prefix: str = 'heatmap',
) -> list[Path]:
    paths = []
    for mode in sorted(per_mode, key=mode_sort_key):
        paths.append(export_heatmap(per_mode[mode], grid_size, Path(out_dir) / f'{prefix}_{mode}.csv'))
    logger.info('Mapas de calor exportados. diretorio=%s modos=%s', out_dir, len(paths))
    return paths


def write_json(path: str | Path, payload: Any) -> Path:
    target = _prepare(path)
    target.write_text(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + '\n', encoding='utf-8')
    return target


def export_convergence_csv(trace: Iterable[Any], modes: Sequence[str], path: str | Path) -> Path:
    target = _prepare(path)
    with target.open('w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(['epoch', 'level', 'state', 'value'])
        for record in trace:
            writer.writerow([record.epoch, record.level, state_to_id(record.state, modes), _fmt(record.value)])
    return target


def export_trajectories_csv(trajectories: Sequence[Trajectory], path: str | Path) -> Path:
    target = _prepare(path)
    with target.open('w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(['run', 't', 'x', 'y', 'mode', 'action', 'reward'])
        for run, trajectory in enumerate(trajectories):
            for t, step in enumerate(trajectory.steps):
                (x, y), mode = step.state
                writer.writerow([run, t, x, y, mode, step.action, _fmt(step.reward)])
            (x, y), mode = trajectory.final
            writer.writerow([run, len(trajectory.steps), x, y, mode, '', ''])
    return target


def theta_payload(approx: ValueApprox) -> dict[str, Any]:
    any_basis = next(iter(approx.basis.values()), None)
    return {
        'alpha': approx.alpha,
        'sigma': any_basis.sigma if any_basis is not None else None,
        'centers': [list(center) for center in any_basis.centers] if any_basis is not None else [],
        'theta': {mode: [round(float(w), 12) for w in approx.theta[mode]] for mode in sorted(approx.theta, key=mode_sort_key)},
        'pinned': {mode: approx.pinned[mode] for mode in sorted(approx.pinned, key=mode_sort_key)},
    }


def export_theta_json(approx: ValueApprox, path: str | Path) -> Path:
    return write_json(path, theta_payload(approx))


def _cell_text(cell: Any) -> str:
    if isinstance(cell, tuple):
        return ' '.join(str(item) for item in cell)
    return str(cell)


def dump_product(product: ProductMdp, path: str | Path) -> Path:
    """One line per successor: ``x y mode action -> x' y' mode' prob``, then reward lines."""
    target = _prepare(path)
    with target.open('w', encoding='utf-8') as handle:
        for i, (state, mode) in enumerate(product.states):
            for a_idx in product.row_actions[i]:
                action = product.actions[int(a_idx)]
                targets, probs = product.successors(i, int(a_idx))
                for target_index, prob in zip(targets, probs):
                    next_state, next_mode = product.states[int(target_index)]
                    handle.write(
                        f'{_cell_text(state)} {mode} {action} -> {_cell_text(next_state)} {next_mode} {_fmt(prob, 9)}\n'
                    )
                reward = product.reward[i, int(a_idx)]
                if reward > 0:
                    handle.write(f'reward {_cell_text(state)} {mode} {action} {_fmt(reward, 9)}\n')
    logger.info('Produto exportado. caminho=%s estados=%s', target, product.size)
    return target


def export_condensation_dot(decomposition: Decomposition, path: str | Path) -> Path:
    target = _prepare(path)
    lines = ['digraph condensation {', '  rankdir=LR;']
    for index, meta in enumerate(decomposition.meta_modes):
        members = ','.join(sorted(meta, key=mode_sort_key))
        level = None
        for position, level_members in enumerate(decomposition.levels):
            if index in level_members:
                level = position
        label = f'{{{members}}}\\nL{level}' if level is not None else f'{{{members}}}\\ndescartado'
        shape = 'doublecircle' if meta & decomposition.accepting_modes else 'box'
        lines.append(f'  m{index} [label="{label}", shape={shape}];')
    for source, dest in sorted(decomposition.meta_edges):
        lines.append(f'  m{source} -> m{dest};')
    lines.append('}')
    target.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return target


def export_bench(rows: Sequence[Mapping[str, Any]], csv_path: str | Path, json_path: str | Path) -> tuple[Path, Path]:
    csv_target = _prepare(csv_path)
    with csv_target.open('w', encoding='utf-8', newline='') as handle:
        writer = csv.DictWriter(handle, fieldnames=list(BENCH_COLUMNS), lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({key: '' if row.get(key) is None else row.get(key) for key in BENCH_COLUMNS})
    json_target = write_json(json_path, [dict(row) for row in rows])
    return csv_target, json_target

