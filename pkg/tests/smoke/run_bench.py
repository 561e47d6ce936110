from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from app.application.dtos.planning import ExactSolverConfig, RolloutConfig  # noqa: E402
from app.application.use_cases.run_bench import RunBenchUseCase  # noqa: E402
from app.core.logging.setup import configure_logging  # noqa: E402
from app.domain.services.mdp_service import build_grid_world, scale_grid_spec, validate_grid_spec  # noqa: E402
from app.infrastructure.io.config_loader import load_grid_config  # noqa: E402
from app.infrastructure.io.dfa_loader import load_dfa  # noqa: E402
from app.infrastructure.io.exporters import export_bench  # noqa: E402

RESOURCES = ROOT / 'resources'


def _fmt(value) -> str:
    if value is None:
        return '-'
    if isinstance(value, float):
        return f'{value:.3f}'
    return str(value)


def run(args: argparse.Namespace) -> list[dict]:
    dfa = load_dfa(RESOURCES / 'dfa' / 'case_study.dfa')
    base = load_grid_config(RESOURCES / 'worlds' / 'case_study_10x10.json').to_spec()
    solvers = [item.strip() for item in args.solvers.split(',') if item.strip()]
    rollout = RolloutConfig(n_runs=args.runs, step_cap=args.step_cap, seed=args.seed) if args.runs > 0 else None
    table: list[dict] = []

    for factor in (int(item) for item in args.scales.split(',')):
        spec = scale_grid_spec(base, factor) if factor != 1 else base
        validate_grid_spec(spec)
        result = RunBenchUseCase(ExactSolverConfig(epsilon=args.epsilon), rollout=rollout).execute(
            mdp=build_grid_world(spec),
            dfa=dfa,
            solvers=solvers,
        )
        reduction = result.reduction('backups')
        print(f'--- grid {spec.width}x{spec.height} ---')
        for row in result.rows:
            print(
                f'solver={row.solver} tempo_s={_fmt(row.wall_time_s)} backups={_fmt(row.backups)} '
                f'sucesso={_fmt(row.success_rate)} erro={row.error or "-"}'
            )
            table.append({'grid': f'{spec.width}x{spec.height}', **row.as_dict()})
        print(f'reducao_backups={_fmt(reduction)}')
        time_reduction = result.reduction('wall_time_s')
        print(f'reducao_tempo={_fmt(time_reduction)}')
    return table


def main() -> None:
    parser = argparse.ArgumentParser(description='Tabela VI x TVI no estudo de caso 10x10 e na versao 20x20.')
    parser.add_argument('--solvers', default='vi,tvi')
    parser.add_argument('--scales', default='1,2')
    parser.add_argument('--epsilon', type=float, default=1e-3)
    parser.add_argument('--runs', type=int, default=0)
    parser.add_argument('--step-cap', type=int, default=500)
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--out-dir', default='')
    parser.add_argument('--log-level', default='WARNING')
    args = parser.parse_args()

    configure_logging(args.log_level)
    print('=== Benchmark de solvers ===')
    table = run(args)
    if args.out_dir:
        out_dir = Path(args.out_dir)
        export_bench(table, out_dir / 'bench.csv', out_dir / 'bench.json')
        print(f'relatorio_salvo={out_dir}')
    else:
        print(json.dumps(table, indent=2, ensure_ascii=False))


if __name__ == '__main__':
    main()
