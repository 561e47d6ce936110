from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[2]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from app.application.dtos.planning import ExactSolverConfig, RolloutConfig, TADP_PRESETS  # noqa: E402
from app.application.use_cases.simulate_policy import SimulatePolicyUseCase  # noqa: E402
from app.application.use_cases.solve_exact import SolveExactUseCase  # noqa: E402
from app.application.use_cases.solve_tadp import SolveTadpUseCase  # noqa: E402
from app.core.logging.setup import configure_logging  # noqa: E402
from app.infrastructure.io.config_loader import load_grid_config  # noqa: E402
from app.infrastructure.io.dfa_loader import load_dfa  # noqa: E402
from app.infrastructure.io.exporters import product_mode_values  # noqa: E402
from app.infrastructure.io.mdp_loader import load_grid_world  # noqa: E402

RESOURCES = ROOT / 'resources'
EXPECTED_LEVELS = [[['q5']], [['q4']], [['q2', 'q3']], [['q1']]]
MAX_TADP_EPOCHS = 2000


def _check(name: str, passed: bool, detail: str, results: list[dict]) -> None:
    status = 'OK' if passed else 'FALHA'
    print(f'[{status}] {name}: {detail}')
    results.append({'check': name, 'passed': passed, 'detail': detail})


def run(args: argparse.Namespace) -> list[dict]:
    mdp = load_grid_world(RESOURCES / 'worlds' / 'case_study_10x10.json')
    dfa = load_dfa(RESOURCES / 'dfa' / 'case_study.dfa')
    results: list[dict] = []

    config = ExactSolverConfig(epsilon=args.epsilon)
    vi = SolveExactUseCase(config).execute(solver='vi', mdp=mdp, dfa=dfa)
    tvi = SolveExactUseCase(config).execute(solver='tvi', product=vi.product, decomposition=vi.decomposition)

    levels = vi.decomposition.as_dict()['levels']
    _check('niveis', levels == EXPECTED_LEVELS, f'niveis={levels}', results)

    gap = float(np.max(np.abs(vi.table.values - tvi.table.values)))
    _check('vi_igual_tvi', gap <= 10 * args.epsilon, f'diferenca_max={gap:.3e}', results)

    reduction = 1.0 - tvi.table.backup_count / vi.table.backup_count
    _check(
        'reducao_backups',
        reduction > 0,
        f'vi={vi.table.backup_count} tvi={tvi.table.backup_count} reducao={reduction:.2%}',
        results,
    )

    d_cells = {tuple(cell) for cell in load_grid_config(RESOURCES / 'worlds' / 'case_study_10x10.json').regions['d']}
    q3_values = product_mode_values(tvi.product, tvi.table.deamplified(), 'q3')
    peak = mdp.states[int(np.nanargmax(q3_values))]
    near_d = any(abs(peak[0] - x) + abs(peak[1] - y) <= 1 for x, y in d_cells)
    _check('pico_q3_junto_de_d', near_d, f'celula={peak}', results)

    rollout = RolloutConfig(n_runs=args.runs, step_cap=args.step_cap, seed=args.seed)
    simulated = SimulatePolicyUseCase(rollout).execute(product=tvi.product, policy=tvi.policy)
    _check(
        'sucesso_tvi',
        simulated.stats.success_rate >= args.min_success,
        f'taxa={simulated.stats.success_rate:.3f} passos={simulated.stats.steps_summary()["mean"]}',
        results,
    )

    if parse_bool(args.with_tadp):
        tadp = SolveTadpUseCase(TADP_PRESETS[args.preset](seed=args.seed)).execute(mdp=mdp, dfa=dfa)
        boundary = SolveExactUseCase(ExactSolverConfig(convention='boundary', alpha=tadp.result.approx.alpha)).execute(
            solver='tvi', product=tadp.product, decomposition=tadp.decomposition
        )
        learned = [i for i, (_, q) in enumerate(tadp.product.states) if q in tadp.result.approx.theta]
        approx = np.array([tadp.result.approx.value(*tadp.product.states[i]) for i in learned])
        reference = boundary.table.deamplified()[learned]
        spread = float(np.ptp(reference)) or 1.0
        error = float(np.max(np.abs(approx - reference))) / spread
        _check(
            'tadp_erro_max',
            bool(np.isfinite(error)) and error <= args.max_tadp_error,
            f'erro_relativo={error:.4f} limite={args.max_tadp_error} epocas={tadp.result.epochs}',
            results,
        )
        slow = [report.level for report in tadp.result.levels if report.epochs > MAX_TADP_EPOCHS]
        _check('tadp_epocas', not slow, f'epocas_por_nivel={[r.epochs for r in tadp.result.levels]}', results)
        tadp_rollouts = SimulatePolicyUseCase(rollout).execute(product=tadp.product, policy=tadp.result.policy)
        _check(
            'sucesso_tadp',
            tadp_rollouts.stats.success_rate >= simulated.stats.success_rate - args.max_success_gap,
            f'taxa={tadp_rollouts.stats.success_rate:.3f} taxa_tvi={simulated.stats.success_rate:.3f}',
            results,
        )
    return results


def parse_bool(value: str) -> bool:
    return value.strip().lower() in {'1', 'true', 'yes', 'on'}


def main() -> None:
    parser = argparse.ArgumentParser(description='Executa o estudo de caso 10x10 com VI, TVI e TADP.')
    parser.add_argument('--epsilon', type=float, default=1e-3)
    parser.add_argument('--runs', type=int, default=500)
    parser.add_argument('--step-cap', type=int, default=500)
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--min-success', type=float, default=0.9)
    parser.add_argument('--max-tadp-error', type=float, default=0.1)
    parser.add_argument('--max-success-gap', type=float, default=0.25)
    parser.add_argument('--with-tadp', default='false')
    parser.add_argument('--preset', choices=sorted(TADP_PRESETS), default='default')
    parser.add_argument('--json-report', default='')
    parser.add_argument('--log-level', default='WARNING')
    args = parser.parse_args()

    configure_logging(args.log_level)
    print('=== Estudo de caso ===')
    results = run(args)
    failed = [item['check'] for item in results if not item['passed']]
    print(f'verificacoes={len(results)} falhas={len(failed)}')
    if args.json_report:
        Path(args.json_report).write_text(json.dumps(results, indent=2, ensure_ascii=False) + '\n', encoding='utf-8')
        print(f'relatorio_json_salvo={args.json_report}')
    if failed:
        raise SystemExit(1)


if __name__ == '__main__':
    main()
