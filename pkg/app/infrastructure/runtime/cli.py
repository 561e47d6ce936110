from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

from app.application.dtos.planning import (
    TADP_PRESETS,
    ExactSolverConfig,
    GridWorldConfig,
    RolloutConfig,
    TadpConfig,
    parse_state_arg,
    sorted_modes,
    state_payload,
)
from app.application.use_cases.decompose_task import DecomposeTaskUseCase
from app.application.use_cases.run_bench import KNOWN_SOLVERS, RunBenchUseCase
from app.application.use_cases.simulate_policy import SimulatePolicyUseCase
from app.application.use_cases.solve_exact import SolveExactUseCase
from app.application.use_cases.solve_tadp import SolveTadpUseCase
from app.core.config.settings import get_settings
from app.core.logging.setup import configure_logging
from app.domain.entities.automaton import TaskDfa
from app.domain.entities.mdp import LabeledMdp
from app.domain.entities.product import ProductState
from app.domain.exceptions import ConfigError, DomainError
from app.domain.services.mdp_service import build_grid_world, scale_grid_spec, validate_grid_spec
from app.infrastructure.io.config_loader import load_grid_config, load_tadp_config
from app.infrastructure.io.dfa_loader import load_dfa
from app.infrastructure.io.exporters import (
    dump_product,
    export_bench,
    export_condensation_dot,
    export_convergence_csv,
    export_mode_heatmaps,
    export_theta_json,
    export_trajectories_csv,
    product_mode_values,
    write_json,
)
from app.infrastructure.io.mdp_loader import load_sparse_mdp

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_DOMAIN_ERROR = 2


@dataclass
class Problem:
    mdp: LabeledMdp
    dfa: TaskDfa
    grid: GridWorldConfig | None = None
    grid_size: tuple[int, int] | None = None


def load_problem(args: argparse.Namespace, *, scale: int = 1) -> Problem:
    dfa = load_dfa(args.dfa)
    if args.grid is not None:
        grid = load_grid_config(args.grid)
        spec = grid.to_spec()
        if scale != 1:
            spec = scale_grid_spec(spec, scale)
        validate_grid_spec(spec)
        return Problem(mdp=build_grid_world(spec), dfa=dfa, grid=grid, grid_size=(spec.width, spec.height))
    if args.mdp is not None:
        if scale != 1:
            raise ConfigError('Escala so se aplica a grids.')
        return Problem(mdp=load_sparse_mdp(args.mdp), dfa=dfa)
    raise ConfigError('Informe --grid ou --mdp.')


def parse_start(text: str | None, problem: Problem) -> ProductState | None:
    if text is None:
        return None
    if problem.grid is not None:
        return parse_state_arg(text, problem.dfa.states)
    parts = [part.strip() for part in text.strip().strip('()').split(',')]
    if len(parts) != 2 or not problem.mdp.has_state(parts[0]) or parts[1] not in problem.dfa.states:
        raise ConfigError(f'Estado invalido; use estado,modo. valor={text!r}')
    return (parts[0], parts[1])


def _emit(payload: Any) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + '\n')


def _out_dir(args: argparse.Namespace) -> Path:
    return Path(args.out) if args.out is not None else get_settings().output_dir


def _exact_config(args: argparse.Namespace) -> ExactSolverConfig:
    return ExactSolverConfig.from_settings(
        get_settings(),
        gamma=args.gamma,
        tau=args.tau,
        epsilon=args.epsilon,
        alpha=args.alpha,
        operator=args.operator,
        convention=args.convention,
        stop_rule=args.stop_rule,
    )


def _tadp_config(args: argparse.Namespace) -> TadpConfig:
    overrides: dict[str, Any] = {}
    if getattr(args, 'seed', None) is not None:
        overrides['seed'] = args.seed
    if getattr(args, 'config', None) is not None:
        config = load_tadp_config(args.config)
        return config.model_copy(update=overrides) if overrides else config
    return TADP_PRESETS[args.preset](**overrides)


def cmd_decompose(args: argparse.Namespace) -> int:
    problem = load_problem(args)
    result = DecomposeTaskUseCase().execute(mdp=problem.mdp, dfa=problem.dfa, dependency=args.dependency)
    if args.dot is not None:
        export_condensation_dot(result.decomposition, args.dot)
    _emit(result.payload)
    return EXIT_OK


def cmd_solve_exact(args: argparse.Namespace) -> int:
    problem = load_problem(args)
    result = SolveExactUseCase(_exact_config(args)).execute(solver=args.solver_name, mdp=problem.mdp, dfa=problem.dfa)
    out_dir = _out_dir(args)
    if problem.grid_size is not None:
        values = result.table.deamplified()
        per_mode = {mode: product_mode_values(result.product, values, mode) for mode in problem.dfa.states}
        export_mode_heatmaps(per_mode, problem.grid_size, out_dir)
    if args.dump_product is not None:
        dump_product(result.product, args.dump_product)
    summary = result.summary()
    summary['timings_ms'] = result.timings_ms
    write_json(out_dir / 'summary.json', summary)
    _emit(summary)
    return EXIT_OK


def cmd_solve_tadp(args: argparse.Namespace) -> int:
    problem = load_problem(args)
    solved = SolveTadpUseCase(_tadp_config(args)).execute(mdp=problem.mdp, dfa=problem.dfa)
    out_dir = _out_dir(args)
    approx = solved.result.approx
    export_theta_json(approx, out_dir / 'theta.json')
    if problem.grid_size is not None:
        per_mode = {mode: approx.mode_values(mode) for mode in problem.dfa.states}
        export_mode_heatmaps(per_mode, problem.grid_size, out_dir)
        export_convergence_csv(solved.result.trace, problem.dfa.states, out_dir / 'convergence.csv')
    summary = solved.summary()
    summary['timings_ms'] = solved.timings_ms
    write_json(out_dir / 'summary.json', summary)
    _emit(summary)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    problem = load_problem(args)
    start = parse_start(args.start, problem)
    if args.solver == 'tadp':
        solved = SolveTadpUseCase(_tadp_config(args)).execute(mdp=problem.mdp, dfa=problem.dfa)
        product, policy = solved.product, solved.result.policy
    else:
        settings = get_settings()
        exact = SolveExactUseCase(ExactSolverConfig.from_settings(settings)).execute(
            solver=args.solver,
            mdp=problem.mdp,
            dfa=problem.dfa,
        )
        product, policy = exact.product, exact.policy

    rollout = RolloutConfig(n_runs=args.runs, step_cap=args.step_cap, seed=args.seed or 0)
    keep = args.keep_trajectories if args.trajectory_csv is not None else 0
    simulated = SimulatePolicyUseCase(rollout).execute(product=product, policy=policy, start=start, keep_trajectories=keep)
    if args.trajectory_csv is not None:
        export_trajectories_csv(simulated.trajectories, args.trajectory_csv)
    payload = simulated.stats.as_dict()
    payload['solver'] = args.solver
    payload['start'] = state_payload(simulated.start)
    write_json(_out_dir(args) / 'rollouts.json', payload)
    _emit(payload)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    solvers = [item.strip() for item in args.solvers.split(',') if item.strip()]
    problem = load_problem(args, scale=args.scale)
    rollout = RolloutConfig(n_runs=args.runs, step_cap=args.step_cap, seed=args.seed or 0) if args.runs > 0 else None
    use_case = RunBenchUseCase(
        ExactSolverConfig.from_settings(get_settings()),
        tadp=_tadp_config(args),
        rollout=rollout,
    )
    result = use_case.execute(mdp=problem.mdp, dfa=problem.dfa, solvers=solvers, start=parse_start(args.start, problem))
    out_dir = _out_dir(args)
    rows = [row.as_dict() for row in result.rows]
    export_bench(rows, out_dir / 'bench.csv', out_dir / 'bench.json')
    _emit({'rows': rows, 'backup_reduction': result.reduction('backups'), 'modes': list(sorted_modes(problem.dfa.states))})
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--dfa', required=True, help='Arquivo do automato da tarefa.')
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--grid', default=None, help='JSON do grid world.')
    source.add_argument('--mdp', default=None, help='MDP no formato esparso.')
    parser.add_argument('--out', default=None, help='Diretorio de saida.')
    parser.add_argument('--log-level', default=None)


def _add_tadp_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', default=None, help='JSON com parametros do TADP.')
    parser.add_argument('--preset', choices=sorted(TADP_PRESETS), default='default')
    parser.add_argument('--seed', type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='topoplanner',
        description='Planejamento com tarefas temporais em grid worlds (VI, TVI e TADP).',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    decompose = sub.add_parser('decompose', help='Decomposicao topologica da tarefa.')
    _add_common(decompose)
    decompose.add_argument('--dependency', choices=('mdp', 'automaton'), default='mdp')
    decompose.add_argument('--dot', default=None, help='Exporta o grafo condensado em DOT.')
    decompose.set_defaults(handler=cmd_decompose)

    for name, solver in (('solve-vi', 'vi'), ('solve-tvi', 'tvi')):
        exact = sub.add_parser(name, help=f'Solver exato {solver.upper()}.')
        _add_common(exact)
        exact.add_argument('--epsilon', type=float, default=None)
        exact.add_argument('--gamma', type=float, default=None)
        exact.add_argument('--tau', type=float, default=None)
        exact.add_argument('--alpha', type=float, default=None)
        exact.add_argument('--operator', choices=('softmax', 'hardmax'), default=None)
        exact.add_argument('--convention', choices=('reward', 'boundary'), default=None)
        exact.add_argument('--stop-rule', choices=('residual', 'value'), default=None)
        exact.add_argument('--dump-product', default=None)
        exact.set_defaults(handler=cmd_solve_exact, solver_name=solver)

    tadp = sub.add_parser('solve-tadp', help='Programacao dinamica aproximada topologica.')
    _add_common(tadp)
    _add_tadp_options(tadp)
    tadp.set_defaults(handler=cmd_solve_tadp)

    simulate = sub.add_parser('simulate', help='Monte Carlo da politica resolvida.')
    _add_common(simulate)
    simulate.add_argument('--solver', choices=KNOWN_SOLVERS, default='tvi')
    simulate.add_argument('--start', default=None, help='x,y,modo (modo por nome ou indice).')
    simulate.add_argument('--runs', type=int, default=500)
    simulate.add_argument('--step-cap', type=int, default=500)
    simulate.add_argument('--trajectory-csv', default=None)
    simulate.add_argument('--keep-trajectories', type=int, default=10)
    _add_tadp_options(simulate)
    simulate.set_defaults(handler=cmd_simulate)

    bench = sub.add_parser('bench', help='Compara solvers no mesmo problema.')
    _add_common(bench)
    bench.add_argument('--solvers', default='vi,tvi')
    bench.add_argument('--scale', type=int, default=1)
    bench.add_argument('--runs', type=int, default=0)
    bench.add_argument('--step-cap', type=int, default=500)
    bench.add_argument('--start', default=None)
    _add_tadp_options(bench)
    bench.set_defaults(handler=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or get_settings().log_level)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except DomainError as exc:
        logger.error('Comando falhou. comando=%s erro=%s motivo=%s', args.command, exc.__class__.__name__, exc)
        return EXIT_DOMAIN_ERROR
    except Exception:
        logger.exception('Erro inesperado. comando=%s', args.command)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
