import numpy as np
import pytest

from app.application.dtos.planning import ExactSolverConfig, RolloutConfig, TadpConfig
from app.application.use_cases.run_bench import RunBenchUseCase
from app.application.use_cases.simulate_policy import SimulatePolicyUseCase
from app.application.use_cases.solve_exact import SolveExactUseCase
from app.domain.entities.mdp import GridWorldSpec
from app.domain.entities.simulation import RolloutStats
from app.domain.entities.values import SoftPolicy
from app.domain.exceptions import ConfigError, SimulationError
from app.domain.services.mdp_service import build_grid_world
from app.domain.services.product_service import build_product
from app.domain.services.simulation_service import (
    choose_action,
    run_trajectories,
    sample_trajectory,
    simulate_policy,
)
from app.infrastructure.io.dfa_loader import parse_dfa
from app.infrastructure.simulation.product_simulator import ProductSimulator

TWO_STAGE_DFA = """
props: a, goal
states: q1, q2, q3
initial: q1
accepting: q3
default: self-loop
q1 --[a]--> q2
q2 --[goal]--> q3
"""


def _uniform_policy(product):
    n, m = product.size, len(product.actions)
    return SoftPolicy(states=product.states, actions=product.actions, dist=np.full((n, m), 1.0 / m), q_values=np.zeros((n, m)))


def _fixed_policy(product, action):
    dist = np.zeros((product.size, len(product.actions)))
    dist[:, product.actions.index(action)] = 1.0
    return SoftPolicy(states=product.states, actions=product.actions, dist=dist, q_values=np.zeros_like(dist), deterministic=True)


def _greedy_corridor(corridor, reach_dfa):
    solved = SolveExactUseCase(ExactSolverConfig(operator='hardmax', epsilon=1e-9)).execute(
        solver='vi', mdp=corridor, dfa=reach_dfa
    )
    return solved.product, solved.policy


def test_accepting_start_gives_empty_run(corridor, reach_dfa):
    product = build_product(corridor, reach_dfa, 0.9, 2.0)
    trajectory = sample_trajectory(ProductSimulator(product), _uniform_policy(product), ((1, 0), 'q2'), 10, 0)

    assert len(trajectory) == 0
    assert trajectory.terminated == 'accepting'
    assert trajectory.final == ((1, 0), 'q2')


def test_greedy_run_reaches_goal(corridor, reach_dfa):
    product, policy = _greedy_corridor(corridor, reach_dfa)
    trajectory = sample_trajectory(ProductSimulator(product), policy, product.initial, 10, 1)

    assert trajectory.terminated == 'accepting'
    assert [step.action for step in trajectory.steps] == ['R', 'R']
    assert [step.reward for step in trajectory.steps] == [0.0, 1.0]
    assert trajectory.final == ((2, 0), 'q2')


def test_length_cap_stops_the_run(corridor, reach_dfa):
    product = build_product(corridor, reach_dfa, 0.9, 2.0)
    trajectory = sample_trajectory(ProductSimulator(product), _fixed_policy(product, 'L'), product.initial, 5, 0)

    assert len(trajectory) == 5
    assert trajectory.terminated == 'length-cap'


def test_obstacle_ends_the_run_as_sink(reach_dfa):
    mdp = build_grid_world(GridWorldSpec(width=3, height=1, noise=0.0, regions={'goal': {(2, 0)}}, obstacles={(1, 0)}))
    product = build_product(mdp, reach_dfa, 0.9, 2.0)
    trajectory = sample_trajectory(ProductSimulator(product), _fixed_policy(product, 'R'), product.initial, 10, 0)

    assert trajectory.terminated == 'sink'
    assert trajectory.final == ((1, 0), 'q1')
    assert len(trajectory) == 1


def test_level_exit_when_mode_leaves_the_kept_set():
    dfa = parse_dfa(TWO_STAGE_DFA)
    mdp = build_grid_world(GridWorldSpec(width=3, height=1, noise=0.0, regions={'a': {(1, 0)}, 'goal': {(2, 0)}}))
    product = build_product(mdp, dfa, 0.9, 2.0)
    trajectory = sample_trajectory(
        ProductSimulator(product), _fixed_policy(product, 'R'), product.initial, 10, 0, keep_modes=frozenset({'q1'})
    )

    assert trajectory.terminated == 'level-exit'
    assert trajectory.final == ((1, 0), 'q2')
    assert len(trajectory) == 1


def test_invalid_distribution_is_rejected(corridor, reach_dfa):
    product = build_product(corridor, reach_dfa, 0.9, 2.0)
    broken = SoftPolicy(
        states=product.states,
        actions=product.actions,
        dist=np.zeros((product.size, 4)),
        q_values=np.zeros((product.size, 4)),
    )
    with pytest.raises(SimulationError):
        choose_action(broken, product.initial, np.random.default_rng(0))
    with pytest.raises(SimulationError):
        sample_trajectory(ProductSimulator(product), broken, product.initial, -1, 0)


class _FailingSimulator(ProductSimulator):
    def __init__(self, product, error):
        super().__init__(product)
        self._error = error

    def step(self, state, action, rng):
        raise self._error


def test_simulator_errors_pass_through_and_foreign_errors_are_wrapped(corridor, reach_dfa):
    product = build_product(corridor, reach_dfa, 0.9, 2.0)
    own = SimulationError('Oraculo indisponivel.')
    with pytest.raises(SimulationError) as exc:
        sample_trajectory(_FailingSimulator(product, own), _uniform_policy(product), product.initial, 3, 0)
    assert exc.value is own

    with pytest.raises(SimulationError) as exc:
        sample_trajectory(_FailingSimulator(product, KeyError('x')), _uniform_policy(product), product.initial, 3, 0)
    assert isinstance(exc.value.__cause__, KeyError)


def test_rollouts_from_accepting_start(corridor, reach_dfa):
    product = build_product(corridor, reach_dfa, 0.9, 2.0)
    stats = simulate_policy(ProductSimulator(product), _uniform_policy(product), ((2, 0), 'q2'), 25, 10, seed=3)

    assert stats.success_rate == 1.0
    assert stats.success_steps == (0,) * 25
    assert stats.steps_summary()['mean'] == 0.0


def test_greedy_rollouts_summary(corridor, reach_dfa):
    product, policy = _greedy_corridor(corridor, reach_dfa)
    stats = simulate_policy(ProductSimulator(product), policy, product.initial, 40, 20)
    payload = stats.as_dict()

    assert payload['success_rate'] == 1.0
    assert payload['failures_sink'] == 0
    assert payload['steps_to_goal'] == {'mean': 2.0, 'median': 2.0, 'std': 0.0, 'min': 2.0, 'max': 2.0}


def test_rollout_argument_checks(corridor, reach_dfa):
    product = build_product(corridor, reach_dfa, 0.9, 2.0)
    simulator = ProductSimulator(product)
    with pytest.raises(SimulationError):
        simulate_policy(simulator, _uniform_policy(product), product.initial, 5, 0)
    with pytest.raises(SimulationError):
        simulate_policy(simulator, _uniform_policy(product), product.initial, -1, 5)


def test_empty_stats():
    stats = RolloutStats(n_runs=0, successes=0, failures_sink=0, failures_timeout=0)
    assert stats.success_rate == 0.0
    assert stats.steps_summary()['median'] is None


def test_seeded_runs_repeat(small_world, case_dfa):
    product = build_product(small_world, case_dfa, 0.9, 2.0)
    policy = _uniform_policy(product)

    first = run_trajectories(ProductSimulator(product), policy, product.initial, 5, 30, seed=7)
    second = run_trajectories(ProductSimulator(product), policy, product.initial, 5, 30, seed=7)

    assert first == second


def test_simulate_policy_use_case(corridor, reach_dfa):
    product, policy = _greedy_corridor(corridor, reach_dfa)
    result = SimulatePolicyUseCase(RolloutConfig(n_runs=20, step_cap=10)).execute(
        product=product, policy=policy, keep_trajectories=3
    )

    assert result.start == product.initial
    assert result.stats.success_rate == 1.0
    assert len(result.trajectories) == 3
    assert 'rollouts' in result.timings_ms


def test_bench_rows_and_reduction(case_world, case_dfa):
    result = RunBenchUseCase(ExactSolverConfig(), rollout=RolloutConfig(n_runs=5, step_cap=100)).execute(
        mdp=case_world, dfa=case_dfa, solvers=['vi', 'tvi']
    )

    assert [row.solver for row in result.rows] == ['vi', 'tvi']
    assert all(row.error is None and row.n_runs == 5 for row in result.rows)
    assert 0.0 < result.reduction() < 1.0


def test_bench_records_solver_failures(corridor, reach_dfa):
    bench = RunBenchUseCase(ExactSolverConfig(), tadp=TadpConfig.default(theta_bound=1e-6))
    result = bench.execute(mdp=corridor, dfa=reach_dfa, solvers=['tadp'])

    row = result.rows[0]
    assert row.error.startswith('DivergenceError')
    assert row.as_dict()['solver'] == 'tadp'
    assert result.reduction() is None


def test_bench_inputs(corridor, reach_dfa):
    bench = RunBenchUseCase(ExactSolverConfig())
    assert bench.execute(mdp=corridor, dfa=reach_dfa, solvers=[]).rows == []
    with pytest.raises(ConfigError):
        bench.execute(mdp=corridor, dfa=reach_dfa, solvers=['vi', 'dijkstra'])
