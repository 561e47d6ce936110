from __future__ import annotations

from typing import Any, Literal, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.core.config.settings import Settings
from app.core.errors.http_exceptions import ApiValidationError
from app.domain.entities.automaton import mode_sort_key
from app.domain.entities.mdp import GridWorldSpec
from app.domain.entities.product import ProductState
from app.domain.exceptions import ConfigError
from app.domain.services.adp_solver import TadpParameters

GridCell = tuple[int, int]
StateId = tuple[int, int, int]


class GridWorldConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    name: str | None = None
    width: int = Field(gt=0)
    height: int = Field(gt=0)
    noise: float = Field(default=0.03, ge=0.0)
    regions: dict[str, list[GridCell]] = Field(default_factory=dict)
    obstacles: list[GridCell] = Field(default_factory=list)
    walls: list[tuple[GridCell, GridCell]] = Field(default_factory=list)
    initial_cell: GridCell = (0, 0)
    obstacle_prop: str = 'O'
    starts: list[StateId] = Field(default_factory=list)

    def to_spec(self) -> GridWorldSpec:
        return GridWorldSpec(
            width=self.width,
            height=self.height,
            noise=self.noise,
            regions={name: frozenset(cells) for name, cells in self.regions.items()},
            obstacles=frozenset(self.obstacles),
            walls=frozenset(frozenset(wall) for wall in self.walls),
            initial_cell=self.initial_cell,
            obstacle_prop=self.obstacle_prop,
        )


class ExactSolverConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    gamma: float = Field(default=0.9, gt=0.0, lt=1.0)
    tau: float = Field(default=2.0, gt=0.0)
    epsilon: float = Field(default=1e-3, gt=0.0)
    alpha: float = Field(default=1.0, gt=0.0)
    operator: Literal['softmax', 'hardmax'] = 'softmax'
    sense: Literal['max', 'min'] = 'max'
    convention: Literal['reward', 'boundary'] = 'reward'
    stop_rule: Literal['residual', 'value'] = 'residual'
    max_sweeps: int = Field(default=100_000, gt=0)

    @classmethod
    def from_settings(cls, settings: Settings, **overrides: Any) -> ExactSolverConfig:
        values = {
            'gamma': settings.planner_gamma,
            'tau': settings.planner_tau,
            'epsilon': settings.planner_epsilon,
            'alpha': settings.planner_alpha,
            'max_sweeps': settings.planner_max_sweeps,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


class TadpConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    gamma: float = Field(default=0.9, gt=0.0, lt=1.0)
    tau: float = Field(default=2.0, gt=0.0)
    epsilon: float = Field(default=1e-3, gt=0.0)
    alpha: float = Field(default=60.0, gt=0.0)
    b: float = Field(default=1.5, ge=1.0)
    eta: float = Field(default=0.1, gt=0.0)
    nu0: float = Field(default=2.0, gt=0.0)
    lambda0: float = Field(default=0.0, ge=0.0)
    nu_max: float = Field(default=1e3, gt=0.0)
    n_trajectories: int = Field(default=30, gt=0)
    max_traj_len: int = Field(default=3, gt=0)
    sigma: float = Field(default=1.0, gt=0.0)
    center_interval: int = Field(default=1, gt=0)
    seed: int = 0
    max_inner: int = Field(default=40, gt=0)
    max_outer: int = Field(default=50, gt=0)
    theta_bound: float = Field(default=1e6, gt=0.0)
    max_grad_norm: float | None = Field(default=None, gt=0.0)
    eta_decay: float = Field(default=0.0, ge=0.0)
    successor_samples: int = Field(default=20, gt=0)
    estimator: Literal['trajectories', 'uniform'] = 'trajectories'
    boundary_mode: Literal['value', 'reward'] = 'value'
    theta_init: float = 0.0
    stabilize_window: int = Field(default=50, gt=0)
    tracked_states: list[StateId] = Field(default_factory=list)

    @classmethod
    def default(cls, **overrides: Any) -> TadpConfig:
        """Baseline hyperparameters."""
        return cls(**overrides)

    @classmethod
    def early(cls, **overrides: Any) -> TadpConfig:
        """Earlier hyperparameter set, meant for the noise 0.1 worlds."""
        values: dict[str, Any] = {'b': 1.1, 'nu0': 1.0, 'sigma': 3.0, 'center_interval': 2, 'alpha': 40.0}
        values.update(overrides)
        return cls(**values)

    def to_parameters(self, modes: Sequence[str] = ()) -> TadpParameters:
        tracked = tuple(state_from_id(item, modes) for item in self.tracked_states)
        return TadpParameters(
            gamma=self.gamma,
            tau=self.tau,
            epsilon=self.epsilon,
            alpha=self.alpha,
            b=self.b,
            eta=self.eta,
            nu0=self.nu0,
            lambda0=self.lambda0,
            nu_max=max(self.nu_max, self.nu0),
            n_trajectories=self.n_trajectories,
            max_traj_len=self.max_traj_len,
            seed=self.seed,
            max_inner=self.max_inner,
            max_outer=self.max_outer,
            theta_bound=self.theta_bound,
            max_grad_norm=self.max_grad_norm,
            eta_decay=self.eta_decay,
            successor_samples=self.successor_samples,
            estimator=self.estimator,
            boundary_mode=self.boundary_mode,
            theta_init=self.theta_init,
            stabilize_window=self.stabilize_window,
            tracked_states=tracked,
        )


TADP_PRESETS = {'default': TadpConfig.default, 'early': TadpConfig.early}


class RolloutConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    n_runs: int = Field(default=500, ge=0)
    step_cap: int = Field(default=500, gt=0)
    seed: int = 0
    start: StateId | None = None


class DecomposeRequest(BaseModel):
    dfa: str = Field(min_length=1)
    grid: GridWorldConfig
    dependency: Literal['mdp', 'automaton'] = 'mdp'


class SolveRequest(BaseModel):
    dfa: str = Field(min_length=1)
    grid: GridWorldConfig
    solver: Literal['vi', 'tvi'] = 'tvi'
    config: ExactSolverConfig | None = None


def sorted_modes(modes: Sequence[str]) -> tuple[str, ...]:
    return tuple(sorted(modes, key=mode_sort_key))


def state_from_id(state_id: Sequence[int], modes: Sequence[str]) -> ProductState:
    """``(x, y, k)`` with ``k`` the 1-based position of the mode in sorted order."""
    x, y, k = (int(item) for item in state_id)
    ordered = sorted_modes(modes)
    if not 1 <= k <= len(ordered):
        raise ConfigError(f'Indice de modo fora do automato. indice={k} modos={len(ordered)}')
    return ((x, y), ordered[k - 1])


def state_payload(state: ProductState) -> list[Any]:
    """JSON form of a product state; grid cells become ``[x, y]``."""
    cell, mode = state
    return [list(cell) if isinstance(cell, tuple) else cell, mode]


def state_to_id(state: ProductState, modes: Sequence[str]) -> str:
    (x, y), mode = state
    return f'({x},{y},{sorted_modes(modes).index(mode) + 1})'


def parse_state_arg(text: str, modes: Sequence[str]) -> ProductState:
    """Parse ``x,y,mode`` where mode is a mode name or its 1-based index."""
    parts = [part.strip() for part in text.strip().strip('()').split(',')]
    if len(parts) != 3:
        raise ConfigError(f'Estado invalido; use x,y,modo. valor={text!r}')
    try:
        x, y = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ConfigError(f'Coordenadas invalidas. valor={text!r}') from exc
    if parts[2] in modes:
        return ((x, y), parts[2])
    try:
        return state_from_id((x, y, int(parts[2])), modes)
    except ValueError as exc:
        raise ConfigError(f'Modo desconhecido. valor={text!r}') from exc


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    location = '.'.join(str(item) for item in error.get('loc', ()))
    return f'{location}: {error.get("msg", "valor invalido")}'


def validate_decompose_payload(payload: Any) -> DecomposeRequest:
    if not isinstance(payload, dict):
        raise ApiValidationError(400, 'Corpo da requisicao invalido.', 'INVALID_REQUEST')
    if not isinstance(payload.get('dfa'), str) or not payload['dfa'].strip():
        raise ApiValidationError(400, 'Automato ausente ou vazio.', 'INVALID_DFA')
    if not isinstance(payload.get('grid'), dict):
        raise ApiValidationError(400, 'Grid ausente ou invalido.', 'INVALID_GRID')
    try:
        return DecomposeRequest.model_validate(payload)
    except ValidationError as exc:
        raise ApiValidationError(400, f'Requisicao invalida. {_first_error(exc)}', 'INVALID_REQUEST') from exc


def validate_solve_payload(payload: Any) -> SolveRequest:
    if not isinstance(payload, dict):
        raise ApiValidationError(400, 'Corpo da requisicao invalido.', 'INVALID_REQUEST')
    if payload.get('solver', 'tvi') not in ('vi', 'tvi'):
        raise ApiValidationError(400, 'Solver invalido; use vi ou tvi.', 'INVALID_SOLVER')
    if not isinstance(payload.get('dfa'), str) or not payload['dfa'].strip():
        raise ApiValidationError(400, 'Automato ausente ou vazio.', 'INVALID_DFA')
    if not isinstance(payload.get('grid'), dict):
        raise ApiValidationError(400, 'Grid ausente ou invalido.', 'INVALID_GRID')
    try:
        return SolveRequest.model_validate(payload)
    except ValidationError as exc:
        raise ApiValidationError(400, f'Requisicao invalida. {_first_error(exc)}', 'INVALID_REQUEST') from exc
