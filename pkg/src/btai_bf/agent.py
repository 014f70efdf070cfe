"""Action-perception cycle.

The agent keeps a single belief vector over the current hidden state. Each
cycle it grows a fresh planning tree from that belief, executes the root
action with the lowest average expected free energy, and folds the resulting
observation back in with one predict-then-update filtering step.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from . import _accel
from ._kernels import plan_iterations
from .categorical import (
    as_categorical,
    as_likelihood,
    as_transition,
    bayes_update,
    predict_state,
)
from .errors import ConfigError, ContractViolationError
from .tree import (
    PlannerConfig,
    PlanningTree,
    TreeNode,
    _backpropagate,
    _expand,
    _select,
    best_action,
    preprocess,
)

GOAL = "goal"
BAD = "bad"
ONGOING = "ongoing"
TIMEOUT = "timeout"


@dataclass(frozen=True, eq=False)
class AgentModel:
    """Generative model and planner settings.

    ``A`` is ``|O| x |S|``, ``B`` is ``|S| x |S| x |U|``, ``C`` the preferred
    observation distribution (strictly positive) and ``D`` the prior over the
    initial state.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    planner: PlannerConfig = field(default_factory=PlannerConfig)

    def __post_init__(self):
        A = as_likelihood(self.A, "A")
        B = as_transition(self.B, "B")
        C = as_categorical(self.C, "C")
        D = as_categorical(self.D, "D")
        n_obs, n_states = A.shape
        if B.shape[0] != n_states:
            raise ContractViolationError(f"B has {B.shape[0]} states but A has {n_states}")
        if C.size != n_obs:
            raise ContractViolationError(f"C has length {C.size} but A has {n_obs} observations")
        if D.size != n_states:
            raise ContractViolationError(f"D has length {D.size} but A has {n_states} states")
        if np.any(C <= 0):
            raise ContractViolationError("C must be strictly positive")
        for name, value in zip("ABCD", (A, B, C, D)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "_planning_arrays", preprocess(A, B, C))

    @property
    def n_states(self) -> int:
        return self.A.shape[1]

    @property
    def n_observations(self) -> int:
        return self.A.shape[0]

    @property
    def n_actions(self) -> int:
        return self.B.shape[2]

    def tree_capacity(self) -> int:
        return 1 + self.planner.planning_iterations * self.n_actions

    def new_root(self, beliefs, action: int = -1) -> TreeNode:
        tree = PlanningTree(beliefs, self.n_actions, capacity=self.tree_capacity(), root_action=action)
        return tree.root


@dataclass(frozen=True)
class CycleRecord:
    cycle_index: int
    observation: int
    chosen_action: int
    root_beliefs: np.ndarray
    planning_duration: float


@dataclass
class TrialResult:
    outcome: str
    cycles: int
    actions: list[int]
    records: list[CycleRecord]

    @property
    def planning_time(self) -> float:
        return sum(r.planning_duration for r in self.records)


class Environment(Protocol):
    n_actions: int
    n_observations: int

    def reset(self) -> tuple[object, int]: ...

    def execute(self, action: int) -> tuple[object, int]: ...

    @property
    def status(self) -> str: ...


def perceive_initial(model: AgentModel, obs_0: int) -> TreeNode:
    """Root of the first planning tree: the prior ``D`` conditioned on ``obs_0``."""
    return model.new_root(bayes_update(obs_0, model.A, model.D))


def plan(model: AgentModel, root: TreeNode, backend: str | None = None) -> int:
    """Run the configured number of planning iterations and pick an action.

    ``backend`` overrides the process-wide default (``BTAI_BF_BACKEND``).
    Both backends grow identical trees.
    """
    backend = _accel.resolve_backend(backend)
    if root.index != 0:
        raise ContractViolationError("planning must start from a tree root")
    tree = root.tree
    n_iter = model.planner.planning_iterations
    c_explore = float(model.planner.exploration_constant)
    B_by_action, A, log_C, state_entropy = model._planning_arrays
    tree.reserve(tree.size + n_iter * tree.n_actions)
    if backend == _accel.NUMBA:
        size, action = plan_iterations(
            B_by_action, A, log_C, state_entropy, c_explore, n_iter,
            tree.beliefs, tree.action, tree.cost, tree.visits, tree.parent, tree.first_child, tree.size,
        )
        tree.size = size
        return action
    for _ in range(n_iter):
        node = _select(tree, c_explore)
        _expand(tree, node, B_by_action, A, log_C, state_entropy)
        _backpropagate(tree, node)
    return best_action(root)


def transition_root(model: AgentModel, old_root: TreeNode, action: int, new_obs: int) -> TreeNode:
    """Fresh root after acting: predict through ``B[:, :, action]`` then condition on ``new_obs``."""
    if not 0 <= action < model.n_actions:
        raise ContractViolationError(f"action {action} out of range [0, {model.n_actions})")
    empirical_prior = predict_state(model.B[:, :, action], old_root.beliefs)
    return model.new_root(bayes_update(new_obs, model.A, empirical_prior), action=action)


def run_trial(
    model: AgentModel,
    env: Environment,
    max_cycles: int = 20,
    backend: str | None = None,
    on_plan: Callable[[int, TreeNode], None] | None = None,
) -> TrialResult:
    """Run action-perception cycles until the environment terminates or ``max_cycles`` is hit.

    ``on_plan(cycle_index, root)`` is called after each planning phase, before
    the tree is discarded.
    """
    if env.n_actions != model.n_actions or env.n_observations != model.n_observations:
        raise ConfigError(
            f"environment has {env.n_actions} actions / {env.n_observations} observations, "
            f"model has {model.n_actions} / {model.n_observations}"
        )
    if max_cycles < 0:
        raise ConfigError("max_cycles must be nonnegative", key="max_cycles")
    backend = _accel.resolve_backend(backend)

    _, obs = env.reset()
    root = perceive_initial(model, obs)
    actions: list[int] = []
    records: list[CycleRecord] = []
    for cycle in range(max_cycles):
        if env.status != ONGOING:
            break
        start = time.perf_counter()
        action = plan(model, root, backend=backend)
        duration = time.perf_counter() - start
        if on_plan is not None:
            on_plan(cycle, root)
        _, obs = env.execute(action)
        root = transition_root(model, root, action, obs)
        actions.append(action)
        records.append(CycleRecord(cycle, obs, action, root.beliefs.copy(), duration))

    status = env.status
    outcome = status if status in (GOAL, BAD) else TIMEOUT
    return TrialResult(outcome, len(actions), actions, records)
