"""Deep reward environment.

A deterministic graph rooted at an initial state. The first ``n_good``
actions enter good paths of configurable length; the remaining ``m_bad``
actions lead to an absorbing bad state. On good path ``i`` only action
``i - 1`` keeps the agent on the path. The end of the longest path leads to
an absorbing goal state; the end of any shorter path is a trap leading to the
bad state. Every state but the bad state emits the pleasant observation.

State layout: 0 initial, 1 bad, 2 goal, then the states of path 1 in depth
order, then path 2, and so on.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .agent import BAD, GOAL, ONGOING
from .errors import ConfigError, ContractViolationError

INITIAL_STATE = 0
BAD_STATE = 1
GOAL_STATE = 2
PLEASANT = 0
UNPLEASANT = 1


@dataclass(frozen=True)
class DeepRewardConfig:
    n_good: int
    m_bad: int
    lengths: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(int(x) for x in self.lengths))
        if self.n_good < 1:
            raise ConfigError("at least one good path is required", key="n_good")
        if self.m_bad < 1:
            raise ConfigError("at least one bad action is required", key="m_bad")
        if len(self.lengths) != self.n_good:
            raise ConfigError(
                f"expected {self.n_good} path lengths, got {len(self.lengths)}", key="lengths"
            )
        if any(x < 1 for x in self.lengths):
            raise ConfigError("path lengths must be positive", key="lengths")
        if self.lengths.count(max(self.lengths)) > 1:
            warnings.warn(
                f"several good paths share the maximal length {max(self.lengths)}; "
                "all of them lead to the goal state",
                stacklevel=3,
            )

    @property
    def n_states(self) -> int:
        return 3 + sum(self.lengths)

    @property
    def n_actions(self) -> int:
        return self.n_good + self.m_bad

    @property
    def longest_path(self) -> int:
        """1-based index of the first longest good path."""
        return self.lengths.index(max(self.lengths)) + 1


def state_index(config: DeepRewardConfig, which: str, i: int | None = None, j: int | None = None) -> int:
    """Integer index of ``"initial"``, ``"bad"``, ``"goal"`` or ``"path"`` state ``(i, j)``.

    Path coordinates are 1-based: ``i`` selects the good path and ``j`` the
    depth along it.
    """
    if which == "initial":
        return INITIAL_STATE
    if which == "bad":
        return BAD_STATE
    if which == "goal":
        return GOAL_STATE
    if which != "path":
        raise ContractViolationError(f"unknown state kind {which!r}")
    if i is None or j is None or not 1 <= i <= config.n_good or not 1 <= j <= config.lengths[i - 1]:
        raise ContractViolationError(f"path coordinates ({i}, {j}) out of range for {config.lengths}")
    return 3 + sum(config.lengths[: i - 1]) + (j - 1)


def _successor_table(config: DeepRewardConfig) -> np.ndarray:
    """``table[s, u]`` is the state reached from ``s`` under action ``u``."""
    n, U = config.n_good, config.n_actions
    longest = max(config.lengths)
    table = np.empty((config.n_states, U), dtype=np.int64)
    table[BAD_STATE] = BAD_STATE
    table[GOAL_STATE] = GOAL_STATE
    for u in range(U):
        table[INITIAL_STATE, u] = state_index(config, "path", u + 1, 1) if u < n else BAD_STATE
    for i, length in enumerate(config.lengths, start=1):
        for j in range(1, length + 1):
            s = state_index(config, "path", i, j)
            if j < length:
                table[s] = BAD_STATE
                table[s, i - 1] = state_index(config, "path", i, j + 1)
            else:
                table[s] = GOAL_STATE if length == longest else BAD_STATE
    return table


def _observation_of(state: int) -> int:
    return UNPLEASANT if state == BAD_STATE else PLEASANT


def build_model(config: DeepRewardConfig, preference_strength: float = 0.9, invert_preferences: bool = False):
    """Exact ``(A, B, C, D)`` tensors for ``config``.

    ``C`` puts ``preference_strength`` on the pleasant observation, or on the
    unpleasant one when ``invert_preferences`` is set.
    """
    if not 0.5 < preference_strength < 1:
        raise ConfigError(
            f"must lie strictly between 0.5 and 1, got {preference_strength!r}", key="preference_strength"
        )
    S, U = config.n_states, config.n_actions
    A = np.zeros((2, S))
    A[PLEASANT] = 1.0
    A[:, BAD_STATE] = (0.0, 1.0)

    table = _successor_table(config)
    B = np.zeros((S, S, U))
    src, act = np.meshgrid(np.arange(S), np.arange(U), indexing="ij")
    B[table, src, act] = 1.0

    C = np.array([preference_strength, 1.0 - preference_strength])
    if invert_preferences:
        C = C[::-1].copy()
    D = np.zeros(S)
    D[INITIAL_STATE] = 1.0
    return A, B, C, D


@dataclass(frozen=True)
class EnvState:
    current: int
    status: str


def _status_of(state: int) -> str:
    if state == GOAL_STATE:
        return GOAL
    if state == BAD_STATE:
        return BAD
    return ONGOING


class DeepRewardEnv:
    """Deterministic simulator sharing its transition table with :func:`build_model`."""

    n_observations = 2

    def __init__(self, config: DeepRewardConfig):
        self.config = config
        self.n_actions = config.n_actions
        self._table = _successor_table(config)
        self.state = EnvState(INITIAL_STATE, ONGOING)

    @property
    def status(self) -> str:
        return self.state.status

    def reset(self) -> tuple[EnvState, int]:
        self.state = EnvState(INITIAL_STATE, ONGOING)
        return self.state, _observation_of(INITIAL_STATE)

    def execute(self, action: int) -> tuple[EnvState, int]:
        if not 0 <= action < self.n_actions:
            raise ContractViolationError(f"action {action} out of range [0, {self.n_actions})")
        nxt = int(self._table[self.state.current, action])
        self.state = EnvState(nxt, _status_of(nxt))
        return self.state, _observation_of(nxt)
